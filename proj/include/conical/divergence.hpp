#pragma once

#include <memory>
#include <optional>
#include <ostream>

#include "conical/limits.hpp"
#include "conical/mobius.hpp"

namespace conical {

class MobiusSequence {
 public:
  using Generator = std::function<Isometry(std::size_t)>;

  MobiusSequence() = default;
  MobiusSequence(int dim, std::size_t n_max, Generator gen) : dim_(dim), n_max_(n_max), gen_(std::move(gen)) {}

  int dim() const { return dim_; }
  std::size_t size() const { return n_max_; }
  Isometry at(std::size_t n) const;

  // w_n = G_n^{-1}(0)
  PointSequence inverse_orbit() const;

 private:
  int dim_ = 0;
  std::size_t n_max_ = 0;
  Generator gen_;
};

struct GeneralConvergence {
  enum class Kind { Converges, No, Undecided };
  Kind kind = Kind::Undecided;
  std::optional<IdealPoint> limit;
  double diameter = 0.0;  // final-quarter Euclidean diameter of the orbit of 0
};
const char* kind_name(GeneralConvergence::Kind k);

GeneralConvergence general_convergence_test(const MobiusSequence& seq, std::size_t N, double tol = 1e-2);

enum class PointStatus { Convergent, Divergent, Undecided };
const char* status_name(PointStatus s);

struct PointClassification {
  IdealPoint point;
  PointStatus status = PointStatus::Undecided;
  std::optional<IdealPoint> limit;
  double tail_diameter = 0.0;
};

std::vector<PointClassification> classify_boundary(const MobiusSequence& seq, const std::vector<IdealPoint>& samples,
                                                   std::size_t N, double tol_lo = 1e-6, double tol_hi = 1e-2);

// Three-way tail test shared with the continued-fraction code: Convergent if the final-quarter
// diameter is below tol_lo, Divergent if every window of length ceil(N/10) in the final half
// has diameter above tol_hi.
PointStatus classify_tail(const std::vector<Vec>& orbit, double tol_lo, double tol_hi, double* tail_diameter);

struct AebischerReport {
  IdealPoint limit;
  std::vector<PointClassification> classes;
  std::vector<ConicalVerdict> conical;
  std::vector<char> decided, agree;
  std::size_t n_decided = 0, n_agree = 0;
  double agreement() const { return n_decided ? double(n_agree) / double(n_decided) : 1.0; }
};

struct AebischerParams {
  ConicalParams conical;
  double tol_lo = 1e-6, tol_hi = 1e-2;
  double gc_tol = 1e-2;
  double same_limit = 5e-2;  // chordal radius for "converges to the general limit"
};

AebischerReport aebischer_crosscheck(const MobiusSequence& seq, const std::vector<IdealPoint>& samples, std::size_t N,
                                     const AebischerParams& params);

// G_n = R_n o T_{z_n} with G_n^{-1}(0) = z_n and G_n(0) = |z_n| e0.
MobiusSequence from_conical_data(const PointSequence& z);

// Blocks M_{n,i} o H_n, H_n(0) = x_n, M_{n,i} from stabilizer_net(x_n, n), flattened to n_max terms.
MobiusSequence dense_divergence_generator(const PointSequence& x, std::size_t n_max);

// Built-in conical data: visit n targets targets[(n-1) mod k] at radial distance
// 1 + (s_max - 1) sqrt(n/N), offset perpendicular to the ray by +-c alternately per visit.
PointSequence zigzag_sequence(const std::vector<IdealPoint>& targets, std::size_t N, double c = 0.5,
                              double s_max = 27.0);

// Endpoints of the depth-d Cantor intervals mapped to the arc of angles [0, pi/2].
std::vector<IdealPoint> cantor_arc_points(int depth);

void write_classification_csv(std::ostream& os, const std::vector<PointClassification>& rows);

}  // namespace conical
