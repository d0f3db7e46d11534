#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "conical/geometry.hpp"

namespace conical {

// Lazily generated sequence of interior points, indexed 1..n_max.
class PointSequence {
 public:
  using Generator = std::function<ModelPoint(std::size_t)>;
  using Callback = std::function<void(std::size_t, const ModelPoint&)>;
  using Visitor = std::function<void(std::size_t, const Callback&)>;

  PointSequence() = default;
  PointSequence(Model model, int dim, std::size_t n_max, Generator gen);
  // A sequence that is cheaper to walk in order than to index; `at` falls back to walking.
  PointSequence(Model model, int dim, std::size_t n_max, Visitor visit);

  static PointSequence from_points(std::vector<ModelPoint> pts);

  Model model() const { return model_; }
  int dim() const { return dim_; }
  std::size_t size() const { return n_max_; }

  ModelPoint at(std::size_t n) const;
  // Calls fn(n, w_n) for n = 1..N in order.
  void visit(std::size_t N, const Callback& fn) const;
  std::vector<ModelPoint> take(std::size_t N) const;

 private:
  Model model_ = Model::Ball;
  int dim_ = 0;
  std::size_t n_max_ = 0;
  Generator gen_;
  Visitor visit_;
};

// Image of a sequence under a pointwise map.
PointSequence map_sequence(const PointSequence& seq, std::function<ModelPoint(const ModelPoint&)> f);

// First index of the final quarter [ceil(3N/4), N].
std::size_t final_quarter_start(std::size_t N);

// Number of worker threads: CONICAL_LAB_THREADS if set, else hardware concurrency.
int worker_threads();

bool is_escaping(const PointSequence& seq, std::size_t N, double R);

// Terms with t_n < 1/(1 + |v_n|); throws EmptyResult when none qualify.
PointSequence reduce_to_standard(const PointSequence& seq, std::size_t N);

enum class Verdict { Accepted, Rejected, Undecided };
const char* verdict_name(Verdict v);

struct ConicalVerdict {
  IdealPoint point;
  Verdict status = Verdict::Undecided;
  std::optional<double> alpha_min;
  int witness_count = 0;        // at the largest alpha
  std::vector<Verdict> per_alpha;  // Accepted or Undecided/Rejected at each tested alpha
};

struct ConicalParams {
  std::vector<double> alphas;
  int K = 5;
  std::optional<double> R;  // default sqrt(3) * max(alphas)
  std::size_t N = 0;
  double tie_band = 1e-6;
};

std::vector<ConicalVerdict> conical_estimate(const PointSequence& seq, const std::vector<IdealPoint>& samples,
                                             const ConicalParams& params);
std::vector<ConicalVerdict> conical_estimate(const PointSequence& seq, const std::vector<IdealPoint>& samples,
                                             const std::vector<double>& alphas, int K, std::optional<double> R,
                                             std::size_t N);

// Nearest ideal point: w/|w| in the ball, the foot v in the half-space.
IdealPoint boundary_projection(const ModelPoint& w);

std::vector<bool> limit_set_estimate(const PointSequence& seq, const std::vector<IdealPoint>& samples, double tol,
                                     std::size_t N, int K = 5);

double hausdorff(const std::vector<ModelPoint>& E, const std::vector<ModelPoint>& F);

void write_verdicts_csv(std::ostream& os, const std::vector<ConicalVerdict>& verdicts);

}  // namespace conical
