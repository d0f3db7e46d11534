#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "conical/divergence.hpp"
#include "conical/mobius.hpp"

namespace conical {

// K(a_n | b_n) with t_n(z) = a_n / (b_n + z) and T_n = t_1 o ... o t_n.
class ContinuedFraction {
 public:
  using Coefficients = std::function<std::pair<cplx, cplx>(std::size_t)>;

  ContinuedFraction() = default;
  explicit ContinuedFraction(Coefficients f) : coeff_(std::move(f)) {}

  static ContinuedFraction golden();       // a_n = b_n = 1
  static ContinuedFraction oscillating();  // a_n = 1, b_n = 0
  static ContinuedFraction from_pairs(std::vector<std::pair<cplx, cplx>> pairs);

  // Throws DegenerateCoefficient when a_n = 0.
  std::pair<cplx, cplx> coefficients(std::size_t n) const;

  // Matrices of T_1..T_N, each rescaled by a power of two so the chaining identity stays exact.
  std::vector<Matrix2> partial_matrices(std::size_t N) const;

 private:
  Coefficients coeff_;
};

ExtComplex cf_partial(const ContinuedFraction& cf, std::size_t n, const ExtComplex& z);

struct CfConvergence {
  PointStatus status = PointStatus::Undecided;
  std::optional<ExtComplex> value;   // classical form
  std::optional<IdealPoint> limit;   // ball form
  double tail_diameter = 0.0;        // chordal
};

// Tail test on T_n(0), n = 1..N, placed on the Riemann sphere.
CfConvergence classical_convergence(const ContinuedFraction& cf, std::size_t N, double tol_lo = 1e-6,
                                    double tol_hi = 1e-2);

// G_n = T_n acting on the 3-ball (boundary the Riemann sphere).
MobiusSequence classical_sequence(const ContinuedFraction& cf, std::size_t N);

// Stereographic image on the unit sphere of R^3; chordal distance is the Euclidean one.
Vec riemann_sphere(const ExtComplex& z);

// Ball-model sequence with T_n(e) = T_{n-1}(-e), T_0 = identity.
struct BallContinuedFraction {
  int dim = 0;
  std::vector<ModelPoint> z;   // z_1..z_n after reordering and padding
  std::vector<char> padding;   // 1 where a horocycle point was inserted
  std::vector<double> theta;   // theta_0..theta_n
  std::vector<Isometry> T;     // T_1..T_n
  double min_rho = 0.0;        // smallest rho(z, gamma) over the final quarter of the input
  std::size_t side_flips = 0;  // dimension 2: terms whose increment sign follows the side instead of parity

  std::size_t size() const { return T.size(); }
  Isometry at(std::size_t n) const;  // T_0 is the identity
  MobiusSequence sequence() const;
};

// Unit vector (cos th, sin th, 0, ..., 0) in R^dim.
Vec angle_vector(double th, int dim);

double cosh_to_gamma(const ModelPoint& z);

CfConvergence classical_convergence(const BallContinuedFraction& cf, std::size_t N, double tol_lo = 1e-6,
                                    double tol_hi = 1e-2);

struct CfconvOptions {
  double bound = 3.0;  // alpha used to detect conical approach to e or -e
  int K = 5;
};

// Reorders the first N terms by rho(z_n, gamma) and chains lemma maps with alternating
// angle increments 2 arcsin(1 / cosh rho). In dimension 2 horocycle points are inserted
// where the side condition fails; beyond cosh rho = 1e5 the increment sign is flipped instead.
BallContinuedFraction construct_cfconv(const PointSequence& z, std::size_t N, const CfconvOptions& opt = {});

// zeta_n cycles through the samples, z_n = r_n zeta_n with cosh rho(z_n, gamma) = n + 2.
BallContinuedFraction construct_prescribed_limit_set(const std::vector<IdealPoint>& samples, std::size_t N);

// Chains an already ordered list; rho(z_n, gamma) must be nondecreasing.
BallContinuedFraction chain_ordered(const std::vector<ModelPoint>& z);

}  // namespace conical
