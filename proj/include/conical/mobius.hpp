#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "conical/geometry.hpp"
#include "json.hpp"

namespace conical {

using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

// Primitive generators, all acting on ball-model coordinates.
struct HyperplaneReflection {
  Vec u;  // unit normal, hyperplane through 0
};
struct SphereInversion {
  Vec c;  // |c|^2 = 1 + r^2, so the sphere is orthogonal to the unit sphere
  double r;
};
struct OrthogonalMap {
  Mat Q;
};
struct BallTransvection {
  Vec a;  // sends a to 0
};

using Primitive = std::variant<HyperplaneReflection, SphereInversion, OrthogonalMap, BallTransvection>;

// Word of primitives, applied first to last.
class Isometry {
 public:
  static constexpr std::size_t kCompactThreshold = 10000;

  Isometry() = default;
  explicit Isometry(int dim) : dim_(dim) {}
  Isometry(int dim, std::vector<Primitive> word);

  static Isometry identity(int dim) { return Isometry(dim); }
  static Isometry reflection(const Vec& u);
  static Isometry inversion(const Vec& c, double r);
  static Isometry orthogonal(const Mat& Q);
  static Isometry transvection(const Vec& a);

  int dim() const { return dim_; }
  int orientation() const;
  const std::vector<Primitive>& word() const { return word_; }

  // Action on ball coordinates (interior or boundary).
  Vec act(const Vec& x) const;

 private:
  int dim_ = 0;
  std::vector<Primitive> word_;
};

// compose(G, H) = G o H
Isometry compose(const Isometry& G, const Isometry& H);
Isometry invert(const Isometry& G);
Isometry compact(const Isometry& G);

ModelPoint apply(const Isometry& G, const ModelPoint& p);
IdealPoint apply(const Isometry& G, const IdealPoint& x);

// Probe-set equality: agreement on 20 fixed pseudo-random interior points.
bool same_action(const Isometry& G, const Isometry& H, double tol = 1e-10);

// ---------------------------------------------------------------------------
// 2x2 fast path for dims 2 and 3 (half-space model, boundary R or C)

struct Matrix2 {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
  int since_normalize = 0;

  cplx det() const { return a * d - b * c; }
};

Matrix2 normalized(const Matrix2& M);
Matrix2 operator*(const Matrix2& A, const Matrix2& B);
Matrix2 inverse(const Matrix2& M);

// Extended complex plane point.
struct ExtComplex {
  cplx z{0.0};
  bool inf = false;
};

ExtComplex mobius_apply(const Matrix2& M, const ExtComplex& z);
double chordal(const ExtComplex& x, const ExtComplex& y);

// Poincare extension to the upper half-space; p must be a half-space point of dim 2 or 3.
ModelPoint psl2_apply(const Matrix2& M, const ModelPoint& p);

Isometry from_matrix2(const Matrix2& M, int dim);

// ---------------------------------------------------------------------------
// constructions

// Orientation-preserving U with U(z) = 0, U(e) = x, U(-e) = y in the ball model.
Isometry lemma_orthogonal_map(const ModelPoint& z, const IdealPoint& x, const IdealPoint& y, double tol = 1e-9);

// Conjugates of a rotation net by T_x; every element fixes x.
std::vector<Isometry> stabilizer_net(const ModelPoint& x, int n);

// Max over sampled boundary points y and targets of the distance from the target to {M_i(y)}.
double net_coverage(const std::vector<Isometry>& net, int dim);

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const Isometry& G);
void from_json(const nlohmann::json& j, Isometry& G);
void to_json(nlohmann::json& j, const Matrix2& M);
void from_json(const nlohmann::json& j, Matrix2& M);

}  // namespace conical
