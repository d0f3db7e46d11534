#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>

#include "conical/errors.hpp"

namespace conical {

enum class Model { Ball, HalfSpace };

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Vec = VecX<double>;

// Points closer than this to the ball model's boundary sphere are rejected.
inline constexpr double kBoundaryGuard = 1e-12;

// Interior point. Ball: |coords| < 1. HalfSpace: coords = (t, v) with t > 0.
template <typename Scalar>
struct ModelPointT {
  Model model = Model::Ball;
  VecX<Scalar> coords;

  int dim() const { return static_cast<int>(coords.size()); }
  Scalar t() const { return coords(0); }
  auto v() const { return coords.tail(coords.size() - 1); }
};

// Boundary point. Ball: unit vector in R^dim. HalfSpace: vector in R^(dim-1) or infinity.
template <typename Scalar>
struct IdealPointT {
  Model model = Model::Ball;
  int ambient = 0;
  VecX<Scalar> coords;
  bool infinite = false;

  int dim() const { return ambient; }
};

using ModelPoint = ModelPointT<double>;
using IdealPoint = IdealPointT<double>;

template <typename Scalar>
Scalar acosh1p(Scalar x) {
  using std::log1p;
  using std::sqrt;
  return log1p(x + sqrt(x * (x + Scalar(2))));
}

// ---------------------------------------------------------------------------
// construction

template <typename Derived>
ModelPointT<typename Derived::Scalar> ball_point(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  if (x.size() < 2) throw Error(ErrorKind::InvalidPoint, "dimension must be at least 2");
  if (!(x.norm() < S(1) - S(kBoundaryGuard)))
    throw Error(ErrorKind::InvalidPoint, "ball point on or outside the boundary guard");
  return {Model::Ball, x.derived()};
}

template <typename Derived>
ModelPointT<typename Derived::Scalar> half_point(const Eigen::MatrixBase<Derived>& y) {
  using S = typename Derived::Scalar;
  if (y.size() < 2) throw Error(ErrorKind::InvalidPoint, "dimension must be at least 2");
  if (!(y(0) > S(0)) || !std::isfinite(static_cast<double>(y(0))))
    throw Error(ErrorKind::InvalidPoint, "half-space height must be positive");
  return {Model::HalfSpace, y.derived()};
}

template <typename Scalar, typename Derived>
ModelPointT<Scalar> half_point(Scalar t, const Eigen::MatrixBase<Derived>& v) {
  VecX<Scalar> y(v.size() + 1);
  y(0) = t;
  y.tail(v.size()) = v;
  return half_point(y);
}

template <typename Derived>
IdealPointT<typename Derived::Scalar> ball_ideal(const Eigen::MatrixBase<Derived>& u) {
  using S = typename Derived::Scalar;
  using std::abs;
  if (u.size() < 2) throw Error(ErrorKind::InvalidPoint, "dimension must be at least 2");
  if (!(abs(u.norm() - S(1)) < S(kBoundaryGuard)))
    throw Error(ErrorKind::InvalidPoint, "ball ideal point must be a unit vector");
  return {Model::Ball, static_cast<int>(u.size()), u.derived(), false};
}

template <typename Derived>
IdealPointT<typename Derived::Scalar> half_ideal(const Eigen::MatrixBase<Derived>& v) {
  return {Model::HalfSpace, static_cast<int>(v.size()) + 1, v.derived(), false};
}

template <typename Scalar = double>
IdealPointT<Scalar> half_infinity(int ambient) {
  return {Model::HalfSpace, ambient, VecX<Scalar>::Zero(ambient - 1), true};
}

// The distinguished interior point: 0 in the ball, e0 in the half-space.
template <typename Scalar = double>
ModelPointT<Scalar> origin(Model model, int dim) {
  VecX<Scalar> c = VecX<Scalar>::Zero(dim);
  if (model == Model::HalfSpace) c(0) = Scalar(1);
  return {model, c};
}

// ---------------------------------------------------------------------------
// model conversion: inversion in the sphere about -e0 of radius sqrt(2)

namespace detail {

// sigma(y) = -e0 + 2 (y + e0) / |y + e0|^2, written to keep x0 accurate near the boundary.
template <typename Derived>
VecX<typename Derived::Scalar> sigma(const Eigen::MatrixBase<Derived>& y) {
  using S = typename Derived::Scalar;
  VecX<S> shifted = y;
  shifted(0) += S(1);
  const S n2 = shifted.squaredNorm();
  VecX<S> out = S(2) * y / n2;
  out(0) = (S(1) - y.squaredNorm()) / n2;
  return out;
}

}  // namespace detail

template <typename Scalar>
ModelPointT<Scalar> to_half(const ModelPointT<Scalar>& p) {
  if (p.model == Model::HalfSpace) return p;
  VecX<Scalar> y = detail::sigma(p.coords);
  // 1 - |x|^2 is the accurate numerator of the height
  Scalar n2 = (p.coords + VecX<Scalar>::Unit(p.dim(), 0)).squaredNorm();
  y(0) = (Scalar(1) - p.coords.norm()) * (Scalar(1) + p.coords.norm()) / n2;
  return {Model::HalfSpace, y};
}

template <typename Scalar>
ModelPointT<Scalar> to_ball(const ModelPointT<Scalar>& p) {
  if (p.model == Model::Ball) return p;
  return {Model::Ball, detail::sigma(p.coords)};
}

template <typename Scalar>
IdealPointT<Scalar> to_half(const IdealPointT<Scalar>& x) {
  if (x.model == Model::HalfSpace) return x;
  const int m = x.ambient;
  VecX<Scalar> shifted = x.coords;
  shifted(0) += Scalar(1);
  const Scalar n2 = shifted.squaredNorm();
  if (n2 < Scalar(1e-30)) return half_infinity<Scalar>(m);
  return {Model::HalfSpace, m, VecX<Scalar>(Scalar(2) * x.coords.tail(m - 1) / n2), false};
}

template <typename Scalar>
IdealPointT<Scalar> to_ball(const IdealPointT<Scalar>& x) {
  if (x.model == Model::Ball) return x;
  const int m = x.ambient;
  VecX<Scalar> u = VecX<Scalar>::Zero(m);
  if (x.infinite) {
    u(0) = Scalar(-1);
  } else {
    const Scalar s = Scalar(1) + x.coords.squaredNorm();
    u(0) = (Scalar(1) - x.coords.squaredNorm()) / s;
    u.tail(m - 1) = Scalar(2) * x.coords / s;
  }
  return {Model::Ball, m, u, false};
}

template <typename Scalar>
ModelPointT<Scalar> to_model(const ModelPointT<Scalar>& p, Model m) {
  return m == Model::Ball ? to_ball(p) : to_half(p);
}

template <typename Scalar>
IdealPointT<Scalar> to_model(const IdealPointT<Scalar>& x, Model m) {
  return m == Model::Ball ? to_ball(x) : to_half(x);
}

template <typename Scalar>
ModelPointT<Scalar> convert_model(const ModelPointT<Scalar>& p) {
  return p.model == Model::Ball ? to_half(p) : to_ball(p);
}

template <typename Scalar>
IdealPointT<Scalar> convert_model(const IdealPointT<Scalar>& x) {
  return x.model == Model::Ball ? to_half(x) : to_ball(x);
}

// ---------------------------------------------------------------------------
// distances

// cosh(rho) - 1, the numerically useful quantity
template <typename Scalar>
Scalar cosh_dist_m1(const ModelPointT<Scalar>& p, const ModelPointT<Scalar>& q0) {
  if (p.dim() != q0.dim()) throw Error(ErrorKind::InvalidPoint, "dimension mismatch");
  const ModelPointT<Scalar> q = to_model(q0, p.model);
  const Scalar d2 = (p.coords - q.coords).squaredNorm();
  if (p.model == Model::Ball) {
    const Scalar np = p.coords.norm(), nq = q.coords.norm();
    const Scalar fp = (Scalar(1) - np) * (Scalar(1) + np), fq = (Scalar(1) - nq) * (Scalar(1) + nq);
    return Scalar(2) * d2 / (fp * fq);
  }
  return d2 / (Scalar(2) * (p.t() * q.t()));
}

template <typename Scalar>
Scalar dist(const ModelPointT<Scalar>& p, const ModelPointT<Scalar>& q) {
  return acosh1p(cosh_dist_m1(p, q));
}

template <typename Scalar>
Scalar chordal(const IdealPointT<Scalar>& x, const IdealPointT<Scalar>& y) {
  if (x.ambient != y.ambient) throw Error(ErrorKind::InvalidPoint, "dimension mismatch");
  return (to_ball(x).coords - to_ball(y).coords).norm();
}

// ---------------------------------------------------------------------------
// geodesics

template <typename Scalar>
struct GeodesicT {
  enum class Kind { Line, Ray, Segment };
  Kind kind = Kind::Line;
  ModelPointT<Scalar> p, q;  // Ray: p; Segment: p, q
  IdealPointT<Scalar> a, b;  // Line: a, b; Ray: a
};
using Geodesic = GeodesicT<double>;

template <typename Scalar>
GeodesicT<Scalar> line(const IdealPointT<Scalar>& a, const IdealPointT<Scalar>& b) {
  if (!(chordal(a, b) > Scalar(1e-12))) throw Error(ErrorKind::InvalidPoint, "geodesic endpoints coincide");
  GeodesicT<Scalar> g;
  g.kind = GeodesicT<Scalar>::Kind::Line;
  g.a = a;
  g.b = b;
  return g;
}

template <typename Scalar>
GeodesicT<Scalar> ray(const ModelPointT<Scalar>& p, const IdealPointT<Scalar>& a) {
  GeodesicT<Scalar> g;
  g.kind = GeodesicT<Scalar>::Kind::Ray;
  g.p = p;
  g.a = a;
  return g;
}

template <typename Scalar>
GeodesicT<Scalar> segment(const ModelPointT<Scalar>& p, const ModelPointT<Scalar>& q) {
  if (!(dist(p, q) > Scalar(1e-12))) throw Error(ErrorKind::InvalidPoint, "segment endpoints coincide");
  GeodesicT<Scalar> g;
  g.kind = GeodesicT<Scalar>::Kind::Segment;
  g.p = p;
  g.q = q;
  return g;
}

namespace detail {

// Inversion in the unit sphere about the boundary point (0, c) of the half-space.
template <typename Scalar>
ModelPointT<Scalar> invert_at(const VecX<Scalar>& c, const ModelPointT<Scalar>& x) {
  VecX<Scalar> y = x.coords;
  y.tail(c.size()) -= c;
  y /= y.squaredNorm();
  y.tail(c.size()) += c;
  return {Model::HalfSpace, y};
}

template <typename Scalar>
IdealPointT<Scalar> invert_at(const VecX<Scalar>& c, const IdealPointT<Scalar>& x) {
  if (x.infinite) return {Model::HalfSpace, x.ambient, c, false};
  VecX<Scalar> d = x.coords - c;
  const Scalar n2 = d.squaredNorm();
  if (n2 == Scalar(0)) return half_infinity<Scalar>(x.ambient);
  return {Model::HalfSpace, x.ambient, VecX<Scalar>(c + d / n2), false};
}

// Reflection of the ball sending the unit vector u to -e0, which the half-space sends to infinity.
template <typename Scalar>
auto reflect_to_infinity(const VecX<Scalar>& u) {
  VecX<Scalar> h = u;
  h(0) += Scalar(1);
  const Scalar n2 = h.squaredNorm();
  return [h, n2](const VecX<Scalar>& x) -> VecX<Scalar> {
    if (n2 < Scalar(1e-30)) return x;
    return x - (Scalar(2) * x.dot(h) / n2) * h;
  };
}

// min over s in [lo, hi] of rho((t, v), (e^s, base)) by golden-section search
template <typename Scalar>
Scalar min_dist_vertical(const ModelPointT<Scalar>& x, const VecX<Scalar>& base, Scalar lo, Scalar hi) {
  using std::exp;
  using std::log;
  const Scalar t = x.t();
  const Scalar r2 = (x.v() - base).squaredNorm();
  auto f = [&](Scalar s) {
    const Scalar h = exp(s);
    return acosh1p(((t - h) * (t - h) + r2) / (Scalar(2) * t * h));
  };
  using std::sqrt;
  const Scalar blo = log(t) - Scalar(1);
  const Scalar bhi = log(t + sqrt(r2)) + Scalar(1);
  Scalar a = std::max(lo, blo), b = std::min(hi, bhi);
  if (a > b) return hi < blo ? f(hi) : f(lo);
  const Scalar invphi = (sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - invphi * (b - a), d = a + invphi * (b - a);
  Scalar fc = f(c), fd = f(d);
  while (b - a > Scalar(1e-10)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(a), f(b)});
}

}  // namespace detail

// Infimum of rho(p, .) over g, computed by reducing g to a vertical line in the half-space.
template <typename Scalar>
Scalar dist_to_geodesic(const ModelPointT<Scalar>& p, const GeodesicT<Scalar>& g) {
  using Kind = typename GeodesicT<Scalar>::Kind;
  using std::log;
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  ModelPointT<Scalar> x = to_half(p);
  VecX<Scalar> base;
  Scalar lo = -inf, hi = inf;
  switch (g.kind) {
    case Kind::Line: {
      IdealPointT<Scalar> a = to_half(g.a), b = to_half(g.b);
      if (p.model == Model::Ball) {
        const auto r = detail::reflect_to_infinity(to_ball(g.a).coords);
        x = to_half(ModelPointT<Scalar>{Model::Ball, r(to_ball(p).coords)});
        base = to_half(IdealPointT<Scalar>{Model::Ball, g.a.ambient, r(to_ball(g.b).coords), false}).coords;
        break;
      }
      if (!a.infinite && (b.infinite || b.coords.norm() < a.coords.norm())) std::swap(a, b);
      if (a.infinite) {
        base = b.coords;
      } else {
        x = detail::invert_at(a.coords, x);
        base = detail::invert_at(a.coords, b).coords;
      }
      break;
    }
    case Kind::Ray: {
      ModelPointT<Scalar> q = to_half(g.p);
      const IdealPointT<Scalar> a = to_half(g.a);
      if (p.model == Model::Ball) {
        const auto r = detail::reflect_to_infinity(to_ball(g.a).coords);
        x = to_half(ModelPointT<Scalar>{Model::Ball, r(to_ball(p).coords)});
        q = to_half(ModelPointT<Scalar>{Model::Ball, r(to_ball(g.p).coords)});
      } else if (!a.infinite) {
        x = detail::invert_at(a.coords, x);
        q = detail::invert_at(a.coords, q);
      }
      base = q.v();
      lo = log(q.t());
      break;
    }
    case Kind::Segment: {
      ModelPointT<Scalar> q0 = to_half(g.p), q1 = to_half(g.q);
      const VecX<Scalar> diff = q1.v() - q0.v();
      const Scalar len = diff.norm();
      if (len <= Scalar(1e-14) * (Scalar(1) + q0.v().norm())) {
        base = q0.v();
      } else {
        using std::hypot;
        const Scalar c = (len * len + q1.t() * q1.t() - q0.t() * q0.t()) / (Scalar(2) * len);
        const Scalar r = hypot(c, q0.t());
        const Scalar offset = c > Scalar(0) ? -q0.t() * q0.t() / (c + r) : c - r;
        const VecX<Scalar> end = q0.v() + offset * diff / len;
        x = detail::invert_at(end, x);
        q0 = detail::invert_at(end, q0);
        q1 = detail::invert_at(end, q1);
        base = (q0.v() + q1.v()) / Scalar(2);
      }
      lo = std::min(log(q0.t()), log(q1.t()));
      hi = std::max(log(q0.t()), log(q1.t()));
      break;
    }
  }
  return detail::min_dist_vertical(x, base, lo, hi);
}

template <typename Scalar>
std::pair<Scalar, Scalar> key_chord_identity(const IdealPointT<Scalar>& x, const IdealPointT<Scalar>& y) {
  using std::cosh;
  const Scalar d = dist_to_geodesic(origin<Scalar>(Model::Ball, x.ambient), line(x, y));
  return {chordal(x, y), Scalar(2) / cosh(d)};
}

// ---------------------------------------------------------------------------
// cones, shadows, horoballs

template <typename Scalar>
Scalar cone_angle(Scalar alpha) {
  using std::acos;
  using std::cosh;
  if (!(alpha > Scalar(0))) throw Error(ErrorKind::PreconditionViolated, "alpha must be positive");
  return acos(Scalar(1) / cosh(alpha));
}

template <typename Scalar>
struct EuclideanBall {
  VecX<Scalar> center;
  Scalar radius;
};

template <typename Scalar>
EuclideanBall<Scalar> shadow_ball_infinity(const ModelPointT<Scalar>& w, Scalar alpha) {
  using std::sinh;
  const ModelPointT<Scalar> h = to_half(w);
  return {VecX<Scalar>(h.v()), h.t() * sinh(alpha)};
}

template <typename Scalar>
using Viewpoint = std::variant<ModelPointT<Scalar>, IdealPointT<Scalar>>;

template <typename Scalar>
bool shadow_contains(const IdealPointT<Scalar>& x, const Viewpoint<Scalar>& from, Scalar alpha,
                     const ModelPointT<Scalar>& w) {
  if (const auto* p = std::get_if<ModelPointT<Scalar>>(&from)) return dist_to_geodesic(w, ray(*p, x)) < alpha;
  return dist_to_geodesic(w, line(std::get<IdealPointT<Scalar>>(from), x)) < alpha;
}

// Horoball at base; parameter is the height c for base = infinity, otherwise the
// Euclidean radius of the tangent ball in the base's model.
template <typename Scalar>
struct HoroballT {
  IdealPointT<Scalar> base;
  Scalar parameter;
};
using Horoball = HoroballT<double>;

template <typename Scalar>
HoroballT<Scalar> horoball(const IdealPointT<Scalar>& base, Scalar parameter) {
  if (!(parameter > Scalar(0))) throw Error(ErrorKind::PreconditionViolated, "horoball parameter must be positive");
  if (base.model == Model::Ball && !(parameter < Scalar(1)))
    throw Error(ErrorKind::PreconditionViolated, "ball horoball radius must be below 1");
  return {base, parameter};
}

template <typename Scalar>
bool horoball_contains(const HoroballT<Scalar>& h, const ModelPointT<Scalar>& p0) {
  const ModelPointT<Scalar> p = to_model(p0, h.base.model);
  const Scalar r = h.parameter;
  if (h.base.model == Model::Ball) return (p.coords - (Scalar(1) - r) * h.base.coords).norm() < r;
  if (h.base.infinite) return p.t() > r;
  VecX<Scalar> c(p.dim());
  c(0) = r;
  c.tail(p.dim() - 1) = h.base.coords;
  return (p.coords - c).norm() < r;
}

// The horoball at base whose boundary horosphere passes through p.
template <typename Scalar>
HoroballT<Scalar> horoball_through(const IdealPointT<Scalar>& base, const ModelPointT<Scalar>& p0) {
  const ModelPointT<Scalar> p = to_model(p0, base.model);
  if (base.model == Model::Ball) {
    const Scalar num = (p.coords - base.coords).squaredNorm();
    return {base, num / (Scalar(2) * (Scalar(1) - p.coords.dot(base.coords)))};
  }
  if (base.infinite) return {base, p.t()};
  return {base, (p.t() * p.t() + (p.v() - base.coords).squaredNorm()) / (Scalar(2) * p.t())};
}

// ---------------------------------------------------------------------------
// closed forms via pairings on the hyperboloid; every ideal point carries a
// fixed normalisation within its model, and the formulas below are invariant
// under rescaling it.

namespace closed_form {

// -<X, A_x>
template <typename Scalar>
Scalar ideal_pairing(const ModelPointT<Scalar>& X, const IdealPointT<Scalar>& A0) {
  const IdealPointT<Scalar> A = to_model(A0, X.model);
  if (X.model == Model::Ball) {
    const Scalar n = X.coords.norm();
    return (X.coords - A.coords).squaredNorm() / ((Scalar(1) - n) * (Scalar(1) + n));
  }
  if (A.infinite) return Scalar(1) / X.t();
  return (X.t() * X.t() + (X.v() - A.coords).squaredNorm()) / X.t();
}

// -<A_x, A_y>
template <typename Scalar>
Scalar ideal_pair(const IdealPointT<Scalar>& A, const IdealPointT<Scalar>& B0) {
  const IdealPointT<Scalar> B = to_model(B0, A.model);
  if (A.model == Model::Ball) return (A.coords - B.coords).squaredNorm() / Scalar(2);
  if (A.infinite || B.infinite) return Scalar(2);
  return Scalar(2) * (A.coords - B.coords).squaredNorm();
}

template <typename Scalar>
Scalar cosh_to_origin(const ModelPointT<Scalar>& X) {
  if (X.model == Model::Ball) {
    const Scalar n2 = X.coords.squaredNorm();
    return (Scalar(1) + n2) / (Scalar(1) - n2);
  }
  return (X.t() * X.t() + X.v().squaredNorm() + Scalar(1)) / (Scalar(2) * X.t());
}

template <typename Scalar>
Scalar cosh_to_line(const ModelPointT<Scalar>& X, const IdealPointT<Scalar>& A, const IdealPointT<Scalar>& B) {
  using std::sqrt;
  const IdealPointT<Scalar> a = to_model(A, X.model), b = to_model(B, X.model);
  return sqrt(Scalar(2) * ideal_pairing(X, a) * ideal_pairing(X, b) / ideal_pair(a, b));
}

// Ray from P towards A. The geodesic satisfies cosh rho(X, g(s)) = a/(2 lambda) e^s + beta e^-s.
template <typename Scalar>
Scalar cosh_to_ray(const ModelPointT<Scalar>& X, const ModelPointT<Scalar>& P0, const IdealPointT<Scalar>& A0) {
  using std::sqrt;
  const ModelPointT<Scalar> P = to_model(P0, X.model);
  const IdealPointT<Scalar> A = to_model(A0, X.model);
  const Scalar lambda = ideal_pairing(P, A);
  const Scalar a = ideal_pairing(X, A);
  const Scalar c = Scalar(1) + cosh_dist_m1(X, P);
  const Scalar beta = c - a / (Scalar(2) * lambda);
  if (Scalar(2) * lambda * beta >= a) return sqrt(Scalar(2) * a * beta / lambda);
  return c;
}

}  // namespace closed_form

// ---------------------------------------------------------------------------
// transvection T_a: the ball isometry sending a to 0; T_a^{-1} = T_{-a}

template <typename DerivedA, typename DerivedX>
VecX<typename DerivedX::Scalar> transvect(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedX>& x) {
  using S = typename DerivedX::Scalar;
  using std::sqrt;
  const S na = sqrt(a.squaredNorm()), nx = sqrt(x.squaredNorm());
  const VecX<S> d = x - a;
  const S num_scale = (S(1) - na) * (S(1) + na);
  // 1 - 2<a,x> + |a|^2|x|^2 as a sum of nonnegative terms
  const S den = d.squaredNorm() + num_scale * (S(1) - nx) * (S(1) + nx);
  return (num_scale * d - d.squaredNorm() * a) / den;
}

}  // namespace conical

#include <vector>

namespace conical {

// Deterministic boundary grids in the ball model.
std::vector<IdealPoint> circle_grid(int n, double offset = 0.0);
std::vector<IdealPoint> fibonacci_sphere(int n);

}  // namespace conical
