#include "conical/contfrac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace conical {

ContinuedFraction ContinuedFraction::golden() {
  return ContinuedFraction([](std::size_t) { return std::pair<cplx, cplx>{1.0, 1.0}; });
}

ContinuedFraction ContinuedFraction::oscillating() {
  return ContinuedFraction([](std::size_t) { return std::pair<cplx, cplx>{1.0, 0.0}; });
}

ContinuedFraction ContinuedFraction::from_pairs(std::vector<std::pair<cplx, cplx>> pairs) {
  auto shared = std::make_shared<const std::vector<std::pair<cplx, cplx>>>(std::move(pairs));
  return ContinuedFraction([shared](std::size_t n) {
    if (n > shared->size()) throw Error(ErrorKind::PreconditionViolated, "coefficient list exhausted");
    return (*shared)[n - 1];
  });
}

std::pair<cplx, cplx> ContinuedFraction::coefficients(std::size_t n) const {
  if (n < 1) throw Error(ErrorKind::PreconditionViolated, "coefficients are indexed from 1");
  const auto ab = coeff_(n);
  if (ab.first == 0.0) throw Error(ErrorKind::DegenerateCoefficient, "a_" + std::to_string(n) + " = 0");
  return ab;
}

namespace {

// Scale by a power of two when entries drift far from 1; exact in binary arithmetic.
void rescale(Matrix2& M) {
  const double big = std::max({std::abs(M.a), std::abs(M.b), std::abs(M.c), std::abs(M.d)});
  if (big == 0.0 || !std::isfinite(big)) return;
  const int e = std::ilogb(big);
  if (std::abs(e) < 256) return;
  for (cplx* v : {&M.a, &M.b, &M.c, &M.d}) *v = {std::ldexp(v->real(), -e), std::ldexp(v->imag(), -e)};
}

}  // namespace

std::vector<Matrix2> ContinuedFraction::partial_matrices(std::size_t N) const {
  std::vector<Matrix2> out;
  out.reserve(N);
  Matrix2 M;
  for (std::size_t n = 1; n <= N; ++n) {
    const auto [a, b] = coefficients(n);
    // M * [[0, a], [1, b]]: the first column is the previous second column verbatim
    Matrix2 next{M.b, M.a * a + M.b * b, M.d, M.c * a + M.d * b, 0};
    rescale(next);
    out.push_back(next);
    M = next;
  }
  return out;
}

ExtComplex cf_partial(const ContinuedFraction& cf, std::size_t n, const ExtComplex& z) {
  if (n < 1) throw Error(ErrorKind::PreconditionViolated, "n must be at least 1");
  return mobius_apply(cf.partial_matrices(n).back(), z);
}

Vec riemann_sphere(const ExtComplex& z) {
  if (z.inf) return Eigen::Vector3d(0, 0, 1);
  const double n2 = std::norm(z.z);
  return Eigen::Vector3d(2 * z.z.real(), 2 * z.z.imag(), n2 - 1) / (n2 + 1);
}

CfConvergence classical_convergence(const ContinuedFraction& cf, std::size_t N, double tol_lo, double tol_hi) {
  if (N < 1) throw Error(ErrorKind::PreconditionViolated, "N must be positive");
  std::vector<Vec> orbit;
  ExtComplex last;
  for (const auto& M : cf.partial_matrices(N)) {
    last = mobius_apply(M, ExtComplex{0.0, false});
    orbit.push_back(riemann_sphere(last));
  }
  CfConvergence out;
  out.status = classify_tail(orbit, tol_lo, tol_hi, &out.tail_diameter);
  if (out.status == PointStatus::Convergent) out.value = last;
  return out;
}

MobiusSequence classical_sequence(const ContinuedFraction& cf, std::size_t N) {
  auto mats = std::make_shared<const std::vector<Matrix2>>(cf.partial_matrices(N));
  return MobiusSequence(3, N, [mats](std::size_t n) { return from_matrix2((*mats)[n - 1], 3); });
}

// ---------------------------------------------------------------------------

Isometry BallContinuedFraction::at(std::size_t n) const {
  if (n == 0) return Isometry::identity(dim);
  if (n > T.size()) throw Error(ErrorKind::PreconditionViolated, "continued fraction index out of range");
  return T[n - 1];
}

MobiusSequence BallContinuedFraction::sequence() const {
  auto maps = std::make_shared<const std::vector<Isometry>>(T);
  return MobiusSequence(dim, T.size(), [maps](std::size_t n) { return (*maps)[n - 1]; });
}

Vec angle_vector(double th, int dim) {
  Vec v = Vec::Zero(dim);
  v(0) = std::cos(th);
  v(1) = std::sin(th);
  return v;
}

double cosh_to_gamma(const ModelPoint& z) {
  const int m = z.dim();
  const IdealPoint e = ball_ideal(Vec(Vec::Unit(m, 0))), f = ball_ideal(Vec(-Vec::Unit(m, 0)));
  return closed_form::cosh_to_line(to_ball(z), e, f);
}

CfConvergence classical_convergence(const BallContinuedFraction& cf, std::size_t N, double tol_lo, double tol_hi) {
  if (N < 1 || N > cf.size()) throw Error(ErrorKind::PreconditionViolated, "N out of range");
  const Vec e = Vec::Unit(cf.dim, 0);
  std::vector<Vec> orbit;
  orbit.reserve(N);
  for (std::size_t n = 1; n <= N; ++n) orbit.push_back(cf.T[n - 1].act(e).normalized());
  CfConvergence out;
  out.status = classify_tail(orbit, tol_lo, tol_hi, &out.tail_diameter);
  if (out.status == PointStatus::Convergent) out.limit = IdealPoint{Model::Ball, cf.dim, orbit.back(), false};
  return out;
}

namespace {

// Point on the horocycle through 0 tangent at e, on the given side of gamma, with cosh rho(p, gamma) = c.
ModelPoint horocycle_point(int dim, double c, double side) {
  auto at = [&](double phi) {
    Vec p = Vec::Zero(dim);
    p(0) = 0.5 * (1.0 + std::cos(phi));
    p(1) = side * 0.5 * std::sin(phi);
    return ModelPoint{Model::Ball, p};
  };
  double lo = 0.0, hi = std::numbers::pi;  // cosh rho falls from infinity to 1 on (0, pi]
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cosh_to_gamma(at(mid)) > c) lo = mid;
    else hi = mid;
  }
  return ball_point(at(hi).coords);
}

// Horocycle points with larger cosh rho(p, gamma) sit closer to the sphere than a double resolves.
constexpr double kPadCap = 1e5;

struct Chain {
  BallContinuedFraction cf;
  double theta = 0.0, rho_prev = 0.0;

  // Appends z as the next term; returns false when the side condition fails.
  bool push(const ModelPoint& z, bool pad, bool flip = false) {
    const std::size_t n = cf.T.size() + 1;
    const double ch = cosh_to_gamma(z);
    const double step = 2.0 * std::asin(std::min(1.0, 1.0 / ch));
    const double next = theta + ((n % 2 == 1) != flip ? -step : step);
    const int m = cf.dim;
    const IdealPoint x = ball_ideal(Vec(-angle_vector(theta, m))), y = ball_ideal(Vec(-angle_vector(next, m)));
    try {
      cf.T.push_back(lemma_orthogonal_map(z, x, y));
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::SideConditionViolated) return false;
      throw;
    }
    cf.z.push_back(z);
    cf.padding.push_back(pad ? 1 : 0);
    cf.theta.push_back(next);
    theta = next;
    rho_prev = std::acosh(std::max(1.0, ch));
    return true;
  }
};

}  // namespace

BallContinuedFraction chain_ordered(const std::vector<ModelPoint>& zs) {
  if (zs.empty()) throw Error(ErrorKind::EmptyResult, "no points to chain");
  Chain ch;
  ch.cf.dim = zs.front().dim();
  if (ch.cf.dim < 2) throw Error(ErrorKind::PreconditionViolated, "ball dimension must be at least 2");
  ch.cf.theta.push_back(0.0);
  for (const auto& z0 : zs) {
    const ModelPoint z = to_ball(z0);
    if (ch.push(z, false)) continue;
    // dimension 2 only: a horocycle point on the other side flips the required side
    const double rho = std::acosh(std::max(1.0, cosh_to_gamma(z)));
    const double target = std::cosh(0.5 * (ch.rho_prev + rho));
    if (target <= kPadCap) {
      const double side = z.coords(1) > 0 ? -1.0 : 1.0;
      const ModelPoint pad = horocycle_point(ch.cf.dim, target, side);
      if (ch.push(pad, true) && ch.push(z, false)) continue;
    } else if (ch.push(z, false, true)) {
      ++ch.cf.side_flips;
      continue;
    }
    throw Error(ErrorKind::ConstructionStuck, "side condition could not be met");
  }
  return std::move(ch.cf);
}

BallContinuedFraction construct_cfconv(const PointSequence& seq, std::size_t N, const CfconvOptions& opt) {
  if (seq.model() != Model::Ball) throw Error(ErrorKind::PreconditionViolated, "ball-model data required");
  const int m = seq.dim();
  std::vector<ModelPoint> zs = seq.take(N);
  double min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t n = final_quarter_start(N); n <= N; ++n)
    min_rho = std::min(min_rho, std::acosh(std::max(1.0, cosh_to_gamma(zs[n - 1]))));

  const std::vector<IdealPoint> ends{ball_ideal(Vec(Vec::Unit(m, 0))), ball_ideal(Vec(-Vec::Unit(m, 0)))};
  for (const auto& v : conical_estimate(seq, ends, {opt.bound}, opt.K, std::nullopt, N))
    if (v.status == Verdict::Accepted)
      throw Error(ErrorKind::PreconditionViolated,
                  "data approaches e or -e conically; final-quarter min rho(z, gamma) = " + std::to_string(min_rho));

  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < zs.size(); ++i) order.emplace_back(cosh_to_gamma(zs[i]), i);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ModelPoint> sorted;
  for (const auto& [c, i] : order) sorted.push_back(zs[i]);
  auto cf = chain_ordered(sorted);
  cf.min_rho = min_rho;
  return cf;
}

BallContinuedFraction construct_prescribed_limit_set(const std::vector<IdealPoint>& samples, std::size_t N) {
  if (samples.empty()) throw Error(ErrorKind::PreconditionViolated, "no samples");
  const int m = samples.front().ambient;
  std::vector<Vec> upper, lower;
  for (const auto& s : samples) {
    const Vec u = to_ball(s).coords;
    if (std::abs(std::abs(u(0)) - 1.0) < 1e-12) throw Error(ErrorKind::PreconditionViolated, "e or -e supplied");
    (m == 2 && u(1) < 0 ? lower : upper).push_back(u);
  }
  // radius with cosh rho(r zeta, gamma) = target
  auto radial = [&](const Vec& zeta, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (cosh_to_gamma(ModelPoint{Model::Ball, Vec(mid * zeta)}) < target) lo = mid;
      else hi = mid;
    }
    return ModelPoint{Model::Ball, Vec(lo * zeta)};
  };
  // in dimension 2 odd terms need the upper side; draw from that side when possible
  std::vector<ModelPoint> zs;
  std::size_t iu = 0, il = 0;
  for (std::size_t n = 1; n <= N; ++n) {
    const bool want_upper = m != 2 || n % 2 == 1;
    const Vec* pick;
    if ((want_upper && !upper.empty()) || lower.empty()) pick = &upper[iu++ % upper.size()];
    else pick = &lower[il++ % lower.size()];
    zs.push_back(radial(*pick, double(n) + 2.0));
  }
  auto cf = chain_ordered(zs);
  cf.min_rho = std::acosh(cosh_to_gamma(zs[final_quarter_start(N) - 1]));
  return cf;
}

}  // namespace conical
