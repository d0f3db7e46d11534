#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library's distance or geodesic code.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using Vec = Eigen::VectorXd;

inline Vec random_unit(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g;
  Vec v(m);
  for (int i = 0; i < m; ++i) v(i) = g(rng);
  return v.normalized();
}

inline Vec random_ball(std::mt19937_64& rng, int m, double rmax) {
  std::uniform_real_distribution<double> u(0.0, rmax);
  return random_unit(rng, m) * u(rng);
}

// Lorentzian model: signature (-, +, ..., +), hyperboloid -X0^2 + |X'|^2 = -1.
inline double lorentz(const Vec& a, const Vec& b) { return -a(0) * b(0) + a.tail(a.size() - 1).dot(b.tail(b.size() - 1)); }

inline Vec hyperboloid(const Vec& x) {
  const double s = 1.0 - x.squaredNorm();
  Vec X(x.size() + 1);
  X(0) = (1.0 + x.squaredNorm()) / s;
  X.tail(x.size()) = 2.0 * x / s;
  return X;
}

inline Vec null_vector(const Vec& u) {
  Vec A(u.size() + 1);
  A(0) = 1.0;
  A.tail(u.size()) = u;
  return A;
}

// Minimum of f over R by coarse scan and repeated refinement.
inline double scan_min(const std::function<double(double)>& f, double lo, double hi) {
  double best_s = lo, best = f(lo);
  for (int round = 0; round < 6; ++round) {
    const int n = 2000;
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
      const double s = lo + i * h;
      const double v = f(s);
      if (v < best) best = v, best_s = s;
    }
    lo = best_s - 2 * h;
    hi = best_s + 2 * h;
  }
  return best;
}

// Distance from ball point x to the line between ideal points u, w, by scanning the
// hyperboloid parametrisation of the line.
inline double brute_dist_to_line(const Vec& x, const Vec& u, const Vec& w) {
  const Vec X = hyperboloid(x), A = null_vector(u), B = null_vector(w);
  const double n = std::sqrt(-2.0 * lorentz(A, B));
  auto f = [&](double s) {
    const Vec G = (std::exp(s) * A + std::exp(-s) * B) / n;
    return std::acosh(std::max(1.0, -lorentz(X, G)));
  };
  return scan_min(f, -40.0, 40.0);
}

// Hyperbolic length of a parametrised curve in the half-space, ds = |dx| / x0, Simpson rule.
inline double halfspace_length(const std::function<Vec(double)>& c, double a, double b, int n = 20000) {
  auto speed = [&](double s) {
    const double h = 1e-6;
    const Vec d = (c(s + h) - c(s - h)) / (2 * h);
    return d.norm() / c(s)(0);
  };
  const double h = (b - a) / n;
  double sum = speed(a) + speed(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * speed(a + i * h);
  return sum * h / 3.0;
}

inline long long gcd(long long a, long long b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

}  // namespace oracle
