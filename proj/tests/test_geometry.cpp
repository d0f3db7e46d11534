#include "doctest.h"
#include "oracles.hpp"

#include <numbers>

#include "conical/geometry.hpp"

using namespace conical;

namespace {

ModelPoint hp(double t, double v) { return half_point(Eigen::Vector2d(t, v)); }
ModelPoint bp(double x, double y) { return ball_point(Eigen::Vector2d(x, y)); }
IdealPoint bi(double x, double y) { return ball_ideal(Eigen::Vector2d(x, y)); }

}  // namespace

TEST_CASE("convert_model sends the ball origin to e0 and round-trips") {
  const auto j = convert_model(origin(Model::Ball, 3));
  CHECK(j.model == Model::HalfSpace);
  CHECK((j.coords - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const auto p = ball_point(oracle::random_ball(rng, 3, 0.999));
    CHECK((to_ball(to_half(p)).coords - p.coords).norm() < 1e-12);
  }
  const auto e = ball_ideal(Eigen::Vector2d(1, 0));
  CHECK(chordal(convert_model(convert_model(e)), e) < 1e-12);
  const auto inf = to_ball(half_infinity(2));
  CHECK(chordal(inf, to_ball(half_ideal(Eigen::VectorXd::Zero(1)))) == doctest::Approx(2.0));
}

TEST_CASE("point validation") {
  CHECK_THROWS_AS(bp(1.0, 0.0), Error);
  CHECK_THROWS_AS(bp(1.0 - 1e-13, 0.0), Error);
  CHECK_THROWS_AS(hp(0.0, 1.0), Error);
  CHECK_THROWS_AS(bi(0.5, 0.5), Error);
  CHECK_NOTHROW(hp(1e-18, 0.3));
}

TEST_CASE("dist closed forms against path integrals") {
  const double d = dist(hp(1, 0), hp(1, 1));
  CHECK(d == doctest::Approx(0.9624236501).epsilon(1e-10));
  // semicircle through (1,0) and (1,1): centre v = 1/2, radius sqrt(5)/2
  const double R = std::sqrt(1.25);
  const double th0 = std::atan2(1.0, -0.5), th1 = std::atan2(1.0, 0.5);
  const double len = oracle::halfspace_length(
      [&](double th) { return Eigen::Vector2d(R * std::sin(th), 0.5 + R * std::cos(th)).eval(); }, th1, th0);
  CHECK(std::abs(len - d) < 1e-8);

  CHECK(dist(bp(0, 0), bp(0.5, 0)) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(dist(bp(0.2, 0.3), bp(0.2, 0.3)) == 0.0);
}

TEST_CASE("dist is a metric and conversion is an isometry") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 2000; ++k) {
    const auto p = ball_point(oracle::random_ball(rng, 3, 0.99));
    const auto q = ball_point(oracle::random_ball(rng, 3, 0.99));
    const auto r = ball_point(oracle::random_ball(rng, 3, 0.99));
    CHECK(dist(p, q) == dist(q, p));
    CHECK(dist(p, r) <= dist(p, q) + dist(q, r) + 1e-12);
    CHECK(std::abs(dist(to_half(p), to_half(q)) - dist(p, q)) < 1e-10 * (1 + dist(p, q)));
  }
}

TEST_CASE("dist_to_geodesic examples") {
  const auto j = origin(Model::Ball, 2);
  CHECK(dist_to_geodesic(j, line(bi(1, 0), bi(-1, 0))) < 1e-9);
  CHECK(dist_to_geodesic(j, line(bi(0.6, 0.8), bi(-0.6, -0.8))) < 1e-9);
  const auto vertical = line(half_infinity(2), half_ideal(Eigen::VectorXd::Zero(1)));
  CHECK(dist_to_geodesic(hp(1, 1), vertical) == doctest::Approx(std::asinh(1.0)).epsilon(1e-10));
  const double d = dist_to_geodesic(j, line(bi(1, 0), bi(0, 1)));
  CHECK(d == doctest::Approx(std::acosh(std::sqrt(2.0))).epsilon(1e-10));
  CHECK(std::abs(d - oracle::brute_dist_to_line(Eigen::Vector2d::Zero(), Eigen::Vector2d(1, 0),
                                                 Eigen::Vector2d(0, 1))) < 1e-9);
}

TEST_CASE("dist_to_geodesic agrees with a brute-force hyperboloid scan") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd x = oracle::random_ball(rng, 3, 0.95);
    const Eigen::VectorXd u = oracle::random_unit(rng, 3), w = oracle::random_unit(rng, 3);
    const double ours = dist_to_geodesic(ball_point(x), line(ball_ideal(u), ball_ideal(w)));
    CHECK(std::abs(ours - oracle::brute_dist_to_line(x, u, w)) < 1e-7);
  }
}

TEST_CASE("rays and segments exclude points behind their endpoints") {
  const auto p = hp(1, 0);
  const auto up = ray(p, half_infinity(2));
  CHECK(dist_to_geodesic(hp(0.25, 0), up) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
  CHECK(dist_to_geodesic(hp(3, 0), up) < 1e-9);
  const auto seg = segment(hp(1, 0), hp(2, 0));
  CHECK(dist_to_geodesic(hp(8, 0), seg) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
  CHECK(dist_to_geodesic(hp(1.5, 0), seg) < 1e-9);
  // tilted segment: endpoints are on it, and the midpoint of the arc too
  const auto a = hp(1, 0), b = hp(0.5, 2);
  const auto tilted = segment(a, b);
  CHECK(dist_to_geodesic(a, tilted) < 1e-9);
  CHECK(dist_to_geodesic(b, tilted) < 1e-9);
  // reference value from a dense scan of the arc between the endpoints
  CHECK(dist_to_geodesic(hp(0.01, 5), tilted) == doctest::Approx(7.116466826482).epsilon(1e-9));
  // here the unconstrained foot lies beyond b, so the segment distance is attained at b
  CHECK(dist_to_geodesic(hp(0.01, 2.2), tilted) == doctest::Approx(dist(hp(0.01, 2.2), b)).epsilon(1e-9));
}

TEST_CASE("closed forms agree with numerical minimisation") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 500; ++k) {
    const auto x = ball_point(oracle::random_ball(rng, 3, 0.97));
    const auto p = ball_point(oracle::random_ball(rng, 3, 0.9));
    const auto a = ball_ideal(oracle::random_unit(rng, 3)), b = ball_ideal(oracle::random_unit(rng, 3));
    CHECK(std::abs(std::acosh(closed_form::cosh_to_line(x, a, b)) - dist_to_geodesic(x, line(a, b))) < 1e-8);
    CHECK(std::abs(std::acosh(closed_form::cosh_to_ray(x, p, a)) - dist_to_geodesic(x, ray(p, a))) < 1e-8);
    const auto xh = to_half(x);
    CHECK(std::abs(std::acosh(closed_form::cosh_to_ray(xh, to_half(p), to_half(a))) -
                   dist_to_geodesic(x, ray(p, a))) < 1e-7);
    CHECK(closed_form::cosh_to_origin(xh) == doctest::Approx(std::cosh(dist(x, origin(Model::Ball, 3)))));
  }
}

TEST_CASE("key chord identity") {
  const auto [l0, r0] = key_chord_identity(bi(1, 0), bi(-1, 0));
  CHECK(l0 == doctest::Approx(2.0));
  CHECK(r0 == doctest::Approx(2.0));
  // a geodesic at distance arccosh 2 from the origin has chord 1: endpoints 60 degrees apart
  const auto [l1, r1] = key_chord_identity(bi(1, 0), bi(0.5, std::sqrt(3.0) / 2));
  CHECK(l1 == doctest::Approx(1.0));
  CHECK(r1 == doctest::Approx(1.0).epsilon(1e-10));
  std::mt19937_64 rng(5);
  double worst = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto [l, r] = key_chord_identity(ball_ideal(oracle::random_unit(rng, 3)), ball_ideal(oracle::random_unit(rng, 3)));
    worst = std::max(worst, std::abs(l - r));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("cone angle") {
  CHECK(cone_angle(1e-8) < 1e-7);
  CHECK(cone_angle(std::acosh(2.0)) == doctest::Approx(std::numbers::pi / 3).epsilon(1e-12));
  CHECK(cone_angle(1.0) < cone_angle(1.1));
  CHECK_THROWS_AS(cone_angle(0.0), Error);
  // cone boundary around the vertical line over 0
  const auto vertical = line(half_infinity(3), half_ideal(Eigen::VectorXd::Zero(2)));
  for (double alpha : {0.3, 1.0, 2.5}) {
    const double th = cone_angle(alpha);
    for (double r : {0.01, 1.0, 50.0}) {
      const auto w = half_point(r * std::cos(th), Eigen::Vector2d(r * std::sin(th) * 0.6, r * std::sin(th) * 0.8));
      CHECK(std::abs(dist_to_geodesic(w, vertical) - alpha) < 1e-9);
    }
  }
}

TEST_CASE("shadows from infinity") {
  const auto s1 = shadow_ball_infinity(hp(2, 0), std::asinh(1.0));
  CHECK(s1.center(0) == 0.0);
  CHECK(s1.radius == doctest::Approx(2.0));
  const auto s2 = shadow_ball_infinity(hp(1, 5), std::asinh(2.0));
  CHECK(s2.center(0) == 5.0);
  CHECK(s2.radius == doctest::Approx(2.0));

  const Viewpoint<double> inf = half_infinity(2);
  const double a = std::asinh(2.0);
  CHECK(shadow_contains(half_ideal(Eigen::VectorXd::Constant(1, 6.9)), inf, a, hp(1, 5)));
  CHECK_FALSE(shadow_contains(half_ideal(Eigen::VectorXd::Constant(1, 7.1)), inf, a, hp(1, 5)));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-3, 3), T(0.05, 2), A(0.1, 3);
  int tested = 0;
  for (int k = 0; k < 5000; ++k) {
    const auto w = hp(T(rng), U(rng));
    const double alpha = A(rng);
    const double x = U(rng);
    const auto ball = shadow_ball_infinity(w, alpha);
    const double gap = std::abs(x - ball.center(0)) - ball.radius;
    if (std::abs(gap) < 1e-9) continue;
    ++tested;
    CHECK(shadow_contains(half_ideal(Eigen::VectorXd::Constant(1, x)), inf, alpha, w) == (gap < 0));
  }
  CHECK(tested > 4900);
}

TEST_CASE("vertical distance identity sinh rho = |v - x| / t") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-5, 5), T(0.01, 3);
  for (int k = 0; k < 1000; ++k) {
    const double x = U(rng);
    const auto w = hp(T(rng), U(rng));
    const auto g = line(half_infinity(2), half_ideal(Eigen::VectorXd::Constant(1, x)));
    CHECK(std::abs(std::sinh(dist_to_geodesic(w, g)) - std::abs(w.coords(1) - x) / w.t()) <
          1e-9 * (1 + std::abs(w.coords(1) - x) / w.t()));
  }
}

TEST_CASE("horoballs") {
  const auto h = horoball(half_infinity(2), 1.0);
  CHECK(horoball_contains(h, hp(2, 0)));
  CHECK_FALSE(horoball_contains(h, hp(0.5, 0)));
  const auto hb = horoball(half_ideal(Eigen::VectorXd::Constant(1, 1.0)), 0.5);
  CHECK(horoball_contains(hb, hp(0.5, 1.0)));
  CHECK_FALSE(horoball_contains(hb, hp(0.5, 1.6)));
  // the horoball through p has p on its boundary
  const auto u = bi(0, 1);
  const auto p = bp(0.3, 0.2);
  const auto hp_ = horoball_through(u, p);
  CHECK(((p.coords - (1 - hp_.parameter) * u.coords).norm() - hp_.parameter) == doctest::Approx(0.0));
  // ball and half-space descriptions agree on membership
  std::mt19937_64 rng(8);
  const auto hball = horoball(u, 0.4);
  const auto base_half = to_half(u);
  const double rh = horoball_through(base_half, to_half(ball_point(Eigen::Vector2d(0, 0.2)))).parameter;
  const auto hhalf = horoball(base_half, rh);
  for (int k = 0; k < 2000; ++k) {
    const auto q = ball_point(oracle::random_ball(rng, 2, 0.999));
    const double gap = (q.coords - 0.6 * u.coords).norm() - 0.4;
    if (std::abs(gap) < 1e-9) continue;
    CHECK(horoball_contains(hball, q) == horoball_contains(hhalf, q));
  }
}
