#include "doctest.h"
#include "oracles.hpp"

#include <numbers>
#include <sstream>

#include "conical/divergence.hpp"

using namespace conical;

namespace {

IdealPoint angle_point(double th) { return ball_ideal(Eigen::Vector2d(std::cos(th), std::sin(th))); }

MobiusSequence from_isometries(int dim, std::size_t N, std::function<Isometry(std::size_t)> f) {
  return MobiusSequence(dim, N, std::move(f));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ConfigInvalid;
}

}  // namespace

TEST_CASE("from_conical_data normal form") {
  std::mt19937_64 rng(31);
  for (int m : {2, 3, 4}) {
    std::vector<ModelPoint> zs;
    for (int k = 0; k < 1000; ++k) zs.push_back(ball_point(oracle::random_ball(rng, m, 0.999)));
    const auto seq = from_conical_data(PointSequence::from_points(zs));
    for (std::size_t n = 1; n <= zs.size(); ++n) {
      const Isometry G = seq.at(n);
      const Vec z = zs[n - 1].coords;
      const Vec img0 = G.act(Vec::Zero(m));
      CHECK((img0 - z.norm() * Vec::Unit(m, 0)).norm() < 1e-12);
      CHECK((invert(G).act(Vec::Zero(m)) - z).norm() < 1e-12);
      CHECK(G.orientation() == 1);
    }
  }
}

TEST_CASE("radial data: the target point is the exception") {
  // z_n on the ray to b: every other point follows the orbit of 0 to e0
  const Vec b = Eigen::Vector2d(0, 1);
  const std::size_t N = 600;
  const PointSequence z(Model::Ball, 2, N, PointSequence::Generator([b](std::size_t n) {
                          return ModelPoint{Model::Ball, Vec(std::tanh(n / 40.0) * b)};
                        }));
  const auto seq = from_conical_data(z);
  const auto gc = general_convergence_test(seq, N);
  REQUIRE(gc.kind == GeneralConvergence::Kind::Converges);
  CHECK(chordal(*gc.limit, angle_point(0.0)) < 1e-6);
  // exact b: a rounded copy drifts off the repelling point
  auto grid = circle_grid(36, std::numbers::pi / 2);
  grid[0] = ball_ideal(b);
  const auto cls = classify_boundary(seq, grid, N);
  CHECK(cls[0].status == PointStatus::Convergent);
  CHECK(chordal(*cls[0].limit, angle_point(0.0)) > 1.0);
  for (std::size_t s = 1; s < cls.size(); ++s) {
    CHECK(cls[s].status == PointStatus::Convergent);
    CHECK(chordal(*cls[s].limit, angle_point(0.0)) < 1e-6);
  }
}

TEST_CASE("zigzag data diverges exactly at the target") {
  const auto b = angle_point(std::numbers::pi / 2);
  const std::size_t N = 2000;
  const auto seq = from_conical_data(zigzag_sequence({b}, N));
  auto samples = circle_grid(36, std::numbers::pi / 2);
  const auto cls = classify_boundary(seq, samples, N);
  CHECK(cls[0].status == PointStatus::Divergent);
  for (std::size_t s = 1; s < cls.size(); ++s) CHECK(cls[s].status == PointStatus::Convergent);
}

TEST_CASE("two limits under a transvection sequence") {
  // G_n = T_{-tanh(nc/2) e}: everything except -e is pushed to e
  const Vec e = Eigen::Vector2d(1, 0);
  const std::size_t N = 300;
  const auto seq = from_isometries(2, N, [e](std::size_t n) {
    return Isometry::transvection(Vec(-std::tanh(n * 0.1 / 2.0) * e));
  });
  const auto gc = general_convergence_test(seq, N);
  REQUIRE(gc.kind == GeneralConvergence::Kind::Converges);
  CHECK(chordal(*gc.limit, angle_point(0.0)) < 1e-9);
  const auto cls = classify_boundary(seq, {ball_ideal(Eigen::Vector2d(-1, 0)), angle_point(2.0)}, N);
  CHECK(cls[0].status == PointStatus::Convergent);
  CHECK(chordal(*cls[0].limit, angle_point(std::numbers::pi)) < 1e-12);
  CHECK(cls[1].status == PointStatus::Convergent);
  CHECK(chordal(*cls[1].limit, angle_point(0.0)) < 1e-9);
}

TEST_CASE("general convergence: No and Undecided") {
  const std::size_t N = 400;
  // alternating escape towards e and -e
  const auto alt = from_isometries(2, N, [](std::size_t n) {
    const double r = std::tanh(n * 0.02);
    return Isometry::transvection(Eigen::Vector2d(n % 2 ? r : -r, 0));
  });
  CHECK(general_convergence_test(alt, N).kind == GeneralConvergence::Kind::No);
  // rotations keep the origin fixed
  const auto rot = from_isometries(2, N, [](std::size_t n) {
    const double th = 0.3 * n;
    return Isometry::orthogonal((Mat(2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th)).finished());
  });
  CHECK(general_convergence_test(rot, N).kind == GeneralConvergence::Kind::No);
  CHECK_THROWS_AS(aebischer_crosscheck(rot, circle_grid(8), N, AebischerParams{ConicalParams{{1.0}}}), Error);
  CHECK(kind_of([&] { aebischer_crosscheck(alt, circle_grid(8), N, AebischerParams{ConicalParams{{1.0}}}); }) ==
        ErrorKind::NotGenerallyConvergent);
}

TEST_CASE("classify_tail on synthetic orbits") {
  std::vector<Vec> conv, osc, slow;
  for (int n = 1; n <= 1000; ++n) {
    conv.push_back(Eigen::Vector2d(1.0, std::exp(-0.05 * n)));
    osc.push_back(Eigen::Vector2d(n % 7 == 0 ? 1.0 : 0.0, 0.0));
    slow.push_back(Eigen::Vector2d(1.0, 1.0 / n));
  }
  double d = -1;
  CHECK(classify_tail(conv, 1e-6, 1e-2, &d) == PointStatus::Convergent);
  CHECK(d < 1e-6);
  CHECK(classify_tail(osc, 1e-6, 1e-2, &d) == PointStatus::Divergent);
  CHECK(d == doctest::Approx(1.0));
  CHECK(classify_tail(slow, 1e-6, 1e-2, &d) == PointStatus::Undecided);
  CHECK(d == doctest::Approx(1.0 / 750 - 1.0 / 1000));
}

TEST_CASE("Aebischer agreement on built-in data") {
  const std::size_t N = 2000;
  const AebischerParams params{ConicalParams{{1.0, 2.0}}};
  const auto grid = circle_grid(360);
  SUBCASE("singleton") {
    const auto b = angle_point(std::numbers::pi / 3);
    const auto rep = aebischer_crosscheck(from_conical_data(zigzag_sequence({b}, N)), grid, N, params);
    CHECK(rep.n_decided > 300);
    CHECK(rep.agreement() >= 0.95);
    const auto one = aebischer_crosscheck(from_conical_data(zigzag_sequence({b}, N)), {b}, N, params);
    CHECK(one.conical[0].status == Verdict::Accepted);
    CHECK(one.classes[0].status == PointStatus::Divergent);
  }
  SUBCASE("twelve points") {
    std::vector<IdealPoint> targets;
    for (int k = 0; k < 12; ++k) targets.push_back(angle_point(k * std::numbers::pi / 6));
    const auto rep = aebischer_crosscheck(from_conical_data(zigzag_sequence(targets, N)), grid, N, params);
    CHECK(rep.agreement() >= 0.95);
    for (int k = 0; k < 12; ++k) {
      CHECK(rep.conical[30 * k].status == Verdict::Accepted);
      CHECK(rep.classes[30 * k].status == PointStatus::Divergent);
    }
  }
}

TEST_CASE("cantor arc points") {
  const auto pts = cantor_arc_points(5);
  CHECK(pts.size() == 64);
  CHECK(chordal(pts.front(), angle_point(0.0)) < 1e-15);
  CHECK(chordal(pts.back(), angle_point(std::numbers::pi / 2)) < 1e-15);
}

TEST_CASE("dense divergence generator") {
  // x_n at distance 3n along e0; the orbit of 0 converges while no boundary point settles
  const PointSequence x(Model::Ball, 2, 30, PointSequence::Generator([](std::size_t n) {
                          return ModelPoint{Model::Ball, Eigen::Vector2d(std::tanh(1.5 * n), 0.0)};
                        }));
  const std::size_t N = 10000;
  const auto seq = dense_divergence_generator(x, N);
  CHECK(seq.size() == N);
  // every term of a block sends 0 to its centre
  for (std::size_t n : {1ul, 17ul, 500ul, 9999ul}) {
    const Vec g0 = seq.at(n).act(Vec::Zero(2));
    CHECK(std::abs(g0(1)) < 1e-12);
    CHECK(g0(0) > std::tanh(1.5) - 1e-12);
  }
  const auto gc = general_convergence_test(seq, N);
  REQUIRE(gc.kind == GeneralConvergence::Kind::Converges);
  CHECK(chordal(*gc.limit, angle_point(0.0)) < 1e-6);
  const auto samples = circle_grid(100, 0.01);
  const auto cls = classify_boundary(seq, samples, N);
  for (const auto& c : cls) CHECK(c.status != PointStatus::Convergent);
}

TEST_CASE("classification csv") {
  std::vector<PointClassification> rows(1);
  rows[0].point = angle_point(0.0);
  rows[0].status = PointStatus::Convergent;
  rows[0].limit = angle_point(std::numbers::pi / 2);
  rows[0].tail_diameter = 0.5;
  std::ostringstream os;
  write_classification_csv(os, rows);
  CHECK(os.str().substr(0, os.str().find('\n')) == "z0,z1,status,limit0,limit1,tail_diameter");
  CHECK(os.str().find("1,0,Convergent,") != std::string::npos);
}
