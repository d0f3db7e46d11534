#include "conical/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "conical/constructions.hpp"
#include "conical/contfrac.hpp"
#include "conical/countable.hpp"
#include "conical/divergence.hpp"

namespace conical::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kSubcommands{"lemma-check", "divergence-map", "cf-analyze", "rank", "construct"};
const std::vector<std::string> kDatasets{"singleton", "circle12", "cantor"};
const std::vector<std::string> kPresets{"golden", "oscillating", "custom"};
const std::vector<std::string> kOracles{"cantor", "selfsimA", "selfsimB", "rationals01", "finite"};
const std::vector<std::string> kConstructions{"cantor-graph", "gdelta", "dyadic", "j-alpha", "thm3", "prescribed-cf"};

bool one_of(const std::string& s, const std::vector<std::string>& names) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ConfigInvalid, what);
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

Vec unit(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g;
  Vec v(m);
  for (int i = 0; i < m; ++i) v(i) = g(rng);
  return v.normalized();
}

Vec in_ball(std::mt19937_64& rng, int m, double rmax) {
  return unit(rng, m) * std::uniform_real_distribution<double>(0.0, rmax)(rng);
}

Isometry random_isometry(std::mt19937_64& rng, int m) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<double> radius(0.1, 2.0);
  std::vector<Primitive> w;
  for (int i = 0; i < 6; ++i) {
    switch (kind(rng)) {
      case 0: w.push_back(HyperplaneReflection{unit(rng, m)}); break;
      case 1: {
        const double r = radius(rng);
        w.push_back(SphereInversion{unit(rng, m) * std::sqrt(1 + r * r), r});
        break;
      }
      case 2: {
        Mat A(m, m);
        std::normal_distribution<double> g;
        for (int k = 0; k < A.size(); ++k) A.data()[k] = g(rng);
        w.push_back(OrthogonalMap{Eigen::HouseholderQR<Mat>(A).householderQ()});
        break;
      }
      default: w.push_back(BallTransvection{in_ball(rng, m, 0.8)});
    }
  }
  return Isometry(m, std::move(w));
}

std::vector<double> first_rationals(int count) {
  std::vector<double> out;
  for (int q = 2; static_cast<int>(out.size()) < count; ++q)
    for (int a = 1; a < q && static_cast<int>(out.size()) < count; ++a)
      if (std::gcd(a, q) == 1) out.push_back(double(a) / q);
  return out;
}

Vec x1(double x) { return Vec::Constant(1, x); }

IdealPoint angle_point(double th) { return ball_ideal(Eigen::Vector2d(std::cos(th), std::sin(th))); }

// Ball model: circle_grid / fibonacci_sphere; half-space: n points of [lo, hi] on the first axis.
std::vector<IdealPoint> boundary_grid(const GridSpec& g, Model model, int dim) {
  if (model == Model::Ball) return dim == 2 ? circle_grid(g.n) : fibonacci_sphere(g.n);
  std::vector<IdealPoint> out;
  for (int i = 0; i < g.n; ++i) {
    Vec v = Vec::Zero(dim - 1);
    v(0) = g.n == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.n - 1);
    out.push_back(half_ideal(v));
  }
  return out;
}

ConicalParams conical_params(const ToleranceBlock& t, std::size_t N) {
  ConicalParams p;
  p.alphas = t.alphas;
  p.K = t.K;
  p.R = t.R;
  p.N = N;
  return p;
}

std::vector<double> coords(const Vec& v) { return {v.data(), v.data() + v.size()}; }

class Csv {
 public:
  explicit Csv(std::ostream& os) : os_(os) {}
  Csv& num(double x) { return put(format_double(x)); }
  Csv& str(const std::string& s) { return put(s); }
  void end() {
    os_ << "\n";
    first_ = true;
  }

 private:
  Csv& put(const std::string& s) {
    if (!first_) os_ << ",";
    os_ << s;
    first_ = false;
    return *this;
  }
  std::ostream& os_;
  bool first_ = true;
};

// ---------------------------------------------------------------------------
// subcommands

Report lemma_report(const ExperimentConfig& c) {
  const auto r = lemma_check(c.dim, c.trials, c.seed);
  constexpr double kTol = 1e-9;
  Report out;
  out.json["residuals"] = {{"key_geometry", r.key_geometry},
                           {"cones", r.cones},
                           {"shadow_radius", r.shadow_radius},
                           {"distance_invariance", r.distance_invariance},
                           {"associativity", r.associativity},
                           {"inverse_round_trip", r.inverse_round_trip},
                           {"psl2_boundary", r.psl2_boundary}};
  out.json["trials"] = r.trials;
  out.json["isometry_trials"] = r.isometry_trials;
  out.json["tolerance"] = kTol;
  out.json["max_geometry"] = r.max_geometry();
  out.json["max_isometry"] = r.max_isometry();
  out.json["pass"] = r.max_geometry() < kTol && r.max_isometry() < kTol;
  return out;
}

std::vector<IdealPoint> dataset_targets(const std::string& name) {
  if (name == "singleton") return {angle_point(std::numbers::pi / 3)};
  if (name == "circle12") {
    std::vector<IdealPoint> t;
    for (int k = 0; k < 12; ++k) t.push_back(angle_point(k * std::numbers::pi / 6));
    return t;
  }
  return cantor_arc_points(5);
}

Report divergence_report(const ExperimentConfig& c) {
  const auto seq = from_conical_data(zigzag_sequence(dataset_targets(c.dataset), c.N));
  AebischerParams p;
  p.conical = conical_params(c.tol, c.N);
  p.tol_lo = c.tol.tol_lo;
  p.tol_hi = c.tol.tol_hi;
  const auto grid = boundary_grid(c.grid, Model::Ball, 2);
  const auto rep = aebischer_crosscheck(seq, grid, c.N, p);
  Report out;
  out.json["limit"] = coords(to_ball(rep.limit).coords);
  out.json["decided"] = rep.n_decided;
  out.json["agree"] = rep.n_agree;
  out.json["agreement"] = rep.agreement();
  std::ostringstream os;
  Csv csv(os);
  csv.str("index").str("z0").str("z1").str("status").str("tail_diameter").str("conical").str("decided").str("agree").end();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec z = grid[i].coords;
    csv.num(double(i)).num(z(0)).num(z(1)).str(status_name(rep.classes[i].status)).num(rep.classes[i].tail_diameter);
    csv.str(verdict_name(rep.conical[i].status)).num(rep.decided[i]).num(rep.agree[i]).end();
  }
  out.csv = os.str();
  return out;
}

ContinuedFraction preset_fraction(const ExperimentConfig& c) {
  if (c.preset == "golden") return ContinuedFraction::golden();
  if (c.preset == "oscillating") return ContinuedFraction::oscillating();
  const auto coeffs = c.coefficients;
  return ContinuedFraction([coeffs](std::size_t n) { return coeffs[(n - 1) % coeffs.size()]; });
}

Report cf_report(const ExperimentConfig& c) {
  const auto cf = preset_fraction(c);
  const auto res = classical_convergence(cf, c.N, c.tol.tol_lo, c.tol.tol_hi);
  Report out;
  out.json["status"] = status_name(res.status);
  out.json["tail_diameter"] = res.tail_diameter;
  if (res.value) {
    if (res.value->inf)
      out.json["value"] = "inf";
    else
      out.json["value"] = {res.value->z.real(), res.value->z.imag()};
  } else {
    out.json["value"] = nullptr;
  }
  std::ostringstream os;
  Csv csv(os);
  csv.str("n").str("re").str("im").str("inf").str("chordal_step").end();
  const auto Ms = cf.partial_matrices(c.N);
  ExtComplex prev{0.0, false};
  for (std::size_t n = 1; n <= Ms.size(); ++n) {
    const ExtComplex w = mobius_apply(Ms[n - 1], {0.0, false});
    csv.num(double(n));
    if (w.inf)
      csv.str("").str("").num(1);
    else
      csv.num(w.z.real()).num(w.z.imag()).num(0);
    csv.num(chordal(w, prev)).end();
    prev = w;
  }
  out.csv = os.str();
  return out;
}

SetOracle oracle_for(const ExperimentConfig& c) {
  if (c.oracle == "finite") {
    std::vector<Vec> pts;
    for (double x : c.points) pts.push_back(x1(x));
    return finite_oracle(pts);
  }
  return build_example_set(*parse_example(c.oracle), c.depth);
}

Report rank_report(const ExperimentConfig& c) {
  RankParams p;
  p.depth = c.depth;
  p.max_rank = c.max_rank;
  const auto r = rank_iterate(oracle_for(c), p);
  std::ostringstream os;
  write_rank_json(os, r);
  Report out;
  out.json["rank"] = json::parse(os.str());
  std::ostringstream cs;
  Csv csv(cs);
  csv.str("z").str("removed_at").end();
  for (std::size_t i = 0; i < r.points.size(); ++i) csv.num(r.points[i](0)).num(r.removed_at[i]).end();
  out.csv = cs.str();
  return out;
}

Report construct_report(const ExperimentConfig& c) {
  PointSequence seq;
  Report out;
  const std::string& k = c.construction;
  if (k == "cantor-graph") {
    seq = cantor_graph_sequence(c.depth);
  } else if (k == "gdelta") {
    std::vector<Vec> removed;
    for (double r : first_rationals(c.removed)) removed.push_back(x1(r));
    GDeltaRep G;
    for (int n = 1; n <= c.levels; ++n) G.levels.push_back(OpenSetRep::balls({{x1(0.5), 0.5 + 1.0 / n}}).minus(removed));
    seq = gdelta_to_sequence(G);
  } else if (k == "dyadic") {
    seq = dyadic_lattice_sequence(x1(c.grid.lo), x1(c.grid.hi), c.levels);
  } else if (k == "j-alpha") {
    seq = build_J_alpha(c.alpha, c.qmax, c.extra_q);
  } else if (k == "thm3") {
    Thm3Params p;
    p.rank.depth = c.depth;
    p.rank.max_rank = c.max_rank;
    const auto r = thm3_construct(oracle_for(c), c.N, p);
    const auto chk = check_thm3_conditions(r);
    out.json["violations"] = {{"i", chk.cond_i},     {"ii", chk.cond_ii}, {"iii", chk.cond_iii}, {"iv", chk.cond_iv},
                              {"v", chk.cond_v},     {"vi", chk.cond_vi}, {"vii", chk.cond_vii}};
    out.json["alpha"] = r.alpha;
    seq = r.sequence;
  } else {
    std::vector<IdealPoint> targets;
    for (int i = 0; i < c.targets; ++i) targets.push_back(angle_point((i + 0.5) * 2.0 * std::numbers::pi / c.targets));
    seq = construct_prescribed_limit_set(targets, c.N).sequence().inverse_orbit();
  }
  const std::size_t N = seq.size();
  const auto grid = boundary_grid(c.grid, seq.model(), seq.dim());
  const auto verdicts = conical_estimate(seq, grid, conical_params(c.tol, N));
  const auto limit = limit_set_estimate(seq, grid, c.tol.limit_tol, N, c.tol.K);
  out.json["terms"] = N;
  out.json["accepted"] = std::count_if(verdicts.begin(), verdicts.end(),
                                       [](const auto& v) { return v.status == Verdict::Accepted; });
  out.json["in_limit_set"] = std::count(limit.begin(), limit.end(), true);

  std::ostringstream os;
  Csv csv(os);
  const int m = static_cast<int>(grid.front().coords.size());
  csv.str("index");
  for (int i = 0; i < m; ++i) csv.str("x" + std::to_string(i));
  csv.str("status").str("witness_count");
  for (double a : c.tol.alphas) csv.str("alpha_" + format_double(a));
  csv.str("in_limit_set").end();
  for (std::size_t s = 0; s < grid.size(); ++s) {
    csv.num(double(s));
    for (int i = 0; i < m; ++i) csv.num(grid[s].coords(i));
    csv.str(verdict_name(verdicts[s].status)).num(verdicts[s].witness_count);
    for (auto v : verdicts[s].per_alpha) csv.str(verdict_name(v));
    csv.num(limit[s]).end();
  }
  out.csv = os.str();
  if (!c.points_path.empty()) {
    std::ostringstream ps;
    write_points_json(ps, seq);
    out.points = ps.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// flags

void add_common(CLI::App* sub, ExperimentConfig& c, std::string& model) {
  sub->add_option("--dim", c.dim, "Dimension of the hyperbolic space");
  sub->add_option("--model", model, "ball or half-space")->check(CLI::IsMember({"ball", "half-space"}));
  sub->add_option("--N", c.N, "Sequence length or number of terms");
  sub->add_option("--grid-n", c.grid.n, "Number of boundary samples");
  sub->add_option("--grid-lo", c.grid.lo, "Left end of the sample interval (half-space)");
  sub->add_option("--grid-hi", c.grid.hi, "Right end of the sample interval (half-space)");
  sub->add_option("--tol-lo", c.tol.tol_lo, "Convergence tolerance");
  sub->add_option("--tol-hi", c.tol.tol_hi, "Divergence tolerance");
  sub->add_option("--alphas", c.tol.alphas, "Cone parameters, ascending")->delimiter(',');
  sub->add_option("--K", c.tol.K, "Hits required for acceptance");
  sub->add_option("--R", c.tol.R, "Distance from the origin beyond which hits count");
  sub->add_option("--limit-tol", c.tol.limit_tol, "Chordal radius of the limit set estimate");
  sub->add_option("--seed", c.seed, "Seed for randomized probe sets");
  sub->add_option("--report", c.report_path, "Report JSON path (default stdout)");
  sub->add_option("--csv", c.csv_path, "Per-sample CSV path");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigInvalid, "cannot write " + path);
  f << text;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void validate(const ExperimentConfig& c) {
  require(one_of(c.subcommand, kSubcommands), "subcommand must be one of " + join(kSubcommands));
  require(c.dim >= 2 && c.dim <= 8, "dim must lie in [2, 8]");
  require(c.N >= 10, "N must be at least 10");
  require(c.grid.n >= 1, "grid.n must be positive");
  require(c.grid.lo < c.grid.hi, "grid.lo must be below grid.hi");
  require(c.tol.tol_lo > 0 && c.tol.tol_hi > 0 && c.tol.limit_tol > 0, "tolerances must be positive");
  require(c.tol.tol_lo < c.tol.tol_hi, "tol_lo must be below tol_hi");
  require(!c.tol.alphas.empty(), "alphas must be nonempty");
  require(std::all_of(c.tol.alphas.begin(), c.tol.alphas.end(), [](double a) { return a > 0; }), "alphas must be positive");
  require(std::is_sorted(c.tol.alphas.begin(), c.tol.alphas.end()), "alphas must be ascending");
  require(c.tol.K >= 1, "K must be positive");
  require(!c.tol.R || *c.tol.R > 0, "R must be positive");
  require(c.trials >= 1, "trials must be positive");
  require(one_of(c.dataset, kDatasets), "dataset must be one of " + join(kDatasets));
  require(one_of(c.preset, kPresets), "preset must be one of " + join(kPresets));
  require(c.preset != "custom" || !c.coefficients.empty(), "custom preset needs coefficients");
  require(one_of(c.oracle, kOracles), "oracle must be one of " + join(kOracles));
  require(c.oracle != "finite" || !c.points.empty(), "finite oracle needs points");
  require(one_of(c.construction, kConstructions), "construction must be one of " + join(kConstructions));
  require(c.depth >= 1 && c.max_rank >= 1 && c.levels >= 1 && c.removed >= 0 && c.targets >= 1,
          "depth, max_rank, levels, targets must be positive");
  require(c.alpha > 0 && c.qmax >= 2, "alpha must be positive and qmax at least 2");
  require(c.subcommand != "divergence-map" || (c.dim == 2 && c.model == Model::Ball),
          "divergence-map runs in the disc (dim 2, ball)");
}

json to_json(const ExperimentConfig& c) {
  json coeffs = json::array();
  for (const auto& [a, b] : c.coefficients) coeffs.push_back({{a.real(), a.imag()}, {b.real(), b.imag()}});
  json tol{{"tol_lo", c.tol.tol_lo}, {"tol_hi", c.tol.tol_hi}, {"alphas", c.tol.alphas},
           {"K", c.tol.K},           {"R", nullptr},           {"limit_tol", c.tol.limit_tol}};
  if (c.tol.R) tol["R"] = *c.tol.R;
  return json{{"subcommand", c.subcommand},
              {"dim", c.dim},
              {"model", c.model == Model::Ball ? "ball" : "half-space"},
              {"N", c.N},
              {"grid", {{"n", c.grid.n}, {"lo", c.grid.lo}, {"hi", c.grid.hi}}},
              {"tolerances", tol},
              {"seed", c.seed},
              {"trials", c.trials},
              {"dataset", c.dataset},
              {"preset", c.preset},
              {"coefficients", coeffs},
              {"oracle", c.oracle},
              {"points", c.points},
              {"depth", c.depth},
              {"max_rank", c.max_rank},
              {"construction", c.construction},
              {"levels", c.levels},
              {"removed", c.removed},
              {"alpha", c.alpha},
              {"qmax", c.qmax},
              {"extra_q", c.extra_q},
              {"targets", c.targets}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  const json defaults = to_json(c);
  try {
    require(j.is_object(), "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      require(defaults.contains(key) || key == "outputs", "unknown config key '" + key + "'");
      (void)value;
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("subcommand", c.subcommand);
    get("dim", c.dim);
    if (j.contains("model")) {
      const auto m = j.at("model").get<std::string>();
      require(m == "ball" || m == "half-space", "model must be ball or half-space");
      c.model = m == "ball" ? Model::Ball : Model::HalfSpace;
    }
    get("N", c.N);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("n")) g.at("n").get_to(c.grid.n);
      if (g.contains("lo")) g.at("lo").get_to(c.grid.lo);
      if (g.contains("hi")) g.at("hi").get_to(c.grid.hi);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      if (t.contains("tol_lo")) t.at("tol_lo").get_to(c.tol.tol_lo);
      if (t.contains("tol_hi")) t.at("tol_hi").get_to(c.tol.tol_hi);
      if (t.contains("alphas")) t.at("alphas").get_to(c.tol.alphas);
      if (t.contains("K")) t.at("K").get_to(c.tol.K);
      if (t.contains("R") && !t.at("R").is_null()) c.tol.R = t.at("R").get<double>();
      if (t.contains("limit_tol")) t.at("limit_tol").get_to(c.tol.limit_tol);
    }
    get("seed", c.seed);
    get("trials", c.trials);
    get("dataset", c.dataset);
    get("preset", c.preset);
    if (j.contains("coefficients")) {
      for (const auto& ab : j.at("coefficients")) {
        auto z = [](const json& x) {
          return x.is_array() ? std::complex<double>(x.at(0).get<double>(), x.at(1).get<double>())
                              : std::complex<double>(x.get<double>(), 0.0);
        };
        c.coefficients.emplace_back(z(ab.at(0)), z(ab.at(1)));
      }
    }
    get("oracle", c.oracle);
    get("points", c.points);
    get("depth", c.depth);
    get("max_rank", c.max_rank);
    get("construction", c.construction);
    get("levels", c.levels);
    get("removed", c.removed);
    get("alpha", c.alpha);
    get("qmax", c.qmax);
    get("extra_q", c.extra_q);
    get("targets", c.targets);
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      if (o.contains("report")) o.at("report").get_to(c.report_path);
      if (o.contains("csv")) o.at("csv").get_to(c.csv_path);
      if (o.contains("points")) o.at("points").get_to(c.points_path);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  return c;
}

double LemmaResiduals::max_geometry() const { return std::max({key_geometry, cones, shadow_radius}); }
double LemmaResiduals::max_isometry() const {
  return std::max({distance_invariance, associativity, inverse_round_trip, psl2_boundary});
}

LemmaResiduals lemma_check(int dim, int trials, std::uint64_t seed) {
  LemmaResiduals r;
  r.trials = trials;
  r.isometry_trials = std::max(1, trials / 10);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> A(0.1, 3.0), logr(-3.0, 3.0);
  const int m = dim - 1;

  for (int k = 0; k < trials; ++k) {
    const auto [chord, rhs] = key_chord_identity(ball_ideal(unit(rng, dim)), ball_ideal(unit(rng, dim)));
    r.key_geometry = std::max(r.key_geometry, std::abs(chord - rhs));

    // cone of angle theta about the vertical line over b
    const double alpha = A(rng);
    const double th = cone_angle(alpha), s = std::exp(logr(rng));
    Vec b(m);
    for (int i = 0; i < m; ++i) b(i) = g(rng);
    const Vec u = unit(rng, m);
    const auto w = half_point(s * std::cos(th), Vec(b + s * std::sin(th) * u));
    const auto axis = line(half_infinity(dim), half_ideal(b));
    r.cones = std::max(r.cones, std::abs(dist_to_geodesic(w, axis) - alpha));

    // a boundary point on the sphere of the shadow from infinity
    const double beta = A(rng);
    const auto w2 = half_point(std::exp(logr(rng)), Vec(b));
    const auto ball = shadow_ball_infinity(w2, beta);
    const Vec x = ball.center + ball.radius * unit(rng, m);
    r.shadow_radius = std::max(r.shadow_radius, std::abs(dist_to_geodesic(w2, line(half_infinity(dim), half_ideal(x))) - beta));
  }

  for (int k = 0; k < r.isometry_trials; ++k) {
    const auto F = random_isometry(rng, dim), G = random_isometry(rng, dim), H = random_isometry(rng, dim);
    const auto p = ball_point(in_ball(rng, dim, 0.9)), q = ball_point(in_ball(rng, dim, 0.9));
    const double d = dist(p, q);
    r.distance_invariance = std::max(r.distance_invariance, std::abs(dist(apply(G, p), apply(G, q)) - d) / (1 + d));
    const Vec nested = F.act(G.act(H.act(p.coords)));
    const Vec left = compose(compose(F, G), H).act(p.coords), right = compose(F, compose(G, H)).act(p.coords);
    r.associativity = std::max({r.associativity, (left - nested).norm(), (right - nested).norm()});
    r.inverse_round_trip = std::max(r.inverse_round_trip, (invert(G).act(G.act(p.coords)) - p.coords).norm());

    // the boundary action as the limit of the Poincare extension
    const Matrix2 M = normalized(Matrix2{cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
    const cplx z(g(rng), g(rng));
    const auto near = psl2_apply(M, half_point(1e-13, Vec(Eigen::Vector2d(z.real(), z.imag()))));
    const ExtComplex lim{cplx(near.coords(1), near.coords(2)), false};
    r.psl2_boundary = std::max(r.psl2_boundary, chordal(mobius_apply(M, {z, false}), lim));
  }
  return r;
}

Report run(const ExperimentConfig& c) {
  validate(c);
  Report out;
  if (c.subcommand == "lemma-check")
    out = lemma_report(c);
  else if (c.subcommand == "divergence-map")
    out = divergence_report(c);
  else if (c.subcommand == "cf-analyze")
    out = cf_report(c);
  else if (c.subcommand == "rank")
    out = rank_report(c);
  else
    out = construct_report(c);
  out.json["config"] = to_json(c);
  out.json["subcommand"] = c.subcommand;
  return out;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments on conical limit sets, divergence sets and continued fractions", "conical_lab"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; replaces the subcommand flags");

  ExperimentConfig flags;
  std::string model = "ball";
  std::map<std::string, CLI::App*> subs;

  auto* lemma = app.add_subcommand("lemma-check", "Geometry identities and isometry suite; JSON residuals");
  lemma->add_option("--trials", flags.trials, "Random configurations per identity");
  auto* dmap = app.add_subcommand("divergence-map",
                                  "Divergence classes against the conical estimate on the circle.\n"
                                  "CSV: index,z0,z1,status,tail_diameter,conical,decided,agree");
  dmap->add_option("--dataset", flags.dataset, "singleton, circle12 or cantor")->check(CLI::IsMember(kDatasets));
  auto* cfa = app.add_subcommand("cf-analyze",
                                 "Classical convergence of a continued fraction.\nCSV: n,re,im,inf,chordal_step of T_n(0)");
  cfa->add_option("--preset", flags.preset, "golden or oscillating")->check(CLI::IsMember({"golden", "oscillating"}));
  auto* rank = app.add_subcommand("rank", "Rank iteration of the gd operator.\nCSV: z,removed_at");
  rank->add_option("--oracle", flags.oracle, "cantor, selfsimA, selfsimB, rationals01 or finite")
      ->check(CLI::IsMember(kOracles));
  rank->add_option("--points", flags.points, "Points of the finite oracle")->delimiter(',');
  rank->add_option("--depth", flags.depth, "Enumeration depth");
  rank->add_option("--max-rank", flags.max_rank, "Largest rank iterated");
  auto* cons = app.add_subcommand("construct",
                                  "Build a sequence and estimate its conical and limit sets.\n"
                                  "CSV: index,x...,status,witness_count,alpha_<a>...,in_limit_set");
  cons->add_option("--kind", flags.construction, join(kConstructions))->check(CLI::IsMember(kConstructions));
  cons->add_option("--oracle", flags.oracle, "Oracle for thm3")->check(CLI::IsMember(kOracles));
  cons->add_option("--depth", flags.depth, "Depth for cantor-graph and thm3");
  cons->add_option("--levels", flags.levels, "Levels for gdelta and dyadic");
  cons->add_option("--removed", flags.removed, "Rationals removed for gdelta");
  cons->add_option("--alpha", flags.alpha, "Exponent for j-alpha");
  cons->add_option("--qmax", flags.qmax, "Largest denominator for j-alpha");
  cons->add_option("--extra-q", flags.extra_q, "Extra denominators for j-alpha")->delimiter(',');
  cons->add_option("--targets", flags.targets, "Target count for prescribed-cf");
  cons->add_option("--points-out", flags.points_path, "JSON point list path");
  for (auto* s : {lemma, dmap, cfa, rank, cons}) {
    add_common(s, flags, model);
    subs[s->get_name()] = s;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw Error(ErrorKind::ConfigInvalid, "cannot read " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, e.what());
      }
      c = config_from_json(j);
      for (const auto& [name, s] : subs)
        if (s->parsed() && name != c.subcommand)
          throw Error(ErrorKind::ConfigInvalid, "config is for " + c.subcommand + ", not " + name);
      for (const auto& [name, s] : subs)
        if (s->parsed()) {
          if (!flags.report_path.empty()) c.report_path = flags.report_path;
          if (!flags.csv_path.empty()) c.csv_path = flags.csv_path;
          if (!flags.points_path.empty()) c.points_path = flags.points_path;
        }
    } else {
      c = flags;
      c.model = model == "ball" ? Model::Ball : Model::HalfSpace;
      for (const auto& [name, s] : subs)
        if (s->parsed()) c.subcommand = name;
      if (c.subcommand.empty()) throw Error(ErrorKind::ConfigInvalid, "a subcommand or --config is required");
    }
    const Report r = run(c);
    const std::string text = r.json.dump(2) + "\n";
    if (c.report_path.empty())
      out << text;
    else
      write_file(c.report_path, text);
    if (!c.csv_path.empty()) write_file(c.csv_path, r.csv);
    if (!c.points_path.empty()) write_file(c.points_path, r.points);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigInvalid ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace conical::cli
