#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "conical/geometry.hpp"
#include "json.hpp"

namespace conical::cli {

struct ToleranceBlock {
  double tol_lo = 1e-6;
  double tol_hi = 1e-2;
  std::vector<double> alphas = {1.0, 2.0};
  int K = 5;
  std::optional<double> R;
  double limit_tol = 0.01;  // chordal radius for limit_set_estimate
};

// Boundary samples: n points of circle_grid in the disc, or n points of [lo, hi] on the line.
struct GridSpec {
  int n = 360;
  double lo = 0.0, hi = 1.0;
};

struct ExperimentConfig {
  std::string subcommand;
  int dim = 2;
  Model model = Model::Ball;
  std::size_t N = 2000;
  GridSpec grid;
  ToleranceBlock tol;
  std::uint64_t seed = 1;

  int trials = 10000;                 // lemma-check
  std::string dataset = "singleton";  // divergence-map: singleton, circle12, cantor
  std::string preset = "golden";      // cf-analyze: golden, oscillating, custom
  std::vector<std::pair<std::complex<double>, std::complex<double>>> coefficients;  // custom, repeated periodically
  std::string oracle = "selfsimB";    // rank, thm3: cantor, selfsimA, selfsimB, rationals01, finite
  std::vector<double> points;         // finite oracle
  int depth = 6;
  int max_rank = 8;
  std::string construction = "cantor-graph";  // cantor-graph, gdelta, dyadic, j-alpha, thm3, prescribed-cf
  int levels = 12;                    // gdelta, dyadic
  int removed = 20;                   // gdelta: first rationals of [0, 1] removed
  double alpha = 3.0;                 // j-alpha
  long long qmax = 10000;
  std::vector<long long> extra_q;
  int targets = 12;                   // prescribed-cf: equally spaced points on the circle

  std::string report_path;  // empty: stdout
  std::string csv_path;
  std::string points_path;
};

// Throws ConfigInvalid.
void validate(const ExperimentConfig& c);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct LemmaResiduals {
  int trials = 0, isometry_trials = 0;
  double key_geometry = 0.0;         // | |x - y| - 2 / cosh rho(0, xy) |
  double cones = 0.0;                // | dist to the axis - alpha | on the cone cos th cosh alpha = 1
  double shadow_radius = 0.0;        // | dist from w to the line (inf, x) - alpha | for x on the shadow sphere
  double distance_invariance = 0.0;  // | rho(Gp, Gq) - rho(p, q) | / (1 + rho(p, q))
  double associativity = 0.0;
  double inverse_round_trip = 0.0;
  double psl2_boundary = 0.0;        // chordal gap between M(z) and the image of (1e-13, z)
  double max_geometry() const;
  double max_isometry() const;
};

// Geometry identities on `trials` seeded cases, isometry checks on trials / 10.
LemmaResiduals lemma_check(int dim, int trials, std::uint64_t seed);

std::string format_double(double x);  // %.17g

struct Report {
  nlohmann::json json;  // embeds the resolved config under "config"
  std::string csv;
  std::string points;   // construct only
};

// Pure and deterministic given the config.
Report run(const ExperimentConfig& c);

// Parses flags or --config, runs, writes outputs. 0 success, 1 computational error, 2 config error.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conical::cli
