#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "conical/limits.hpp"
#include "conical/mobius.hpp"

namespace conical {

// A countable subset of R^dim known through finite enumerations.
// Every point of the true set lies within resolution(d) of enumerate(d).
struct SetOracle {
  std::string name;
  int dim = 1;
  std::function<std::vector<Vec>(int)> enumerate;
  std::function<double(int)> resolution;
};

enum class ExampleSet { CantorAccessible, SelfSimA, SelfSimB, Rationals01 };
const char* example_name(ExampleSet s);
std::optional<ExampleSet> parse_example(const std::string& s);

// Enumerations above this size throw DepthTooLarge.
inline constexpr std::size_t kMaxEnumeration = 1000000;

// SelfSimA/B at depth d use the words n_1...n_k whose A-contraction product
// prod 1/(8 n_i^2) is at least 2^-(2d+3); both sets share the word list.
SetOracle build_example_set(ExampleSet which, int depth);
SetOracle finite_oracle(std::vector<Vec> points, std::string name = "finite");
SetOracle product_oracle(const SetOracle& a, const SetOracle& b);

using Word = std::vector<int>;
std::vector<Word> selfsim_words(int depth);
double selfsim_a(const Word& w);  // f_{n_1} ... f_{n_k}(0)
double selfsim_b(const Word& w);  // g_{n_1} ... g_{n_k}(0)

// Nearest-point queries on a finite point set.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec> pts);
  const std::vector<Vec>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  int dim() const { return pts_.empty() ? 0 : static_cast<int>(pts_.front().size()); }
  double nearest(const Vec& v) const;

 private:
  std::vector<Vec> pts_;  // sorted by first coordinate
};

struct GdParams {
  std::vector<double> eps = {0.5, 0.25, 0.2};  // descending
  std::optional<double> scale_min;                       // default 4 eta
  double scale_max = 0.125;
  int radii_per_octave = 8;
  int directions = 16;
};

enum class GdStatus { InGd, NotInGd, Unresolved };
const char* gd_status_name(GdStatus s);

struct GdVerdict {
  Vec z;
  GdStatus status = GdStatus::Unresolved;
  std::optional<double> eps;      // NotInGd: the largest eps with witnesses at every scale
  std::vector<double> scales;     // probed octaves s, radii in [s, 2s)
  std::vector<Vec> witnesses;     // NotInGd: one centre v per scale, ball B(v, eps|v-z|) empty
};

// Enumeration at a fixed depth together with its resolution.
struct GdContext {
  PointCloud cloud;
  double eta = 0.0;
  GdContext() = default;
  GdContext(std::vector<Vec> pts, double eta);
  GdContext(const SetOracle& E, int depth);
};

std::vector<double> gd_scales(const GdContext& ctx, const GdParams& p);
GdVerdict gd_test(const GdContext& ctx, const Vec& z, const GdParams& p = {});
GdVerdict gd_test(const SetOracle& E, const Vec& z, const GdParams& p, int depth);

enum class RankStatus { EmptyAtRank, Stalled, Exhausted };
const char* rank_status_name(RankStatus s);

struct RankParams {
  GdParams gd;
  int depth = 6;
  int max_rank = 8;
};

struct RankReport {
  RankStatus status = RankStatus::Exhausted;
  int rank = 0;                      // EmptyAtRank: k with E^k empty; Stalled: k with E^{k+1} = E^k
  std::vector<Vec> points;           // E^1
  std::vector<int> removed_at;       // k + 1 when the point left E^k; 0 if never removed
  std::vector<std::size_t> sizes;    // |E^1|, |E^2|, ...
  std::vector<std::vector<GdVerdict>> verdicts;  // per rank, one per member of E^k
  double eta = 0.0;
};

// E^{k+1} = E^k minus the points certified NotInGd against E^k.
RankReport rank_iterate(const SetOracle& E, const RankParams& p);

// Piecewise-linear map through (f_w(0), g_w(0)) and the cluster hulls w(+-4/7) -> w(+-8/31).
class PhiMap {
 public:
  explicit PhiMap(int depth = 6);
  double operator()(double x) const;
  const std::vector<double>& knots_a() const { return a_; }
  const std::vector<double>& knots_b() const { return b_; }

 private:
  std::vector<double> a_, b_;
};
double phi_map(double x);

// (q^-alpha, a/q) with 0 < a < q, gcd(a, q) = 1, by increasing q; extra denominators are appended.
PointSequence build_J_alpha(double alpha, long long qmax, std::vector<long long> extra_q = {});

// Half-space points (|v - z| / sinh(2 alpha), v) whose alpha-shadows from infinity miss E by 2 eta.
std::vector<ModelPoint> gd_failure_witnesses(const GdContext& ctx, const Vec& z, double alpha,
                                             const GdParams& p = {});
double alpha_from_eps(double eps);  // acosh(1 / (2 eps))

struct Thm3Term {
  std::size_t k = 0, j = 0;  // 0-based point index, 1-based column index
  ModelPoint w;
  Vec v;
  double t = 0.0, radius = 0.0, delta = 1.0;
};

struct Thm3Result {
  std::vector<Vec> z;          // z_1, z_2, ... by (rank, magnitude, coordinates)
  std::vector<int> beta;       // rank label of each z_k
  std::vector<double> alpha;   // alpha_k
  std::vector<double> eps;     // eps_k = 1 / (2 cosh alpha_k)
  std::vector<Thm3Term> terms; // flattened round-robin over k
  PointSequence sequence;
  RankReport rank;
};

struct Thm3Params {
  RankParams rank;
  double start_fraction = 1.0 / 32;  // first column scale relative to the distance to other points
};

Thm3Result thm3_construct(const SetOracle& E, std::size_t N_pairs, const Thm3Params& p = {});

struct Thm3Check {
  std::size_t cond_i = 0, cond_ii = 0, cond_iii = 0, cond_iv = 0, cond_v = 0, cond_vi = 0, cond_vii = 0;
  std::size_t total() const { return cond_i + cond_ii + cond_iii + cond_iv + cond_v + cond_vi + cond_vii; }
};
Thm3Check check_thm3_conditions(const Thm3Result& r);

void write_enumeration_csv(std::ostream& os, const std::vector<Vec>& pts);
void write_rank_json(std::ostream& os, const RankReport& r);

}  // namespace conical
