#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "conical/limits.hpp"

namespace conical {

struct Ball {
  Vec c;
  double r = 0.0;
};

// Open U in R^m: all of R^m or a finite union of open balls, minus finitely many points.
class OpenSetRep {
 public:
  static OpenSetRep whole(int m);
  static OpenSetRep balls(std::vector<Ball> b);
  static OpenSetRep finite_complement(std::vector<Vec> pts);
  OpenSetRep minus(const std::vector<Vec>& pts) const;

  int dim() const { return dim_; }
  bool bounded() const { return !whole_; }
  const std::vector<Ball>& ball_list() const { return balls_; }
  const std::vector<Vec>& removed() const { return removed_; }

  // d(v, R^m \ U); +inf for R^m. Exact in dimension 1 (intervals are merged) and for
  // pairwise disjoint balls; otherwise the largest r - |v - c| over the balls.
  double dist_to_complement(const Vec& v) const;
  bool contains(const Vec& v) const { return dist_to_complement(v) > 0.0; }
  std::pair<Vec, Vec> bounding_box() const;

 private:
  int dim_ = 1;
  bool whole_ = true;
  std::vector<Ball> balls_;
  std::vector<Vec> removed_;
};

// V_1 >= V_2 >= ... >= V_d.
struct GDeltaRep {
  std::vector<OpenSetRep> levels;
  bool descending_on(const std::vector<Vec>& samples) const;
};

// t < 1 and t < d(v, R^m \ U)^2 for w = (t, v) in the half-space.
bool dune_contains(const OpenSetRep& U, const ModelPoint& w);

// Terms of the first N (default all) that lie in the dune of U.
PointSequence localize(const PointSequence& E, const OpenSetRep& U, std::optional<std::size_t> N = {});

struct CoverBall {
  Vec v;
  double t = 0.0;
  int shell = 0;
};

// Shells W_0 = {d >= eps}, W_n = {eps 2^-n <= d <= eps 2^(1-n)} for n <= max_shell, each covered by
// balls of radius shrink * eps 4^-n centred on a lattice of spacing radius / sqrt(m).
std::vector<CoverBall> cover_balls(const OpenSetRep& V, double eps, int max_shell = 6, double shrink = 1.0);

struct CoverCheck {
  std::size_t probes = 0;         // probes with d >= eps 2^-max_shell
  std::size_t uncovered = 0;      // (i)
  std::size_t too_large = 0;      // (ii) t > eps
  std::size_t max_multiplicity = 0;  // (iii) most inflated balls B(v, alpha t) over one probe
  std::size_t ratio_violations = 0;  // (iv) t / d(v) > 2^-shell
  bool ok() const { return uncovered == 0 && too_large == 0 && ratio_violations == 0; }
};
CoverCheck check_cover(const OpenSetRep& V, double eps, int max_shell, const std::vector<CoverBall>& balls,
                       const std::vector<Vec>& probes, double alpha = 4.0);

struct GDeltaParams {
  int max_shell = 4;
  // Level n uses eps = 1/n and radii shrunk by 1/(n + sinh(ratio_alpha)), so that t/d tends to 0
  // along the whole sequence; literal_radii keeps the cover radii of the finite-multiplicity lemma.
  double ratio_alpha = 4.0;
  bool literal_radii = false;
};

// Lifts every cover ball B(v, t) of every level to (t, v), level by level.
PointSequence gdelta_to_sequence(const GDeltaRep& G, const GDeltaParams& p = {});

// Levels n = 1..levels of the lattice (2^-n, 2^-n Z^m) over the box [lo, hi]; within a level,
// points follow the van der Corput order of their scan index.
PointSequence dyadic_lattice_sequence(const Vec& lo, const Vec& hi, int levels);

// Graph (d(x, C) / n, x) over the gaps of the Cantor set of length 3^-n, n <= depth, sampled at
// distances L 2^-(j+1) from both ends, j < per_side; ordered by j, then by gap.
PointSequence cantor_graph_sequence(int depth, int per_side = 24);

// Gamma_k (half-space, dimension m) placed on plane n = k + 2 of H^(m+1):
// (x0, x') -> (x0 sin(pi/n), x', x0 cos(pi/n)) for x0 < 2 sin(pi/n), interleaved round-robin.
PointSequence codim1_lift(const std::vector<PointSequence>& gammas, std::optional<std::size_t> N_each = {});
double lift_angle(std::size_t k);  // pi / (k + 2)

// Closed F through sample points and a distance oracle.
struct ClosedSetRep {
  int dim = 1;
  std::vector<Vec> samples;
  std::function<double(const Vec&)> dist;
};

struct PrescribeParams {
  Vec lo, hi;             // mesh box
  double h0 = 0.25;       // coarsest mesh spacing
  int mesh_levels = 10;   // spacing h0 2^-k near F
  double resolution = 0.02;
  std::vector<IdealPoint> check_samples;  // conical estimate of W on these
  ConicalParams conical = [] {
    ConicalParams c;
    c.alphas = {1.0, 2.0};
    return c;
  }();
};

struct Prescribed {
  PointSequence sequence;       // by decreasing height
  std::size_t kept_from_W = 0;
  std::size_t mesh = 0;
};

// (W minus the dune of R^m \ F) together with a mesh of the dune boundary at height min(1, d_F^2) - 1e-9.
// Throws PreconditionViolated when an accepted check sample lies off F, or when an interior
// sample of F is farther than the resolution from every accepted sample.
Prescribed prescribe_limit_and_conical(const PointSequence& W, const ClosedSetRep& F, const PrescribeParams& p);

void write_points_json(std::ostream& os, const PointSequence& seq, std::optional<std::size_t> N = {});

}  // namespace conical
