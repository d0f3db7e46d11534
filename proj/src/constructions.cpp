#include "conical/constructions.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"

namespace conical {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxLattice = 50'000'000;

std::uint64_t bit_reverse(std::uint64_t x) {
  std::uint64_t y = 0;
  for (int i = 0; i < 64; ++i, x >>= 1) y = (y << 1) | (x & 1);
  return y;
}

// Calls fn(v) for every point of h Z^m inside [lo, hi].
template <typename F>
void for_lattice(const Vec& lo, const Vec& hi, double h, F&& fn) {
  const int m = static_cast<int>(lo.size());
  std::vector<long long> first(m), last(m), idx(m);
  double total = 1.0;
  for (int i = 0; i < m; ++i) {
    first[i] = static_cast<long long>(std::ceil(lo(i) / h));
    last[i] = static_cast<long long>(std::floor(hi(i) / h));
    if (last[i] < first[i]) return;
    total *= double(last[i] - first[i] + 1);
  }
  if (total > double(kMaxLattice))
    throw Error(ErrorKind::DepthTooLarge, "lattice of " + std::to_string(total) + " points");
  idx = first;
  Vec v(m);
  while (true) {
    for (int i = 0; i < m; ++i) v(i) = double(idx[i]) * h;
    fn(v, idx);
    int i = 0;
    while (i < m && ++idx[i] > last[i]) {
      idx[i] = first[i];
      ++i;
    }
    if (i == m) return;
  }
}

Vec foot(const ModelPoint& w) { return w.coords.tail(w.coords.size() - 1); }

ModelPoint as_half(const ModelPoint& w) { return w.model == Model::HalfSpace ? w : to_half(w); }

}  // namespace

// ---------------------------------------------------------------------------
// open sets

OpenSetRep OpenSetRep::whole(int m) {
  if (m < 1) throw Error(ErrorKind::PreconditionViolated, "dimension must be positive");
  OpenSetRep U;
  U.dim_ = m;
  return U;
}

OpenSetRep OpenSetRep::balls(std::vector<Ball> b) {
  if (b.empty()) throw Error(ErrorKind::PreconditionViolated, "ball union needs a ball");
  OpenSetRep U;
  U.dim_ = static_cast<int>(b.front().c.size());
  for (const auto& x : b)
    if (x.c.size() != U.dim_ || !(x.r > 0.0)) throw Error(ErrorKind::PreconditionViolated, "invalid ball");
  U.whole_ = false;
  if (U.dim_ == 1) {
    // merge into disjoint intervals
    std::sort(b.begin(), b.end(), [](const Ball& x, const Ball& y) { return x.c(0) - x.r < y.c(0) - y.r; });
    std::vector<Ball> merged;
    double a = b.front().c(0) - b.front().r, e = b.front().c(0) + b.front().r;
    for (const auto& x : b) {
      if (x.c(0) - x.r < e) {
        e = std::max(e, x.c(0) + x.r);
        continue;
      }
      merged.push_back({Vec::Constant(1, 0.5 * (a + e)), 0.5 * (e - a)});
      a = x.c(0) - x.r;
      e = x.c(0) + x.r;
    }
    merged.push_back({Vec::Constant(1, 0.5 * (a + e)), 0.5 * (e - a)});
    b.swap(merged);
  }
  U.balls_ = std::move(b);
  return U;
}

OpenSetRep OpenSetRep::finite_complement(std::vector<Vec> pts) {
  if (pts.empty()) throw Error(ErrorKind::PreconditionViolated, "no points given");
  return whole(static_cast<int>(pts.front().size())).minus(pts);
}

OpenSetRep OpenSetRep::minus(const std::vector<Vec>& pts) const {
  OpenSetRep U = *this;
  for (const auto& p : pts) {
    if (p.size() != dim_) throw Error(ErrorKind::PreconditionViolated, "point dimension mismatch");
    U.removed_.push_back(p);
  }
  return U;
}

double OpenSetRep::dist_to_complement(const Vec& v) const {
  double d = kInf;
  if (!whole_) {
    d = 0.0;
    for (const auto& b : balls_) d = std::max(d, b.r - (v - b.c).norm());
  }
  for (const auto& p : removed_) d = std::min(d, (v - p).norm());
  return d;
}

std::pair<Vec, Vec> OpenSetRep::bounding_box() const {
  if (whole_) throw Error(ErrorKind::PreconditionViolated, "open set is unbounded");
  Vec lo = Vec::Constant(dim_, kInf), hi = Vec::Constant(dim_, -kInf);
  for (const auto& b : balls_) {
    lo = lo.cwiseMin((b.c.array() - b.r).matrix());
    hi = hi.cwiseMax((b.c.array() + b.r).matrix());
  }
  return {lo, hi};
}

bool GDeltaRep::descending_on(const std::vector<Vec>& samples) const {
  for (std::size_t i = 1; i < levels.size(); ++i)
    for (const auto& s : samples)
      if (levels[i].contains(s) && !levels[i - 1].contains(s)) return false;
  return true;
}

bool dune_contains(const OpenSetRep& U, const ModelPoint& w) {
  const ModelPoint h = as_half(w);
  const double t = h.coords(0);
  const double d = U.dist_to_complement(foot(h));
  return t < 1.0 && t < d * d;
}

PointSequence localize(const PointSequence& E, const OpenSetRep& U, std::optional<std::size_t> N) {
  std::vector<ModelPoint> out;
  E.visit(N.value_or(E.size()), [&](std::size_t, const ModelPoint& w) {
    if (dune_contains(U, w)) out.push_back(w);
  });
  if (out.empty()) return PointSequence(E.model(), E.dim(), 0, PointSequence::Generator{});
  return PointSequence::from_points(std::move(out));
}

// ---------------------------------------------------------------------------
// covers

std::vector<CoverBall> cover_balls(const OpenSetRep& V, double eps, int max_shell, double shrink) {
  if (!(eps > 0.0) || !(shrink > 0.0 && shrink <= 1.0) || max_shell < 0)
    throw Error(ErrorKind::PreconditionViolated, "cover needs eps > 0, shrink in (0, 1], max_shell >= 0");
  const auto [lo, hi] = V.bounding_box();
  const int m = V.dim();
  std::vector<CoverBall> out;
  for (int n = 0; n <= max_shell; ++n) {
    const double t = shrink * eps * std::ldexp(1.0, -2 * n);
    // a point of W_n near its lower edge is covered by the next shell, whose upper edge is raised by t
    const double dlo = n == 0 ? eps : eps * std::ldexp(1.0, -n);
    const double dhi = n == 0 ? kInf : eps * std::ldexp(1.0, 1 - n) + shrink * eps * std::ldexp(1.0, 2 - 2 * n);
    for_lattice(lo, hi, t / std::sqrt(double(m)), [&](const Vec& v, const auto&) {
      const double d = V.dist_to_complement(v);
      if (d >= dlo && d <= dhi) out.push_back({v, t, n});
    });
  }
  return out;
}

CoverCheck check_cover(const OpenSetRep& V, double eps, int max_shell, const std::vector<CoverBall>& balls,
                       const std::vector<Vec>& probes, double alpha) {
  CoverCheck c;
  for (const auto& b : balls) {
    if (b.t > eps) ++c.too_large;
    if (b.t > std::ldexp(1.0, -b.shell) * V.dist_to_complement(b.v) * (1 + 1e-12)) ++c.ratio_violations;
  }
  const double floor_d = eps * std::ldexp(1.0, -max_shell);
  for (const auto& p : probes) {
    std::size_t mult = 0;
    bool covered = false;
    for (const auto& b : balls) {
      const double r = (p - b.v).norm();
      covered = covered || r < b.t;
      mult += r < alpha * b.t;
    }
    c.max_multiplicity = std::max(c.max_multiplicity, mult);
    if (V.dist_to_complement(p) >= floor_d) {
      ++c.probes;
      if (!covered) ++c.uncovered;
    }
  }
  return c;
}

PointSequence gdelta_to_sequence(const GDeltaRep& G, const GDeltaParams& p) {
  if (G.levels.empty()) throw Error(ErrorKind::PreconditionViolated, "G_delta truncation needs a level");
  std::vector<ModelPoint> pts;
  for (std::size_t n = 1; n <= G.levels.size(); ++n) {
    const double shrink = p.literal_radii ? 1.0 : 1.0 / (double(n) + std::sinh(p.ratio_alpha));
    for (const auto& b : cover_balls(G.levels[n - 1], 1.0 / double(n), p.max_shell, shrink))
      pts.push_back(half_point(b.t, b.v));
  }
  if (pts.empty()) throw Error(ErrorKind::EmptyResult, "covers are empty");
  return PointSequence::from_points(std::move(pts));
}

PointSequence dyadic_lattice_sequence(const Vec& lo, const Vec& hi, int levels) {
  if (lo.size() != hi.size() || levels < 1) throw Error(ErrorKind::PreconditionViolated, "invalid lattice box");
  std::vector<ModelPoint> pts;
  for (int n = 1; n <= levels; ++n) {
    const double h = std::ldexp(1.0, -n);
    // van der Corput order of the scan index, so every tail of a level is spread over the box
    std::vector<std::pair<std::uint64_t, ModelPoint>> level;
    std::uint64_t r = 0;
    for_lattice(lo, hi, h, [&](const Vec& v, const auto&) { level.emplace_back(bit_reverse(r++), half_point(h, v)); });
    std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, w] : level) pts.push_back(std::move(w));
  }
  if (pts.empty()) throw Error(ErrorKind::EmptyResult, "box contains no lattice points");
  return PointSequence::from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// Cantor graph

PointSequence cantor_graph_sequence(int depth, int per_side) {
  if (depth < 1 || depth > 12 || per_side < 1)
    throw Error(ErrorKind::PreconditionViolated, "depth must lie in [1, 12] and per_side be positive");
  // left ends of the intervals of J_n as numerators over 3^(n-1)
  struct Gap {
    int n;
    double a, b;
  };
  std::vector<Gap> gaps;
  std::vector<long long> left{0};
  long long den = 1;
  for (int n = 1; n <= depth; ++n) {
    for (long long a : left) gaps.push_back({n, double(3 * a + 1) / double(3 * den), double(3 * a + 2) / double(3 * den)});
    std::vector<long long> next;
    for (long long a : left) {
      next.push_back(3 * a);
      next.push_back(3 * a + 2);
    }
    left.swap(next);
    den *= 3;
  }
  std::vector<ModelPoint> pts;
  for (int j = 0; j < per_side; ++j)
    for (const auto& g : gaps) {
      const double L = g.b - g.a;
      const double delta = std::ldexp(L, -(j + 1));
      const Vec x1 = Vec::Constant(1, g.a + delta);
      pts.push_back(half_point(delta / g.n, x1));
      if (j > 0) pts.push_back(half_point(delta / g.n, Vec::Constant(1, g.b - delta)));
    }
  return PointSequence::from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// codimension-one lift

double lift_angle(std::size_t k) { return std::numbers::pi / double(k + 2); }

PointSequence codim1_lift(const std::vector<PointSequence>& gammas, std::optional<std::size_t> N_each) {
  if (gammas.empty()) throw Error(ErrorKind::PreconditionViolated, "no sequences to lift");
  std::vector<std::vector<ModelPoint>> planes;
  std::size_t longest = 0;
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const double th = lift_angle(k);
    const double s = std::sin(th), c = std::cos(th);
    std::vector<ModelPoint> plane;
    gammas[k].visit(N_each.value_or(gammas[k].size()), [&](std::size_t, const ModelPoint& w0) {
      const ModelPoint w = as_half(w0);
      const double x0 = w.coords(0);
      if (!(x0 < 2.0 * s)) return;
      Vec y(w.coords.size() + 1);
      y(0) = x0 * s;
      y.segment(1, w.coords.size() - 1) = w.coords.tail(w.coords.size() - 1);
      y(w.coords.size()) = x0 * c;
      plane.push_back(half_point(y));
    });
    longest = std::max(longest, plane.size());
    planes.push_back(std::move(plane));
  }
  std::vector<ModelPoint> pts;
  for (std::size_t i = 0; i < longest; ++i)
    for (const auto& plane : planes)
      if (i < plane.size()) pts.push_back(plane[i]);
  if (pts.empty()) throw Error(ErrorKind::EmptyResult, "every point was truncated");
  return PointSequence::from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// limit set and conical limit set together

Prescribed prescribe_limit_and_conical(const PointSequence& W, const ClosedSetRep& F, const PrescribeParams& p) {
  if (!F.dist || p.lo.size() != F.dim || p.hi.size() != F.dim)
    throw Error(ErrorKind::PreconditionViolated, "closed set needs a distance oracle and a mesh box");
  const int m = F.dim;

  if (!p.check_samples.empty()) {
    ConicalParams cp = p.conical;
    cp.N = W.size();
    const auto verdicts = conical_estimate(W, p.check_samples, cp);
    std::vector<Vec> accepted;
    for (const auto& v : verdicts) {
      if (v.status != Verdict::Accepted) continue;
      const Vec x = to_half(v.point).coords;
      if (F.dist(x) > p.resolution)
        throw Error(ErrorKind::PreconditionViolated, "conical estimate accepts a point off F");
      accepted.push_back(x);
    }
    for (const auto& s : F.samples) {
      bool interior = true;
      for (int i = 0; i < m && interior; ++i)
        for (double sg : {-1.0, 1.0})
          if (F.dist(s + sg * p.resolution * Vec::Unit(m, i)) > 0.0) interior = false;
      if (!interior) continue;
      const bool near = std::any_of(accepted.begin(), accepted.end(),
                                    [&](const Vec& a) { return (a - s).norm() <= p.resolution; });
      if (!near) throw Error(ErrorKind::PreconditionViolated, "interior of F is not in the closure of the conical set");
    }
  }

  auto by_height = [](std::vector<ModelPoint>& v) {
    std::stable_sort(v.begin(), v.end(), [](const ModelPoint& a, const ModelPoint& b) { return a.coords(0) > b.coords(0); });
  };
  std::vector<ModelPoint> kept;
  W.visit(W.size(), [&](std::size_t, const ModelPoint& w0) {
    const ModelPoint w = as_half(w0);
    const double t = w.coords(0), d = F.dist(foot(w));
    if (!(t < 1.0 && t < d * d)) kept.push_back(w);
  });
  std::vector<ModelPoint> mesh;
  for (int k = 0; k <= p.mesh_levels; ++k) {
    const double h = std::ldexp(p.h0, -k);
    for_lattice(p.lo, p.hi, h, [&](const Vec& v, const std::vector<long long>& idx) {
      const double d = F.dist(v);
      if (k > 0) {
        if (d > 4.0 * h) return;
        // points of the coarser lattice were emitted at the previous level
        if (std::all_of(idx.begin(), idx.end(), [](long long i) { return i % 2 == 0; })) return;
      }
      const double height = std::min(1.0, d * d) - 1e-9;
      if (height > 0.0) mesh.push_back(half_point(height, v));
    });
  }
  by_height(kept);
  by_height(mesh);

  // proportional interleave, so that each part keeps its share of every tail
  Prescribed out;
  out.kept_from_W = kept.size();
  out.mesh = mesh.size();
  std::vector<ModelPoint> pts;
  std::size_t i = 0, j = 0;
  while (i < kept.size() || j < mesh.size()) {
    const bool take_kept = j == mesh.size() ||
                           (i < kept.size() && double(i + 1) * double(mesh.size()) <= double(j + 1) * double(kept.size()));
    pts.push_back(take_kept ? kept[i++] : mesh[j++]);
  }
  out.sequence = pts.empty() ? PointSequence(Model::HalfSpace, m + 1, 0, PointSequence::Generator{})
                             : PointSequence::from_points(std::move(pts));
  return out;
}

void write_points_json(std::ostream& os, const PointSequence& seq, std::optional<std::size_t> N) {
  nlohmann::json pts = nlohmann::json::array();
  seq.visit(N.value_or(seq.size()), [&](std::size_t, const ModelPoint& w) {
    pts.push_back(std::vector<double>(w.coords.data(), w.coords.data() + w.coords.size()));
  });
  nlohmann::json j{{"model", seq.model() == Model::HalfSpace ? "half-space" : "ball"}, {"dim", seq.dim()}, {"points", pts}};
  os << j.dump() << "\n";
}

}  // namespace conical
