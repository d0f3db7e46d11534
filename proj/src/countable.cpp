#include "conical/countable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "json.hpp"

namespace conical {

namespace {

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  const int T = std::min<int>(worker_threads(), static_cast<int>(n));
  if (T <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + T - 1) / T;
  for (int t = 0; t < T; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) fn(i);
    });
  for (auto& th : pool) th.join();
}

Vec scalar(double x) { return Vec::Constant(1, x); }

double a_ratio(int n) { return 1.0 / (8.0 * n * n); }

double selfsim_tau(int depth) { return std::ldexp(1.0, -(2 * depth + 3)); }

void too_large(const std::string& what) {
  throw Error(ErrorKind::DepthTooLarge, what + " enumeration exceeds " + std::to_string(kMaxEnumeration) + " points");
}

// Unit directions: +-1 in dimension 1, equally spaced in dimension 2, a spiral net otherwise.
std::vector<Vec> direction_net(int dim, int count) {
  std::vector<Vec> out;
  if (dim == 1) return {scalar(1.0), scalar(-1.0)};
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * i / count;
      out.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
    }
    return out;
  }
  for (int i = 0; i < dim; ++i) {
    out.push_back(Vec::Unit(dim, i));
    out.push_back(-Vec::Unit(dim, i));
  }
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  while (static_cast<int>(out.size()) < std::max(count, 2 * dim)) {
    Vec u(dim);
    for (int i = 0; i < dim; ++i) u(i) = g(rng);
    out.push_back(u.normalized());
  }
  return out;
}

}  // namespace

const char* example_name(ExampleSet s) {
  switch (s) {
    case ExampleSet::CantorAccessible: return "cantor";
    case ExampleSet::SelfSimA: return "selfsimA";
    case ExampleSet::SelfSimB: return "selfsimB";
    case ExampleSet::Rationals01: return "rationals01";
  }
  return "?";
}

std::optional<ExampleSet> parse_example(const std::string& s) {
  for (auto e : {ExampleSet::CantorAccessible, ExampleSet::SelfSimA, ExampleSet::SelfSimB, ExampleSet::Rationals01})
    if (s == example_name(e)) return e;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// example sets

std::vector<Word> selfsim_words(int depth) {
  if (depth < 0) throw Error(ErrorKind::PreconditionViolated, "depth must be nonnegative");
  const double tau = selfsim_tau(depth);
  std::vector<Word> out{{}};
  std::vector<std::pair<Word, double>> stack{{{}, 1.0}};
  while (!stack.empty()) {
    auto [w, P] = std::move(stack.back());
    stack.pop_back();
    for (int n = 1; P * a_ratio(n) >= tau; ++n)
      for (int s : {n, -n}) {
        Word c = w;
        c.push_back(s);
        out.push_back(c);
        stack.emplace_back(std::move(c), P * a_ratio(n));
        if (out.size() > kMaxEnumeration) too_large("self-similar");
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double selfsim_a(const Word& w) {
  double x = 0.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = 1.0 / (2.0 * *it) + x * a_ratio(*it);
  return x;
}

double selfsim_b(const Word& w) {
  double x = 0.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    const double c = std::ldexp(1.0, -2 * std::abs(*it));
    x = (*it > 0 ? c : -c) + x * c / 8.0;
  }
  return x;
}

SetOracle build_example_set(ExampleSet which, int depth) {
  if (depth < 1) throw Error(ErrorKind::PreconditionViolated, "depth must be at least 1");
  SetOracle E;
  E.name = example_name(which);
  E.dim = 1;
  switch (which) {
    case ExampleSet::CantorAccessible:
      if (depth > 19) too_large("Cantor");
      // endpoints of the 2^(d-1) intervals of J_d
      E.enumerate = [](int d) {
        // integer numerators over 3^(d-1)
        std::vector<long long> left{0};
        long long len = 1;
        for (int n = 2; n <= d; ++n) {
          std::vector<long long> next;
          for (long long a : left) {
            next.push_back(3 * a);
            next.push_back(3 * a + 2);
          }
          left.swap(next);
          len *= 3;
        }
        std::vector<Vec> out;
        for (long long a : left) {
          out.push_back(scalar(double(a) / double(len)));
          out.push_back(scalar(double(a + 1) / double(len)));
        }
        return out;
      };
      // later endpoints in an interval of J_d lie in its outer thirds, within 3^-d of its ends
      E.resolution = [](int d) { return std::pow(3.0, -d); };
      break;
    case ExampleSet::SelfSimA:
    case ExampleSet::SelfSimB: {
      const bool a = which == ExampleSet::SelfSimA;
      selfsim_words(depth);  // size check
      E.enumerate = [a](int d) {
        std::vector<Vec> out;
        for (const auto& w : selfsim_words(d)) out.push_back(scalar(a ? selfsim_a(w) : selfsim_b(w)));
        return out;
      };
      // A: missing children of a word with product P lie within sqrt(2 tau P) of an enumerated point.
      // B: within (64/31) tau, using sup B = 8/31.
      E.resolution = [a](int d) {
        const double tau = selfsim_tau(d);
        return a ? std::sqrt(2.0 * tau) : 64.0 / 31.0 * tau;
      };
      break;
    }
    case ExampleSet::Rationals01:
      if (3.0 * depth * depth / (std::numbers::pi * std::numbers::pi) > kMaxEnumeration) too_large("rationals");
      E.enumerate = [](int d) {
        std::vector<Vec> out{scalar(0.0), scalar(1.0)};
        for (int q = 2; q <= d; ++q)
          for (int p = 1; p < q; ++p)
            if (std::gcd(p, q) == 1) out.push_back(scalar(double(p) / q));
        return out;
      };
      E.resolution = [](int d) { return 0.5 / d; };
      break;
  }
  return E;
}

SetOracle finite_oracle(std::vector<Vec> points, std::string name) {
  if (points.empty()) throw Error(ErrorKind::PreconditionViolated, "finite oracle needs points");
  SetOracle E;
  E.name = std::move(name);
  E.dim = static_cast<int>(points.front().size());
  E.enumerate = [points](int) { return points; };
  E.resolution = [](int d) { return std::ldexp(1.0, -(d + 40)); };
  return E;
}

SetOracle product_oracle(const SetOracle& a, const SetOracle& b) {
  SetOracle E;
  E.name = a.name + "x" + b.name;
  E.dim = a.dim + b.dim;
  E.enumerate = [a, b](int d) {
    const auto pa = a.enumerate(d), pb = b.enumerate(d);
    if (pa.size() * pb.size() > kMaxEnumeration) too_large("product");
    std::vector<Vec> out;
    out.reserve(pa.size() * pb.size());
    for (const auto& x : pa)
      for (const auto& y : pb) {
        Vec v(x.size() + y.size());
        v << x, y;
        out.push_back(v);
      }
    return out;
  };
  E.resolution = [a, b](int d) { return std::hypot(a.resolution(d), b.resolution(d)); };
  return E;
}

// ---------------------------------------------------------------------------
// nearest points

PointCloud::PointCloud(std::vector<Vec> pts) : pts_(std::move(pts)) {
  std::sort(pts_.begin(), pts_.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
}

double PointCloud::nearest(const Vec& v) const {
  if (pts_.empty()) return std::numeric_limits<double>::infinity();
  const auto it = std::lower_bound(pts_.begin(), pts_.end(), v(0), [](const Vec& p, double x) { return p(0) < x; });
  double best = std::numeric_limits<double>::infinity();
  for (auto r = it; r != pts_.end() && (*r)(0) - v(0) < best; ++r) best = std::min(best, (*r - v).norm());
  for (auto l = it; l != pts_.begin();) {
    --l;
    if (v(0) - (*l)(0) >= best) break;
    best = std::min(best, (*l - v).norm());
  }
  return best;
}

// ---------------------------------------------------------------------------
// gd

const char* gd_status_name(GdStatus s) {
  switch (s) {
    case GdStatus::InGd: return "InGd";
    case GdStatus::NotInGd: return "NotInGd";
    case GdStatus::Unresolved: return "Unresolved";
  }
  return "?";
}

GdContext::GdContext(std::vector<Vec> pts, double eta_) : cloud(std::move(pts)), eta(eta_) {}

GdContext::GdContext(const SetOracle& E, int depth) : cloud(E.enumerate(depth)), eta(E.resolution(depth)) {}

std::vector<double> gd_scales(const GdContext& ctx, const GdParams& p) {
  const double smin = p.scale_min.value_or(4.0 * ctx.eta);
  if (smin < 4.0 * ctx.eta * (1 - 1e-12))
    throw Error(ErrorKind::ScaleTooFine, "scale_min " + std::to_string(smin) + " below 4 eta = " +
                                             std::to_string(4.0 * ctx.eta));
  std::vector<double> out;
  for (double s = p.scale_max; s >= smin * (1 - 1e-12); s /= 2) out.push_back(s);
  return out;
}

GdVerdict gd_test(const GdContext& ctx, const Vec& z, const GdParams& p) {
  if (p.eps.empty() || !std::is_sorted(p.eps.rbegin(), p.eps.rend()) || p.eps.front() >= 1.0 || p.eps.back() <= 0.0)
    throw Error(ErrorKind::PreconditionViolated, "eps_list must be descending in (0, 1)");
  GdVerdict out;
  out.z = z;
  out.scales = gd_scales(ctx, p);
  if (out.scales.empty()) return out;
  const auto dirs = direction_net(static_cast<int>(z.size()), p.directions);
  const int R = p.radii_per_octave;
  const std::size_t S = out.scales.size(), E = p.eps.size();

  // distances for every probe, shared by all eps
  struct Probe {
    Vec v;
    double r, d;
  };
  std::vector<std::vector<Probe>> probes(S);
  for (std::size_t i = 0; i < S; ++i)
    for (int j = 0; j < R; ++j) {
      const double r = out.scales[i] * std::exp2(double(j) / R);
      for (const auto& u : dirs) {
        Vec v = z + r * u;
        const double d = ctx.cloud.nearest(v);
        probes[i].push_back({std::move(v), r, d});
      }
    }

  bool in_gd = true;
  for (std::size_t e = 0; e < E; ++e) {
    const double eps = p.eps[e];
    std::vector<Vec> wit;
    for (std::size_t i = 0; i < S; ++i) {
      const Probe* best = nullptr;
      for (const auto& pr : probes[i]) {
        if (pr.d >= eps * pr.r + 2.0 * ctx.eta && (!best || pr.d / pr.r > best->d / best->r)) best = &pr;
        if (pr.d > eps * pr.r - 2.0 * ctx.eta) in_gd = false;
      }
      if (!best) break;
      wit.push_back(best->v);
    }
    if (wit.size() == S && !out.eps) {
      out.status = GdStatus::NotInGd;
      out.eps = eps;
      out.witnesses = std::move(wit);
    }
  }
  if (!out.eps && in_gd) out.status = GdStatus::InGd;
  return out;
}

GdVerdict gd_test(const SetOracle& E, const Vec& z, const GdParams& p, int depth) {
  return gd_test(GdContext(E, depth), z, p);
}

// ---------------------------------------------------------------------------
// rank iteration

const char* rank_status_name(RankStatus s) {
  switch (s) {
    case RankStatus::EmptyAtRank: return "EmptyAtRank";
    case RankStatus::Stalled: return "Stalled";
    case RankStatus::Exhausted: return "Exhausted";
  }
  return "?";
}

RankReport rank_iterate(const SetOracle& E, const RankParams& p) {
  if (p.max_rank < 2) throw Error(ErrorKind::PreconditionViolated, "max_rank must be at least 2");
  RankReport rep;
  const GdContext base(E, p.depth);
  rep.points = base.cloud.points();
  rep.eta = base.eta;
  rep.removed_at.assign(rep.points.size(), 0);
  gd_scales(base, p.gd);  // ScaleTooFine before any work

  std::vector<std::size_t> alive(rep.points.size());
  std::iota(alive.begin(), alive.end(), 0);
  rep.sizes.push_back(alive.size());
  for (int k = 1; k < p.max_rank; ++k) {
    if (alive.empty()) break;
    std::vector<Vec> pts;
    for (auto i : alive) pts.push_back(rep.points[i]);
    const GdContext ctx(pts, base.eta);
    std::vector<GdVerdict> verdicts(alive.size());
    parallel_for(alive.size(), [&](std::size_t i) { verdicts[i] = gd_test(ctx, rep.points[alive[i]], p.gd); });
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (verdicts[i].status == GdStatus::NotInGd)
        rep.removed_at[alive[i]] = k + 1;
      else
        next.push_back(alive[i]);
    }
    rep.verdicts.push_back(std::move(verdicts));
    rep.sizes.push_back(next.size());
    if (next.empty()) {
      rep.status = RankStatus::EmptyAtRank;
      rep.rank = k + 1;
      return rep;
    }
    if (next.size() == alive.size()) {
      rep.status = RankStatus::Stalled;
      rep.rank = k;
      return rep;
    }
    alive.swap(next);
  }
  rep.status = RankStatus::Exhausted;
  rep.rank = p.max_rank;
  return rep;
}

// ---------------------------------------------------------------------------
// phi

PhiMap::PhiMap(int depth) {
  std::vector<std::pair<double, double>> k{{-1.0, -1.0}, {1.0, 1.0}};
  constexpr double supA = 4.0 / 7.0, supB = 8.0 / 31.0;
  for (const auto& w : selfsim_words(depth)) {
    k.push_back({selfsim_a(w), selfsim_b(w)});
    // w(+-sup) via the word applied to the hull endpoints
    double xa = supA, xb = supB;
    for (int s : {1, -1}) {
      xa = s * supA;
      xb = s * supB;
      for (auto it = w.rbegin(); it != w.rend(); ++it) {
        const double c = std::ldexp(1.0, -2 * std::abs(*it));
        xa = 1.0 / (2.0 * *it) + xa * a_ratio(*it);
        xb = (*it > 0 ? c : -c) + xb * c / 8.0;
      }
      k.push_back({xa, xb});
    }
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end(), [](auto& x, auto& y) { return x.first == y.first; }), k.end());
  // hull knots of deep words can round onto their neighbours in B; keep the word points
  std::vector<std::pair<double, double>> kept;
  for (const auto& kn : k)
    if (kept.empty() || kn.second > kept.back().second) kept.push_back(kn);
  for (auto [x, y] : kept) {
    a_.push_back(x);
    b_.push_back(y);
  }
}

double PhiMap::operator()(double x) const {
  if (x <= a_.front()) return b_.front() + (x - a_.front());
  if (x >= a_.back()) return b_.back() + (x - a_.back());
  const std::size_t i = std::upper_bound(a_.begin(), a_.end(), x) - a_.begin();
  const double lam = (x - a_[i - 1]) / (a_[i] - a_[i - 1]);
  return b_[i - 1] + lam * (b_[i] - b_[i - 1]);
}

double phi_map(double x) {
  static const PhiMap phi(6);
  return phi(x);
}

// ---------------------------------------------------------------------------
// J(alpha)

PointSequence build_J_alpha(double alpha, long long qmax, std::vector<long long> extra_q) {
  if (!(alpha > 2.0)) throw Error(ErrorKind::PreconditionViolated, "alpha must exceed 2");
  if (qmax < 2) throw Error(ErrorKind::PreconditionViolated, "qmax must be at least 2");
  std::vector<long long> qs;
  for (long long q = 2; q <= qmax; ++q) qs.push_back(q);
  std::sort(extra_q.begin(), extra_q.end());
  for (long long q : extra_q)
    if (q > qmax) qs.push_back(q);
  std::size_t total = 0;
  for (long long q : qs)
    for (long long a = 1; a < q; ++a) total += std::gcd(a, q) == 1;
  auto visit = [alpha, qs](std::size_t N, const PointSequence::Callback& fn) {
    std::size_t n = 0;
    for (long long q : qs) {
      const double t = std::pow(double(q), -alpha);
      for (long long a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        if (++n > N) return;
        fn(n, half_point(t, scalar(double(a) / double(q))));
      }
    }
  };
  return PointSequence(Model::HalfSpace, 2, total, PointSequence::Visitor(visit));
}

// ---------------------------------------------------------------------------
// witnesses and the construction for finite rank

double alpha_from_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorKind::PreconditionViolated, "eps must lie in (0, 1/2)");
  return std::acosh(1.0 / (2.0 * eps));
}

std::vector<ModelPoint> gd_failure_witnesses(const GdContext& ctx, const Vec& z, double alpha, const GdParams& p) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::PreconditionViolated, "alpha must be positive");
  GdParams q = p;
  q.eps = {1.0 / (2.0 * std::cosh(alpha))};
  const auto v = gd_test(ctx, z, q);
  if (v.status != GdStatus::NotInGd)
    throw Error(ErrorKind::NoWitness, std::string("gd verdict is ") + gd_status_name(v.status));
  std::vector<ModelPoint> out;
  for (const auto& c : v.witnesses) out.push_back(half_point((c - z).norm() / std::sinh(2.0 * alpha), c));
  return out;
}

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

Thm3Result thm3_construct(const SetOracle& E, std::size_t N_pairs, const Thm3Params& p) {
  Thm3Result res;
  res.rank = rank_iterate(E, p.rank);
  const auto& rk = res.rank;
  if (rk.status != RankStatus::EmptyAtRank)
    throw Error(ErrorKind::RankDataInconsistent,
                std::string("rank iteration ended ") + rank_status_name(rk.status) + "; finite rank required");
  const std::size_t M = rk.points.size();
  if (N_pairs < M) throw Error(ErrorKind::PreconditionViolated, "N_pairs must cover every point at least once");

  // enumeration by (rank, magnitude, coordinates)
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ra = rk.removed_at[a] - 1, rb = rk.removed_at[b] - 1;
    if (ra != rb) return ra < rb;
    const double ma = rk.points[a].norm(), mb = rk.points[b].norm();
    if (ma != mb) return ma < mb;
    return lex_less(rk.points[a], rk.points[b]);
  });

  // members of E^beta and the verdict of each point at its own rank
  std::vector<GdContext> level(rk.verdicts.size() + 1);
  std::vector<const GdVerdict*> own(M, nullptr);
  for (std::size_t b = 0; b < rk.verdicts.size(); ++b) {
    std::vector<Vec> pts;
    for (const auto& v : rk.verdicts[b]) pts.push_back(v.z);
    level[b + 1] = GdContext(pts, rk.eta);
  }
  const PointCloud all(rk.points);
  for (std::size_t b = 0; b < rk.verdicts.size(); ++b)
    for (const auto& v : rk.verdicts[b])
      if (v.status == GdStatus::NotInGd)
        for (std::size_t i = 0; i < M; ++i)
          if (rk.removed_at[i] == int(b) + 2 && rk.points[i] == v.z) own[i] = &v;

  std::vector<double> start(M);
  std::vector<Vec> dir(M);
  for (std::size_t k = 0; k < M; ++k) {
    const std::size_t i = order[k];
    const GdVerdict* v = own[i];
    if (!v || !v->eps) throw Error(ErrorKind::RankDataInconsistent, "point without a NotInGd verdict");
    const int beta = rk.removed_at[i] - 1;
    const double eps = std::min(*v->eps, 0.25);
    res.z.push_back(rk.points[i]);
    res.beta.push_back(beta);
    res.eps.push_back(eps);
    res.alpha.push_back(alpha_from_eps(eps));
    const Vec& finest = v->witnesses.back();
    dir[k] = (finest - rk.points[i]).normalized();
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < M; ++o)
      if (o != i) sep = std::min(sep, (rk.points[o] - rk.points[i]).norm());
    start[k] = std::min((finest - rk.points[i]).norm(), p.start_fraction * sep);
  }

  const std::size_t K = M;
  for (std::size_t n = 0; n < N_pairs; ++n) {
    const std::size_t k = n % K, j = n / K + 1;
    const Vec& z = res.z[k];
    const double alpha = res.alpha[k];
    const double s = std::ldexp(start[k], -static_cast<int>(j - 1));
    const auto& lvl = level[res.beta[k]];
    Thm3Term term;
    term.k = k;
    term.j = j;
    // the witness direction may miss E^beta below the certified scales; try the net in turn
    auto dirs = direction_net(static_cast<int>(z.size()), 16);
    dirs.insert(dirs.begin(), dir[k]);
    bool found = false;
    for (const auto& u : dirs) {
      const Vec v = z + s * u;
      if (lvl.cloud.nearest(v) <= res.eps[k] * s) continue;
      // condition (vii): shrink the height until no enumerated point sits on the shadow sphere
      for (int m = 0; m <= 32 && !found; ++m) {
        const double delta = 1.0 - m / 64.0;
        const double t = delta * s / std::sinh(2.0 * alpha);
        const double r = t * std::sinh(alpha);
        const double dnear = all.nearest(v);
        bool on_sphere = false;
        if (std::abs(dnear - r) <= 1e-9 * r) on_sphere = true;
        for (const auto& x : rk.points)
          if (std::abs((x - v).norm() - r) <= 1e-9 * r) on_sphere = true;
        if (on_sphere) continue;
        term.v = v;
        term.t = t;
        term.radius = r;
        term.delta = delta;
        term.w = half_point(t, v);
        found = true;
      }
      if (found) break;
    }
    if (!found) throw Error(ErrorKind::ConstructionStuck, "pair index " + std::to_string(n));
    res.terms.push_back(std::move(term));
  }
  std::vector<ModelPoint> pts;
  for (const auto& t : res.terms) pts.push_back(t.w);
  res.sequence = PointSequence::from_points(std::move(pts));
  return res;
}

Thm3Check check_thm3_conditions(const Thm3Result& r) {
  Thm3Check c;
  const std::size_t M = r.z.size();
  std::vector<std::vector<const Thm3Term*>> cols(M);
  for (const auto& t : r.terms) cols[t.k].push_back(&t);

  // (i): heights shrink along each column while the distance to the vertical geodesic stays bounded
  for (const auto& col : cols)
    for (std::size_t j = 1; j < col.size(); ++j)
      if (!(col[j]->t < col[j - 1]->t)) ++c.cond_i;

  // (ii): diam N_kj < 1 / (k j)
  for (const auto& t : r.terms)
    if (!(2.0 * t.radius < 1.0 / double((t.k + 1) * t.j))) ++c.cond_ii;

  // (iii)/(iv): equal ranks disjoint; lower rank nested in or disjoint from higher rank
  for (std::size_t a = 0; a < r.terms.size(); ++a)
    for (std::size_t b = a + 1; b < r.terms.size(); ++b) {
      const auto& A = r.terms[a];
      const auto& B = r.terms[b];
      const double d = (A.v - B.v).norm();
      if (d >= A.radius + B.radius) continue;
      const int ba = r.beta[A.k], bb = r.beta[B.k];
      if (ba == bb) {
        ++c.cond_iii;
        continue;
      }
      const auto& lo = ba < bb ? A : B;
      const auto& hi = ba < bb ? B : A;
      if (!(d + lo.radius <= hi.radius)) ++c.cond_iv;
    }

  // (v): N_kj misses E^beta(k); (vii): no enumerated point on a boundary sphere
  const std::size_t P = r.rank.points.size();
  for (const auto& t : r.terms) {
    const int beta = r.beta[t.k];
    for (std::size_t i = 0; i < P; ++i) {
      const double d = (r.rank.points[i] - t.v).norm();
      const bool member = r.rank.removed_at[i] == 0 || r.rank.removed_at[i] > beta;
      if (member && d < t.radius) ++c.cond_v;
      if (std::abs(d - t.radius) <= 1e-9 * t.radius) ++c.cond_vii;
    }
  }

  // (vi): rho(w_kj, gamma_{z_k}) < 2 alpha_k + log 2, with sinh rho = |v - z| / t
  for (const auto& t : r.terms) {
    const double rho = std::asinh((t.v - r.z[t.k]).norm() / t.t);
    if (!(rho < 2.0 * r.alpha[t.k] + std::log(2.0))) ++c.cond_vi;
  }
  return c;
}

// ---------------------------------------------------------------------------
// export

void write_enumeration_csv(std::ostream& os, const std::vector<Vec>& pts) {
  char buf[64];
  const int d = pts.empty() ? 1 : static_cast<int>(pts.front().size());
  os << "index";
  for (int i = 0; i < d; ++i) os << ",x" << i;
  os << "\n";
  for (std::size_t n = 0; n < pts.size(); ++n) {
    os << n;
    for (int i = 0; i < d; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", pts[n](i));
      os << "," << buf;
    }
    os << "\n";
  }
}

void write_rank_json(std::ostream& os, const RankReport& r) {
  using nlohmann::json;
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json j;
  j["status"] = rank_status_name(r.status);
  j["rank"] = r.rank;
  j["eta"] = r.eta;
  j["sizes"] = r.sizes;
  json ranks = json::array();
  for (const auto& level : r.verdicts) {
    json vs = json::array();
    for (const auto& v : level) {
      json e{{"z", vec(v.z)}, {"status", gd_status_name(v.status)}, {"scales", v.scales}};
      if (v.eps) e["eps"] = *v.eps;
      json w = json::array();
      for (const auto& c : v.witnesses) w.push_back(vec(c));
      e["witnesses"] = w;
      vs.push_back(e);
    }
    ranks.push_back(vs);
  }
  j["verdicts"] = ranks;
  os << j.dump(2) << "\n";
}

}  // namespace conical
