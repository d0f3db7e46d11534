#include "conical/divergence.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <thread>

namespace conical {

Isometry MobiusSequence::at(std::size_t n) const {
  if (n < 1 || n > n_max_) throw Error(ErrorKind::PreconditionViolated, "sequence index out of range");
  return gen_(n);
}

PointSequence MobiusSequence::inverse_orbit() const {
  const MobiusSequence self = *this;
  return PointSequence(Model::Ball, dim_, n_max_, PointSequence::Generator([self](std::size_t n) {
                         return ModelPoint{Model::Ball, invert(self.at(n)).act(Vec::Zero(self.dim()))};
                       }));
}

const char* kind_name(GeneralConvergence::Kind k) {
  switch (k) {
    case GeneralConvergence::Kind::Converges: return "Converges";
    case GeneralConvergence::Kind::No: return "No";
    case GeneralConvergence::Kind::Undecided: return "Undecided";
  }
  return "Undecided";
}

const char* status_name(PointStatus s) {
  switch (s) {
    case PointStatus::Convergent: return "Convergent";
    case PointStatus::Divergent: return "Divergent";
    case PointStatus::Undecided: return "Undecided";
  }
  return "Undecided";
}

namespace {

double diameter(const std::vector<Vec>& pts, std::size_t begin, std::size_t end, double stop_above) {
  double d = 0.0;
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = i + 1; j < end; ++j) {
      d = std::max(d, (pts[i] - pts[j]).norm());
      if (d > stop_above) return d;
    }
  return d;
}

// max distance from pts[anchor] to the range, with early exit
double spread(const std::vector<Vec>& pts, std::size_t anchor, std::size_t begin, std::size_t end, double stop_above) {
  double d = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    d = std::max(d, (pts[i] - pts[anchor]).norm());
    if (d > stop_above) return d;
  }
  return d;
}

bool windows_oscillate(const std::vector<Vec>& orbit, double tol_hi) {
  const std::size_t N = orbit.size();
  const std::size_t L = (N + 9) / 10;
  const std::size_t h0 = N / 2;
  if (N < 10) return false;
  for (std::size_t s = h0; s + L <= N; ++s) {
    if (spread(orbit, s, s, s + L, tol_hi) > tol_hi) continue;
    if (diameter(orbit, s, s + L, tol_hi) <= tol_hi) return false;
  }
  return true;
}

}  // namespace

PointStatus classify_tail(const std::vector<Vec>& orbit, double tol_lo, double tol_hi, double* tail_diameter) {
  const std::size_t N = orbit.size();
  const std::size_t q0 = final_quarter_start(N) - 1;
  for (const auto& p : orbit)
    if (!p.allFinite()) {
      if (tail_diameter) *tail_diameter = std::numeric_limits<double>::quiet_NaN();
      return PointStatus::Undecided;
    }
  // diameter >= spread from the last point; only small tails need the exact quadratic scan
  const double r = spread(orbit, N - 1, q0, N, tol_hi);
  const double diam = r > tol_hi ? r : diameter(orbit, q0, N, std::numeric_limits<double>::infinity());
  if (tail_diameter) *tail_diameter = diam;
  if (diam < tol_lo) return PointStatus::Convergent;
  if (windows_oscillate(orbit, tol_hi)) return PointStatus::Divergent;
  return PointStatus::Undecided;
}

GeneralConvergence general_convergence_test(const MobiusSequence& seq, std::size_t N, double tol) {
  const std::size_t q0 = final_quarter_start(N);
  std::vector<Vec> orbit;
  orbit.reserve(N);
  for (std::size_t n = 1; n <= N; ++n) orbit.push_back(seq.at(n).act(Vec::Zero(seq.dim())));
  GeneralConvergence out;
  double max_gap = 0.0, min_gap = 1.0, early_gap = 1.0;
  Vec centroid = Vec::Zero(seq.dim());
  for (std::size_t n = 1; n < q0; ++n) early_gap = std::min(early_gap, 1.0 - orbit[n - 1].norm());
  for (std::size_t n = q0; n <= N; ++n) {
    const double gap = 1.0 - orbit[n - 1].norm();
    max_gap = std::max(max_gap, gap);
    min_gap = std::min(min_gap, gap);
    centroid += orbit[n - 1];
  }
  out.diameter = diameter(orbit, q0 - 1, N, std::numeric_limits<double>::infinity());
  if (out.diameter < tol && max_gap < tol && centroid.norm() > 0) {
    out.kind = GeneralConvergence::Kind::Converges;
    out.limit = IdealPoint{Model::Ball, seq.dim(), centroid.normalized(), false};
  } else if ((min_gap > tol && min_gap >= early_gap) || windows_oscillate(orbit, tol)) {
    // stalled away from the sphere, or oscillating
    out.kind = GeneralConvergence::Kind::No;
  }
  return out;
}

std::vector<PointClassification> classify_boundary(const MobiusSequence& seq, const std::vector<IdealPoint>& samples,
                                                   std::size_t N, double tol_lo, double tol_hi) {
  if (!(tol_lo < tol_hi)) throw Error(ErrorKind::PreconditionViolated, "tol_lo must be below tol_hi");
  std::vector<Isometry> G;
  G.reserve(N);
  for (std::size_t n = 1; n <= N; ++n) G.push_back(seq.at(n));
  std::vector<PointClassification> out(samples.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Vec z = to_ball(samples[s]).coords;
      std::vector<Vec> orbit;
      orbit.reserve(N);
      for (const auto& g : G) orbit.push_back(g.act(z).normalized());
      auto& row = out[s];
      row.point = samples[s];
      row.status = classify_tail(orbit, tol_lo, tol_hi, &row.tail_diameter);
      if (row.status == PointStatus::Convergent) row.limit = IdealPoint{Model::Ball, seq.dim(), orbit.back(), false};
    }
  };
  const int T = std::min<int>(worker_threads(), static_cast<int>(samples.size()));
  if (T <= 1) {
    work(0, samples.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (samples.size() + T - 1) / T;
    for (int t = 0; t < T; ++t)
      pool.emplace_back(work, std::min(samples.size(), t * chunk), std::min(samples.size(), (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  return out;
}

AebischerReport aebischer_crosscheck(const MobiusSequence& seq, const std::vector<IdealPoint>& samples, std::size_t N,
                                     const AebischerParams& params) {
  const auto gc = general_convergence_test(seq, N, params.gc_tol);
  if (gc.kind != GeneralConvergence::Kind::Converges)
    throw Error(ErrorKind::NotGenerallyConvergent, "orbit of the origin does not converge ideally");
  AebischerReport rep;
  rep.limit = *gc.limit;
  rep.classes = classify_boundary(seq, samples, N, params.tol_lo, params.tol_hi);
  ConicalParams cp = params.conical;
  cp.N = N;
  rep.conical = conical_estimate(seq.inverse_orbit(), samples, cp);
  rep.decided.assign(samples.size(), 0);
  rep.agree.assign(samples.size(), 0);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& c = rep.classes[s];
    const Verdict v = rep.conical[s].status;
    if (c.status == PointStatus::Undecided || v == Verdict::Undecided) continue;
    rep.decided[s] = 1;
    ++rep.n_decided;
    const bool to_x = c.status == PointStatus::Convergent && chordal(*c.limit, rep.limit) < params.same_limit;
    if ((v == Verdict::Rejected) == to_x) {
      rep.agree[s] = 1;
      ++rep.n_agree;
    }
  }
  return rep;
}

MobiusSequence from_conical_data(const PointSequence& z) {
  if (z.model() != Model::Ball) throw Error(ErrorKind::PreconditionViolated, "ball-model data required");
  const int m = z.dim();
  return MobiusSequence(m, z.size(), [z, m](std::size_t n) {
    const Vec zn = z.at(n).coords;
    const double r = zn.norm();
    std::vector<Primitive> word{BallTransvection{zn}};
    if (r > 0) {
      // reflect -z/|z| onto e0, then reflect in e1 to restore orientation
      Vec w = -zn / r;
      w(0) -= 1.0;
      if (w.norm() > 1e-15) {
        word.push_back(HyperplaneReflection{w.normalized()});
        word.push_back(HyperplaneReflection{Vec::Unit(m, 1)});
      }
    }
    return Isometry(m, std::move(word));
  });
}

MobiusSequence dense_divergence_generator(const PointSequence& x, std::size_t n_max) {
  if (x.model() != Model::Ball) throw Error(ErrorKind::PreconditionViolated, "ball-model data required");
  struct Blocks {
    std::vector<std::size_t> offset;  // first flattened index of block n (1-based blocks)
    std::vector<Vec> centers;
    std::vector<std::vector<Isometry>> nets;
  };
  auto blocks = std::make_shared<Blocks>();
  std::size_t total = 0;
  for (std::size_t n = 1; total < n_max; ++n) {
    if (n > x.size()) throw Error(ErrorKind::PreconditionViolated, "x sequence too short for n_max");
    const ModelPoint xn = x.at(n);
    blocks->offset.push_back(total + 1);
    blocks->centers.push_back(xn.coords);
    blocks->nets.push_back(stabilizer_net(xn, static_cast<int>(n)));
    total += blocks->nets.back().size();
  }
  return MobiusSequence(x.dim(), n_max, [blocks](std::size_t idx) {
    const auto it = std::upper_bound(blocks->offset.begin(), blocks->offset.end(), idx);
    const std::size_t b = static_cast<std::size_t>(it - blocks->offset.begin()) - 1;
    const Isometry H = Isometry::transvection(-blocks->centers[b]);
    return compose(blocks->nets[b][idx - blocks->offset[b]], H);
  });
}

PointSequence zigzag_sequence(const std::vector<IdealPoint>& targets, std::size_t N, double c, double s_max) {
  if (targets.empty()) throw Error(ErrorKind::PreconditionViolated, "no targets");
  std::vector<Vec> dirs;
  for (const auto& t : targets) dirs.push_back(to_ball(t).coords);
  const int m = static_cast<int>(dirs.front().size());
  return PointSequence(Model::Ball, m, N, PointSequence::Generator([dirs, N, c, s_max, m](std::size_t n) {
                         const std::size_t k = dirs.size();
                         const Vec& b = dirs[(n - 1) % k];
                         const std::size_t visit = (n - 1) / k;
                         const double s = 1.0 + (s_max - 1.0) * std::sqrt(double(n) / double(N));
                         // unit vector orthogonal to b
                         int i0 = 0;
                         for (int i = 1; i < m; ++i)
                           if (std::abs(b(i)) < std::abs(b(i0))) i0 = i;
                         Vec perp = Vec::Unit(m, i0) - b(i0) * b;
                         perp.normalize();
                         const double sign = visit % 2 ? -1.0 : 1.0;
                         const Vec q = sign * std::tanh(c / 2.0) * perp;
                         return ModelPoint{Model::Ball, transvect(Vec(-std::tanh(s / 2.0) * b), q)};
                       }));
}

std::vector<IdealPoint> cantor_arc_points(int depth) {
  std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::pair<double, double>> next;
    for (const auto& [a, b] : intervals) {
      const double third = (b - a) / 3.0;
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    intervals = std::move(next);
  }
  std::vector<IdealPoint> out;
  for (const auto& [a, b] : intervals)
    for (double x : {a, b}) {
      const double th = x * std::numbers::pi / 2.0;
      out.push_back(IdealPoint{Model::Ball, 2, Eigen::Vector2d(std::cos(th), std::sin(th)), false});
    }
  return out;
}

void write_classification_csv(std::ostream& os, const std::vector<PointClassification>& rows) {
  if (rows.empty()) return;
  const int m = static_cast<int>(rows.front().point.coords.size());
  for (int i = 0; i < m; ++i) os << "z" << i << ",";
  os << "status";
  for (int i = 0; i < m; ++i) os << ",limit" << i;
  os << ",tail_diameter\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    const Vec z = to_ball(r.point).coords;
    for (int i = 0; i < m; ++i) os << num(z(i)) << ",";
    os << status_name(r.status);
    for (int i = 0; i < m; ++i) os << "," << (r.limit ? num(to_ball(*r.limit).coords(i)) : "");
    os << "," << num(r.tail_diameter) << "\n";
  }
}

}  // namespace conical
