#include "conical/limits.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <thread>

namespace conical {

PointSequence::PointSequence(Model model, int dim, std::size_t n_max, Generator gen)
    : model_(model), dim_(dim), n_max_(n_max), gen_(std::move(gen)) {}

PointSequence::PointSequence(Model model, int dim, std::size_t n_max, Visitor visit)
    : model_(model), dim_(dim), n_max_(n_max), visit_(std::move(visit)) {}

PointSequence PointSequence::from_points(std::vector<ModelPoint> pts) {
  if (pts.empty()) throw Error(ErrorKind::EmptyResult, "empty point list");
  const Model model = pts.front().model;
  const int dim = pts.front().dim();
  for (auto& p : pts) p = to_model(p, model);
  const std::size_t n = pts.size();
  auto shared = std::make_shared<const std::vector<ModelPoint>>(std::move(pts));
  return PointSequence(model, dim, n, Generator([shared](std::size_t i) { return (*shared)[i - 1]; }));
}

ModelPoint PointSequence::at(std::size_t n) const {
  if (n < 1 || n > n_max_) throw Error(ErrorKind::PreconditionViolated, "sequence index out of range");
  if (gen_) return gen_(n);
  ModelPoint out;
  visit(n, [&](std::size_t i, const ModelPoint& w) {
    if (i == n) out = w;
  });
  return out;
}

void PointSequence::visit(std::size_t N, const Callback& fn) const {
  if (N > n_max_) throw Error(ErrorKind::PreconditionViolated, "N exceeds the sequence length");
  if (visit_) {
    visit_(N, fn);
    return;
  }
  for (std::size_t n = 1; n <= N; ++n) fn(n, gen_(n));
}

std::vector<ModelPoint> PointSequence::take(std::size_t N) const {
  std::vector<ModelPoint> out;
  out.reserve(N);
  visit(N, [&](std::size_t, const ModelPoint& w) { out.push_back(w); });
  return out;
}

PointSequence map_sequence(const PointSequence& seq, std::function<ModelPoint(const ModelPoint&)> f) {
  const ModelPoint probe = f(seq.at(1));
  return PointSequence(probe.model, probe.dim(), seq.size(),
                       PointSequence::Generator([seq, f](std::size_t n) { return f(seq.at(n)); }));
}

std::size_t final_quarter_start(std::size_t N) { return std::max<std::size_t>(1, (3 * N + 3) / 4); }

int worker_threads() {
  if (const char* s = std::getenv("CONICAL_LAB_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

bool is_escaping(const PointSequence& seq, std::size_t N, double R) {
  const std::size_t q0 = final_quarter_start(N);
  const double coshR = std::cosh(R);
  bool ok = true;
  seq.visit(N, [&](std::size_t n, const ModelPoint& w) {
    if (n >= q0 && !(closed_form::cosh_to_origin(w) > coshR)) ok = false;
  });
  return ok;
}

PointSequence reduce_to_standard(const PointSequence& seq, std::size_t N) {
  if (seq.model() != Model::HalfSpace) throw Error(ErrorKind::PreconditionViolated, "half-space sequence required");
  std::vector<ModelPoint> kept;
  seq.visit(N, [&](std::size_t, const ModelPoint& w) {
    if (w.t() < 1.0 / (1.0 + w.v().norm())) kept.push_back(w);
  });
  if (kept.empty()) throw Error(ErrorKind::EmptyResult, "no term lies below height 1/(1+|v|)");
  return PointSequence::from_points(std::move(kept));
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "Accepted";
    case Verdict::Rejected: return "Rejected";
    case Verdict::Undecided: return "Undecided";
  }
  return "Undecided";
}

namespace {

struct Tally {
  std::vector<int> count;
  std::vector<char> late;
};

Verdict overall(const Tally& t, int K, std::size_t top) {
  for (std::size_t i = 0; i < t.count.size(); ++i)
    if (t.count[i] >= K && t.late[i]) return Verdict::Accepted;
  return t.count[top] == 0 ? Verdict::Rejected : Verdict::Undecided;
}

}  // namespace

std::vector<ConicalVerdict> conical_estimate(const PointSequence& seq, const std::vector<IdealPoint>& samples,
                                             const ConicalParams& params) {
  if (params.alphas.empty()) throw Error(ErrorKind::PreconditionViolated, "no alphas");
  if (!std::is_sorted(params.alphas.begin(), params.alphas.end()))
    throw Error(ErrorKind::PreconditionViolated, "alphas must be ascending");
  const std::size_t A = params.alphas.size();
  const double R = params.R.value_or(std::sqrt(3.0) * params.alphas.back());
  const double coshR = std::cosh(R);
  const std::size_t N = params.N, q0 = final_quarter_start(N);

  std::vector<double> ch_lo(A), ch_hi(A);
  for (std::size_t i = 0; i < A; ++i) {
    ch_lo[i] = std::cosh(std::max(0.0, params.alphas[i] - params.tie_band));
    ch_hi[i] = std::cosh(params.alphas[i] + params.tie_band);
  }
  std::vector<IdealPoint> xs;
  for (const auto& s : samples) xs.push_back(to_model(s, seq.model()));
  const ModelPoint j = origin(seq.model(), seq.dim());

  std::vector<Tally> lo(xs.size(), Tally{std::vector<int>(A, 0), std::vector<char>(A, 0)});
  std::vector<Tally> hi = lo;

  auto work = [&](std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    // lambda(j, x) depends only on the sample
    std::vector<double> lambda(end - begin);
    for (std::size_t s = begin; s < end; ++s) lambda[s - begin] = closed_form::ideal_pairing(j, xs[s]);
    seq.visit(N, [&](std::size_t n, const ModelPoint& w) {
      const double c = closed_form::cosh_to_origin(w);
      if (!(c > coshR)) return;
      const bool late = n >= q0;
      for (std::size_t s = begin; s < end; ++s) {
        const double lam = lambda[s - begin];
        const double a = closed_form::ideal_pairing(w, xs[s]);
        const double beta = c - a / (2.0 * lam);
        const double ch = 2.0 * lam * beta >= a ? std::sqrt(2.0 * a * beta / lam) : c;
        for (std::size_t i = 0; i < A; ++i) {
          if (ch < ch_hi[i]) {
            ++hi[s].count[i];
            hi[s].late[i] |= late;
            if (ch < ch_lo[i]) {
              ++lo[s].count[i];
              lo[s].late[i] |= late;
            }
          }
        }
      }
    });
  };

  const int T = std::min<int>(worker_threads(), static_cast<int>(xs.size()));
  if (T <= 1) {
    work(0, xs.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (xs.size() + T - 1) / T;
    for (int t = 0; t < T; ++t)
      pool.emplace_back(work, std::min(xs.size(), t * chunk), std::min(xs.size(), (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }

  std::vector<ConicalVerdict> out;
  out.reserve(samples.size());
  for (std::size_t s = 0; s < xs.size(); ++s) {
    ConicalVerdict v;
    v.point = samples[s];
    const Verdict vlo = overall(lo[s], params.K, A - 1), vhi = overall(hi[s], params.K, A - 1);
    v.status = vlo == vhi ? vlo : Verdict::Undecided;
    v.witness_count = lo[s].count[A - 1];
    for (std::size_t i = 0; i < A; ++i) {
      const bool acc_lo = lo[s].count[i] >= params.K && lo[s].late[i];
      const bool acc_hi = hi[s].count[i] >= params.K && hi[s].late[i];
      v.per_alpha.push_back(acc_lo && acc_hi ? Verdict::Accepted
                            : acc_lo != acc_hi ? Verdict::Undecided
                            : lo[s].count[i] == 0 && hi[s].count[i] == 0 ? Verdict::Rejected
                                                                           : Verdict::Undecided);
      if (!v.alpha_min && acc_lo && acc_hi) v.alpha_min = params.alphas[i];
    }
    if (v.status != Verdict::Accepted) v.alpha_min.reset();
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ConicalVerdict> conical_estimate(const PointSequence& seq, const std::vector<IdealPoint>& samples,
                                             const std::vector<double>& alphas, int K, std::optional<double> R,
                                             std::size_t N) {
  return conical_estimate(seq, samples, ConicalParams{alphas, K, R, N});
}

IdealPoint boundary_projection(const ModelPoint& w) {
  if (w.model == Model::Ball) return {Model::Ball, w.dim(), w.coords.normalized(), false};
  return {Model::HalfSpace, w.dim(), Vec(w.v()), false};
}

std::vector<bool> limit_set_estimate(const PointSequence& seq, const std::vector<IdealPoint>& samples, double tol,
                                     std::size_t N, int K) {
  const std::size_t q0 = final_quarter_start(N);
  std::vector<Vec> xs;
  for (const auto& s : samples) xs.push_back(to_ball(s).coords);
  std::vector<int> hits(xs.size(), 0);
  seq.visit(N, [&](std::size_t n, const ModelPoint& w) {
    if (n < q0) return;
    const Vec u = to_ball(boundary_projection(w)).coords;
    for (std::size_t s = 0; s < xs.size(); ++s)
      if ((u - xs[s]).norm() < tol) ++hits[s];
  });
  std::vector<bool> out(xs.size());
  for (std::size_t s = 0; s < xs.size(); ++s) out[s] = hits[s] >= K;
  return out;
}

double hausdorff(const std::vector<ModelPoint>& E, const std::vector<ModelPoint>& F) {
  if (E.empty() || F.empty()) throw Error(ErrorKind::PreconditionViolated, "hausdorff needs nonempty lists");
  auto one_sided = [](const std::vector<ModelPoint>& X, const std::vector<ModelPoint>& Y) {
    double sup = 0.0;
    for (const auto& x : X) {
      double inf = std::numeric_limits<double>::infinity();
      for (const auto& y : Y) inf = std::min(inf, dist(x, y));
      sup = std::max(sup, inf);
    }
    return sup;
  };
  return std::max(one_sided(E, F), one_sided(F, E));
}

void write_verdicts_csv(std::ostream& os, const std::vector<ConicalVerdict>& verdicts) {
  if (verdicts.empty()) return;
  const int m = static_cast<int>(verdicts.front().point.coords.size());
  for (int i = 0; i < m; ++i) os << "x" << i << ",";
  os << "status,alpha_min,witness_count\n";
  char buf[32];
  for (const auto& v : verdicts) {
    for (int i = 0; i < m; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v.point.infinite ? std::numeric_limits<double>::infinity() : v.point.coords(i));
      os << buf << ",";
    }
    os << verdict_name(v.status) << ",";
    if (v.alpha_min) {
      std::snprintf(buf, sizeof buf, "%.17g", *v.alpha_min);
      os << buf;
    }
    os << "," << v.witness_count << "\n";
  }
}

}  // namespace conical
