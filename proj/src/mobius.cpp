#include "conical/mobius.hpp"

#include <algorithm>
#include <numeric>
#include <numbers>
#include <random>

namespace conical {

namespace {

Vec act_one(const Primitive& g, const Vec& x) {
  return std::visit(
      [&](const auto& p) -> Vec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, HyperplaneReflection>) {
          return x - 2.0 * x.dot(p.u) * p.u;
        } else if constexpr (std::is_same_v<T, SphereInversion>) {
          const Vec d = x - p.c;
          return p.c + (p.r * p.r / d.squaredNorm()) * d;
        } else if constexpr (std::is_same_v<T, OrthogonalMap>) {
          return p.Q * x;
        } else {
          return transvect(p.a, x);
        }
      },
      g);
}

Primitive inverse_one(const Primitive& g) {
  if (const auto* q = std::get_if<OrthogonalMap>(&g)) return OrthogonalMap{q->Q.transpose()};
  if (const auto* t = std::get_if<BallTransvection>(&g)) return BallTransvection{-t->a};
  return g;
}

int parity_one(const Primitive& g) {
  if (std::holds_alternative<HyperplaneReflection>(g) || std::holds_alternative<SphereInversion>(g)) return -1;
  if (const auto* q = std::get_if<OrthogonalMap>(&g)) return q->Q.determinant() < 0 ? -1 : 1;
  return 1;
}

Mat nearest_orthogonal(const Mat& A) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

void check_dims(const Isometry& G, int dim) {
  if (G.dim() != dim) throw Error(ErrorKind::InvalidPoint, "isometry dimension mismatch");
}

}  // namespace

Isometry::Isometry(int dim, std::vector<Primitive> word) : dim_(dim), word_(std::move(word)) {}

Isometry Isometry::reflection(const Vec& u) {
  return Isometry(static_cast<int>(u.size()), {HyperplaneReflection{u.normalized()}});
}

Isometry Isometry::inversion(const Vec& c, double r) {
  if (std::abs(c.squaredNorm() - 1.0 - r * r) > 1e-9 * (1.0 + r * r))
    throw Error(ErrorKind::PreconditionViolated, "inversion sphere must be orthogonal to the unit sphere");
  return Isometry(static_cast<int>(c.size()), {SphereInversion{c, r}});
}

Isometry Isometry::orthogonal(const Mat& Q) {
  if (!(Q.transpose() * Q).isIdentity(1e-10)) throw Error(ErrorKind::PreconditionViolated, "matrix is not orthogonal");
  return Isometry(static_cast<int>(Q.rows()), {OrthogonalMap{Q}});
}

Isometry Isometry::transvection(const Vec& a) {
  if (!(a.norm() < 1.0)) throw Error(ErrorKind::InvalidPoint, "transvection point must be interior");
  return Isometry(static_cast<int>(a.size()), {BallTransvection{a}});
}

int Isometry::orientation() const {
  int s = 1;
  for (const auto& g : word_) s *= parity_one(g);
  return s;
}

Vec Isometry::act(const Vec& x) const {
  Vec y = x;
  for (const auto& g : word_) y = act_one(g, y);
  return y;
}

Isometry compose(const Isometry& G, const Isometry& H) {
  check_dims(H, G.dim());
  std::vector<Primitive> w = H.word();
  w.insert(w.end(), G.word().begin(), G.word().end());
  Isometry out(G.dim(), std::move(w));
  if (out.word().size() > Isometry::kCompactThreshold) return compact(out);
  return out;
}

Isometry invert(const Isometry& G) {
  std::vector<Primitive> w;
  w.reserve(G.word().size());
  for (auto it = G.word().rbegin(); it != G.word().rend(); ++it) w.push_back(inverse_one(*it));
  return Isometry(G.dim(), std::move(w));
}

// G = R o T_a with a = G^{-1}(0) and R = G o T_{-a} orthogonal.
Isometry compact(const Isometry& G) {
  const int m = G.dim();
  const Vec a = invert(G).act(Vec::Zero(m));
  Mat R(m, m);
  for (int i = 0; i < m; ++i) R.col(i) = G.act(transvect(Vec(-a), Vec(Vec::Unit(m, i))));
  return Isometry(m, {BallTransvection{a}, OrthogonalMap{nearest_orthogonal(R)}});
}

ModelPoint apply(const Isometry& G, const ModelPoint& p) {
  check_dims(G, p.dim());
  const ModelPoint b{Model::Ball, G.act(to_ball(p).coords)};
  return to_model(b, p.model);
}

IdealPoint apply(const Isometry& G, const IdealPoint& x) {
  check_dims(G, x.ambient);
  const IdealPoint b{Model::Ball, x.ambient, G.act(to_ball(x).coords).normalized(), false};
  return to_model(b, x.model);
}

bool same_action(const Isometry& G, const Isometry& H, double tol) {
  check_dims(H, G.dim());
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 0.9);
  for (int k = 0; k < 20; ++k) {
    Vec x(G.dim());
    for (int i = 0; i < G.dim(); ++i) x(i) = gauss(rng);
    x *= unif(rng) / x.norm();
    if ((G.act(x) - H.act(x)).norm() > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Matrix2 normalized(const Matrix2& M) {
  const cplx s = std::sqrt(M.det());
  if (std::abs(s) == 0.0) throw Error(ErrorKind::DegenerateCoefficient, "singular matrix");
  return {M.a / s, M.b / s, M.c / s, M.d / s, 0};
}

Matrix2 operator*(const Matrix2& A, const Matrix2& B) {
  Matrix2 out{A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d, A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d,
              std::max(A.since_normalize, B.since_normalize) + 1};
  if (out.since_normalize >= 32) return normalized(out);
  return out;
}

Matrix2 inverse(const Matrix2& M) {
  const cplx det = M.det();
  return {M.d / det, -M.b / det, -M.c / det, M.a / det, M.since_normalize};
}

ExtComplex mobius_apply(const Matrix2& M, const ExtComplex& z) {
  if (z.inf) {
    if (M.c == 0.0) return {0.0, true};
    return {M.a / M.c, false};
  }
  const cplx den = M.c * z.z + M.d;
  if (den == 0.0) return {0.0, true};
  return {(M.a * z.z + M.b) / den, false};
}

double chordal(const ExtComplex& x, const ExtComplex& y) {
  if (x.inf && y.inf) return 0.0;
  if (x.inf) return 2.0 / std::sqrt(1.0 + std::norm(y.z));
  if (y.inf) return 2.0 / std::sqrt(1.0 + std::norm(x.z));
  return 2.0 * std::abs(x.z - y.z) / std::sqrt((1.0 + std::norm(x.z)) * (1.0 + std::norm(y.z)));
}

namespace {

cplx boundary_to_complex(const Vec& v) { return v.size() == 1 ? cplx(v(0), 0.0) : cplx(v(0), v(1)); }

Vec complex_to_boundary(cplx z, int m) {
  Vec v(m - 1);
  v(0) = z.real();
  if (m == 3) v(1) = z.imag();
  return v;
}

IdealPoint act_boundary(const Matrix2& M, const IdealPoint& x0) {
  const IdealPoint x = to_half(x0);
  const ExtComplex w = mobius_apply(M, {x.infinite ? cplx(0.0) : boundary_to_complex(x.coords), x.infinite});
  if (w.inf) return half_infinity(x.ambient);
  return half_ideal(complex_to_boundary(w.z, x.ambient));
}

}  // namespace

ModelPoint psl2_apply(const Matrix2& M0, const ModelPoint& p0) {
  const ModelPoint p = to_half(p0);
  if (p.dim() != 2 && p.dim() != 3) throw Error(ErrorKind::PreconditionViolated, "psl2_apply needs dim 2 or 3");
  const Matrix2 M = normalized(M0);
  const double t = p.t();
  const cplx z = boundary_to_complex(p.v());
  const cplx cz_d = M.c * z + M.d;
  const double D = std::norm(cz_d) + std::norm(M.c) * t * t;
  const cplx zp = ((M.a * z + M.b) * std::conj(cz_d) + M.a * std::conj(M.c) * t * t) / D;
  Vec y(p.dim());
  y(0) = t / D;
  y.tail(p.dim() - 1) = complex_to_boundary(zp, p.dim());
  return to_model(ModelPoint{Model::HalfSpace, y}, p0.model);
}

Isometry from_matrix2(const Matrix2& M, int m) {
  if (m != 2 && m != 3) throw Error(ErrorKind::PreconditionViolated, "Matrix2 acts in dim 2 or 3");
  const Vec a = to_ball(psl2_apply(inverse(M), origin(Model::HalfSpace, m))).coords;
  Mat R(m, m);
  for (int i = 0; i < m; ++i) {
    const IdealPoint e{Model::Ball, m, transvect(Vec(-a), Vec(Vec::Unit(m, i))).normalized(), false};
    R.col(i) = to_ball(act_boundary(M, e)).coords;
  }
  return Isometry(m, {BallTransvection{a}, OrthogonalMap{nearest_orthogonal(R)}});
}

// ---------------------------------------------------------------------------

namespace {

// Columns: u1, u2, then a Gram-Schmidt completion.
Mat frame(const Vec& p, const Vec& q) {
  const int m = static_cast<int>(p.size());
  const Vec s = p + q, d = p - q;
  Vec u1, u2;
  if (s.norm() < 1e-14) {
    u2 = d.normalized();
    int k = 0;
    for (int i = 1; i < m; ++i)
      if (std::abs(u2(i)) < std::abs(u2(k))) k = i;
    u1 = Vec::Unit(m, k) - u2(k) * u2;
    u1.normalize();
  } else {
    // for close p, q the difference carries relative noise; project it off u1
    u1 = s.normalized();
    u2 = (d - d.dot(u1) * u1).normalized();
  }
  Mat B(m, m);
  B.col(0) = u1;
  B.col(1) = u2;
  int filled = 2;
  for (int i = 0; i < m && filled < m; ++i) {
    Vec w = Vec::Unit(m, i);
    for (int j = 0; j < filled; ++j) w -= w.dot(B.col(j)) * B.col(j);
    if (w.norm() > 1e-6) B.col(filled++) = w.normalized();
  }
  return B;
}

}  // namespace

Isometry lemma_orthogonal_map(const ModelPoint& z0, const IdealPoint& x0, const IdealPoint& y0, double tol) {
  const ModelPoint z = to_ball(z0);
  const int m = z.dim();
  const Vec x = to_ball(x0).coords, y = to_ball(y0).coords;
  const Vec e = Vec::Unit(m, 0);

  const double den = (1.0 - z.coords.norm()) * (1.0 + z.coords.norm());
  const double cosh_rho = std::sqrt((z.coords - e).squaredNorm() * (z.coords + e).squaredNorm()) / den;
  if (std::abs((x - y).norm() - 2.0 / cosh_rho) > tol)
    throw Error(ErrorKind::PreconditionViolated, "|x - y| differs from 2 / cosh rho(z, gamma)");

  const Vec p = transvect(z.coords, e), q = transvect(z.coords, Vec(-e));
  const Mat src = frame(p, q);
  Mat tgt = frame(x, y);
  if (src.determinant() * tgt.determinant() < 0) {
    if (m >= 3) {
      tgt.col(2) = -tgt.col(2);
    } else if ((p + q).norm() < 1e-14) {
      tgt.col(0) = -tgt.col(0);
    } else {
      throw Error(ErrorKind::SideConditionViolated, "z and 0 lie on mismatched sides of the geodesic");
    }
  }
  const Mat W = tgt * src.transpose();
  return Isometry(m, {BallTransvection{z.coords}, OrthogonalMap{W}});
}

namespace {

Mat rotation2(double th) {
  Mat R(2, 2);
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return R;
}

std::vector<Vec> cube_sphere_net(int m, int s) {
  std::vector<Vec> out;
  for (int axis = 0; axis < m; ++axis) {
    for (int sign : {-1, 1}) {
      // grid over the remaining m-1 coordinates
      std::vector<int> idx(m - 1, 0);
      while (true) {
        Vec a(m);
        int j = 0;
        for (int i = 0; i < m; ++i) {
          if (i == axis) {
            a(i) = sign;
          } else {
            a(i) = -1.0 + (2.0 * idx[j] + 1.0) / s;
            ++j;
          }
        }
        out.push_back(a.normalized());
        int k = 0;
        while (k < m - 1 && ++idx[k] == s) idx[k++] = 0;
        if (k == m - 1) break;
      }
    }
  }
  return out;
}

std::vector<Vec> sphere_samples(int m, int n, std::uint64_t seed) {
  std::vector<Vec> out;
  if (m == 3) {
    for (const auto& p : fibonacci_sphere(n)) out.push_back(p.coords);
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < n; ++k) {
    Vec v(m);
    for (int i = 0; i < m; ++i) v(i) = gauss(rng);
    out.push_back(v.normalized());
  }
  return out;
}

}  // namespace

double net_coverage(const std::vector<Isometry>& net, int m) {
  double worst = 0.0;
  if (m == 2) {
    for (int k = 0; k < 64; ++k) {
      const double th = 2.0 * std::numbers::pi * (k + 0.5) / 64;
      const Vec y = Eigen::Vector2d(std::cos(th), std::sin(th));
      std::vector<double> ang;
      ang.reserve(net.size());
      for (const auto& M : net) {
        const Vec w = M.act(y);
        ang.push_back(std::atan2(w(1), w(0)));
      }
      std::sort(ang.begin(), ang.end());
      double gap = ang.front() + 2.0 * std::numbers::pi - ang.back();
      for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
      worst = std::max(worst, 2.0 * std::sin(gap / 4.0));
    }
    return worst;
  }
  const auto ys = sphere_samples(m, 24, 11);
  const auto targets = sphere_samples(m, 400, 13);
  for (const auto& y : ys) {
    std::vector<Vec> imgs;
    imgs.reserve(net.size());
    for (const auto& M : net) imgs.push_back(M.act(y));
    for (const auto& t : targets) {
      double best = 2.0;
      for (const auto& w : imgs) best = std::min(best, (w - t).norm());
      worst = std::max(worst, best);
    }
  }
  return worst;
}

namespace {

// Visit 0..k-1 with a golden-ratio stride so that every run of consecutive indices is spread out.
std::vector<std::size_t> spread_order(std::size_t k) {
  std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(k / std::numbers::phi)));
  while (std::gcd(step, k) != 1) ++step;
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = (i * step) % k;
  return out;
}

}  // namespace

std::vector<Isometry> stabilizer_net(const ModelPoint& x0, int n) {
  if (n < 1) throw Error(ErrorKind::PreconditionViolated, "net resolution must be positive");
  const ModelPoint x = to_ball(x0);
  const int m = x.dim();
  const BallTransvection T{x.coords}, Tinv{-x.coords};
  const double target = 1.0 / n;
  for (int k = m == 2 ? static_cast<int>(std::ceil(2.0 * std::numbers::pi * n)) : 2; k <= (1 << 24); k *= 2) {
    std::vector<Isometry> net;
    if (m == 2) {
      for (std::size_t i : spread_order(k))
        net.emplace_back(m, std::vector<Primitive>{T, OrthogonalMap{rotation2(2.0 * std::numbers::pi * i / k)}, Tinv});
    } else {
      net.emplace_back(m, std::vector<Primitive>{T, Tinv});
      const HyperplaneReflection h0{Vec::Unit(m, 0)};
      const auto dirs = cube_sphere_net(m, k);
      for (std::size_t i : spread_order(dirs.size()))
        net.emplace_back(m, std::vector<Primitive>{T, h0, HyperplaneReflection{dirs[i]}, Tinv});
    }
    if (net_coverage(net, m) <= target) return net;
  }
  throw Error(ErrorKind::ConstructionStuck, "stabilizer net did not reach the requested resolution");
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec json_vec(const nlohmann::json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

nlohmann::json cplx_json(cplx z) { return {z.real(), z.imag()}; }
cplx json_cplx(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void to_json(nlohmann::json& j, const Isometry& G) {
  nlohmann::json word = nlohmann::json::array();
  for (const auto& g : G.word()) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, HyperplaneReflection>) {
            word.push_back({{"type", "HyperplaneReflection"}, {"u", vec_json(p.u)}});
          } else if constexpr (std::is_same_v<T, SphereInversion>) {
            word.push_back({{"type", "SphereInversion"}, {"c", vec_json(p.c)}, {"r", p.r}});
          } else if constexpr (std::is_same_v<T, OrthogonalMap>) {
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < p.Q.rows(); ++i) rows.push_back(vec_json(p.Q.row(i).transpose()));
            word.push_back({{"type", "OrthogonalMap"}, {"Q", rows}});
          } else {
            word.push_back({{"type", "BallTransvection"}, {"a", vec_json(p.a)}});
          }
        },
        g);
  }
  j = {{"dim", G.dim()}, {"word", word}};
}

void from_json(const nlohmann::json& j, Isometry& G) {
  const int m = j.at("dim").get<int>();
  std::vector<Primitive> word;
  for (const auto& r : j.at("word")) {
    const auto type = r.at("type").get<std::string>();
    if (type == "HyperplaneReflection") {
      word.push_back(HyperplaneReflection{json_vec(r.at("u"))});
    } else if (type == "SphereInversion") {
      word.push_back(SphereInversion{json_vec(r.at("c")), r.at("r").get<double>()});
    } else if (type == "OrthogonalMap") {
      Mat Q(m, m);
      for (int i = 0; i < m; ++i) Q.row(i) = json_vec(r.at("Q").at(i)).transpose();
      word.push_back(OrthogonalMap{Q});
    } else if (type == "BallTransvection") {
      word.push_back(BallTransvection{json_vec(r.at("a"))});
    } else {
      throw Error(ErrorKind::ConfigInvalid, "unknown primitive " + type);
    }
  }
  G = Isometry(m, std::move(word));
}

void to_json(nlohmann::json& j, const Matrix2& M) {
  j = {{"a", cplx_json(M.a)}, {"b", cplx_json(M.b)}, {"c", cplx_json(M.c)}, {"d", cplx_json(M.d)}};
}

void from_json(const nlohmann::json& j, Matrix2& M) {
  M = Matrix2{json_cplx(j.at("a")), json_cplx(j.at("b")), json_cplx(j.at("c")), json_cplx(j.at("d")), 0};
}

}  // namespace conical
