#include "fsl/weil_deligne.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace fsl {

namespace {

using json = nlohmann::json;
using Mat = Eigen::MatrixXcd;

constexpr double kTwistTol = 1e-8;

i64 checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("Rational: overflow");
  return static_cast<i64>(v);
}

// Orthonormal basis of the column space, by SVD with a relative cutoff.
Mat column_space(const Mat& m, double tol = 1e-8) {
  if (m.cols() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  while (r < s.size() && s(r) > tol * scale) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the null space of m (as coordinates in the domain).
Mat null_space(const Mat& m, double tol = 1e-8) {
  const Eigen::Index c = m.cols();
  if (c == 0) return Mat(0, 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * scale) ++r;
  return svd.matrixV().rightCols(c - r);
}

// V^I cap ker N as an orthonormal basis in V.
Mat invariant_kernel(const WeilDeligneRep& rep) {
  const Mat B = column_space(rep.inertia_projection);
  if (B.cols() == 0) return B;
  const Mat K = null_space(rep.N * B);
  return B * K;
}

Eigen::Index rank_of(const Mat& m) { return column_space(m).cols(); }

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j, int n, const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ValidationError(std::string("wd-v1: ") + name + " must have n rows");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
      throw ValidationError(std::string("wd-v1: ") + name + " must have n columns");
    for (int k = 0; k < n; ++k) {
      const auto& e = j[i][k];
      if (e.is_number()) {
        m(i, k) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ValidationError(std::string("wd-v1: bad entry in ") + name);
      }
    }
  }
  return m;
}

}  // namespace

// ------------------------------------------------------------------ Rational

Rational::Rational(i64 num, i64 den) {
  require(den != 0, "Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i64 g = gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational Rational::parse(const std::string& s) {
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const i64 v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return Rational(v);
    }
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    const i64 n = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const i64 d = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return Rational(n, d);
  } catch (const std::logic_error&) {
    throw ValidationError("Rational: cannot parse '" + s + "'");
  }
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(checked(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_),
                  checked(static_cast<__int128>(a.den_) * b.den_));
}

Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(checked(static_cast<__int128>(a.num_) * b.num_), checked(static_cast<__int128>(a.den_) * b.den_));
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

// ------------------------------------------------------------------ representation

void WeilDeligneRep::validate() const {
  require(n >= 1, "WeilDeligneRep: dimension must be positive");
  require(q >= 2, "WeilDeligneRep: residue cardinality must be at least 2");
  auto square = [&](const Mat& m, const char* name) {
    require(m.rows() == n && m.cols() == n, std::string("WeilDeligneRep: ") + name + " must be n x n");
  };
  square(frobenius, "frobenius");
  square(inertia_projection, "inertia_projection");
  square(N, "N");
  require(std::abs(frobenius.determinant()) > 1e-12, "WeilDeligneRep: frobenius must be invertible");
  Mat power = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) power = power * N;
  require(power.norm() <= 1e-8 * std::max(1.0, std::pow(N.norm(), n)), "WeilDeligneRep: N is not nilpotent");
  const Mat twisted = frobenius * N * frobenius.inverse();
  require((twisted - N / static_cast<double>(q)).norm() <= kTwistTol * std::max(1.0, N.norm()),
          "WeilDeligneRep: twist relation Phi N Phi^-1 = N/q fails");
  const Mat& P = inertia_projection;
  require((P * P - P).norm() <= 1e-8, "WeilDeligneRep: inertia_projection is not idempotent");
  require((frobenius * P - P * frobenius * P).norm() <= 1e-8 * std::max(1.0, frobenius.norm()),
          "WeilDeligneRep: V^I is not stable under frobenius");
  require(!breaks.empty(), "WeilDeligneRep: breaks must start at u = 0");
  require(breaks.front().u == Rational(0), "WeilDeligneRep: first break must sit at u = 0");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    require(breaks[i].d >= 0 && breaks[i].d <= n, "WeilDeligneRep: break dimension outside [0, n]");
    if (i > 0) {
      require(breaks[i - 1].u < breaks[i].u, "WeilDeligneRep: break positions must increase");
      require(breaks[i - 1].d <= breaks[i].d, "WeilDeligneRep: fixed dimensions must not decrease");
    }
  }
  require(rank_of(P) <= breaks.front().d, "WeilDeligneRep: dim V^I exceeds the fixed dimension at u = 0");
}

int tame_part(const WeilDeligneRep& rep) {
  rep.validate();
  return rep.n - static_cast<int>(invariant_kernel(rep).cols());
}

Rational swan_part(const WeilDeligneRep& rep) {
  rep.validate();
  Rational s(0);
  for (std::size_t i = 0; i + 1 < rep.breaks.size(); ++i)
    s = s + Rational(rep.n - rep.breaks[i].d) * (rep.breaks[i + 1].u - rep.breaks[i].u);
  return s;
}

Rational artin_conductor(const WeilDeligneRep& rep) { return Rational(tame_part(rep)) + swan_part(rep); }

std::vector<i64> LFactor::integers() const {
  if (!integral) throw Error("LFactor: coefficients are not integral");
  std::vector<i64> out;
  for (const auto& c : coeffs) out.push_back(static_cast<i64>(std::llround(c.real())));
  return out;
}

LFactor local_l_factor(const WeilDeligneRep& rep) {
  rep.validate();
  const Mat W = invariant_kernel(rep);
  LFactor f;
  f.coeffs = {cplx(1.0, 0.0)};
  f.integral = true;
  if (W.cols() == 0) return f;
  const Mat A = W.adjoint() * rep.frobenius * W;
  if ((rep.frobenius * W - W * A).norm() > 1e-8 * std::max(1.0, rep.frobenius.norm()))
    throw Error("local_l_factor: V^I cap ker N is not frobenius-stable");
  Eigen::ComplexEigenSolver<Mat> es(A);
  // prod_i (1 - lambda_i T)
  std::vector<cplx> c = {cplx(1.0, 0.0)};
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    std::vector<cplx> next(c.size() + 1, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] -= es.eigenvalues()(i) * c[k];
    }
    c = std::move(next);
  }
  for (auto& v : c) {
    const double r = std::round(v.real());
    if (std::abs(v.imag()) <= 1e-6 && std::abs(v.real() - r) <= 1e-6) {
      v = cplx(r, 0.0);
    } else {
      f.integral = false;
      if (std::abs(v.real()) < 1e-8) v.real(0.0);
      if (std::abs(v.imag()) < 1e-8) v.imag(0.0);
    }
  }
  f.coeffs = std::move(c);
  return f;
}

// ------------------------------------------------------------------ elliptic builders

const char* reduction_name(ReductionType t) {
  switch (t) {
    case ReductionType::Good: return "good";
    case ReductionType::SplitMultiplicative: return "split-multiplicative";
    case ReductionType::NonsplitMultiplicative: return "nonsplit-multiplicative";
    case ReductionType::Additive: return "additive";
  }
  return "?";
}

ReductionType classify_reduction(const ShortWeierstrassCurve& E, i64 p) {
  require(p > 3 && is_prime(static_cast<u64>(p)), "classify_reduction: p must be a prime above 3");
  require(E.valid(), "classify_reduction: singular curve over Q");
  if (mod(E.discriminant(), p) != 0) return ReductionType::Good;
  const i64 a = mod(E.a, p), b = mod(E.b, p);
  if (a == 0) return ReductionType::Additive;
  // Double root r = -3b / 2a; near it y^2 ~ 3r (x - r)^2, so the node's
  // tangents are rational exactly when 3r is a square.
  const i64 r = mod(-3 * b % p * inverse_mod(2 * a % p, p), p);
  return legendre(3 * r % p, p) == 1 ? ReductionType::SplitMultiplicative : ReductionType::NonsplitMultiplicative;
}

WeilDeligneRep from_elliptic_reduction(const ShortWeierstrassCurve& E, i64 p) {
  const ReductionType t = classify_reduction(E, p);
  WeilDeligneRep rep;
  rep.n = 2;
  rep.q = p;
  rep.N = Mat::Zero(2, 2);
  const double pd = static_cast<double>(p);
  switch (t) {
    case ReductionType::Good: {
      const double ap = static_cast<double>(ap_single(E, p));
      rep.frobenius.resize(2, 2);
      rep.frobenius << 0.0, -pd, 1.0, ap;  // characteristic polynomial x^2 - a_p x + p
      rep.inertia_projection = Mat::Identity(2, 2);
      rep.breaks = {{Rational(0), 2}};
      break;
    }
    case ReductionType::SplitMultiplicative:
    case ReductionType::NonsplitMultiplicative: {
      const double s = t == ReductionType::SplitMultiplicative ? 1.0 : -1.0;
      rep.frobenius = Mat::Zero(2, 2);
      rep.frobenius(0, 0) = s;
      rep.frobenius(1, 1) = s * pd;
      rep.N(0, 1) = 1.0;
      rep.inertia_projection = Mat::Identity(2, 2);
      rep.breaks = {{Rational(0), 2}};
      break;
    }
    case ReductionType::Additive: {
      rep.frobenius.resize(2, 2);
      rep.frobenius << 0.0, -pd, 1.0, 0.0;
      rep.inertia_projection = Mat::Zero(2, 2);
      rep.breaks = {{Rational(0), 0}};
      break;
    }
  }
  rep.validate();
  return rep;
}

WeilDeligneRep direct_sum(const WeilDeligneRep& a, const WeilDeligneRep& b) {
  a.validate();
  b.validate();
  require(a.q == b.q, "direct_sum: residue cardinalities differ");
  WeilDeligneRep s;
  s.n = a.n + b.n;
  s.q = a.q;
  auto block = [&](const Mat& x, const Mat& y) {
    Mat m = Mat::Zero(s.n, s.n);
    m.topLeftCorner(a.n, a.n) = x;
    m.bottomRightCorner(b.n, b.n) = y;
    return m;
  };
  s.frobenius = block(a.frobenius, b.frobenius);
  s.N = block(a.N, b.N);
  s.inertia_projection = block(a.inertia_projection, b.inertia_projection);
  // Dimension on [u, next break), with the filtration trivial past the last
  // break of each summand.
  auto dim_at = [](const WeilDeligneRep& r, const Rational& u) {
    if (r.breaks.back().u <= u) return r.n;
    int d = r.breaks.front().d;
    for (const auto& br : r.breaks)
      if (br.u <= u) d = br.d;
    return d;
  };
  std::vector<Rational> us;
  for (const auto* r : {&a, &b})
    for (const auto& br : r->breaks) us.push_back(br.u);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  for (std::size_t i = 0; i < us.size(); ++i) {
    const int d = i + 1 < us.size() ? dim_at(a, us[i]) + dim_at(b, us[i]) : s.n;
    s.breaks.push_back({us[i], d});
  }
  // The fixed dimension at u = 0 must still bound dim V^I.
  if (us.size() == 1) s.breaks.front().d = a.breaks.front().d + b.breaks.front().d;
  s.validate();
  return s;
}

std::string to_json(const WeilDeligneRep& rep) {
  json j;
  j["format"] = "wd-v1";
  j["n"] = rep.n;
  j["q"] = rep.q;
  j["frobenius"] = matrix_json(rep.frobenius);
  json br = json::array();
  for (const auto& b : rep.breaks) br.push_back({b.u.str(), b.d});
  j["breaks"] = br;
  j["inertia_projection"] = matrix_json(rep.inertia_projection);
  j["N"] = matrix_json(rep.N);
  return j.dump(2);
}

WeilDeligneRep wd_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("wd-v1: invalid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != "wd-v1") throw ValidationError("wd-v1: missing or wrong format tag");
    WeilDeligneRep rep;
    rep.n = j.at("n").get<int>();
    rep.q = j.at("q").get<i64>();
    require(rep.n >= 1 && rep.n <= 64, "wd-v1: n must lie in [1, 64]");
    rep.frobenius = matrix_from_json(j.at("frobenius"), rep.n, "frobenius");
    rep.inertia_projection = matrix_from_json(j.at("inertia_projection"), rep.n, "inertia_projection");
    rep.N = matrix_from_json(j.at("N"), rep.n, "N");
    for (const auto& b : j.at("breaks")) {
      if (!b.is_array() || b.size() != 2) throw ValidationError("wd-v1: each break is [u, d]");
      const Rational u = b[0].is_string() ? Rational::parse(b[0].get<std::string>()) : Rational(b[0].get<i64>());
      rep.breaks.push_back({u, b[1].get<int>()});
    }
    rep.validate();
    return rep;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("wd-v1: ") + e.what());
  }
}

}  // namespace fsl
