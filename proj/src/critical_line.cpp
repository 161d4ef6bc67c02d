// Fast evaluation of L(1/2 + it, chi_d) for zero finding.
//
// Splitting n = qk + r in the Hurwitz representation gives
//   L(s) = sum_{n <= qN} chi(n) n^{-s}
//        + sum_r chi(r) (qN + r)^{-s} [a_r/(s-1) + 1/2 + sum_k c_k(s) a_r^{1-2k}],
// with a_r = N + r/q and c_k(s) = B_2k/(2k)! (s)_{2k-1}. All n^{-it} are
// produced multiplicatively from prime values, or by rotor recurrences on a
// uniform t-grid.

#include <array>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <cmath>
#include <memory>
#include <mutex>

#include "fsl/lfunctions.hpp"

namespace fsl {

namespace {

const std::array<double, 15>& bernoulli_ratio() {
  static const std::array<double, 15> t = [] {
    std::array<double, 15> v{};
    for (int k = 0; k < 15; ++k)
      v[k] = boost::math::bernoulli_b2n<double>(k) / boost::math::factorial<double>(static_cast<unsigned>(2 * k));
    return v;
  }();
  return t;
}

std::shared_ptr<const std::vector<std::int32_t>> spf_table(std::size_t n) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<std::int32_t>> cached;
  std::lock_guard lock(mu);
  if (cached && cached->size() > n) return cached;
  const std::size_t m = std::max<std::size_t>(n + 1, cached ? 2 * cached->size() : 1024);
  auto t = std::make_shared<std::vector<std::int32_t>>(m, 0);
  for (std::size_t i = 2; i < m; ++i) {
    if ((*t)[i]) continue;
    for (std::size_t j = i; j < m; j += i)
      if (!(*t)[j]) (*t)[j] = static_cast<std::int32_t>(i);
  }
  cached = std::move(t);
  return cached;
}

// n^{-it} for n = 0 .. nmax (entry 0 unused).
void exact_rotors(double t, std::size_t nmax, const std::vector<std::int32_t>& spf, std::vector<cplx>& z) {
  z.assign(nmax + 1, cplx(1.0, 0.0));
  for (std::size_t n = 2; n <= nmax; ++n) {
    const std::size_t p = spf[n];
    if (p == n)
      z[n] = std::polar(1.0, -t * std::log(static_cast<double>(n)));
    else
      z[n] = z[p] * z[n / p];
  }
}

// c_k(s) = B_2k/(2k)! (s)_{2k-1} for k = 1 .. M.
std::array<cplx, 13> bracket_coeffs(cplx s, int M) {
  const auto& bf = bernoulli_ratio();
  std::array<cplx, 13> c{};
  cplx poch = s;
  for (int k = 1; k <= M; ++k) {
    c[k] = bf[k] * poch;
    poch *= (s + double(2 * k - 1)) * (s + double(2 * k));
  }
  return c;
}


void advance_rotors(double* __restrict pr, double* __restrict pi_, const double* __restrict qr,
                    const double* __restrict qi, std::size_t nh, std::size_t n, double& re, double& im) {
  double sr = 0, si = 0;
  for (std::size_t i = 0; i < nh; ++i) {
    const double a = pr[i] * qr[i] - pi_[i] * qi[i];
    const double b = pr[i] * qi[i] + pi_[i] * qr[i];
    pr[i] = a;
    pi_[i] = b;
    sr += a;
    si += b;
  }
  for (std::size_t i = nh; i < n; ++i) {
    const double a = pr[i] * qr[i] - pi_[i] * qi[i];
    const double b = pr[i] * qi[i] + pi_[i] * qr[i];
    pr[i] = a;
    pi_[i] = b;
  }
  re = sr;
  im = si;
}

}  // namespace

CriticalLineEvaluator::CriticalLineEvaluator(const QuadraticLSeries& L, double t_max, double tol)
    : L_(L), q_(L.conductor()) {
  require(t_max > 0 && t_max <= 100, "CriticalLineEvaluator: t_max must lie in (0, 100]");
  const auto& bf = bernoulli_ratio();
  const cplx s(0.5, t_max);
  const double sq = std::sqrt(static_cast<double>(q_));
  // Cost model per evaluation: one rotor per n <= qN plus roughly M + 2
  // complex updates per tail term; pick the cheapest admissible (N, M).
  bool found = false;
  double best_cost = 0;
  for (int N = 1; N <= 4096; ++N) {
    if (found && N > best_cost) break;
    cplx poch = s;
    for (int M = 1; M <= 12; ++M) {
      poch *= (s + double(2 * M - 1)) * (s + double(2 * M));  // (s)_{2M+1}
      const double sig = 0.5 + 2 * M + 1;
      const double bound = std::abs(bf[M + 1] * poch) * std::pow(double(N), -sig) *
                           std::abs(s + double(2 * M + 1)) / sig;
      if (sq * bound <= tol) {
        const double cost = N + 2.0 * (M + 2);
        if (!found || cost < best_cost) {
          N_ = N;
          M_ = M;
          best_cost = cost;
          found = true;
        }
        break;
      }
    }
  }
  if (!found) throw Error("CriticalLineEvaluator: no admissible term budget");
  const i64 qN = q_ * N_;
  std::vector<std::int8_t> chi(q_);
  for (i64 r = 0; r < q_; ++r) chi[r] = static_cast<std::int8_t>(L_.chi(r));
  for (i64 n = 1; n <= qN; ++n) {
    const int c = chi[n % q_];
    if (c == 0) continue;
    coef_.push_back(c / std::sqrt(static_cast<double>(n)));
    idx_.push_back(static_cast<std::uint32_t>(n));
    log_.push_back(std::log(static_cast<double>(n)));
  }
  for (i64 r = 1; r <= q_; ++r) {
    const int c = chi[r % q_];
    if (c == 0) continue;
    const double m = static_cast<double>(qN + r);
    tail_chi_.push_back(c / std::sqrt(m));
    tail_a_.push_back(N_ + static_cast<double>(r) / q_);
    tail_idx_.push_back(static_cast<std::uint32_t>(qN + r));
    tail_log_.push_back(std::log(m));
  }
}

double CriticalLineEvaluator::theta(double t) const {
  const cplx w(0.25 + 0.5 * L_.parity(), 0.5 * t);
  return log_gamma(w).imag() + 0.5 * t * std::log(static_cast<double>(q_) / pi);
}

cplx CriticalLineEvaluator::tail(double t, const std::vector<cplx>& rot_tail, bool scale) const {
  const cplx s(0.5, t);
  const auto c = bracket_coeffs(s, M_);
  const cplx inv_sm1 = 1.0 / (s - 1.0);
  cplx acc = 0;
  for (std::size_t i = 0; i < tail_a_.size(); ++i) {
    const double a = tail_a_[i];
    const double u = 1.0 / (a * a);
    cplx poly = c[M_];
    for (int k = M_ - 1; k >= 1; --k) poly = poly * u + c[k];
    const cplx bracket = a * inv_sm1 + 0.5 + poly / a;
    acc += (scale ? tail_chi_[i] : 1.0) * rot_tail[i] * bracket;
  }
  return acc;
}

cplx CriticalLineEvaluator::l_half(double t) const {
  const std::size_t nmax = static_cast<std::size_t>(q_ * (N_ + 1));
  const auto spf = spf_table(nmax);
  thread_local std::vector<cplx> z;
  exact_rotors(t, nmax, *spf, z);
  double re = 0, im = 0;
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    const cplx& w = z[idx_[i]];
    re += coef_[i] * w.real();
    im += coef_[i] * w.imag();
  }
  std::vector<cplx> rt(tail_idx_.size());
  for (std::size_t i = 0; i < rt.size(); ++i) rt[i] = z[tail_idx_[i]];
  return cplx(re, im) + tail(t, rt, true);
}

double CriticalLineEvaluator::z(double t, double* imag) const {
  const cplx v = std::polar(1.0, theta(t)) * l_half(t);
  if (imag) *imag = v.imag();
  return v.real();
}

std::vector<double> CriticalLineEvaluator::z_grid(double t0, double h, std::size_t count) const {
  std::vector<double> out(count);
  if (count == 0) return out;
  const std::size_t nmax = static_cast<std::size_t>(q_ * (N_ + 1));
  const auto spf = spf_table(nmax);
  const std::size_t nh = coef_.size(), nt = tail_idx_.size();
  // Rotors pre-scaled by their coefficients: y_n = chi(n) n^{-1/2} n^{-it}.
  std::vector<double> yr(nh + nt), yi(nh + nt), wr(nh + nt), wi(nh + nt);
  thread_local std::vector<cplx> scratch;
  auto load = [&](double t, std::vector<double>& re, std::vector<double>& im, bool scaled) {
    exact_rotors(t, nmax, *spf, scratch);
    for (std::size_t i = 0; i < nh; ++i) {
      const cplx v = scratch[idx_[i]] * (scaled ? coef_[i] : 1.0);
      re[i] = v.real();
      im[i] = v.imag();
    }
    for (std::size_t i = 0; i < nt; ++i) {
      const cplx v = scratch[tail_idx_[i]] * (scaled ? tail_chi_[i] : 1.0);
      re[nh + i] = v.real();
      im[nh + i] = v.imag();
    }
  };
  load(h, wr, wi, false);
  std::vector<cplx> rt(nt);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = t0 + static_cast<double>(j) * h;
    double re = 0, im = 0;
    if (j % 64 == 0) {
      load(t, yr, yi, true);
      for (std::size_t i = 0; i < nh; ++i) {
        re += yr[i];
        im += yi[i];
      }
    } else {
      advance_rotors(yr.data(), yi.data(), wr.data(), wi.data(), nh, nh + nt, re, im);
    }
    for (std::size_t i = 0; i < nt; ++i) rt[i] = cplx(yr[nh + i], yi[nh + i]);
    const cplx L = cplx(re, im) + tail(t, rt, false);
    out[j] = (std::polar(1.0, theta(t)) * L).real();
  }
  return out;
}

CriticalLineEvaluator::Local CriticalLineEvaluator::expand(double t0) const {
  constexpr int K = Local::K;
  const std::size_t nmax = static_cast<std::size_t>(q_ * (N_ + 1));
  const auto spf = spf_table(nmax);
  thread_local std::vector<cplx> z;
  exact_rotors(t0, nmax, *spf, z);
  Local loc;
  loc.owner = this;
  loc.center = t0;
  // |delta log n| <= 0.01 keeps the truncated exponential series far below
  // double rounding for K = 8.
  loc.radius = 0.01 / std::log(static_cast<double>(q_ * (N_ + 1)));
  std::array<double, K + 1> sr{}, si{};
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    const cplx& w = z[idx_[i]];
    double wr = coef_[i] * w.real(), wi = coef_[i] * w.imag();
    const double l = log_[i];
    for (int k = 0; k <= K; ++k) {
      sr[k] += wr;
      si[k] += wi;
      wr *= l;
      wi *= l;
    }
  }
  for (int k = 0; k <= K; ++k) loc.main[k] = cplx(sr[k], si[k]);
  const int nb = M_ + 2;
  loc.tail.assign(nb, {});
  std::array<double, 14> basis{};
  for (std::size_t i = 0; i < tail_a_.size(); ++i) {
    const double a = tail_a_[i];
    basis[0] = a;
    basis[1] = 0.5;
    const double u = 1.0 / (a * a);
    double pw = a;
    for (int m = 1; m <= M_; ++m) {
      pw *= u;
      basis[1 + m] = pw;
    }
    cplx w = tail_chi_[i] * z[tail_idx_[i]];
    const double l = tail_log_[i];
    for (int k = 0; k <= K; ++k) {
      for (int b = 0; b < nb; ++b) loc.tail[b][k] += basis[b] * w;
      w *= l;
    }
  }
  return loc;
}

double CriticalLineEvaluator::Local::z(double t) const {
  const double delta = t - center;
  require(std::abs(delta) <= radius * (1 + 1e-9), "local expansion used outside its window");
  const cplx s(0.5, t);
  const auto c = bracket_coeffs(s, owner->M_);
  std::array<cplx, 14> weight{};
  weight[0] = 1.0 / (s - 1.0);
  weight[1] = 1.0;
  for (int m = 1; m <= owner->M_; ++m) weight[1 + m] = c[m];
  // Horner in the variable -i delta with 1/k! folded in.
  const cplx x(0.0, -delta);
  cplx acc = 0;
  for (int k = K; k >= 0; --k) {
    cplx term = main[k];
    for (std::size_t b = 0; b < tail.size(); ++b) term += weight[b] * tail[b][k];
    acc = acc * x / double(k + 1) + term;
  }
  return (std::polar(1.0, owner->theta(t)) * acc).real();
}

}  // namespace fsl
