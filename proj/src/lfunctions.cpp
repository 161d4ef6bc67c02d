#include "fsl/lfunctions.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fsl/dirichlet.hpp"
#include "fsl/parallel.hpp"

namespace fsl {

namespace {

// B_{2k} / (2k)! for k = 0 .. 14.
const std::array<long double, 15>& bernoulli_over_factorial() {
  static const std::array<long double, 15> table = [] {
    std::array<long double, 15> t{};
    for (int k = 0; k < 15; ++k)
      t[k] = boost::math::bernoulli_b2n<long double>(k) /
             boost::math::factorial<long double>(static_cast<unsigned>(2 * k));
    return t;
  }();
  return table;
}

// (exp(z) - 1) / z, stable near z = 0.
cplxl expm1_over(cplxl z) {
  if (std::abs(z) < 1e-3L) {
    cplxl term = 1, sum = 1;
    for (int k = 2; k < 10; ++k) {
      term *= z / static_cast<long double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0L) / z;
}

struct HurwitzParts {
  cplxl value;
  long double bound;
};

// When `drop_pole` is set the term -1/(s-1) is removed, which is harmless
// inside a character sum with total sum zero and regular at s = 1.
HurwitzParts hurwitz_impl(cplxl s, long double alpha, int N, int M, bool drop_pole) {
  const auto& bf = bernoulli_over_factorial();
  cplxl sum = 0;
  for (int n = 0; n < N; ++n) sum += std::exp(-s * std::log(static_cast<long double>(n) + alpha));
  const long double a = alpha + N;
  const long double la = std::log(a);
  const cplxl a_ms = std::exp(-s * la);
  if (drop_pole)
    sum += -la * expm1_over((1.0L - s) * la);
  else
    sum += a * a_ms / (s - 1.0L);
  sum += a_ms * 0.5L;
  cplxl poch = s;  // (s)_{2k-1}
  cplxl power = a_ms / a;
  for (int k = 1; k <= M; ++k) {
    sum += bf[k] * poch * power;
    poch *= (s + static_cast<long double>(2 * k - 1)) * (s + static_cast<long double>(2 * k));
    power /= a * a;
  }
  const long double sig = s.real() + 2 * M + 1;
  long double bound = std::numeric_limits<long double>::infinity();
  if (sig > 0) bound = std::abs(bf[M + 1] * poch * power) * std::abs(s + static_cast<long double>(2 * M + 1)) / sig;
  return {sum, bound};
}

}  // namespace

HurwitzValue hurwitz_zeta(cplx s, double alpha, int N, int M) {
  require(!(s.real() == 1.0 && s.imag() == 0.0), "hurwitz_zeta: pole at s = 1");
  require(alpha > 0 && alpha <= 1, "hurwitz_zeta: alpha must lie in (0, 1]");
  require(M >= 0 && M <= 12, "hurwitz_zeta: at most 12 corrections");
  require(N >= std::abs(s.imag()) && N >= 1, "hurwitz_zeta: N must be at least |Im s|");
  const auto r = hurwitz_impl(cplxl(s.real(), s.imag()), alpha, N, M, false);
  return {cplx(static_cast<double>(r.value.real()), static_cast<double>(r.value.imag())),
          static_cast<double>(r.bound)};
}

cplx log_gamma(cplx z) {
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  cplx shift = 0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  static const double b[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  const cplx iz = 1.0 / z, iz2 = iz * iz;
  cplx series = 0, p = iz;
  for (int k = 1; k <= 7; ++k) {
    series += b[k - 1] / (2.0 * k * (2.0 * k - 1)) * p;
    p *= iz2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(two_pi) + series - shift;
}

cplx digamma(cplx z) {
  require(z.real() > 0, "digamma: Re z must be positive");
  cplx shift = 0;
  while (z.real() < 15.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  static const double b[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  const cplx iz = 1.0 / z, iz2 = iz * iz;
  cplx series = 0, p = iz2;
  for (int k = 1; k <= 7; ++k) {
    series += b[k - 1] / (2.0 * k) * p;
    p *= iz2;
  }
  return std::log(z) - 0.5 * iz - series + shift;
}

QuadraticLSeries::QuadraticLSeries(i64 disc) : d(disc) {
  require(is_fundamental(disc), "QuadraticLSeries: d must be a fundamental discriminant");
}

int QuadraticLSeries::chi(i64 n) const { return kronecker(d, n); }

LValue l_value(const QuadraticLSeries& L, cplx s, double tol) {
  const i64 q = L.conductor();
  require(q <= 100000, "l_value: conductor above 1e5");
  require(std::abs(s.imag()) <= 100, "l_value: |Im s| above 100");
  const cplxl sl(s.real(), s.imag());
  const int M = 12;
  for (int N = std::max(8, static_cast<int>(std::ceil(std::abs(s.imag())))); N <= (1 << 14); N *= 2) {
    cplxl acc = 0;
    long double bound = 0;
    for (i64 r = 1; r <= q; ++r) {
      const int c = L.chi(r);
      if (c == 0) continue;
      const auto h = hurwitz_impl(sl, static_cast<long double>(r) / q, N, M, true);
      acc += static_cast<long double>(c) * h.value;
      bound += h.bound;
    }
    const cplxl pref = std::exp(-sl * std::log(static_cast<long double>(q)));
    bound *= std::abs(pref);
    if (bound <= tol) {
      const cplxl v = pref * acc;
      return {cplx(static_cast<double>(v.real()), static_cast<double>(v.imag())), static_cast<double>(bound)};
    }
  }
  throw Error("l_value: tolerance not achievable within the term budget");
}

namespace {

cplx gamma_factor(const QuadraticLSeries& L, cplx s) {
  const cplx w = (s + static_cast<double>(L.parity())) / 2.0;
  return std::exp(w * std::log(static_cast<double>(L.conductor()) / pi) + log_gamma(w));
}

}  // namespace

cplx completed_lambda_at(const QuadraticLSeries& L, cplx s) {
  return gamma_factor(L, s) * l_value(L, s, 1e-13).value;
}

double completed_lambda(const QuadraticLSeries& L, double t) {
  require(std::abs(t) <= 60, "completed_lambda: |t| above 60");
  const cplx s(0.5, t);
  const cplx lv = l_value(L, s, 1e-13).value;
  const cplx g = gamma_factor(L, s);
  const cplx v = g * lv;
  const double scale = std::abs(g) * std::max(1.0, std::abs(lv));
  if (std::abs(v.imag()) > 1e-8 * scale) throw Error("completed_lambda: imaginary part check failed");
  return v.real();
}

// ------------------------------------------------------------------ zeros

std::vector<double> ZeroList::signed_ordinates() const {
  std::vector<double> out;
  out.reserve(2 * ordinates.size());
  for (auto it = ordinates.rbegin(); it != ordinates.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), ordinates.begin(), ordinates.end());
  return out;
}

double zero_count_estimate(i64 q, double T) {
  return T / pi * std::log(static_cast<double>(q) * T / (two_pi * std::exp(1.0)));
}

namespace {

template <class F>
double refine_root(const F& f, double lo, double hi, double flo, double fhi, double tol) {
  // Illinois regula falsi, with a bisection step whenever two secant steps
  // fail to halve the bracket.
  int side = 0;
  double last_width = hi - lo;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double m = (lo * fhi - hi * flo) / (fhi - flo);
    if (it % 2 == 1) {
      if (hi - lo > 0.5 * last_width) m = 0.5 * (lo + hi);
      last_width = hi - lo;
    }
    if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
    const double fm = f(m);
    if (fm == 0) return m;
    if ((fm < 0) == (flo < 0)) {
      lo = m;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = m;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

// Root of the cubic through four equally spaced samples, searched in the
// middle interval [x1, x2]; falls back to linear interpolation.
double cubic_guess(const double* f, double x0, double h, int mid) {
  const double a = f[mid], b = f[mid + 1];
  double u = a / (a - b);
  if (mid == 1) {
    // Lagrange cubic through nodes -1, 0, 1, 2 evaluated at u in [0, 1].
    auto p = [&](double x) {
      return -f[0] * x * (x - 1) * (x - 2) / 6 + f[1] * (x + 1) * (x - 1) * (x - 2) / 2 -
             f[2] * (x + 1) * x * (x - 2) / 2 + f[3] * (x + 1) * x * (x - 1) / 6;
    };
    double lo = 0, hi = 1, flo = a;
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (lo + hi);
      const double fm = p(m);
      if ((fm < 0) == (flo < 0)) {
        lo = m;
        flo = fm;
      } else {
        hi = m;
      }
    }
    u = 0.5 * (lo + hi);
  }
  return x0 + u * h;
}

double locate(const CriticalLineEvaluator& E, const std::vector<double>& g, std::size_t j, double step,
              double tol) {
  const double a = j * step, b = (j + 1) * step;
  double guess;
  if (j >= 1 && j + 2 < g.size())
    guess = cubic_guess(&g[j - 1], a, step, 1);
  else
    guess = cubic_guess(&g[j], a, step, 0);
  auto exact = [&](double t) { return E.z(t); };
  // The interpolated root is normally accurate enough that a local expansion
  // around it brackets the zero; refinement then costs no further full passes.
  const auto loc = E.expand(guess);
  auto local = [&](double t) { return loc.z(t); };
  const double lo = std::max(a, guess - loc.radius), hi = std::min(b, guess + loc.radius);
  if (lo < hi) {
    const double flo = lo == a ? g[j] : loc.z(lo);
    const double fhi = hi == b ? g[j + 1] : loc.z(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) != (fhi < 0)) return refine_root(local, lo, hi, flo, fhi, tol);
    if ((flo < 0) == (g[j] < 0)) return refine_root(exact, hi, b, fhi, g[j + 1], tol);
    return refine_root(exact, a, lo, g[j], flo, tol);
  }
  return refine_root(exact, a, b, g[j], g[j + 1], tol);
}

std::vector<double> scan(const CriticalLineEvaluator& E, double T, double h, double tol) {
  const std::size_t n = static_cast<std::size_t>(std::ceil(T / h)) + 1;
  const double step = T / static_cast<double>(n - 1);
  const auto g = E.z_grid(0.0, step, n);
  std::vector<double> zeros;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (g[j + 1] == 0.0) {
      zeros.push_back((j + 1) * step);
      continue;
    }
    if ((g[j] < 0) != (g[j + 1] < 0) && g[j] != 0.0) zeros.push_back(locate(E, g, j, step, tol));
  }
  return zeros;
}

}  // namespace

ZeroList find_zeros(const QuadraticLSeries& L, double T, const ZeroSearchOptions& opt) {
  require(T > 0 && T <= 60, "find_zeros: T must lie in (0, 60]");
  ZeroList z;
  z.d = L.d;
  z.q = L.conductor();
  z.T = T;
  const double h = opt.grid_factor * two_pi / std::log(static_cast<double>(z.q) * T + 10);
  const CriticalLineEvaluator E(L, T + h);
  const double est = zero_count_estimate(z.q, T);
  const double window = opt.audit_slack + std::log(static_cast<double>(z.q));
  for (int attempt = 0; attempt < 2; ++attempt) {
    z.ordinates = scan(E, T, attempt == 0 ? h : h / 4, opt.tolerance);
    if (std::abs(2.0 * z.ordinates.size() - est) <= window) return z;
  }
  std::ostringstream msg;
  msg << "zero-count audit failed for d = " << L.d << ": found " << 2 * z.ordinates.size()
      << " signed zeros up to T = " << T << ", main term " << est;
  throw AuditAlarm(msg.str());
}

std::vector<double> scale_zeros(const ZeroList& z, bool log_q_over_pi) {
  require(z.q >= 3, "scale_zeros: conductor must be at least 3");
  const double c = std::log(log_q_over_pi ? z.q / pi : static_cast<double>(z.q)) / two_pi;
  auto out = z.signed_ordinates();
  for (double& g : out) g *= c;
  return out;
}

double one_level_statistic(const ZeroList& z, const TestFunction& phi, bool log_q_over_pi) {
  const double c = std::log(log_q_over_pi ? z.q / pi : static_cast<double>(z.q)) / two_pi;
  if (z.T * c < 5.0) throw ValidationError("one_level_statistic: zero list too short, increase T");
  double s = 0;
  for (double g : scale_zeros(z, log_q_over_pi)) s += phi(g);
  return s;
}

double explicit_one_level(const QuadraticLSeries& L, const TestFunction& phi, bool log_q_over_pi) {
  const i64 q = L.conductor();
  require(q >= 3, "explicit_one_level: conductor must be at least 3");
  require(phi.a > 0 && phi.a <= 2, "explicit_one_level: support parameter must lie in (0, 2]");
  const double lq = std::log(static_cast<double>(q));
  const double scale = log_q_over_pi ? std::log(q / pi) : lq;
  require(scale > 0, "explicit_one_level: log(q/pi) scaling needs q >= 4");
  // Archimedean part: (1/scale) int Phi(x) [log(q/pi) + Re psi((1/2 + a + 2 pi i x/scale)/2)] dx.
  const double shift = 0.25 + 0.5 * L.parity();
  auto integrand = [&](double x) { return phi(x) * digamma(cplx(shift, pi * x / scale)).real(); };
  const double piece = 0.5 / phi.a, X = 400.0;
  double arch = 0;
  for (double lo = 0; lo < X; lo += piece)
    arch += boost::math::quadrature::gauss<double, 15>::integrate(integrand, lo, lo + piece);
  // Beyond X, Phi averages to 1/(2 pi^2 a x^2) and psi to log(pi x / scale).
  arch += (std::log(pi * X / scale) + 1.0) / (2.0 * pi * pi * phi.a * X);
  arch = std::log(q / pi) + 2.0 * arch;  // Phi integrates to 1 and the integrand is even
  // Prime powers with log n < a * scale.
  const double nmax = std::exp(phi.a * scale);
  double primes = 0;
  for (i64 p : primes_up_to(static_cast<i64>(nmax))) {
    const int c = L.chi(p);
    if (c == 0) continue;
    const double lp = std::log(static_cast<double>(p));
    double pk = static_cast<double>(p);
    int ck = c;
    while (pk < nmax) {
      primes += lp * ck / std::sqrt(pk) * phi.transform(std::log(pk) / scale);
      pk *= static_cast<double>(p);
      ck *= c;
    }
  }
  return (arch - 2.0 * primes) / scale;
}

FamilyOneLevel quadratic_one_level(const std::vector<i64>& discriminants, const TestFunction& phi,
                                   const OneLevelOptions& opt) {
  require(opt.reach > 0, "quadratic_one_level: reach must be positive");
  if (opt.cache_dir) std::filesystem::create_directories(*opt.cache_dir);
  const std::size_t n = discriminants.size();
  std::vector<double> vals(n, 0.0), expl(n, 0.0);
  std::vector<std::uint8_t> used(n, 0);
  for_each_chunk(n, 8, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const QuadraticLSeries L(discriminants[i]);
      const double q = static_cast<double>(L.conductor());
      const double scale = std::log(opt.log_q_over_pi ? q / pi : q);
      if (q < 3 || scale <= 0) continue;
      const double T = std::min(60.0, opt.reach * two_pi / scale);
      if (T * scale / two_pi < 5.0) continue;
      std::optional<ZeroList> z;
      if (opt.cache_dir) z = load_zero_cache(*opt.cache_dir, L.d, T);
      if (!z) {
        z = find_zeros(L, T);
        if (opt.cache_dir) save_zero_cache(*opt.cache_dir, *z);
      }
      vals[i] = one_level_statistic(*z, phi, opt.log_q_over_pi);
      if (opt.explicit_formula) expl[i] = explicit_one_level(L, phi, opt.log_q_over_pi);
      used[i] = 1;
    }
  });
  FamilyOneLevel out;
  std::vector<double> kept, kept_expl;
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) {
      ++out.skipped;
      continue;
    }
    out.discriminants.push_back(discriminants[i]);
    kept.push_back(vals[i]);
    if (opt.explicit_formula) kept_expl.push_back(expl[i]);
  }
  require(!kept.empty(), "quadratic_one_level: no usable members");
  const double m = static_cast<double>(kept.size());
  auto& r = out.report;
  r.members = kept.size();
  r.empirical_mean = pairwise_sum(std::span<const double>(kept)) / m;
  double ss = 0;
  for (double v : kept) ss += (v - r.empirical_mean) * (v - r.empirical_mean);
  r.std_error = kept.size() > 1 ? std::sqrt(ss / (m - 1) / m) : 0.0;
  r.predicted = predicted_one_level(KernelKind::OddOrSympK, phi, false);
  r.abs_gap = std::abs(r.empirical_mean - r.predicted);
  if (opt.explicit_formula) out.explicit_mean = pairwise_sum(std::span<const double>(kept_expl)) / m;
  out.values = std::move(kept);
  out.explicit_values = std::move(kept_expl);
  return out;
}

// ------------------------------------------------------------------ cache

namespace {

std::filesystem::path zero_file(const std::filesystem::path& dir, i64 d) {
  return dir / ("zeros_" + std::to_string(d) + ".csv");
}

}  // namespace

void save_zero_cache(const std::filesystem::path& dir, const ZeroList& z) {
  std::filesystem::create_directories(dir);
  const auto file = zero_file(dir, z.d);
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw Error("cannot write " + tmp);
    os << "format=zeros,v1,d=" << z.d << ",T=" << std::setprecision(17) << z.T << '\n';
    os << std::fixed << std::setprecision(10);
    for (double g : z.ordinates) os << g << '\n';
  }
  std::filesystem::rename(tmp, file);
}

std::optional<ZeroList> load_zero_cache(const std::filesystem::path& dir, i64 d, double T) {
  std::ifstream is(zero_file(dir, d));
  if (!is) return std::nullopt;
  std::string header;
  std::getline(is, header);
  const std::string prefix = "format=zeros,v1,d=" + std::to_string(d) + ",T=";
  if (header.rfind(prefix, 0) != 0) return std::nullopt;
  const double cachedT = std::stod(header.substr(prefix.size()));
  if (cachedT < T) return std::nullopt;
  ZeroList z;
  z.d = d;
  z.q = d < 0 ? -d : d;
  z.T = T;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const double g = std::stod(line);
    if (g <= T) z.ordinates.push_back(g);
  }
  return z;
}

}  // namespace fsl
