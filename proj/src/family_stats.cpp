#include "fsl/family_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <memory>

#include "fsl/dirichlet.hpp"
#include "fsl/parallel.hpp"

namespace fsl {

namespace {

struct Moments {
  cplx sum = 0;
  double sum_abs2 = 0;
  std::size_t skipped = 0;

  Moments operator+(const Moments& o) const { return {sum + o.sum, sum_abs2 + o.sum_abs2, skipped + o.skipped}; }
  Moments& operator+=(const Moments& o) { return *this = *this + o; }
};

// Power sums alpha^k + beta^k (or lambda(p^k)) for alpha beta = 1 and
// alpha + beta = a.
double hecke_power(double a, int k, bool dirichlet) {
  double prev = dirichlet ? 1.0 : 2.0, cur = a;
  if (k == 0) return prev;
  for (int i = 1; i < k; ++i) {
    const double next = a * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void require_complete(const VerticalSeries& s, double x) {
  require(x > 2, "prime sum: x must exceed 2");
  if (static_cast<double>(s.cutoff) < x - 1)
    throw ValidationError("prime sum: series stops at " + std::to_string(s.cutoff) + ", below x");
}

template <class F>
PrimeSum prime_sum(const VerticalSeries& s, double x, F term) {
  require_complete(s, x);
  PrimeSum out;
  double acc = 0;
  for (std::size_t i = 0; i < s.primes.size() && static_cast<double>(s.primes[i]) < x; ++i) {
    acc += term(i) * std::log(static_cast<double>(s.primes[i]));
    out.partial.push_back(acc / static_cast<double>(s.primes[i]));
  }
  out.value = acc / x;
  return out;
}

void require_power_sums(const VerticalSeries& s) {
  if (s.convention != CoefficientConvention::PowerSum)
    throw ValidationError("indicator sums need power-sum coefficients, not Dirichlet coefficients");
}

}  // namespace

FamilySnapshot quadratic_snapshot(double x, i64 prime_limit) {
  auto ds = std::make_shared<const std::vector<i64>>(enumerate_fundamental(x));
  FamilySnapshot f;
  f.family_id = "f2";
  f.x = x;
  f.size = ds->size();
  f.prime_limit = prime_limit;
  f.gauge = [ds](std::size_t i) { return std::abs(static_cast<double>((*ds)[i])); };
  f.coefficient = [ds](std::size_t i, i64 p, int k) {
    const int c = kronecker((*ds)[i], p);
    return cplx(k % 2 == 0 ? double(c * c) : double(c), 0.0);
  };
  f.ramified = [ds](std::size_t i, i64 p) { return (*ds)[i] % p == 0; };
  return f;
}

FamilySnapshot elliptic_box_snapshot(double height, i64 prime_limit, bool dirichlet) {
  require(prime_limit >= 5, "elliptic_box_snapshot: prime_limit must be at least 5");
  struct Table {
    std::vector<ShortWeierstrassCurve> curves;
    std::vector<i64> primes;
    std::vector<int> index;               // prime -> row, -1 otherwise
    std::vector<std::vector<std::int16_t>> ap;  // ap[row][member]
    std::vector<std::vector<std::uint8_t>> bad;
  };
  auto t = std::make_shared<Table>();
  t->curves = enumerate_box(height);
  // Sort by the gauge |4a^3 + 27b^2|, ties in enumeration order.
  std::stable_sort(t->curves.begin(), t->curves.end(), [](const auto& l, const auto& r) {
    return std::llabs(l.discriminant()) < std::llabs(r.discriminant());
  });
  t->primes = primes_up_to(prime_limit);
  t->index.assign(static_cast<std::size_t>(prime_limit) + 1, -1);
  for (std::size_t r = 0; r < t->primes.size(); ++r) t->index[t->primes[r]] = static_cast<int>(r);
  t->ap.resize(t->primes.size());
  t->bad.resize(t->primes.size());
  for_each_chunk(t->primes.size(), 4, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const i64 p = t->primes[r];
      auto& row = t->ap[r];
      auto& bad = t->bad[r];
      row.assign(t->curves.size(), 0);
      bad.assign(t->curves.size(), 1);
      if (p <= 3) continue;
      const auto leg = legendre_table(p);
      for (std::size_t m = 0; m < t->curves.size(); ++m) {
        const auto& E = t->curves[m];
        if (mod(E.discriminant(), p) == 0) continue;
        const i64 a = mod(E.a, p), b = mod(E.b, p);
        i64 s = 0;
        for (i64 x = 0; x < p; ++x) s += leg[(x * x % p * x + a * x + b) % p];
        row[m] = static_cast<std::int16_t>(-s);
        bad[m] = 0;
      }
    }
  });
  FamilySnapshot f;
  f.family_id = "elliptic-box";
  f.x = height;
  f.size = t->curves.size();
  f.prime_limit = prime_limit;
  f.convention = dirichlet ? CoefficientConvention::Dirichlet : CoefficientConvention::PowerSum;
  f.gauge = [t](std::size_t i) { return std::abs(static_cast<double>(t->curves[i].discriminant())); };
  f.ramified = [t](std::size_t i, i64 p) {
    const int r = p < static_cast<i64>(t->index.size()) ? t->index[p] : -1;
    if (r < 0) throw ValidationError("elliptic snapshot: prime outside the tabulated range");
    return t->bad[r][i] != 0;
  };
  f.coefficient = [t, dirichlet](std::size_t i, i64 p, int k) {
    const int r = p < static_cast<i64>(t->index.size()) ? t->index[p] : -1;
    if (r < 0) throw ValidationError("elliptic snapshot: prime outside the tabulated range");
    if (t->bad[r][i]) return cplx(0.0, 0.0);
    const double a = t->ap[r][i] / std::sqrt(static_cast<double>(p));
    return cplx(hecke_power(a, k, dirichlet), 0.0);
  };
  return f;
}

FamilySnapshot singleton_snapshot(const std::string& id, std::function<cplx(i64, int)> coefficient,
                                  i64 prime_limit) {
  FamilySnapshot f;
  f.family_id = id;
  f.x = 1;
  f.size = 1;
  f.prime_limit = prime_limit;
  f.gauge = [](std::size_t) { return 0.0; };
  f.coefficient = [c = std::move(coefficient)](std::size_t, i64 p, int k) { return c(p, k); };
  f.ramified = [](std::size_t, i64) { return false; };
  return f;
}

THat t_hat(const FamilySnapshot& f, i64 n) {
  require(n >= 2, "t_hat: n must be a prime power");
  const auto fac = factorize(static_cast<u64>(n));
  require(fac.size() == 1, "t_hat: n must be a prime power");
  const i64 p = fac[0].first;
  const int k = fac[0].second;
  if (p > f.prime_limit) throw ValidationError("t_hat: accessor range exceeded");
  require(f.size > 0, "t_hat: empty family");
  const Moments m = chunked_sum<Moments>(f.size, 4096, [&](std::size_t lo, std::size_t hi) {
    Moments part;
    for (std::size_t i = lo; i < hi; ++i) {
      if (f.ramified(i, p)) {
        ++part.skipped;
        continue;
      }
      const cplx a = f.coefficient(i, p, k);
      part.sum += a;
      part.sum_abs2 += std::norm(a);
    }
    return part;
  });
  const double N = static_cast<double>(f.size);
  THat t;
  t.value = m.sum / N;
  const double var = std::max(0.0, m.sum_abs2 / N - std::norm(t.value));
  t.std_error = f.size > 1 ? std::sqrt(var / (N - 1)) : 0.0;
  t.skipped_fraction = static_cast<double>(m.skipped) / N;
  return t;
}

VerticalSeries vertical_series(const FamilySnapshot& f, i64 cutoff, i64 p_min) {
  require(cutoff >= p_min && p_min >= 2, "vertical_series: empty prime range");
  if (cutoff > f.prime_limit) throw ValidationError("vertical_series: accessor range exceeded");
  require(f.size > 0, "vertical_series: empty family");
  VerticalSeries s;
  s.family_id = f.family_id;
  s.p_min = p_min;
  s.cutoff = cutoff;
  s.convention = f.convention;
  for (i64 p : primes_up_to(cutoff))
    if (p >= p_min) s.primes.push_back(p);
  const std::size_t np = s.primes.size();
  s.t1.resize(np);
  s.t2.resize(np);
  s.abs2.resize(np);
  s.sq.resize(np);
  const double N = static_cast<double>(f.size);
  for_each_chunk(np, 1, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const i64 p = s.primes[j];
      cplx t1 = 0, t2 = 0, sq = 0;
      double abs2 = 0;
      for (std::size_t i = 0; i < f.size; ++i) {
        if (f.ramified(i, p)) continue;
        const cplx a = f.coefficient(i, p, 1);
        t1 += a;
        t2 += f.coefficient(i, p, 2);
        abs2 += std::norm(a);
        sq += a * a;
      }
      s.t1[j] = t1 / N;
      s.t2[j] = t2 / N;
      s.abs2[j] = abs2 / N;
      s.sq[j] = sq / N;
    }
  });
  return s;
}

VerticalSeries nagao_series(const OneParamFamily& f, i64 cutoff) {
  const NagaoResult r = nagao_rank(f, cutoff);
  VerticalSeries s;
  s.family_id = f.name;
  s.p_min = 5;
  s.cutoff = cutoff;
  s.primes = r.primes;
  for (std::size_t i = 0; i < r.primes.size(); ++i)
    s.t1.push_back(-r.minus_a[i] / std::sqrt(static_cast<double>(r.primes[i])));
  return s;
}

PrimeSum i3_sum(const VerticalSeries& s, double x) {
  require_power_sums(s);
  require(s.t2.size() == s.primes.size(), "i3_sum: series has no a(p^2) means");
  return prime_sum(s, x, [&](std::size_t i) { return s.t2[i].real(); });
}

PrimeSum first_moment_sum(const VerticalSeries& s, double x) {
  return prime_sum(s, x, [&](std::size_t i) { return s.t1[i].real(); });
}

PrimeSum rank_sum(const VerticalSeries& s, double x) {
  if (!s.analytic) throw ValidationError("rank_sum: normalization mismatch, analytic coefficients required");
  return prime_sum(s, x, [&](std::size_t i) {
    return -s.t1[i].real() * std::sqrt(static_cast<double>(s.primes[i]));
  });
}

IndicatorReport indicator_report(const VerticalSeries& s, double x, std::optional<double> plus_fraction,
                                 double i1_tolerance) {
  require_power_sums(s);
  require(s.abs2.size() == s.primes.size() && s.sq.size() == s.primes.size(),
          "indicator_report: series lacks second moments");
  IndicatorReport r;
  auto& t = r.indicators;
  t.i1 = prime_sum(s, x, [&](std::size_t i) { return s.abs2[i]; }).value;
  t.i2 = prime_sum(s, x, [&](std::size_t i) { return s.sq[i].real(); }).value;
  t.i2_imag = prime_sum(s, x, [&](std::size_t i) { return s.sq[i].imag(); }).value;
  t.i3 = i3_sum(s, x).value;
  r.rank = rank_sum(s, x).value;
  if (std::abs(t.i1 - 1.0) > i1_tolerance) {
    r.verdict = "not essentially cuspidal";
    return r;
  }
  r.masses = decompose_indicators(t, i1_tolerance);
  const auto& m = r.masses;
  // A type is named when it carries at least 80% of the mass.
  constexpr double dominant = 0.8;
  if (m.mass_u >= dominant) {
    r.verdict = "U(inf)";
  } else if (m.mass_o >= dominant) {
    r.verdict = "Sp(inf)";
  } else if (m.mass_sp >= dominant) {
    if (!plus_fraction) {
      r.verdict = "Symplectic: eps-split unknown";
    } else if (*plus_fraction >= dominant) {
      r.verdict = "SO_even(inf)";
    } else if (*plus_fraction <= 1 - dominant) {
      r.verdict = "SO_odd(inf)";
    } else {
      char buf[96];
      std::snprintf(buf, sizeof buf, "O(inf): SO_even %.3f + SO_odd %.3f", *plus_fraction, 1 - *plus_fraction);
      r.verdict = buf;
    }
  } else {
    r.verdict = "mixed";
  }
  return r;
}

std::string report_json(const std::string& family, double x, const VerticalSeries& s, const IndicatorReport& r,
                        const std::string& provenance_json) {
  using json = nlohmann::json;
  json j;
  j["family"] = family;
  j["x"] = x;
  json th;
  th["primes"] = s.primes;
  std::vector<double> t1, t2;
  for (const auto& v : s.t1) t1.push_back(v.real());
  for (const auto& v : s.t2) t2.push_back(v.real());
  th["t1"] = t1;
  th["t2"] = t2;
  j["t_hat"] = th;
  j["i"] = {r.indicators.i1, r.indicators.i2, r.indicators.i3};
  j["masses"] = {r.masses.mass_u, r.masses.mass_o, r.masses.mass_sp};
  j["rank"] = r.rank;
  j["verdict"] = r.verdict;
  j["provenance"] = json::parse(provenance_json);
  return j.dump(2);
}

}  // namespace fsl
