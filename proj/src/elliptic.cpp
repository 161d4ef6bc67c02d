#include "fsl/elliptic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "fsl/dirichlet.hpp"
#include "fsl/parallel.hpp"

namespace fsl {

namespace {

void require_good_prime(i64 p) { require(p > 3 && is_prime(static_cast<u64>(p)), "prime must exceed 3"); }

// Sum of (v | p) over a full period of values v + b, b in F_p.
i64 full_period_sum(const std::vector<std::int8_t>& leg) {
  i64 s = 0;
  for (auto v : leg) s += v;
  return s;
}

i64 eval_mod(const Poly1& f, i64 w, i64 p) {
  i64 acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = mod(acc * w + *it, p);
  return acc;
}

long double eval_ld(const Poly1& f, long double w) {
  long double acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * w + static_cast<long double>(*it);
  return acc;
}

std::size_t degree_of(const Poly1& f) {
  std::size_t d = f.size();
  while (d > 0 && f[d - 1] == 0) --d;
  return d == 0 ? 0 : d - 1;
}

}  // namespace

bool ShortWeierstrassCurve::quasi_minimal() const {
  if (a == 0 && b == 0) return false;
  const i64 aa = a < 0 ? -a : a, bb = b < 0 ? -b : b;
  for (i64 u = 2;; ++u) {
    const i64 u2 = u * u, u4 = u2 * u2;
    if (u4 > aa && a != 0) break;
    if (u4 * u2 > bb && b != 0) break;
    if (!is_prime(static_cast<u64>(u))) continue;
    if (aa % u4 == 0 && bb % (u4 * u2) == 0) return false;
  }
  return true;
}

std::vector<ShortWeierstrassCurve> enumerate_box(double x) {
  require(x > 0 && x <= 1e12, "enumerate_box: x must lie in (0, 1e12]");
  i64 amax = static_cast<i64>(std::cbrt(x / 4.0)) + 1;
  while (amax > 0 && 4.0 * amax * amax * amax >= x) --amax;
  i64 bmax = static_cast<i64>(std::sqrt(x / 27.0)) + 1;
  while (bmax > 0 && 27.0 * bmax * bmax >= x) --bmax;
  std::vector<ShortWeierstrassCurve> out;
  for (i64 a = -amax; a <= amax; ++a)
    for (i64 b = -bmax; b <= bmax; ++b) {
      const ShortWeierstrassCurve E{a, b};
      if (E.valid() && E.quasi_minimal()) out.push_back(E);
    }
  return out;
}

i64 raw_character_sum(i64 a, i64 b, i64 p) {
  require(p > 2 && is_prime(static_cast<u64>(p)), "raw_character_sum: p must be an odd prime");
  const auto leg = legendre_table(p);
  const i64 am = mod(a, p), bm = mod(b, p);
  i64 s = 0;
  for (i64 x = 0; x < p; ++x) s += leg[static_cast<std::size_t>(mod(mulmod(mulmod(x, x, p), x, p) + am * x + bm, p))];
  return -s;
}

i64 ap_single(const ShortWeierstrassCurve& E, i64 p) {
  require_good_prime(p);
  require(mod(E.discriminant(), p) != 0, "ap_single: bad reduction at p");
  return raw_character_sum(E.a, E.b, p);
}

SweepTable ap_sweep(i64 p) {
  require_good_prime(p);
  require(p <= 2000, "ap_sweep: table mode limited to p <= 2000");
  const auto leg = legendre_table(p);
  const std::size_t P = static_cast<std::size_t>(p);
  std::vector<i64> cube(P);
  for (i64 x = 0; x < p; ++x) cube[x] = x * x % p * x % p;
  auto raw = [&](i64 a, i64 b) {
    i64 s = 0;
    i64 v = b;  // a x + b, stepped in x
    for (std::size_t x = 0; x < P; ++x) {
      i64 u = cube[x] + v;
      if (u >= p) u -= p;
      s += leg[u];
      v += a;
      if (v >= p) v -= p;
    }
    return -s;
  };
  SweepTable t;
  t.p = p;
  t.ap.assign(P * P, 0);
  t.singular.assign(P * P, 0);
  // Orbit representatives (s, s) for s != 0, plus the axes a = 0 and b = 0.
  std::vector<i64> rep(P), axis_a(P), axis_b(P);
  for_each_chunk(P, 64, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      rep[s] = s == 0 ? 0 : raw(static_cast<i64>(s), static_cast<i64>(s));
      axis_a[s] = raw(0, static_cast<i64>(s));
      axis_b[s] = raw(static_cast<i64>(s), 0);
    }
  });
  for (std::size_t b = 0; b < P; ++b) t.ap[b] = static_cast<std::int16_t>(axis_a[b]);
  for (std::size_t a = 0; a < P; ++a) t.ap[a * P] = static_cast<std::int16_t>(axis_b[a]);
  for (i64 s = 1; s < p; ++s)
    for (i64 l = 1; l < p; ++l) {
      const i64 l2 = l * l % p, l3 = l2 * l % p;
      const std::size_t a = static_cast<std::size_t>(l2 * s % p), b = static_cast<std::size_t>(l3 * s % p);
      t.ap[a * P + b] = static_cast<std::int16_t>(leg[l] * rep[s]);
    }
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = 0; b < P; ++b) {
      const i64 d = (4 * cube[a] + 27 * static_cast<i64>(b * b % P)) % p;
      if (d == 0) {
        t.singular[a * P + b] = 1;
        ++t.singular_count;
      }
    }
  return t;
}

void save_sweep(const std::filesystem::path& file, const SweepTable& t) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write " + tmp);
    os.write("DWSWEEP1", 8);
    unsigned char buf[8];
    u64 pv = static_cast<u64>(t.p);
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(pv >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
    for (std::size_t i = 0; i < t.ap.size(); ++i) {
      const auto v = static_cast<std::uint16_t>(t.singular[i] ? SweepTable::singular_sentinel : t.ap[i]);
      const char two[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
      os.write(two, 2);
    }
    if (!os) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

SweepTable load_sweep(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("cannot read " + file.string());
  char magic[8];
  unsigned char buf[8];
  is.read(magic, 8);
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is || std::memcmp(magic, "DWSWEEP1", 8) != 0) throw Error("not a sweep cache: " + file.string());
  u64 pv = 0;
  for (int i = 0; i < 8; ++i) pv |= static_cast<u64>(buf[i]) << (8 * i);
  const i64 p = static_cast<i64>(pv);
  require(p > 3 && p <= 2000 && is_prime(pv), "sweep cache: bad prime");
  SweepTable t;
  t.p = p;
  const std::size_t n = static_cast<std::size_t>(p * p);
  t.ap.resize(n);
  t.singular.assign(n, 0);
  std::vector<unsigned char> raw(2 * n);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!is) throw Error("truncated sweep cache: " + file.string());
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::int16_t>(static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8)));
    if (v == SweepTable::singular_sentinel) {
      t.singular[i] = 1;
      ++t.singular_count;
      t.ap[i] = static_cast<std::int16_t>(raw_character_sum(static_cast<i64>(i) / p, static_cast<i64>(i) % p, p));
    } else {
      t.ap[i] = v;
    }
  }
  return t;
}

SweepTable cached_sweep(const std::filesystem::path& dir, i64 p) {
  const auto file = dir / ("sweep_" + std::to_string(p) + ".bin");
  if (std::filesystem::exists(file)) {
    try {
      auto t = load_sweep(file);
      if (t.p == p) return t;
    } catch (const Error&) {
      // stale or damaged file: rebuild below
    }
  }
  auto t = ap_sweep(p);
  save_sweep(file, t);
  return t;
}

TorusMeasure vertical_measure_elliptic(const SweepTable& t) {
  std::map<int, std::size_t> hist;
  for (std::size_t i = 0; i < t.ap.size(); ++i)
    if (!t.singular[i]) ++hist[t.ap[i]];
  const double total = static_cast<double>(t.ap.size());
  const double sq = 2.0 * std::sqrt(static_cast<double>(t.p));
  AtomicMeasure m;
  for (auto [ap, count] : hist) {
    const double th = std::acos(std::clamp(ap / sq, -1.0, 1.0));
    m.atoms.emplace_back(TorusPoint({-th, th}), static_cast<double>(count) / total);
  }
  return TorusMeasure{std::move(m)};
}

double sato_tate_cdf_distance(const TorusMeasure& mu) {
  std::vector<std::pair<double, double>> pts;
  auto angle = [](const TorusPoint& x) {
    require(x.n() == 2, "sato_tate_cdf_distance: rank-1 classes required");
    return std::acos(std::clamp(x.trace().real() / 2.0, -1.0, 1.0));
  };
  if (const auto* a = std::get_if<AtomicMeasure>(&mu.data)) {
    for (const auto& [x, w] : a->atoms) pts.emplace_back(angle(x), w);
  } else if (const auto* e = std::get_if<EmpiricalMeasure>(&mu.data)) {
    for (const auto& s : e->samples)
      if (const auto* x = std::get_if<TorusPoint>(&s)) pts.emplace_back(angle(*x), 1.0);
  } else {
    throw ValidationError("sato_tate_cdf_distance: discrete measure required");
  }
  require(!pts.empty(), "sato_tate_cdf_distance: empty measure");
  std::sort(pts.begin(), pts.end());
  double mass = 0;
  for (const auto& pw : pts) mass += pw.second;
  auto law = [](double th) { return (th - std::sin(th) * std::cos(th)) / pi; };
  double cum = 0, worst = 0;
  for (std::size_t i = 0; i < pts.size();) {
    const double th = pts[i].first;
    const double before = cum;
    while (i < pts.size() && pts[i].first == th) cum += pts[i++].second;
    const double f = law(th);
    worst = std::max({worst, std::abs(before / mass - f), std::abs(cum / mass - f)});
  }
  return worst;
}

namespace {

AtomicMeasure atoms_from_traces(const std::map<i64, std::size_t>& hist, i64 p, double total) {
  const double sq = 2.0 * std::sqrt(static_cast<double>(p));
  AtomicMeasure m;
  for (auto [ap, count] : hist) {
    const double th = std::acos(std::clamp(static_cast<double>(ap) / sq, -1.0, 1.0));
    m.atoms.emplace_back(TorusPoint({-th, th}), static_cast<double>(count) / total);
  }
  return m;
}

}  // namespace

TorusMeasure fiber_vertical_measure(const OneParamFamily& f, i64 p) {
  require(p > 3 && p <= 2000 && is_prime(static_cast<u64>(p)), "fiber_vertical_measure: p must be a prime in (3, 2000]");
  if (f.two_parameter) return vertical_measure_elliptic(ap_sweep(p));
  const auto leg = legendre_table(p);
  std::map<i64, std::size_t> hist;
  for (i64 w = 0; w < p; ++w) {
    const i64 a = eval_mod(f.c2, w, p), b = eval_mod(f.c1, w, p), c = eval_mod(f.c0, w, p);
    // Discriminant of x^3 + a x^2 + b x + c.
    const i64 disc = mod(a * a % p * b % p * b - 4 * b % p * b % p * b - 4 * a % p * a % p * a % p * c -
                             27 * c % p * c + 18 * a % p * b % p * c,
                         p);
    if (disc == 0) continue;
    i64 s = 0;
    for (i64 x = 0; x < p; ++x) s += leg[mod(((x + a) * x % p + b) * x + c, p)];
    ++hist[-s];
  }
  return TorusMeasure{atoms_from_traces(hist, p, static_cast<double>(p))};
}

// ------------------------------------------------------------------ families

OneParamFamily family_preset(const std::string& name) {
  OneParamFamily f;
  f.name = name;
  if (name == "fell") {
    f.two_parameter = true;
  } else if (name == "washington") {
    // y^2 = x^3 + w x^2 - (w + 3) x + 1
    f.c2 = {0, 1};
    f.c1 = {-3, -1};
    f.c0 = {1};
  } else if (name == "generic") {
    // y^2 = x^3 + w x + w^2 + 1
    f.c1 = {0, 1};
    f.c0 = {1, 0, 1};
  } else if (name == "generic-linear") {
    // y^2 = x^3 + w x + 1, which carries the section (0, 1)
    f.c1 = {0, 1};
    f.c0 = {1};
  } else if (name == "cassels-schinzel") {
    // (7 + 7w^4) y^2 = x^3 - x, i.e. y^2 = x^3 - D^2 x with D = 7 + 7 w^4
    f.c1 = {-49, 0, 0, 0, -98, 0, 0, 0, -49};
  } else {
    throw ValidationError("unknown family preset: " + name);
  }
  return f;
}

std::vector<std::string> family_preset_names() {
  return {"fell", "washington", "generic", "generic-linear", "cassels-schinzel"};
}

bool non_isotrivial(const OneParamFamily& f) {
  if (f.two_parameter) return true;
  std::vector<long double> js;
  for (long double w : {2.0L, 3.0L, 5.0L, 7.0L, 11.0L, 13.0L}) {
    const long double c2 = eval_ld(f.c2, w), c1 = eval_ld(f.c1, w), c0 = eval_ld(f.c0, w);
    // Shift x -> x - c2/3 to reach y^2 = x^3 + A x + B.
    const long double A = c1 - c2 * c2 / 3, B = 2 * c2 * c2 * c2 / 27 - c2 * c1 / 3 + c0;
    const long double D = 4 * A * A * A + 27 * B * B;
    if (std::fabs(D) < 1e-9L) continue;
    js.push_back(4 * A * A * A / D);
    if (js.size() == 3) break;
  }
  if (js.size() < 3) return false;
  const long double s = std::max({std::fabs(js[0]), std::fabs(js[1]), std::fabs(js[2]), 1.0L});
  return std::fabs(js[0] - js[1]) > 1e-12L * s || std::fabs(js[0] - js[2]) > 1e-12L * s;
}

namespace {

// sum_{x, w in F_p} (f(x, w) | p) for the one-parameter model.
i64 fiber_character_total(const OneParamFamily& f, i64 p, const std::vector<std::int8_t>& leg) {
  if (f.two_parameter) {
    // For each (w1, x) the sum over w2 runs over a full period.
    return p * p * full_period_sum(leg);
  }
  const std::size_t dw = std::max({degree_of(f.c2), degree_of(f.c1), degree_of(f.c0)});
  auto coeff = [](const Poly1& c, std::size_t k) { return k < c.size() ? c[k] : 0; };
  i64 total = 0;
  std::vector<i64> g(dw + 1);
  for (i64 x = 0; x < p; ++x) {
    const i64 x2 = x * x % p, x3 = x2 * x % p;
    for (std::size_t k = 0; k <= dw; ++k)
      g[k] = mod(coeff(f.c2, k) % p * x2 + coeff(f.c1, k) % p * x + coeff(f.c0, k), p);
    g[0] = (g[0] + x3) % p;
    if (dw == 0) {
      total += p * leg[g[0]];
    } else if (dw == 1 || (dw == 2 && g[2] == 0)) {
      // sum_w (g0 + g1 w | p) is p (g0|p) when g1 = 0 and vanishes otherwise.
      if (g[1] == 0) total += p * leg[g[0]];
    } else if (dw == 2) {
      // Quadratic in w: -(g2|p) unless the discriminant vanishes.
      const i64 disc = mod(g[1] * g[1] - 4 * g[2] % p * g[0], p);
      total += disc == 0 ? (p - 1) * leg[g[2]] : -leg[g[2]];
    } else {
      for (i64 w = 0; w < p; ++w) {
        i64 acc = 0;
        for (std::size_t k = dw + 1; k-- > 0;) acc = (acc * w + g[k]) % p;
        total += leg[acc];
      }
    }
  }
  return total;
}

}  // namespace

i64 nagao_character_total(const OneParamFamily& f, i64 p, bool brute_force) {
  const auto leg = legendre_table(p);
  if (!brute_force || f.two_parameter) return fiber_character_total(f, p, leg);
  i64 total = 0;
  for (i64 w = 0; w < p; ++w) {
    const i64 c2 = eval_mod(f.c2, w, p), c1 = eval_mod(f.c1, w, p), c0 = eval_mod(f.c0, w, p);
    for (i64 x = 0; x < p; ++x) total += leg[mod(((x + c2) * x % p + c1) * x + c0, p)];
  }
  return total;
}

NagaoResult nagao_rank(const OneParamFamily& f, i64 x) {
  require(x >= 5, "nagao_rank: x must be at least 5");
  if (!non_isotrivial(f)) throw ValidationError("nagao_rank: isotrivial family");
  NagaoResult r;
  for (i64 p : primes_up_to(x))
    if (p > 3) r.primes.push_back(p);
  r.minus_a.resize(r.primes.size());
  for_each_chunk(r.primes.size(), 8, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const i64 p = r.primes[i];
      const auto leg = legendre_table(p);
      // sum_w a_p(E_w) = -sum_{w, x} (f | p); -A_p = that character total / p
      // (over p^2 for the two-parameter box).
      const double denom = f.two_parameter ? double(p) * double(p) : double(p);
      r.minus_a[i] = static_cast<double>(fiber_character_total(f, p, leg)) / denom;
    }
  });
  double acc = 0;
  r.partial.resize(r.primes.size());
  for (std::size_t i = 0; i < r.primes.size(); ++i) {
    acc += r.minus_a[i] * std::log(static_cast<double>(r.primes[i]));
    r.partial[i] = acc / static_cast<double>(r.primes[i]);
  }
  r.value = acc / static_cast<double>(x);
  return r;
}

int twist_root_number(const TwistBase& base, i64 d) {
  require(base.epsilon == 1 || base.epsilon == -1, "twist_root_number: epsilon must be +1 or -1");
  require(base.conductor >= 1, "twist_root_number: conductor must be positive");
  if (d == 1) return base.epsilon;
  require(is_fundamental(d), "twist_root_number: d must be a fundamental discriminant");
  require(gcd(d, 2 * base.conductor) == 1, "twist_root_number: d must be coprime to 2N");
  return kronecker(d, -base.conductor) * base.epsilon;
}

// ------------------------------------------------------------------ Moebius

int MultiPoly::variables() const {
  int v = 0;
  for (const auto& t : terms) {
    if (t.coeff == 0) continue;
    if (t.e1 > 0) v = std::max(v, 1);
    if (t.e2 > 0) v = 2;
  }
  return v;
}

int MultiPoly::degree() const {
  int d = 0;
  for (const auto& t : terms)
    if (t.coeff != 0) d = std::max(d, t.e1 + t.e2);
  return d;
}

i64 MultiPoly::operator()(i64 w1, i64 w2) const {
  i64 s = 0;
  for (const auto& t : terms) {
    i64 v = t.coeff;
    for (int i = 0; i < t.e1; ++i) v *= w1;
    for (int i = 0; i < t.e2; ++i) v *= w2;
    s += v;
  }
  return s;
}

MultiPoly parse_poly(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), "parse_poly: empty polynomial");
  MultiPoly out;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw ValidationError("parse_poly: " + why + " at position " + std::to_string(i) + " in '" + text + "'");
  };
  auto read_int = [&]() {
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) fail("digits expected");
    const i64 v = std::stoll(s.substr(i, j - i));
    i = j;
    return v;
  };
  while (i < s.size()) {
    MultiPoly::Term t;
    t.coeff = 1;
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') t.coeff = -1;
      ++i;
    } else if (!out.terms.empty()) {
      fail("sign expected");
    }
    bool first = true;
    while (i < s.size() && s[i] != '+' && s[i] != '-') {
      if (!first) {
        if (s[i] != '*') fail("'*' expected");
        ++i;
      }
      first = false;
      if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        t.coeff *= read_int();
      } else if (i < s.size() && s[i] == 'w') {
        ++i;
        int var = 1;
        if (i < s.size() && (s[i] == '1' || s[i] == '2')) var = s[i++] - '0';
        int e = 1;
        if (i < s.size() && s[i] == '^') {
          ++i;
          e = static_cast<int>(read_int());
        }
        (var == 1 ? t.e1 : t.e2) += e;
      } else {
        fail("unexpected character");
      }
    }
    if (first) fail("empty term");
    out.terms.push_back(t);
  }
  require(out.degree() <= 4, "parse_poly: total degree above 4");
  return out;
}

namespace {

int mobius_trial(i64 n, const std::vector<i64>& primes) {
  if (n < 0) n = -n;
  if (n == 0) return 0;
  int mu = 1;
  for (i64 p : primes) {
    if (p * p > n) break;
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

}  // namespace

double moebius_poly_average(const MultiPoly& M, i64 x) {
  require(x >= 0, "moebius_poly_average: x must be non-negative");
  require(M.degree() <= 4, "moebius_poly_average: total degree above 4");
  const int m = std::max(1, M.variables());
  double bound = 0;
  for (const auto& t : M.terms) bound += std::abs(static_cast<double>(t.coeff)) * std::pow(double(x), t.e1 + t.e2);
  if (bound > 1e9) throw ValidationError("moebius_poly_average: values exceed the sieve budget of 1e9");
  const i64 vmax = static_cast<i64>(bound) + 1;
  const bool use_table = vmax <= 20000000;
  const std::vector<std::int8_t> table = use_table ? mobius_table(vmax) : std::vector<std::int8_t>{};
  const std::vector<i64> primes = use_table ? std::vector<i64>{} : primes_up_to(static_cast<i64>(std::sqrt(double(vmax))) + 1);
  auto mu = [&](i64 v) {
    if (v < 0) v = -v;
    return use_table ? static_cast<int>(table[static_cast<std::size_t>(v)]) : mobius_trial(v, primes);
  };
  const std::size_t side = static_cast<std::size_t>(2 * x + 1);
  const double total = chunked_sum<double>(side, 64, [&](std::size_t lo, std::size_t hi) {
    i64 s = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const i64 w1 = static_cast<i64>(i) - x;
      if (m == 1) {
        s += mu(M(w1));
      } else {
        for (i64 w2 = -x; w2 <= x; ++w2) s += mu(M(w1, w2));
      }
    }
    return static_cast<double>(s);
  });
  return total / std::pow(static_cast<double>(side), m);
}

// ------------------------------------------------------------------ Hesse cubics

i64 dwork_hesse_ap(i64 w, i64 p) {
  require_good_prime(p);
  const i64 wm = mod(w, p);
  require(mod(wm * wm % p * wm - 1, p) != 0, "dwork_hesse_ap: singular fiber (w^3 = 1 mod p)");
  const i64 k = 3 * wm % p;
  auto cube = [p](i64 v) { return v * v % p * v % p; };
  i64 count = 0;
  for (i64 x = 0; x < p; ++x)
    for (i64 y = 0; y < p; ++y)
      if (mod(cube(x) + cube(y) + 1 - k * x % p * y, p) == 0) ++count;
  for (i64 x = 0; x < p; ++x)
    if ((cube(x) + 1) % p == 0) ++count;  // [x : 1 : 0]
  return p + 1 - count;
}

std::vector<std::optional<i64>> dwork_hesse_sweep(i64 p) {
  require_good_prime(p);
  std::vector<i64> cube(static_cast<std::size_t>(p)), inv(static_cast<std::size_t>(p), 0);
  for (i64 v = 0; v < p; ++v) cube[v] = v * v % p * v % p;
  for (i64 v = 1; v < p; ++v) inv[v] = inverse_mod(v, p);
  i64 roots_minus_one = 0;  // #{x : x^3 = -1}
  for (i64 x = 0; x < p; ++x)
    if ((cube[x] + 1) % p == 0) ++roots_minus_one;
  // With z = 1 and xy = 0 the equation drops w: y^3 = -1 or x^3 = -1. At
  // infinity, [x : 1 : 0] with x^3 = -1.
  const i64 base = 3 * roots_minus_one;
  std::vector<i64> count(static_cast<std::size_t>(p), base);
  const i64 inv3 = inverse_mod(3, p);
  for (i64 x = 1; x < p; ++x)
    for (i64 y = 1; y < p; ++y) {
      const i64 v = (cube[x] + cube[y] + 1) % p;
      ++count[v * inv3 % p * inv[x] % p * inv[y] % p];
    }
  std::vector<std::optional<i64>> out(static_cast<std::size_t>(p));
  for (i64 w = 0; w < p; ++w)
    if ((cube[w] + p - 1) % p != 0) out[w] = p + 1 - count[w];
  return out;
}

TorusMeasure dwork_vertical_measure(i64 p) {
  const auto sweep = dwork_hesse_sweep(p);
  std::map<i64, std::size_t> hist;
  for (const auto& ap : sweep)
    if (ap) ++hist[*ap];
  return TorusMeasure{atoms_from_traces(hist, p, static_cast<double>(p))};
}

}  // namespace fsl
