#include "fsl/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "fsl/parallel.hpp"

namespace fsl {

bool is_fundamental(i64 d) {
  if (d == 0 || d == 1) return false;
  const u64 a = static_cast<u64>(d < 0 ? -d : d);
  if (mod(d, 4) == 1) return is_squarefree(a);
  if (mod(d, 4) != 0) return false;
  const i64 m = d / 4;
  const i64 r = mod(m, 4);
  if (r != 2 && r != 3) return false;
  return is_squarefree(a / 4);
}

std::vector<i64> enumerate_fundamental(double x) {
  require(x >= 3, "enumerate_fundamental: x must be at least 3");
  const i64 n = static_cast<i64>(std::floor(x));
  std::vector<bool> sqfree(n + 1, true);
  sqfree[0] = false;
  for (i64 r = 2; r * r <= n; ++r)
    for (i64 j = r * r; j <= n; j += r * r) sqfree[j] = false;
  std::vector<i64> out;
  for (i64 a = 1; a <= n; ++a) {
    for (i64 d : {-a, a}) {
      if (d == 1) continue;
      const i64 r = mod(d, 4);
      if (r == 1) {
        if (sqfree[a]) out.push_back(d);
      } else if (r == 0) {
        const i64 m = d / 4;
        const i64 rm = mod(m, 4);
        if ((rm == 2 || rm == 3) && sqfree[a / 4]) out.push_back(d);
      }
    }
  }
  return out;  // already ordered by (|d|, d)
}

void save_fundamental_cache(const std::filesystem::path& file, const std::vector<i64>& ds) {
  std::ofstream os(file);
  if (!os) throw Error("cannot write " + file.string());
  os << "format=fd,v1\n";
  for (i64 d : ds) os << d << '\n';
}

std::vector<i64> load_fundamental_cache(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw Error("cannot read " + file.string());
  std::string line;
  std::getline(is, line);
  if (line != "format=fd,v1") throw Error("unsupported discriminant cache version: " + line);
  std::vector<i64> out;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(std::stoll(line));
  return out;
}

namespace {

struct QCounts {
  std::size_t plus = 0, minus = 0, ram = 0;
  QCounts& operator+=(const QCounts& o) {
    plus += o.plus, minus += o.minus, ram += o.ram;
    return *this;
  }
  friend QCounts operator+(QCounts a, const QCounts& b) { return a += b; }
};

}  // namespace

QuadraticVertical vertical_measure_quadratic(i64 p, const std::vector<i64>& ds) {
  require(p > 2 && is_prime(p), "vertical_measure_quadratic: odd prime required");
  require(!ds.empty(), "vertical_measure_quadratic: empty family");
  const auto leg = legendre_table(p);
  const QCounts c = chunked_sum<QCounts>(ds.size(), 1 << 16, [&](std::size_t b, std::size_t e) {
    QCounts acc;
    for (std::size_t i = b; i < e; ++i) {
      const int v = leg[mod(ds[i], p)];
      if (v > 0)
        ++acc.plus;
      else if (v < 0)
        ++acc.minus;
      else
        ++acc.ram;
    }
    return acc;
  });
  QuadraticVertical out;
  out.p = p;
  out.count_plus = c.plus;
  out.count_minus = c.minus;
  out.count_ram = c.ram;
  const double n = static_cast<double>(ds.size());
  out.mass_plus = c.plus / n;
  out.mass_minus = c.minus / n;
  out.mass_ram = c.ram / n;
  out.t_hat_p = (static_cast<double>(c.plus) - static_cast<double>(c.minus)) / n;
  out.t_hat_p2 = static_cast<double>(c.plus + c.minus) / n;
  AtomicMeasure m;
  m.atoms.emplace_back(TorusPoint({0.0}), out.mass_plus);
  m.atoms.emplace_back(TorusPoint({pi}), out.mass_minus);
  out.measure = {std::move(m)};
  return out;
}

QuadraticVertical vertical_measure_quadratic(i64 p, double x) {
  require(p < x, "vertical_measure_quadratic: p must be below x");
  auto out = vertical_measure_quadratic(p, enumerate_fundamental(x));
  out.x = x;
  return out;
}

JointTable joint_vertical_quadratic(i64 p, i64 q, double x) {
  require(p != q, "joint_vertical_quadratic: primes must be distinct");
  require(p > 2 && q > 2 && is_prime(p) && is_prime(q), "joint_vertical_quadratic: odd primes required");
  require(p < x && q < x, "joint_vertical_quadratic: primes must be below x");
  const auto ds = enumerate_fundamental(x);
  const auto lp = legendre_table(p), lq = legendre_table(q);
  auto idx = [](int v) { return v > 0 ? 0 : (v < 0 ? 1 : 2); };
  JointTable t;
  for (i64 d : ds) ++t.counts[idx(lp[mod(d, p)])][idx(lq[mod(d, q)])];
  t.total = ds.size();
  const double n = static_cast<double>(t.total);
  std::array<double, 3> mp{}, mq{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      t.freq[i][j] = t.counts[i][j] / n;
      mp[i] += t.freq[i][j];
      mq[j] += t.freq[i][j];
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.delta = std::max(t.delta, std::abs(t.freq[i][j] - mp[i] * mq[j]));
  // The rarest cell (both ramified) has expected size about n / ((p+1)(q+1)).
  t.under_sampled = n / static_cast<double>((p + 1) * (q + 1)) < 30.0;
  return t;
}

// ------------------------------------------------------------ characters

std::shared_ptr<const LocalCharacterGroup> local_group(i64 p, int k) {
  static std::mutex mu;
  static std::map<std::pair<i64, int>, std::shared_ptr<const LocalCharacterGroup>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find({p, k}); it != cache.end()) return it->second;
  require(k >= 1, "local_group: k must be positive");
  auto g = std::make_shared<LocalCharacterGroup>();
  g->p = p;
  g->k = k;
  g->modulus = 1;
  for (int i = 0; i < k; ++i) g->modulus *= p;
  require(g->modulus <= 100000000, "local_group: modulus too large");
  g->dlog.assign(g->modulus, -1);
  if (p == 2) {
    g->sign_bit.assign(g->modulus, 0);
    g->generator = 5;
    g->order = k >= 3 ? g->modulus / 4 : 1;
    i64 v = 1;
    for (i64 m = 0; m < g->order; ++m) {
      g->dlog[v] = static_cast<std::int32_t>(m);
      const i64 neg = mod(-v, g->modulus);
      g->dlog[neg] = static_cast<std::int32_t>(m);
      if (neg != v) g->sign_bit[neg] = 1;
      v = v * 5 % g->modulus;
    }
    if (k == 1) g->dlog[1] = 0;
  } else {
    g->generator = primitive_root(p, k);
    g->order = g->modulus / p * (p - 1);
    i64 v = 1;
    for (i64 m = 0; m < g->order; ++m) {
      g->dlog[v] = static_cast<std::int32_t>(m);
      v = v * g->generator % g->modulus;
    }
  }
  cache[{p, k}] = g;
  return g;
}

bool LocalComponent::primitive() const {
  const auto& g = *group;
  if (g.p == 2) {
    if (g.k == 1) return false;
    if (g.k == 2) return e == 1;
    return j % 2 != 0;
  }
  if (g.k == 1) return j % g.order != 0;
  return j % g.p != 0;
}

cplx DirichletCharacter::operator()(i64 n) const {
  double frac = 0;
  for (const auto& l : locals) {
    const auto& g = *l.group;
    const i64 r = mod(n, g.modulus);
    const std::int32_t m = g.dlog[r];
    if (m < 0) return 0.0;
    frac += static_cast<double>(mod(l.j * m, g.order)) / static_cast<double>(g.order);
    if (g.p == 2 && g.sign_bit[r] && l.e) frac += 0.5;
  }
  frac -= std::floor(frac);
  return std::polar(1.0, two_pi * frac);
}

bool DirichletCharacter::primitive() const {
  return std::all_of(locals.begin(), locals.end(), [](const LocalComponent& l) { return l.primitive(); });
}

bool DirichletCharacter::even() const { return std::abs((*this)(-1) - cplx(1.0, 0.0)) < 1e-9; }

i64 primitive_count_local(i64 p, int k) {
  if (k == 0) return 1;
  if (p == 2) {
    if (k == 1) return 0;
    i64 v = 1;
    for (int i = 2; i < k; ++i) v *= 2;
    return v;
  }
  if (k == 1) return p - 2;
  i64 v = (p - 1) * (p - 1);
  for (int i = 2; i < k; ++i) v *= p;
  return v;
}

i64 primitive_count(i64 q) {
  require(q >= 1, "primitive_count: q must be positive");
  if (q == 1) return 1;
  i64 c = 1;
  for (auto [p, k] : factorize(static_cast<u64>(q))) c *= primitive_count_local(p, k);
  return c;
}

namespace {

std::vector<DirichletCharacter> characters_mod(i64 q, bool only_primitive) {
  require(q >= 1, "characters_mod: q must be positive");
  std::vector<DirichletCharacter> out{DirichletCharacter{q, {}}};
  if (q == 1) return out;
  for (auto [p, k] : factorize(static_cast<u64>(q))) {
    auto g = local_group(p, k);
    std::vector<LocalComponent> comps;
    const int e_max = p == 2 ? 1 : 0;
    for (int e = 0; e <= e_max; ++e)
      for (i64 j = 0; j < g->order; ++j) {
        LocalComponent c{g, j, e};
        if (p == 2 && k == 1 && e == 1) continue;  // (Z/2)^* is trivial
        if (!only_primitive || c.primitive()) comps.push_back(c);
      }
    std::vector<DirichletCharacter> next;
    next.reserve(out.size() * comps.size());
    for (const auto& base : out)
      for (const auto& c : comps) {
        DirichletCharacter ch = base;
        ch.locals.push_back(c);
        next.push_back(std::move(ch));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<DirichletCharacter> all_characters_mod(i64 q) { return characters_mod(q, false); }

std::vector<PrimitiveCharacter> primitive_characters_mod(i64 q) {
  if (q == 1) return {};
  return characters_mod(q, true);
}

std::vector<PrimitiveCharacter> enumerate_primitive(i64 x, i64 limit) {
  require(x >= 1 && x <= limit, "enumerate_primitive: x exceeds the enumeration limit");
  std::vector<PrimitiveCharacter> out;
  for (i64 q = 3; q <= x; ++q) {
    auto v = primitive_characters_mod(q);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

LocalProfile universal_local_profile(i64 p, i64 x) {
  require(is_prime(p), "universal_local_profile: p must be prime");
  require(p <= x, "universal_local_profile: p must not exceed x");
  LocalProfile prof;
  prof.p = p;
  prof.x = x;
  const double pd = static_cast<double>(p);
  prof.a = pd * pd * pd / ((pd - 1) * (pd + 1) * (pd + 1));
  std::map<int, std::uint64_t> counts;
  for (i64 q = 3; q <= x; ++q) {
    int k = 0;
    for (i64 r = q; r % p == 0; r /= p) ++k;
    const i64 c = primitive_count(q);
    counts[k] += static_cast<std::uint64_t>(c);
    prof.total += static_cast<std::uint64_t>(c);
  }
  int kmax = counts.empty() ? 0 : counts.rbegin()->first;
  for (int k = 0; k <= kmax; ++k) {
    LocalStratum s;
    s.k = k;
    s.count = counts.count(k) ? counts[k] : 0;
    s.mass = static_cast<double>(s.count) / static_cast<double>(prof.total);
    s.model = prof.a * static_cast<double>(primitive_count_local(p, k)) * std::pow(pd, -2.0 * k);
    prof.strata.push_back(s);
  }
  return prof;
}

}  // namespace fsl
