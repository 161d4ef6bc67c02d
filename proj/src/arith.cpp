#include "fsl/arith.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "fsl/common.hpp"

namespace fsl {

i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod(u64 b, u64 e, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

i64 inverse_mod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, r = mod(a, m);
  while (r) {
    i64 q = g / r;
    i64 t = g - q * r;
    g = r;
    r = t;
    t = x - q * x1;
    x = x1;
    x1 = t;
  }
  if (g != 1) throw ValidationError("inverse_mod: not invertible");
  return mod(x, m);
}

std::vector<i64> primes_up_to(i64 n) {
  std::vector<i64> out;
  if (n < 2) return out;
  std::vector<bool> comp(n + 1, false);
  for (i64 i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= n; j += i) comp[j] = true;
  }
  return out;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}

}  // namespace

std::vector<std::pair<i64, int>> factorize(u64 n) {
  require(n != 0, "factorize: zero has no factorization");
  std::vector<u64> raw;
  for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
    while (n % p == 0) {
      raw.push_back(p);
      n /= p;
    }
  }
  factor_rec(n, raw);
  std::sort(raw.begin(), raw.end());
  std::vector<std::pair<i64, int>> out;
  for (u64 p : raw) {
    if (!out.empty() && out.back().first == static_cast<i64>(p))
      ++out.back().second;
    else
      out.emplace_back(static_cast<i64>(p), 1);
  }
  return out;
}

int legendre(i64 a, i64 p) {
  const u64 r = powmod(static_cast<u64>(mod(a, p)), (p - 1) / 2, p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

int jacobi(i64 a, i64 n) {
  require(n > 0 && n % 2 == 1, "jacobi: n must be odd and positive");
  a = mod(a, n);
  int t = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const i64 r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int t = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) t = -t;
  }
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v > 0) {
    if (a % 2 == 0) return 0;
    const i64 r = mod(a, 8);
    if ((v & 1) && (r == 3 || r == 5)) t = -t;
  }
  if (n == 1) return t;
  return t * jacobi(a, n);
}

i64 primitive_root(i64 p, int k) {
  require(p > 2 && is_prime(static_cast<u64>(p)), "primitive_root: odd prime required");
  const auto fac = factorize(static_cast<u64>(p - 1));
  for (i64 g = 2;; ++g) {
    bool ok = true;
    for (auto [q, e] : fac) {
      (void)e;
      if (powmod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (k >= 2 && powmod(g, p - 1, static_cast<u64>(p) * p) == 1) continue;
    return g;
  }
}

bool is_squarefree(u64 n) {
  if (n == 0) return false;
  for (auto [p, e] : factorize(n)) {
    (void)p;
    if (e > 1) return false;
  }
  return true;
}

std::vector<std::int8_t> mobius_table(i64 n) {
  std::vector<std::int8_t> mu(n + 1, 1);
  if (n >= 0) mu[0] = 0;
  std::vector<bool> comp(n + 1, false);
  for (i64 i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    for (i64 j = i; j <= n; j += i) {
      if (j > i) comp[j] = true;
      mu[j] = static_cast<std::int8_t>(-mu[j]);
    }
    if (i <= n / i) {
      for (i64 j = i * i; j <= n; j += i * i) mu[j] = 0;
    }
  }
  return mu;
}

int mobius(i64 n) {
  if (n == 0) return 0;
  int s = 1;
  for (auto [p, e] : factorize(static_cast<u64>(std::llabs(n)))) {
    (void)p;
    if (e > 1) return 0;
    s = -s;
  }
  return s;
}

std::vector<std::int8_t> legendre_table(i64 p) {
  std::vector<std::int8_t> t(p, -1);
  t[0] = 0;
  for (i64 x = 1; x < p; ++x) t[x * x % p] = 1;
  return t;
}

}  // namespace fsl
