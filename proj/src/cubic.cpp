#include "fsl/cubic.hpp"

#include <algorithm>
#include <cmath>

#include "fsl/parallel.hpp"

namespace fsl {

namespace {

bool is_square(i64 n) {
  if (n < 0) return false;
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n;
}

}  // namespace

bool DepressedCubic::irreducible() const {
  // A rational root of a monic integer cubic is an integer dividing B.
  if (B == 0) return false;
  const i64 b = B < 0 ? -B : B;
  for (i64 d = 1; d * d <= b; ++d) {
    if (b % d) continue;
    for (i64 r : {d, -d, b / d, -(b / d)})
      if ((r * r + A) * r + B == 0) return false;
  }
  return true;
}

bool DepressedCubic::s3() const { return disc() != 0 && !is_square(disc()) && irreducible(); }

namespace {

i64 isqrt128(__int128 n) {
  if (n <= 0) return 0;
  auto r = static_cast<__int128>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return static_cast<i64>(r);
}

}  // namespace

std::vector<DepressedCubic> enumerate_s3_cubics(double X, i64 a_cap) {
  require(X >= 1 && X <= 1e8, "enumerate_s3_cubics: X must lie in [1, 1e8]");
  require(a_cap >= 1 && a_cap <= 1000000, "enumerate_s3_cubics: a_cap must lie in [1, 1e6]");
  const auto Xi = static_cast<__int128>(X);
  std::vector<DepressedCubic> out;
  auto keep = [&](i64 A, i64 B) {
    const DepressedCubic f{A, B};
    const __int128 d = -4 * static_cast<__int128>(A) * A * A - 27 * static_cast<__int128>(B) * B;
    if (d != 0 && (d <= Xi && d >= -Xi) && f.s3()) out.push_back(f);
  };
  for (i64 A = -a_cap; A <= a_cap; ++A) {
    const __int128 c = 4 * static_cast<__int128>(A) * A * A;
    if (A > 0) {
      if (c > Xi) break;
      const i64 bm = isqrt128((Xi - c) / 27);
      for (i64 B = -bm; B <= bm; ++B) keep(A, B);
      continue;
    }
    // A <= 0: |4k^3 - 27 B^2| <= X with k = -A, so B^2 lies in a window
    // around 4k^3 / 27 that holds at most a few integers once k is large.
    const __int128 k3 = -c;
    const i64 b0 = k3 - Xi <= 0 ? 0 : isqrt128((k3 - Xi) / 27);
    const i64 b1 = isqrt128((k3 + Xi) / 27) + 1;
    for (i64 B = b0; B <= b1; ++B) {
      keep(A, B);
      if (B != 0) keep(A, -B);
    }
  }
  std::sort(out.begin(), out.end(), [](const DepressedCubic& x, const DepressedCubic& y) {
    return x.A != y.A ? x.A < y.A : x.B < y.B;
  });
  return out;
}

const char* splitting_name(SplittingType t) {
  switch (t) {
    case SplittingType::Split111: return "split";
    case SplittingType::Mixed12: return "mixed";
    case SplittingType::Inert3: return "inert";
    case SplittingType::Ramified: return "ramified";
  }
  return "?";
}

SplittingType splitting_type(const DepressedCubic& f, i64 p) {
  require(p > 3 && p <= 10000 && is_prime(static_cast<u64>(p)), "splitting_type: p must be a prime in (3, 1e4]");
  if (mod(f.disc(), p) == 0) return SplittingType::Ramified;
  const i64 a = mod(f.A, p), b = mod(f.B, p);
  int roots = 0;
  for (i64 x = 0; x < p; ++x)
    if ((x * x % p * x + a * x + b) % p == 0) ++roots;
  switch (roots) {
    case 3: return SplittingType::Split111;
    case 1: return SplittingType::Mixed12;
    case 0: return SplittingType::Inert3;
    default: throw AuditAlarm("splitting_type: two roots modulo an unramified prime");
  }
}

std::optional<int> frobenius_trace(SplittingType t) {
  switch (t) {
    case SplittingType::Split111: return 2;
    case SplittingType::Mixed12: return 0;
    case SplittingType::Inert3: return -1;
    case SplittingType::Ramified: return std::nullopt;
  }
  return std::nullopt;
}

std::array<double, 3> ClassTally::proportions() const {
  const double n = static_cast<double>(total());
  if (n == 0) return {0, 0, 0};
  return {counts[0] / n, counts[1] / n, counts[2] / n};
}

ClassTally tally_classes(const std::vector<DepressedCubic>& cubics, const std::vector<i64>& primes) {
  struct Partial {
    std::array<std::size_t, 4> c{};
    Partial& operator+=(const Partial& o) {
      for (int i = 0; i < 4; ++i) c[i] += o.c[i];
      return *this;
    }
    Partial operator+(const Partial& o) const {
      Partial r = *this;
      return r += o;
    }
  };
  const Partial sum = chunked_sum<Partial>(cubics.size(), 256, [&](std::size_t lo, std::size_t hi) {
    Partial part;
    for (std::size_t i = lo; i < hi; ++i)
      for (i64 p : primes) {
        switch (splitting_type(cubics[i], p)) {
          case SplittingType::Split111: ++part.c[0]; break;
          case SplittingType::Inert3: ++part.c[1]; break;
          case SplittingType::Mixed12: ++part.c[2]; break;
          case SplittingType::Ramified: ++part.c[3]; break;
        }
      }
    return part;
  });
  ClassTally t;
  t.counts = {sum.c[0], sum.c[1], sum.c[2]};
  t.ramified = sum.c[3];
  return t;
}

CubicFamilyStats family_class_proportions(double X, i64 p_min, i64 p_max) {
  return family_class_proportions(enumerate_s3_cubics(X), p_min, p_max);
}

CubicFamilyStats family_class_proportions(const std::vector<DepressedCubic>& cubics, i64 p_min, i64 p_max) {
  require(p_min < p_max, "family_class_proportions: empty prime range");
  std::vector<i64> primes;
  for (i64 p : primes_up_to(p_max))
    if (p > p_min && p > 3 && p < p_max) primes.push_back(p);
  CubicFamilyStats s;
  s.cubics = cubics.size();
  s.primes = primes.size();
  s.under_sampled = s.cubics < 1000 || s.primes < 20;
  s.tally = tally_classes(cubics, primes);
  s.proportions = s.tally.proportions();
  const double n = static_cast<double>(s.tally.total());
  if (n == 0) return s;
  // Per class: trace, trace^2, tr(t^2) = trace^2 - 2 det with det = -1 on
  // transpositions.
  const std::array<double, 3> tr = {2.0, -1.0, 0.0};
  const std::array<double, 3> tr_sq_elem = {2.0, -1.0, 2.0};
  auto moments = [&](auto g) {
    double m1 = 0, m2 = 0;
    for (int c = 0; c < 3; ++c) {
      const double v = g(c), w = s.tally.counts[c] / n;
      m1 += w * v;
      m2 += w * v * v;
    }
    const double se = n > 1 ? std::sqrt(std::max(0.0, m2 - m1 * m1) / (n - 1)) : 0.0;
    return std::pair{m1, se};
  };
  const auto [mt, set] = moments([&](int c) { return tr[c]; });
  const auto [i1, se1] = moments([&](int c) { return tr[c] * tr[c]; });
  const auto [i3, se3] = moments([&](int c) { return tr_sq_elem[c]; });
  (void)set;
  s.mean_trace = mt;
  s.indicators.i1 = i1;
  s.indicators.se1 = se1;
  s.indicators.i2 = i1;  // real traces: (tr t)^2 = |tr t|^2
  s.indicators.se2 = se1;
  s.indicators.i3 = i3;
  s.indicators.se3 = se3;
  return s;
}

}  // namespace fsl
