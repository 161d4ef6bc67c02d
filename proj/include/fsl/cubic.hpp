#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fsl/arith.hpp"
#include "fsl/measures.hpp"

namespace fsl {

/// f(x) = x^3 + A x + B.
struct DepressedCubic {
  i64 A = 0, B = 0;

  i64 disc() const { return -4 * A * A * A - 27 * B * B; }
  /// No rational root; for a monic cubic this is irreducibility over Q.
  bool irreducible() const;
  /// Irreducible with non-square discriminant, so the Galois group is S_3.
  bool s3() const;
};

/// S_3 cubics with |disc| <= X and |A| <= a_cap. Polynomials generating the
/// same field are kept. For A < 0 the solutions hug the curve 27B^2 = -4A^3;
/// beyond |A| = a_cap only about X / (10 sqrt(a_cap)) of them remain.
std::vector<DepressedCubic> enumerate_s3_cubics(double X, i64 a_cap = 1000000);

enum class SplittingType { Split111, Mixed12, Inert3, Ramified };

const char* splitting_name(SplittingType t);

/// Root count of f mod p: 3, 1, 0 map to Split111, Mixed12, Inert3;
/// p | disc gives Ramified.
SplittingType splitting_type(const DepressedCubic& f, i64 p);

/// Character of the 2-dimensional representation of S_3 at Frobenius:
/// 2, 0, -1, or nothing for ramified primes.
std::optional<int> frobenius_trace(SplittingType t);

struct ClassTally {
  // Index 0: Split111, 1: Inert3, 2: Mixed12.
  std::array<std::size_t, 3> counts{};
  std::size_t ramified = 0;

  std::size_t total() const { return counts[0] + counts[1] + counts[2]; }
  std::array<double, 3> proportions() const;
};

/// Pooled tally over all (f, p) with p > 3.
ClassTally tally_classes(const std::vector<DepressedCubic>& cubics, const std::vector<i64>& primes);

struct CubicFamilyStats {
  ClassTally tally;
  std::array<double, 3> proportions{};  // Split111, Inert3, Mixed12
  IndicatorTriple indicators;
  double mean_trace = 0;
  std::size_t cubics = 0, primes = 0;
  bool under_sampled = false;  // fewer than 1000 cubics or 20 primes
};

/// Class frequencies and trace statistics for primes in (p_min, p_max).
CubicFamilyStats family_class_proportions(double X, i64 p_min, i64 p_max);
CubicFamilyStats family_class_proportions(const std::vector<DepressedCubic>& cubics, i64 p_min, i64 p_max);

}  // namespace fsl
