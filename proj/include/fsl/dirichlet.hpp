#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "fsl/arith.hpp"
#include "fsl/common.hpp"
#include "fsl/measures.hpp"

namespace fsl {

bool is_fundamental(i64 d);

/// All fundamental discriminants with |d| <= x, sorted by (|d|, d).
std::vector<i64> enumerate_fundamental(double x);

/// Versioned CSV cache of a discriminant list (header `format=fd,v1`).
void save_fundamental_cache(const std::filesystem::path& file, const std::vector<i64>& ds);
std::vector<i64> load_fundamental_cache(const std::filesystem::path& file);

struct QuadraticVertical {
  i64 p = 0;
  double x = 0;
  std::size_t count_plus = 0, count_minus = 0, count_ram = 0;
  double mass_plus = 0, mass_minus = 0, mass_ram = 0;
  double t_hat_p = 0;   // mean of chi_d(p)
  double t_hat_p2 = 0;  // mean of chi_d(p)^2
  TorusMeasure measure;  // atoms at angle 0 and pi, deficit = ramified mass
};

QuadraticVertical vertical_measure_quadratic(i64 p, double x);
QuadraticVertical vertical_measure_quadratic(i64 p, const std::vector<i64>& discriminants);

struct JointTable {
  // Index 0: chi = +1, 1: chi = -1, 2: ramified.
  std::array<std::array<std::size_t, 3>, 3> counts{};
  std::array<std::array<double, 3>, 3> freq{};
  double delta = 0;  // max |joint - product of marginals|
  std::size_t total = 0;
  bool under_sampled = false;
};

JointTable joint_vertical_quadratic(i64 p, i64 q, double x);

/// Tables for the characters of (Z/p^k)^*: a discrete logarithm with respect
/// to fixed generators (smallest primitive root for odd p, the pair (-1, 5)
/// for p = 2).
struct LocalCharacterGroup {
  i64 p = 0;
  int k = 0;
  i64 modulus = 0;
  i64 order = 0;      // order of the cyclic part (generator g, or 5 when p = 2)
  i64 generator = 0;  // g, or 5 when p = 2
  std::vector<std::int32_t> dlog;     // cyclic-part log, -1 on non-units
  std::vector<std::int8_t> sign_bit;  // p = 2 only: exponent of -1
};

std::shared_ptr<const LocalCharacterGroup> local_group(i64 p, int k);

struct LocalComponent {
  std::shared_ptr<const LocalCharacterGroup> group;
  i64 j = 0;    // exponent on the cyclic generator
  int e = 0;    // exponent on -1 (p = 2 only)

  bool primitive() const;
};

/// A Dirichlet character given by its local components at q's prime powers.
struct DirichletCharacter {
  i64 q = 1;
  std::vector<LocalComponent> locals;

  cplx operator()(i64 n) const;
  bool primitive() const;
  bool even() const;
};

using PrimitiveCharacter = DirichletCharacter;

/// Number of primitive characters mod p^k.
i64 primitive_count_local(i64 p, int k);
/// Number of primitive characters mod q (multiplicative).
i64 primitive_count(i64 q);

std::vector<DirichletCharacter> all_characters_mod(i64 q);
std::vector<PrimitiveCharacter> primitive_characters_mod(i64 q);
/// Every primitive character of conductor 3 <= q <= x.
std::vector<PrimitiveCharacter> enumerate_primitive(i64 x, i64 limit = 10000);

struct LocalStratum {
  int k = 0;
  std::uint64_t count = 0;
  double mass = 0;
  double model = 0;  // a * c(p, k) * p^{-2k}
};

struct LocalProfile {
  i64 p = 0;
  i64 x = 0;
  std::uint64_t total = 0;
  double a = 0;  // p^3 / ((p - 1)(p + 1)^2)
  std::vector<LocalStratum> strata;
};

LocalProfile universal_local_profile(i64 p, i64 x);

}  // namespace fsl
