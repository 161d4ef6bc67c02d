#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "fsl/dirichlet.hpp"

using namespace fsl;

namespace {

i64 euler_phi(i64 q) {
  i64 r = 0;
  for (i64 a = 1; a <= q; ++a) r += gcd(a, q) == 1;
  return r;
}

}  // namespace

TEST_SUITE("dirichlet") {

TEST_CASE("fundamental discriminants") {
  for (i64 d : {-3, -4, 5, -7, -8, 8, 12, 13, -15, -20, 21, -24, 24})
    CHECK_MESSAGE(is_fundamental(d), d);
  for (i64 d : {0, 1, -1, -12, 9, 16, -16, 2, 3, -5, 20, 25, -27})
    CHECK_MESSAGE(!is_fundamental(d), d);
  auto ds = enumerate_fundamental(2000);
  std::size_t brute = 0;
  for (i64 d = -2000; d <= 2000; ++d) brute += is_fundamental(d);
  CHECK(ds.size() == brute);
  for (std::size_t i = 1; i < ds.size(); ++i) {
    const auto key = [](i64 d) { return std::pair(d < 0 ? -d : d, d); };
    CHECK(key(ds[i - 1]) < key(ds[i]));
  }
}

TEST_CASE("fundamental cache round trip") {
  auto ds = enumerate_fundamental(300);
  auto file = std::filesystem::temp_directory_path() / "fsl_test_fd.csv";
  save_fundamental_cache(file, ds);
  CHECK(load_fundamental_cache(file) == ds);
  std::filesystem::remove(file);
}

TEST_CASE("quadratic vertical counts agree with a direct Kronecker tally") {
  const i64 p = 7;
  auto ds = enumerate_fundamental(5000);
  std::size_t plus = 0, minus = 0, ram = 0;
  for (i64 d : ds) {
    const int c = kronecker(d, p);
    (c == 1 ? plus : c == -1 ? minus : ram) += 1;
  }
  auto v = vertical_measure_quadratic(p, ds);
  CHECK(v.count_plus == plus);
  CHECK(v.count_minus == minus);
  CHECK(v.count_ram == ram);
  CHECK(v.mass_plus + v.mass_minus + v.mass_ram == doctest::Approx(1));
  CHECK(v.measure.total_mass() == doctest::Approx(v.mass_plus + v.mass_minus));
  CHECK(v.t_hat_p2 == doctest::Approx(v.mass_plus + v.mass_minus));
  // Limit masses p/(2(p+1)), p/(2(p+1)), 1/(p+1).
  CHECK(v.mass_ram == doctest::Approx(1.0 / 8).epsilon(0.1));
}

TEST_CASE("joint table of two primes is nearly a product") {
  auto j = joint_vertical_quadratic(3, 5, 50000);
  CHECK(j.total == enumerate_fundamental(50000).size());
  CHECK(j.delta < 0.01);
}

TEST_CASE("character counts") {
  for (i64 q : {3, 4, 8, 9, 12, 16, 15, 25, 27, 60, 64}) {
    CHECK(static_cast<i64>(all_characters_mod(q).size()) == euler_phi(q));
    auto prim = primitive_characters_mod(q);
    CHECK(static_cast<i64>(prim.size()) == primitive_count(q));
    for (auto& c : prim) CHECK(c.primitive());
    i64 sum = 0;
    for (i64 d = 1; d <= q; ++d)
      if (q % d == 0) sum += primitive_count(d);
    CHECK(sum == euler_phi(q));
  }
  CHECK(primitive_count_local(2, 1) == 0);
  CHECK(primitive_count_local(2, 2) == 1);
  CHECK(primitive_count_local(5, 1) == 3);
}

TEST_CASE("characters are multiplicative and orthogonal") {
  for (i64 q : {20, 24, 27}) {
    auto chars = all_characters_mod(q);
    for (auto& c : chars)
      for (i64 m = 1; m < q; ++m)
        for (i64 n = 1; n < q; n += 3) CHECK(std::abs(c(m * n) - c(m) * c(n)) < 1e-9);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      cplx s = 0;
      for (i64 n = 0; n < q; ++n) s += chars[i](n) * std::conj(chars[0](n));
      CHECK(std::abs(s - (i == 0 ? cplx(static_cast<double>(euler_phi(q))) : cplx(0))) < 1e-8);
    }
  }
}

TEST_CASE("universal GL(1) strata") {
  auto prof = universal_local_profile(3, 500);
  std::uint64_t total = 0;
  for (auto& s : prof.strata) total += s.count;
  CHECK(total == prof.total);
  CHECK(prof.a == doctest::Approx(27.0 / 32));
  CHECK(prof.strata[0].model == doctest::Approx(27.0 / 32));
  CHECK_THROWS_AS(universal_local_profile(4, 100), ValidationError);
}

}
