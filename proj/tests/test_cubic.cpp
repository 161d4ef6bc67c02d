#include <algorithm>

#include "doctest.h"
#include "fsl/cubic.hpp"

using namespace fsl;

TEST_SUITE("cubic") {

TEST_CASE("worked examples") {
  DepressedCubic f{-1, 1};
  CHECK(f.disc() == -23);
  CHECK(f.irreducible());
  CHECK(f.s3());
  CHECK_FALSE(DepressedCubic{0, 1}.irreducible());
  CHECK(DepressedCubic{-3, 1}.disc() == 81);
  CHECK_FALSE(DepressedCubic{-3, 1}.s3());  // cyclic cubic
  auto list = enumerate_s3_cubics(100);
  auto has = [&](i64 A, i64 B) {
    return std::any_of(list.begin(), list.end(), [&](const auto& c) { return c.A == A && c.B == B; });
  };
  CHECK(has(-1, 1));
  CHECK_FALSE(has(0, 1));
  CHECK_FALSE(has(-3, 1));
  // x^3 - x + 1 vanishes at 3 mod 5 and nowhere else.
  CHECK(splitting_type(f, 5) == SplittingType::Mixed12);
  CHECK(splitting_type(f, 23) == SplittingType::Ramified);
  CHECK(splitting_type(DepressedCubic{-7, 7}, 7) == SplittingType::Ramified);
}

TEST_CASE("enumeration matches a brute-force scan") {
  const double X = 3000;
  auto list = enumerate_s3_cubics(X);
  std::vector<std::pair<i64, i64>> got, want;
  // For |A| <= 200 every solution has |B| below 600.
  for (const auto& c : list)
    if (std::abs(c.A) <= 200) got.emplace_back(c.A, c.B);
  for (i64 A = -200; A <= 200; ++A)
    for (i64 B = -2000; B <= 2000; ++B) {
      DepressedCubic c{A, B};
      if (c.s3() && std::abs(double(c.disc())) <= X) want.emplace_back(A, B);
    }
  std::sort(want.begin(), want.end());
  CHECK(got == want);
}

TEST_CASE("root counts agree with a direct search") {
  for (i64 p : {5, 7, 11, 13, 101})
    for (i64 A = -10; A <= 10; ++A)
      for (i64 B = -10; B <= 10; ++B) {
        DepressedCubic f{A, B};
        auto t = splitting_type(f, p);
        if (mod(f.disc(), p) == 0) {
          CHECK(t == SplittingType::Ramified);
          continue;
        }
        int roots = 0;
        for (i64 x = 0; x < p; ++x) roots += mod(x * x * x + A * x + B, p) == 0;
        CHECK(roots != 2);
        CHECK(frobenius_trace(t).value() == roots - 1);
      }
  CHECK_FALSE(frobenius_trace(SplittingType::Ramified).has_value());
}

TEST_CASE("traces reproduce the D3 character orthogonality") {
  // Class sizes 1, 2, 3 with traces 2, -1, 0: mean trace 0, mean square 1,
  // mean of tr(g^2) = 1.
  const double w[3] = {1.0 / 6, 1.0 / 3, 0.5};
  const int tr[3] = {2, -1, 0}, tr2[3] = {2, -1, 2};
  double m1 = 0, m2 = 0, m3 = 0;
  for (int i = 0; i < 3; ++i) {
    m1 += w[i] * tr[i];
    m2 += w[i] * tr[i] * tr[i];
    m3 += w[i] * tr2[i];
  }
  CHECK(m1 == doctest::Approx(0));
  CHECK(m2 == doctest::Approx(1));
  CHECK(m3 == doctest::Approx(1));
}

TEST_CASE("pooled tallies") {
  auto list = enumerate_s3_cubics(20000);
  auto st = family_class_proportions(list, 50, 200);
  CHECK(st.tally.total() + st.tally.ramified == list.size() * st.primes);
  const auto pr = st.proportions;
  CHECK(pr[0] + pr[1] + pr[2] == doctest::Approx(1));
  CHECK(pr[0] == doctest::Approx(1.0 / 6).epsilon(0.2));
  CHECK(pr[1] == doctest::Approx(1.0 / 3).epsilon(0.2));
  CHECK(pr[2] == doctest::Approx(1.0 / 2).epsilon(0.2));
  CHECK_THROWS_AS(family_class_proportions(list, 100, 50), ValidationError);
}

}
