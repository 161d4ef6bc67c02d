#include <filesystem>

#include "doctest.h"
#include "fsl/lfunctions.hpp"

using namespace fsl;

TEST_SUITE("lfunctions") {

TEST_CASE("Hurwitz zeta special values") {
  auto z2 = hurwitz_zeta(cplx(2, 0), 1.0, 30, 12);
  CHECK(std::abs(z2.value - cplx(pi * pi / 6)) < 1e-13);
  CHECK(z2.error_bound < 1e-12);
  // zeta(2, 1/2) = 3 zeta(2)
  CHECK(std::abs(hurwitz_zeta(cplx(2, 0), 0.5, 30, 12).value - cplx(pi * pi / 2)) < 1e-12);
}

TEST_CASE("gamma and digamma") {
  CHECK(std::abs(log_gamma(cplx(5, 0)) - cplx(std::log(24.0))) < 1e-12);
  CHECK(std::abs(std::exp(log_gamma(cplx(0.5, 0))) - cplx(std::sqrt(pi))) < 1e-12);
  CHECK(std::abs(digamma(cplx(1, 0)) - cplx(-0.57721566490153286)) < 1e-12);
}

TEST_CASE("classical L-values") {
  QuadraticLSeries L4(-4), L3(-3), L23(-23);
  CHECK(std::abs(l_value(L4, cplx(2, 0)).value - cplx(0.91596559417721901505)) < 1e-10);
  CHECK(std::abs(l_value(L4, cplx(1, 0)).value - cplx(pi / 4)) < 1e-10);
  CHECK(std::abs(l_value(L3, cplx(1, 0)).value - cplx(pi / (3 * std::sqrt(3.0)))) < 1e-10);
  // Class number 3.
  CHECK(std::abs(l_value(L23, cplx(1, 0)).value - cplx(3 * pi / std::sqrt(23.0))) < 1e-10);
  CHECK_THROWS_AS(QuadraticLSeries(3), ValidationError);
}

TEST_CASE("functional equation") {
  for (i64 d : {-4, 5, -7, 8, -163, 1001}) {
    QuadraticLSeries L(d);
    for (cplx s : {cplx(0.3, 2.0), cplx(0.1, -7.5), cplx(0.8, 15.0)}) {
      const cplx a = completed_lambda_at(L, s), b = completed_lambda_at(L, 1.0 - s);
      CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("critical line evaluator matches direct evaluation") {
  QuadraticLSeries L(-84);
  CriticalLineEvaluator E(L, 40);
  for (double t : {0.7, 5.3, 17.9, 39.0}) {
    CHECK(std::abs(E.l_half(t) - l_value(L, cplx(0.5, t)).value) < 1e-8);
    const double lam = completed_lambda(L, t);
    if (std::abs(lam) > 1e-6) CHECK((E.z(t) > 0) == (lam > 0));
  }
  auto loc = E.expand(10.0);
  CHECK(loc.z(10.0 + 0.3 * loc.radius) == doctest::Approx(E.z(10.0 + 0.3 * loc.radius)).epsilon(1e-8));
}

TEST_CASE("first zero of L(s, chi_-4)") {
  auto z = find_zeros(QuadraticLSeries(-4), 10);
  REQUIRE_FALSE(z.ordinates.empty());
  CHECK(z.ordinates.front() == doctest::Approx(6.0209489046975965).epsilon(1e-10));
}

TEST_CASE("zero counts track the main term") {
  for (i64 d : {-3, 5, -23, 28, -195, 401}) {
    QuadraticLSeries L(d);
    auto z = find_zeros(L, 30);
    const double est = zero_count_estimate(L.conductor(), 30);
    CHECK(std::abs(2.0 * static_cast<double>(z.ordinates.size()) - est) < 2.0 + std::log(double(L.conductor())) + 4);
    for (std::size_t i = 1; i < z.ordinates.size(); ++i) CHECK(z.ordinates[i] > z.ordinates[i - 1]);
    CHECK(z.signed_ordinates().size() == 2 * z.ordinates.size());
  }
}

TEST_CASE("explicit formula agrees with the sum over zeros") {
  TestFunction phi{1};
  QuadraticLSeries L(-163);
  auto z = find_zeros(L, 60);
  const double direct = one_level_statistic(z, phi);
  const double formula = explicit_one_level(L, phi);
  // Zeros beyond T = 60 sit past scaled height 48; their share is about 0.003.
  CHECK(std::abs(direct - formula) < 0.01);
}

TEST_CASE("zero cache round trip") {
  auto dir = std::filesystem::temp_directory_path() / "fsl_test_zero_cache";
  std::filesystem::remove_all(dir);
  auto z = find_zeros(QuadraticLSeries(-7), 20);
  save_zero_cache(dir, z);
  auto back = load_zero_cache(dir, -7, 15);
  REQUIRE(back.has_value());
  for (double g : back->ordinates) CHECK(g <= 15);
  CHECK_FALSE(load_zero_cache(dir, -7, 25).has_value());
  CHECK_FALSE(load_zero_cache(dir, -8, 10).has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("family one-level skips tiny conductors and fills explicit values") {
  OneLevelOptions opt;
  opt.explicit_formula = true;
  opt.log_q_over_pi = true;
  auto r = quadratic_one_level({-4, -3, 5, -163, 173}, TestFunction{1}, opt);
  CHECK(r.skipped == 3);
  CHECK(r.discriminants == std::vector<i64>{-163, 173});
  CHECK(r.values.size() == r.discriminants.size());
  CHECK(r.explicit_values.size() == r.values.size());
  CHECK(r.report.predicted == doctest::Approx(0.5));
}

}
