#include <filesystem>

#include "doctest.h"
#include "fsl/elliptic.hpp"

using namespace fsl;

namespace {

// #E(F_p) by listing (x, y) pairs, plus the point at infinity.
i64 count_points(i64 a, i64 b, i64 p) {
  i64 n = 1;
  for (i64 x = 0; x < p; ++x)
    for (i64 y = 0; y < p; ++y) n += mod(y * y - (x * x % p * x + a * x + b), p) == 0;
  return n;
}

// Projective points of x^3 + y^3 + z^3 = 3 w x y z over F_p, one
// representative per line.
i64 hesse_points(i64 w, i64 p) {
  auto f = [&](i64 x, i64 y, i64 z) {
    return mod(x * x % p * x + y * y % p * y + z * z % p * z - 3 * w % p * x % p * y % p * z, p) == 0;
  };
  i64 n = 0;
  for (i64 x = 0; x < p; ++x)
    for (i64 y = 0; y < p; ++y) n += f(x, y, 1);
  for (i64 x = 0; x < p; ++x) n += f(x, 1, 0);
  n += f(1, 0, 0);
  return n;
}

}  // namespace

TEST_SUITE("elliptic") {

TEST_CASE("a_p agrees with point counting") {
  for (i64 p : {5, 7, 11, 13}) {
    for (i64 a = 0; a < p; ++a)
      for (i64 b = 0; b < p; ++b) {
        ShortWeierstrassCurve E{a, b};
        if (mod(E.discriminant(), p) == 0) continue;
        CHECK(ap_single(E, p) == p + 1 - count_points(a, b, p));
      }
  }
  CHECK_THROWS_AS(ap_single(ShortWeierstrassCurve{0, 0}, 5), ValidationError);
}

TEST_CASE("sweep table matches direct sums everywhere") {
  for (i64 p : {5, 13, 31}) {
    auto t = ap_sweep(p);
    CHECK(t.singular_count == static_cast<std::size_t>(p));
    for (i64 a = 0; a < p; ++a)
      for (i64 b = 0; b < p; ++b) CHECK(t.at(a, b) == raw_character_sum(a, b, p));
  }
}

TEST_CASE("sweep respects the twist orbits") {
  const i64 p = 101;
  auto t = ap_sweep(p);
  for (i64 a = 1; a < p; a += 7)
    for (i64 b = 2; b < p; b += 11)
      for (i64 l = 2; l < p; l += 13) {
        const i64 l2 = l * l % p, l3 = l2 * l % p;
        CHECK(t.at(l2 * a, l3 * b) == legendre(l, p) * t.at(a, b));
        const i64 l4 = l2 * l2 % p, l6 = l3 * l3 % p;
        CHECK(t.at(l4 * a, l6 * b) == t.at(a, b));
      }
}

TEST_CASE("sweep identity and Hasse bound") {
  const i64 p = 211;
  auto t = ap_sweep(p);
  i64 total = 0;
  for (i64 a = 0; a < p; ++a)
    for (i64 b = 0; b < p; ++b) {
      total += t.at(a, b);
      if (!t.is_singular(a, b)) CHECK(t.at(a, b) * t.at(a, b) <= 4 * p);
    }
  CHECK(total == 0);
  CHECK(nagao_character_total(family_preset("fell"), p) == 0);
  auto mu = vertical_measure_elliptic(t);
  CHECK(mu.total_mass() == doctest::Approx(1.0 - 1.0 / p));
}

TEST_CASE("sweep cache round trip") {
  auto dir = std::filesystem::temp_directory_path() / "fsl_test_sweep";
  std::filesystem::remove_all(dir);
  auto a = cached_sweep(dir, 53);
  auto b = cached_sweep(dir, 53);
  CHECK(std::filesystem::exists(dir / "sweep_53.bin"));
  CHECK(a.ap == b.ap);
  CHECK(a.singular == b.singular);
  CHECK(a.singular_count == b.singular_count);
  std::filesystem::remove_all(dir);
}

TEST_CASE("Sato-Tate distance of the full sweep is small") {
  auto mu = vertical_measure_elliptic(ap_sweep(401));
  CHECK(sato_tate_cdf_distance(mu) < 0.03);
}

TEST_CASE("box enumeration") {
  const double x = 5000;
  auto box = enumerate_box(x);
  std::size_t brute = 0;
  for (i64 a = -20; a <= 20; ++a)
    for (i64 b = -20; b <= 20; ++b) {
      ShortWeierstrassCurve E{a, b};
      const double h = std::max(4.0 * std::abs(double(a * a * a)), 27.0 * double(b * b));
      if (h < x && E.valid() && E.quasi_minimal()) ++brute;
    }
  CHECK(box.size() == brute);
  CHECK_FALSE(ShortWeierstrassCurve{16, 64}.quasi_minimal());
  CHECK(ShortWeierstrassCurve{16, 63}.quasi_minimal());
}

TEST_CASE("closed-form fiber sums match the double loop") {
  for (const auto& name : {"washington", "generic", "generic-linear", "cassels-schinzel"}) {
    auto f = family_preset(name);
    for (i64 p : {5, 7, 11, 101, 211})
      CHECK_MESSAGE(nagao_character_total(f, p) == nagao_character_total(f, p, true), name << " p=" << p);
  }
  CHECK_THROWS_AS(family_preset("nope"), ValidationError);
}

TEST_CASE("isotriviality") {
  CHECK(non_isotrivial(family_preset("washington")));
  CHECK(non_isotrivial(family_preset("generic")));
  CHECK_FALSE(non_isotrivial(family_preset("cassels-schinzel")));
  CHECK_THROWS_AS(nagao_rank(family_preset("cassels-schinzel"), 100), ValidationError);
}

TEST_CASE("fiber measure of a one-parameter family") {
  auto f = family_preset("washington");
  const i64 p = 101;
  std::size_t singular = 0;
  for (i64 w = 0; w < p; ++w) {
    // Discriminant of the Washington cubic is (w^2 + 3w + 9)^2.
    if (mod(w * w + 3 * w + 9, p) == 0) ++singular;
  }
  auto mu = fiber_vertical_measure(f, p);
  CHECK(mu.total_mass() == doctest::Approx(1.0 - double(singular) / p));
}

TEST_CASE("twist root numbers") {
  TwistBase base{ShortWeierstrassCurve{-1, 0}, 1, 32};
  CHECK(twist_root_number(base, 1) == 1);
  CHECK(twist_root_number(base, -3) == kronecker(-3, -32));
  CHECK(twist_root_number(base, 5) == kronecker(5, -32));
  CHECK_THROWS_AS(twist_root_number(base, -4), ValidationError);
  CHECK_THROWS_AS(twist_root_number(base, 12), ValidationError);
}

TEST_CASE("polynomial parsing") {
  auto M = parse_poly("3*w1^2*w2 - w + 7");
  CHECK(M.variables() == 2);
  CHECK(M.degree() == 3);
  CHECK(M(2, 5) == 3 * 4 * 5 - 2 + 7);
  CHECK(parse_poly("w^2+1")(3) == 10);
  CHECK_THROWS_AS(parse_poly("w^5"), ValidationError);
  CHECK_THROWS_AS(parse_poly("2w"), ValidationError);
  CHECK_THROWS_AS(parse_poly(""), ValidationError);
}

TEST_CASE("Moebius average agrees with a direct sum") {
  auto M = parse_poly("w^2 + 1");
  const i64 x = 300;
  long s = 0;
  for (i64 w = -x; w <= x; ++w) s += mobius(w * w + 1);
  CHECK(moebius_poly_average(M, x) == doctest::Approx(double(s) / (2 * x + 1)).epsilon(1e-14));
  auto M2 = parse_poly("w1*w2 + 1");
  long s2 = 0;
  for (i64 a = -20; a <= 20; ++a)
    for (i64 b = -20; b <= 20; ++b) s2 += mobius(a * b + 1);
  CHECK(moebius_poly_average(M2, 20) == doctest::Approx(double(s2) / (41.0 * 41.0)).epsilon(1e-14));
}

TEST_CASE("Dwork-Hesse traces") {
  for (i64 p : {5, 7, 13, 31}) {
    auto sweep = dwork_hesse_sweep(p);
    for (i64 w = 0; w < p; ++w) {
      if (mod(w * w % p * w - 1, p) == 0) {
        CHECK_FALSE(sweep[w].has_value());
        continue;
      }
      REQUIRE(sweep[w].has_value());
      CHECK(*sweep[w] == p + 1 - hesse_points(w, p));
      CHECK(dwork_hesse_ap(w, p) == *sweep[w]);
    }
  }
}

}
