#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsl/arith.hpp"
#include "fsl/common.hpp"
#include "fsl/measures.hpp"

namespace fsl {

/// y^2 = x^3 + a x + b over Z.
struct ShortWeierstrassCurve {
  i64 a = 0, b = 0;

  /// 4a^3 + 27b^2, the polynomial discriminant up to the factor -16.
  i64 discriminant() const { return 4 * a * a * a + 27 * b * b; }
  bool valid() const { return discriminant() != 0; }
  /// No prime u with u^4 | a and u^6 | b.
  bool quasi_minimal() const;
};

/// Quasi-minimal curves with max(4|a|^3, 27 b^2) < x, in order of a then b.
std::vector<ShortWeierstrassCurve> enumerate_box(double x);

/// -sum_x (f(x) | p) for any cubic values, singular fibers included.
i64 raw_character_sum(i64 a, i64 b, i64 p);

/// Trace of Frobenius at a prime p > 3 of good reduction.
i64 ap_single(const ShortWeierstrassCurve& E, i64 p);

/// a_p over every (a mod p, b mod p), filled through the twist orbits
/// (a, b) -> (l^2 a, l^3 b), on which a_p scales by (l | p).
struct SweepTable {
  static constexpr std::int16_t singular_sentinel = -32768;

  i64 p = 0;
  std::vector<std::int16_t> ap;     // row-major in a, raw sums also on the singular locus
  std::vector<std::uint8_t> singular;
  std::size_t singular_count = 0;

  std::int16_t at(i64 a, i64 b) const { return ap[static_cast<std::size_t>(mod(a, p) * p + mod(b, p))]; }
  bool is_singular(i64 a, i64 b) const { return singular[static_cast<std::size_t>(mod(a, p) * p + mod(b, p))]; }
};

SweepTable ap_sweep(i64 p);

/// Binary cache: header DWSWEEP1, p as little-endian int64, then p^2 int16
/// values with the sentinel on the singular locus.
void save_sweep(const std::filesystem::path& file, const SweepTable& t);
SweepTable load_sweep(const std::filesystem::path& file);
/// Loads `sweep_<p>.bin` under `dir` or computes and stores it.
SweepTable cached_sweep(const std::filesystem::path& dir, i64 p);

/// Atoms at theta = arccos(a_p / 2 sqrt p) weighted by count / p^2; the
/// singular fraction is the mass deficit.
TorusMeasure vertical_measure_elliptic(const SweepTable& t);

/// Kolmogorov distance between a rank-1 measure (normalised to its mass) and
/// the law (2/pi) sin^2 on [0, pi].
double sato_tate_cdf_distance(const TorusMeasure& mu);

/// Integer polynomial in one variable, lowest degree first.
using Poly1 = std::vector<i64>;

/// y^2 = x^3 + c2(w) x^2 + c1(w) x + c0(w). With `two_parameter` set the
/// family is the full box y^2 = x^3 + w1 x + w2 and the polynomials are unused.
struct OneParamFamily {
  std::string name;
  Poly1 c2, c1, c0;
  bool two_parameter = false;
};

/// Presets: fell, washington, generic, generic-linear, cassels-schinzel.
OneParamFamily family_preset(const std::string& name);
std::vector<std::string> family_preset_names();

/// True when j(w) is not constant (tested at several integer points).
bool non_isotrivial(const OneParamFamily& f);

/// Vertical measure of the fibers w in F_p: atoms at arccos(a_p / 2 sqrt p)
/// with weight 1/p; singular fibers are the mass deficit. The two-parameter
/// family goes through the full sweep.
TorusMeasure fiber_vertical_measure(const OneParamFamily& f, i64 p);

/// sum over w and x in F_p of (f(x, w) | p). Closed-form character sums are
/// used when f has degree at most 2 in w; `brute_force` forces the double loop.
i64 nagao_character_total(const OneParamFamily& f, i64 p, bool brute_force = false);

struct NagaoResult {
  double value = 0;                  // (1/x) sum -A_p log p
  std::vector<i64> primes;           // 5 <= p <= x
  std::vector<double> minus_a;       // -A_p
  std::vector<double> partial;       // running (1/p) sum_{p' <= p} -A_p' log p'
};

/// A_p = (1/p) sum_w a_p(E_w) with a_p = p + 1 - #E_w(F_p) for every fiber,
/// singular ones included. Primes 2 and 3 are skipped.
NagaoResult nagao_rank(const OneParamFamily& f, i64 x);

/// Base curve data supplied by the caller: root number and conductor.
struct TwistBase {
  ShortWeierstrassCurve curve;
  int epsilon = 1;
  i64 conductor = 1;
};

/// Root number of the quadratic twist by a fundamental discriminant d
/// coprime to 2N: chi_d(-N) * epsilon.
int twist_root_number(const TwistBase& base, i64 d);

/// Sparse integer polynomial in w1, w2 (a lone `w` is read as w1).
struct MultiPoly {
  struct Term {
    i64 coeff = 0;
    int e1 = 0, e2 = 0;
  };
  std::vector<Term> terms;

  int variables() const;
  int degree() const;
  i64 operator()(i64 w1, i64 w2 = 0) const;
};

/// Parses sums of terms like `3*w1^2*w2`, `-w`, `7`.
MultiPoly parse_poly(const std::string& text);

/// Mean of mu(M(w)) over the box |w_i| <= x, with mu(0) = 0 and
/// mu(-n) = mu(n).
double moebius_poly_average(const MultiPoly& M, i64 x);

/// a_p = p + 1 - #{x0^3 + x1^3 + x2^3 = 3 w x0 x1 x2} in P^2(F_p).
i64 dwork_hesse_ap(i64 w, i64 p);

/// a_p for every w mod p in one pass over the affine plane; entries with
/// w^3 = 1 (singular fibers) are empty.
std::vector<std::optional<i64>> dwork_hesse_sweep(i64 p);

/// Vertical measure of the Dwork-Hesse pencil at p from the sweep.
TorusMeasure dwork_vertical_measure(i64 p);

}  // namespace fsl
