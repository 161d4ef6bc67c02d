#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fsl/arith.hpp"
#include "fsl/common.hpp"
#include "fsl/elliptic.hpp"
#include "fsl/measures.hpp"

namespace fsl {

/// Which coefficients a member accessor returns at p^k: power sums
/// sum_i alpha_i^k, or Dirichlet-series coefficients lambda(p^k).
enum class CoefficientConvention { PowerSum, Dirichlet };

/// A finite family window. Members are addressed by index in increasing
/// order of their conductor gauge; coefficients are analytically normalised.
struct FamilySnapshot {
  std::string family_id;
  double x = 0;
  std::size_t size = 0;
  std::function<double(std::size_t)> gauge;
  std::function<cplx(std::size_t, i64 p, int k)> coefficient;
  std::function<bool(std::size_t, i64 p)> ramified;
  i64 prime_limit = 0;  // accessors are valid for p <= prime_limit
  CoefficientConvention convention = CoefficientConvention::PowerSum;
};

/// Real quadratic characters chi_d for fundamental |d| <= x.
FamilySnapshot quadratic_snapshot(double x, i64 prime_limit = 100000);

/// Quasi-minimal curves in the box max(4|a|^3, 27 b^2) < height, with
/// a(p) = a_p / sqrt p and a(p^2) = a(p)^2 - 2 tabulated for p <= prime_limit.
/// `dirichlet` switches the accessor to lambda(p^2) = a(p)^2 - 1.
FamilySnapshot elliptic_box_snapshot(double height, i64 prime_limit, bool dirichlet = false);

/// One member with a fixed coefficient rule.
FamilySnapshot singleton_snapshot(const std::string& id, std::function<cplx(i64, int)> coefficient,
                                  i64 prime_limit);

struct THat {
  cplx value;
  double std_error = 0;
  double skipped_fraction = 0;  // members ramified at p; they contribute 0
};

/// Mean of a(n) over all members for a prime power n, ramified members
/// counted as 0.
THat t_hat(const FamilySnapshot& f, i64 n);

/// Per-prime family means for p_min <= p <= cutoff.
struct VerticalSeries {
  std::string family_id;
  i64 p_min = 2, cutoff = 0;
  std::vector<i64> primes;
  std::vector<cplx> t1;     // mean a(p)
  std::vector<cplx> t2;     // mean a(p^2)
  std::vector<double> abs2;  // mean |a(p)|^2
  std::vector<cplx> sq;     // mean a(p)^2
  bool analytic = true;     // a(p) normalised so that |alpha_i| = 1
  CoefficientConvention convention = CoefficientConvention::PowerSum;
};

VerticalSeries vertical_series(const FamilySnapshot& f, i64 cutoff, i64 p_min = 2);

/// The one-parameter fiber averages: t1(p) = A_p / sqrt p with
/// A_p = (1/p) sum_w a_p(E_w); other moments are not filled.
VerticalSeries nagao_series(const OneParamFamily& f, i64 cutoff);

struct PrimeSum {
  double value = 0;
  std::vector<double> partial;  // (1/p) sum_{p' <= p}, one entry per prime
};

/// (1/x) sum_{p < x} t2(p) log p. Requires the power-sum convention.
PrimeSum i3_sum(const VerticalSeries& s, double x);
/// (1/x) sum_{p < x} t1(p) log p.
PrimeSum first_moment_sum(const VerticalSeries& s, double x);
/// (1/x) sum_{p < x} -t1(p) sqrt(p) log p.
PrimeSum rank_sum(const VerticalSeries& s, double x);

struct IndicatorReport {
  IndicatorTriple indicators;
  Decomposition masses;
  std::string verdict;
  double rank = 0;
};

/// i1 and i2 from (1/x) sum |a(p)|^2 log p and sum a(p)^2 log p, i3 from
/// i3_sum. `plus_fraction` is the share of root number +1 when known.
IndicatorReport indicator_report(const VerticalSeries& s, double x, std::optional<double> plus_fraction = {},
                                 double i1_tolerance = 0.05);

/// Report JSON text; `provenance` is embedded verbatim.
std::string report_json(const std::string& family, double x, const VerticalSeries& s, const IndicatorReport& r,
                        const std::string& provenance_json = "{}");

}  // namespace fsl
