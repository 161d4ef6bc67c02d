#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fsl/arith.hpp"
#include "fsl/common.hpp"
#include "fsl/densities.hpp"

namespace fsl {

using cplxl = std::complex<long double>;

struct HurwitzValue {
  cplx value;
  double error_bound = 0;
};

/// Hurwitz zeta by Euler-Maclaurin summation with N direct terms and M
/// Bernoulli corrections, accumulated in extended precision. The bound is the
/// standard remainder estimate after the last included correction.
HurwitzValue hurwitz_zeta(cplx s, double alpha, int N, int M);

/// Complex log-gamma (principal value up to a multiple of 2 pi i).
cplx log_gamma(cplx z);

/// Complex digamma for Re z > 0.
cplx digamma(cplx z);

/// L(s, chi_d) for a real primitive character with conductor |d|.
struct QuadraticLSeries {
  i64 d = -4;

  explicit QuadraticLSeries(i64 disc);
  int parity() const { return d > 0 ? 0 : 1; }
  i64 conductor() const { return d < 0 ? -d : d; }
  int chi(i64 n) const;
};

struct LValue {
  cplx value;
  double error_bound = 0;
};

/// L(s, chi) = q^{-s} sum_r chi(r) zeta(s, r/q), with term budgets chosen so
/// the propagated bound meets `tol`.
LValue l_value(const QuadraticLSeries& L, cplx s, double tol = 1e-12);

/// Lambda(s) at a general point.
cplx completed_lambda_at(const QuadraticLSeries& L, cplx s);

/// Lambda(1/2 + it) = (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s); real-valued.
double completed_lambda(const QuadraticLSeries& L, double t);

/// Fast evaluator of the rotated function Z(t) = e^{i theta(t)} L(1/2+it),
/// which is real and has the sign of Lambda(1/2+it). Built once per
/// character for |t| <= t_max.
class CriticalLineEvaluator {
 public:
  CriticalLineEvaluator(const QuadraticLSeries& L, double t_max, double tol = 1e-10);

  /// Complex L(1/2 + it).
  cplx l_half(double t) const;
  /// Z(t); `imag` receives the imaginary part of the rotated value.
  double z(double t, double* imag = nullptr) const;
  /// Z on the grid t0 + j h, j = 0 .. count-1, by rotor recurrences.
  std::vector<double> z_grid(double t0, double h, std::size_t count) const;

  /// Taylor expansion of Z in a small window around t0. Evaluations inside
  /// the window cost O(M K) instead of a full pass over the terms.
  class Local {
   public:
    double center = 0, radius = 0;
    double z(double t) const;

   private:
    friend class CriticalLineEvaluator;
    static constexpr int K = 8;
    const CriticalLineEvaluator* owner = nullptr;
    std::array<cplx, K + 1> main{};
    std::vector<std::array<cplx, K + 1>> tail;  // basis a, 1/2, a^{1-2m}
  };
  Local expand(double t0) const;

  int terms() const { return N_; }
  int corrections() const { return M_; }

 private:
  cplx tail(double t, const std::vector<cplx>& rot_tail, bool scale) const;
  double theta(double t) const;

  QuadraticLSeries L_;
  i64 q_;
  int N_ = 0, M_ = 0;
  std::vector<double> coef_;  // chi(n)/sqrt(n) for n <= qN with chi(n) != 0
  std::vector<std::uint32_t> idx_;
  std::vector<double> log_;  // log n for the active terms
  std::vector<double> tail_a_, tail_chi_, tail_log_;
  std::vector<std::uint32_t> tail_idx_;
};

struct ZeroList {
  i64 d = 0;
  i64 q = 0;
  double T = 0;
  std::vector<double> ordinates;  // positive, ascending

  std::vector<double> signed_ordinates() const;
};

struct ZeroSearchOptions {
  double grid_factor = 0.05;  // grid spacing as a fraction of 2 pi / log(qT + 10)
  double tolerance = 1e-8;
  double audit_slack = 2.0;  // alarm when |count - N(T)| > slack + log q
};

/// Main term of the zero count with |gamma| <= T.
double zero_count_estimate(i64 q, double T);

/// Sign changes of Z on [0, T] refined by bracketing; audited against the
/// zero-counting main term. Throws AuditAlarm when the count stays off after
/// one retry on a four times finer grid.
ZeroList find_zeros(const QuadraticLSeries& L, double T, const ZeroSearchOptions& opt = {});

/// Scaled signed ordinates gamma log(q) / (2 pi), or log(q/pi) when
/// `log_q_over_pi` is set.
std::vector<double> scale_zeros(const ZeroList& z, bool log_q_over_pi = false);

/// Sum of Phi over the signed scaled ordinates.
double one_level_statistic(const ZeroList& z, const TestFunction& phi, bool log_q_over_pi = false);

/// The same sum over all zeros, evaluated without zeros through the explicit
/// formula: a Gamma-factor integral minus a finite prime-power sum (the
/// transform of Phi has compact support). Assumes zeros on the critical line.
double explicit_one_level(const QuadraticLSeries& L, const TestFunction& phi, bool log_q_over_pi = false);

struct OneLevelOptions {
  double reach = 10;           // zeros are found up to scaled height `reach`
  bool log_q_over_pi = false;  // scale by log(q/pi) instead of log q
  bool explicit_formula = false;
  std::optional<std::filesystem::path> cache_dir;
};

/// One-level statistic over a list of quadratic characters. Each member uses
/// zeros up to T = min(60, reach * 2 pi / scale). Members whose zero list
/// cannot reach scaled height 5 are skipped and counted.
struct FamilyOneLevel {
  std::vector<i64> discriminants;
  std::vector<double> values;
  std::vector<double> explicit_values;  // filled when requested
  DensityReport report;                 // against the W_- prediction
  double explicit_mean = 0;
  std::size_t skipped = 0;
};

FamilyOneLevel quadratic_one_level(const std::vector<i64>& discriminants, const TestFunction& phi,
                                   const OneLevelOptions& opt = {});

/// Zero cache: one CSV per discriminant under `dir`.
void save_zero_cache(const std::filesystem::path& dir, const ZeroList& z);
std::optional<ZeroList> load_zero_cache(const std::filesystem::path& dir, i64 d, double T);

}  // namespace fsl
