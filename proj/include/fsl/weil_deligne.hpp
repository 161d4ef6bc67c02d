#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fsl/arith.hpp"
#include "fsl/common.hpp"
#include "fsl/elliptic.hpp"

namespace fsl {

/// Exact fraction with positive denominator in lowest terms.
class Rational {
 public:
  Rational(i64 num = 0, i64 den = 1);
  /// Accepts "a", "-a/b".
  static Rational parse(const std::string& s);

  i64 num() const { return num_; }
  i64 den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

 private:
  i64 num_, den_;
};

/// The fixed-space dimension of the upper-numbering filtration jumps to `d`
/// at `u`. The Swan integral runs over the intervals between consecutive
/// breaks; beyond the last break the filtration acts trivially.
struct InertiaBreak {
  Rational u;
  int d = 0;
};

/// A Weil-Deligne representation (Phi, inertia data, N) with the twist
/// relation Phi N Phi^{-1} = q^{-1} N.
struct WeilDeligneRep {
  int n = 0;
  i64 q = 0;
  Eigen::MatrixXcd frobenius;
  std::vector<InertiaBreak> breaks;
  Eigen::MatrixXcd inertia_projection;  // projector onto V^I
  Eigen::MatrixXcd N;

  /// Throws ValidationError unless shapes, nilpotency, the twist relation
  /// (to 1e-8), the projector and the step function are consistent.
  void validate() const;
};

/// Tame part dim V - dim(V^I cap ker N) plus the Swan integral.
Rational artin_conductor(const WeilDeligneRep& rep);
int tame_part(const WeilDeligneRep& rep);
Rational swan_part(const WeilDeligneRep& rep);

/// P(T) = det(1 - Phi T | V^I cap ker N), coefficients from T^0 upwards.
/// Coefficients within 1e-6 of an integer are snapped.
struct LFactor {
  std::vector<cplx> coeffs;
  bool integral = false;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  /// Integer coefficients; throws unless `integral`.
  std::vector<i64> integers() const;
};

LFactor local_l_factor(const WeilDeligneRep& rep);

enum class ReductionType { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };

const char* reduction_name(ReductionType t);
ReductionType classify_reduction(const ShortWeierstrassCurve& E, i64 p);

/// The local representation at p > 3 from the reduction type: good reduction
/// gives Phi with trace a_p and determinant p; multiplicative reduction the
/// Steinberg shape twisted by +-1; additive reduction is taken to be tame with
/// V^I = 0.
WeilDeligneRep from_elliptic_reduction(const ShortWeierstrassCurve& E, i64 p);

/// Block sum; both summands must share q.
WeilDeligneRep direct_sum(const WeilDeligneRep& a, const WeilDeligneRep& b);

/// JSON text with "format": "wd-v1".
std::string to_json(const WeilDeligneRep& rep);
WeilDeligneRep wd_from_json(const std::string& text);

}  // namespace fsl
