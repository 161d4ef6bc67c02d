#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "fsl/common.hpp"
#include "fsl/rmt.hpp"

namespace fsl {

/// A conjugacy class in the compact torus modulo the Weyl group, stored as
/// eigenvalue arguments sorted ascending in (-pi, pi].
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> angles);
  static TorusPoint from_eigenvalues(const std::vector<cplx>& eig);

  const std::vector<double>& angles() const { return angles_; }
  int n() const { return static_cast<int>(angles_.size()); }
  cplx trace() const;
  /// tr(t^k): the power-sum of the eigenvalues.
  cplx power_trace(int k) const;
  TorusPoint squared() const;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::vector<double> angles_;
};

/// Reduces an angle into (-pi, pi].
double wrap_angle(double a);

struct Ramified {
  int conductor_exponent = 1;
};

using SpectralSample = std::variant<TorusPoint, Ramified>;

struct AtomicMeasure {
  std::vector<std::pair<TorusPoint, double>> atoms;
};

struct EmpiricalMeasure {
  std::vector<SpectralSample> samples;
};

/// Rank-1 class data diag(e^{i theta}, e^{-i theta}) with a density on [0, pi].
struct DensityMeasure {
  std::function<double(double)> density;
  int grid = 1 << 14;
};

struct TorusMeasure {
  std::variant<AtomicMeasure, EmpiricalMeasure, DensityMeasure> data;

  double total_mass() const;
  /// Integral of f against the measure (ramified mass contributes nothing).
  double expect(const std::function<double(const TorusPoint&)>& f) const;
  cplx expect_complex(const std::function<cplx(const TorusPoint&)>& f) const;
};

/// Composite Simpson rule on [lo, hi], refined until two successive grids
/// agree to `tol`.
double simpson_adaptive(const std::function<double(double)>& f, double lo, double hi,
                        int start_intervals = 1 << 14, double tol = 1e-10);

// ---------------------------------------------------------------- groups

struct GroupSpec;
using GroupPtr = std::shared_ptr<const GroupSpec>;

/// Explicit finite matrix group; build it with make_finite_group or
/// generate_finite_group so that unitarity and closure are checked.
struct FiniteGroup {
  std::vector<Eigen::MatrixXcd> elements;
  std::vector<TorusPoint> classes;  // eigenangles of each element
};

struct SU2Sym {
  int k = 1;
};
struct FullCircle {};
struct RootsOfUnity {
  int m = 2;
};
struct ClassicalHaar {
  HaarFamily family;
};
struct Tensor {
  GroupPtr left, right;
};
struct TwistBy {
  GroupPtr base, twistor;
};

struct GroupSpec {
  std::variant<FiniteGroup, SU2Sym, FullCircle, RootsOfUnity, ClassicalHaar, Tensor, TwistBy> kind;

  /// Dimension of the ambient GL_n.
  int rank() const;
};

FiniteGroup make_finite_group(std::vector<Eigen::MatrixXcd> elements);
FiniteGroup generate_finite_group(const std::vector<Eigen::MatrixXcd>& generators,
                                  std::size_t max_order = 1000000);

GroupPtr group(GroupSpec spec);
GroupPtr tensor(GroupPtr a, GroupPtr b);
GroupPtr twist_by(GroupPtr base, GroupPtr twistor);

/// The 2-dimensional irreducible representation of S_3 as the symmetry group
/// of a triangle.
FiniteGroup dihedral_d3();

/// One Haar-distributed class of `spec` drawn from `rng`. Tensor and TwistBy
/// draw the left part first, then the right part.
TorusPoint draw_point(const GroupSpec& spec, std::mt19937_64& rng);

std::vector<TorusPoint> sample_group(const GroupSpec& spec, std::size_t count,
                                     std::uint64_t seed);

struct IndicatorTriple {
  double i1 = 0, i2 = 0, i3 = 0;
  double se1 = 0, se2 = 0, se3 = 0;
  double i2_imag = 0;  // imaginary part of the mean of (tr t)^2
  double se2_imag = 0;

  /// True when the imaginary part of the i2 mean is significant.
  bool i2_complex() const { return std::abs(i2_imag) > 3 * se2_imag + 1e-12; }
};

IndicatorTriple indicators_monte_carlo(const GroupSpec& spec, std::size_t count,
                                       std::uint64_t seed);
IndicatorTriple indicators_exact(const GroupSpec& spec);
/// Indicator estimates from explicit class samples (each weight 1/N).
IndicatorTriple indicators_from_points(const std::vector<TorusPoint>& pts);
/// Exact indicator integrals of a measure (no standard errors).
IndicatorTriple indicators_of_measure(const TorusMeasure& mu);

struct Decomposition {
  double mass_u = 0, mass_o = 0, mass_sp = 0;  // clamped into [0, 1]
  double raw_u = 0, raw_o = 0, raw_sp = 0;      // before clamping
  bool clamped = false;                         // clamping exceeded 3 se
};

Decomposition decompose_indicators(const IndicatorTriple& t, double i1_tolerance = 0.05);

TorusMeasure pushforward_square(const TorusMeasure& mu);
TorusMeasure twist_pushforward(const TorusMeasure& mu, const TorusMeasure& twistor);
TorusMeasure plancherel_pgl2(std::int64_t p);

struct STAverage {
  TorusMeasure raw;         // (1/x) sum_{p<x} log p mu_p
  TorusMeasure normalized;  // raw rescaled to total mass 1
  double raw_mass = 0;
};

STAverage st_average(const std::vector<std::pair<std::int64_t, TorusMeasure>>& measures, double x);

/// Haar measure of a finite group or roots of unity as an atomic measure.
TorusMeasure haar_atomic(const GroupSpec& spec);
TorusMeasure empirical(std::vector<TorusPoint> pts);

}  // namespace fsl
