#pragma once

#include <vector>

namespace fsl {

enum class KernelKind { UnitaryK, EvenOrthK, OddOrSympK };

/// sin(pi x) / (pi x) with the removable singularity filled in.
double sinc_pi(double x);

/// Fejer test function Phi(x) = a (sin(pi a x)/(pi a x))^2 whose Fourier
/// transform is the triangle max(0, 1 - |xi|/a).
struct TestFunction {
  double a = 1.0;

  double operator()(double x) const;
  double transform(double xi) const;
};

double kernel(KernelKind kind, double x, double y);

/// Determinant of the r x r kernel matrix at the given points.
double w_r(KernelKind kind, const std::vector<double>& points);

/// Closed-form integral of Phi against the 1-level density.
double predicted_one_level(KernelKind kind, const TestFunction& phi, bool include_central_zero);

struct DensityReport {
  double empirical_mean = 0;
  double predicted = 0;
  double abs_gap = 0;
  double std_error = 0;
  std::size_t members = 0;
};

/// Averages sum_j Phi(x_j) over members; each inner list holds one member's
/// signed scaled ordinates.
DensityReport compare_density(const std::vector<std::vector<double>>& scaled_points, KernelKind kind,
                              const TestFunction& phi, bool include_central_zero);

}  // namespace fsl
