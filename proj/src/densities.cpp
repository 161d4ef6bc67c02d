#include "fsl/densities.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <span>

#include "fsl/common.hpp"
#include "fsl/parallel.hpp"

namespace fsl {

double sinc_pi(double x) {
  const double t = pi * x;
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}

double TestFunction::operator()(double x) const {
  const double s = sinc_pi(a * x);
  return a * s * s;
}

double TestFunction::transform(double xi) const { return std::max(0.0, 1.0 - std::abs(xi) / a); }

double kernel(KernelKind kind, double x, double y) {
  switch (kind) {
    case KernelKind::UnitaryK: return sinc_pi(x - y);
    case KernelKind::EvenOrthK: return sinc_pi(x - y) + sinc_pi(x + y);
    case KernelKind::OddOrSympK: return sinc_pi(x - y) - sinc_pi(x + y);
  }
  return 0.0;
}

double w_r(KernelKind kind, const std::vector<double>& points) {
  require(!points.empty(), "w_r: at least one point required");
  const auto r = static_cast<Eigen::Index>(points.size());
  if (r == 1) return kernel(kind, points[0], points[0]);
  Eigen::MatrixXd k(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) k(i, j) = kernel(kind, points[i], points[j]);
  return k.determinant();
}

double predicted_one_level(KernelKind kind, const TestFunction& phi, bool include_central_zero) {
  require(phi.a > 0 && phi.a <= 4, "predicted_one_level: support parameter must lie in (0, 4]");
  // Integral of the transform over [-1, 1].
  const double t = phi.a <= 1 ? phi.a : 2.0 - 1.0 / phi.a;
  double v = 1.0;
  if (kind == KernelKind::EvenOrthK) v += 0.5 * t;
  if (kind == KernelKind::OddOrSympK) v -= 0.5 * t;
  if (kind == KernelKind::OddOrSympK && include_central_zero) v += phi(0.0);
  return v;
}

DensityReport compare_density(const std::vector<std::vector<double>>& scaled_points, KernelKind kind,
                              const TestFunction& phi, bool include_central_zero) {
  require(!scaled_points.empty(), "compare_density: empty family");
  const std::size_t n = scaled_points.size();
  std::vector<double> vals(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (double x : scaled_points[i]) s += phi(x);
    vals[i] = s;
    sq[i] = s * s;
  }
  DensityReport r;
  r.members = n;
  r.empirical_mean = pairwise_sum(std::span<const double>(vals)) / n;
  const double m2 = pairwise_sum(std::span<const double>(sq)) / n;
  if (n > 1) r.std_error = std::sqrt(std::max(0.0, m2 - r.empirical_mean * r.empirical_mean) * n / (n - 1) / n);
  r.predicted = predicted_one_level(kind, phi, include_central_zero);
  r.abs_gap = std::abs(r.empirical_mean - r.predicted);
  return r;
}

}  // namespace fsl
