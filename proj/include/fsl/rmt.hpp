#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fsl/common.hpp"
#include "fsl/densities.hpp"

namespace fsl {

enum class ClassicalFamily { Unitary, SOEven, SOOdd, USp };

/// A classical compact family with its rank parameter: U(N), SO(2N),
/// SO(2N+1) or USp(2N).
struct HaarFamily {
  ClassicalFamily kind = ClassicalFamily::Unitary;
  int N = 2;

  int dim() const;
  std::string name() const;
};

struct HaarSample {
  HaarFamily family;
  Eigen::MatrixXcd matrix;
  std::uint64_t seed_tag = 0;
};

struct ScaledAngles {
  std::vector<double> values;
  double scaling_constant = 0;
  bool removed_forced_eigenvalue = false;
};

/// Draws a Haar-random matrix using the supplied generator.
Eigen::MatrixXcd haar_matrix(const HaarFamily& fam, std::mt19937_64& rng);

HaarSample sample_haar(const HaarFamily& fam, std::uint64_t seed);

/// Eigenangles near 1. For SO and USp families: the N nonnegative
/// representatives in [0, pi] of the paired spectrum (the forced eigenvalue of
/// SO(2N+1) excluded). For U(N): all N angles in [0, 2pi), sorted.
std::vector<double> eigen_angles(const HaarSample& s);

/// Full spectrum as angles in (-pi, pi], including forced eigenvalues.
std::vector<double> spectrum_angles(const HaarFamily& fam, const Eigen::MatrixXcd& g);

/// Distance from 1 of the eigenvalue of an SO(2N+1) matrix closest to 1.
double forced_eigenvalue_residual(const Eigen::MatrixXcd& g);

/// Scale factor turning angles into unit mean density near 1.
double scaling_constant(const HaarFamily& fam);

ScaledAngles scaled_low_angles(const HaarSample& s, int k);

/// Kernel of the scaling limit near 1: W_0 for U(N), W_+ for SO(2N),
/// W_- for USp(2N) and for SO(2N+1) with the forced eigenvalue removed.
KernelKind limit_kernel(ClassicalFamily kind);

/// All scaled eigenangles as signed ordinates: +-x for the self-dual
/// families, angles folded into (-pi, pi] for U(N).
std::vector<double> signed_scaled_angles(const HaarSample& s);

/// compare_density over `samples` Haar draws (seeds derived from `seed`).
DensityReport rmt_one_level(const HaarFamily& fam, std::size_t samples, std::uint64_t seed,
                            const TestFunction& phi);

struct ScaledHistogram {
  double xmax = 4;
  std::vector<double> centers, empirical, predicted;  // densities per bin
  double linf = 0;
  std::size_t samples = 0;
  std::size_t forced_present = 0;  // SO(2N+1): samples with an eigenvalue at 1
};

/// Histogram of the nonnegative scaled angles on [0, xmax] against the bin
/// averages of the limiting one-level density.
ScaledHistogram scaled_histogram(const HaarFamily& fam, std::size_t samples, std::uint64_t seed, int bins,
                                 double xmax);

}  // namespace fsl
