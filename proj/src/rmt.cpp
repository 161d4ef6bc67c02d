#include "fsl/rmt.hpp"

#include <algorithm>
#include <cmath>

#include "fsl/parallel.hpp"

namespace fsl {

int HaarFamily::dim() const {
  switch (kind) {
    case ClassicalFamily::Unitary: return N;
    case ClassicalFamily::SOEven: return 2 * N;
    case ClassicalFamily::SOOdd: return 2 * N + 1;
    case ClassicalFamily::USp: return 2 * N;
  }
  return N;
}

std::string HaarFamily::name() const {
  switch (kind) {
    case ClassicalFamily::Unitary: return "U(" + std::to_string(N) + ")";
    case ClassicalFamily::SOEven: return "SO(" + std::to_string(2 * N) + ")";
    case ClassicalFamily::SOOdd: return "SO(" + std::to_string(2 * N + 1) + ")";
    case ClassicalFamily::USp: return "USp(" + std::to_string(2 * N) + ")";
  }
  return "?";
}

namespace {

Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

Eigen::MatrixXd haar_special_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  // O(n) = SO(n) u SO(n)·diag(-1, 1, ..., 1); right translation by the
  // fixed reflection carries the Haar measure of one coset onto the other.
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

// Quaternionic Gram-Schmidt. Column k is u_k and column N+k is -J conj(u_k),
// so every output has the block shape [[A, -conj(B)], [B, conj(A)]].
Eigen::MatrixXcd haar_symplectic(int N, std::mt19937_64& rng) {
  const int n = 2 * N;
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
  auto partner = [N](const Eigen::VectorXcd& u) {
    Eigen::VectorXcd v(2 * N);
    v.head(N) = -u.tail(N).conjugate();
    v.tail(N) = u.head(N).conjugate();
    return v;
  };
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXcd u(n);
    for (int i = 0; i < n; ++i) u(i) = cplx(g(rng), g(rng));
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < k; ++j) {
        u -= q.col(j) * q.col(j).dot(u);
        u -= q.col(N + j) * q.col(N + j).dot(u);
      }
    }
    u.normalize();
    q.col(k) = u;
    q.col(N + k) = partner(u);
  }
  return q;
}

constexpr double snap_tol = 1e-8;

double snap(double t) {
  if (t < snap_tol) return 0.0;
  if (pi - t < snap_tol) return pi;
  return t;
}

// Eigenangles in [0, pi] of a matrix whose spectrum is closed under
// conjugation, obtained from the Hermitian part (eigenvalues cos(theta)).
std::vector<double> hermitian_part_angles(const HaarFamily& fam, const Eigen::MatrixXcd& g) {
  const int n = fam.dim();
  std::vector<double> c(n);
  if (fam.kind == ClassicalFamily::USp) {
    const Eigen::MatrixXcd h = (g + g.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success) {
      for (int i = 0; i < n; ++i) c[i] = es.eigenvalues()(i);
    } else {
      // The tridiagonal QL step occasionally stalls on these doubly degenerate
      // spectra. The Schur form of g itself is not affected.
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ce(g, false);
      if (ce.info() != Eigen::Success) throw Error("eigen_angles: no eigen solver converged");
      for (int i = 0; i < n; ++i) c[i] = ce.eigenvalues()(i).real();
    }
  } else {
    Eigen::MatrixXd gr = g.real();
    Eigen::MatrixXd h = (gr + gr.transpose()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("eigen_angles: symmetric solver did not converge");
    for (int i = 0; i < n; ++i) c[i] = es.eigenvalues()(i);
  }
  std::sort(c.begin(), c.end(), std::greater<>());
  if (fam.kind == ClassicalFamily::SOOdd) c.erase(c.begin());  // the forced eigenvalue 1
  std::vector<double> theta(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) theta[i] = std::acos(std::clamp(c[i], -1.0, 1.0));
  std::vector<double> out(theta.size() / 2);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = snap(0.5 * (theta[2 * j] + theta[2 * j + 1]));
  return out;
}

}  // namespace

Eigen::MatrixXcd haar_matrix(const HaarFamily& fam, std::mt19937_64& rng) {
  require(fam.N >= 1, "haar_matrix: N must be positive");
  switch (fam.kind) {
    case ClassicalFamily::Unitary: return haar_unitary(fam.N, rng);
    case ClassicalFamily::SOEven:
    case ClassicalFamily::SOOdd: return haar_special_orthogonal(fam.dim(), rng).cast<cplx>();
    case ClassicalFamily::USp: return haar_symplectic(fam.N, rng);
  }
  throw ValidationError("haar_matrix: unknown family");
}

HaarSample sample_haar(const HaarFamily& fam, std::uint64_t seed) {
  require(fam.N >= 2, "sample_haar: N >= 2 required");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fam.kind), static_cast<std::uint32_t>(fam.N)};
  std::mt19937_64 rng(seq);
  return {fam, haar_matrix(fam, rng), seed};
}

std::vector<double> eigen_angles(const HaarSample& s) {
  if (s.family.kind == ClassicalFamily::Unitary) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(s.matrix, false);
    if (es.info() != Eigen::Success) throw Error("eigen_angles: complex solver did not converge");
    std::vector<double> out(s.family.N);
    for (int i = 0; i < s.family.N; ++i) {
      double a = std::arg(es.eigenvalues()(i));
      if (a < 0) a += two_pi;
      if (a >= two_pi) a = 0;
      out[i] = a;
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  return hermitian_part_angles(s.family, s.matrix);
}

std::vector<double> spectrum_angles(const HaarFamily& fam, const Eigen::MatrixXcd& g) {
  std::vector<double> out;
  if (fam.kind == ClassicalFamily::Unitary) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g, false);
    for (int i = 0; i < fam.N; ++i) out.push_back(std::arg(es.eigenvalues()(i)));
    return out;
  }
  for (double t : hermitian_part_angles(fam, g)) {
    out.push_back(t);
    out.push_back(-t);
  }
  if (fam.kind == ClassicalFamily::SOOdd) out.push_back(0.0);
  return out;
}

double forced_eigenvalue_residual(const Eigen::MatrixXcd& g) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(g.real(), false);
  double best = 1e300;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    best = std::min(best, std::abs(es.eigenvalues()(i) - cplx(1.0, 0.0)));
  return best;
}

double scaling_constant(const HaarFamily& fam) {
  const double N = fam.N;
  switch (fam.kind) {
    case ClassicalFamily::Unitary: return N / two_pi;
    case ClassicalFamily::SOEven: return (N - 0.5) / pi;
    case ClassicalFamily::SOOdd: return N / pi;
    case ClassicalFamily::USp: return (N + 0.5) / pi;
  }
  return 1.0;
}

ScaledAngles scaled_low_angles(const HaarSample& s, int k) {
  require(k >= 0 && k <= s.family.N, "scaled_low_angles: k must not exceed N");
  const auto angles = eigen_angles(s);
  ScaledAngles out;
  out.scaling_constant = scaling_constant(s.family);
  out.removed_forced_eigenvalue = s.family.kind == ClassicalFamily::SOOdd;
  out.values.reserve(k);
  for (int i = 0; i < k; ++i) out.values.push_back(angles[i] * out.scaling_constant);
  return out;
}

KernelKind limit_kernel(ClassicalFamily kind) {
  switch (kind) {
    case ClassicalFamily::Unitary: return KernelKind::UnitaryK;
    case ClassicalFamily::SOEven: return KernelKind::EvenOrthK;
    case ClassicalFamily::SOOdd:
    case ClassicalFamily::USp: return KernelKind::OddOrSympK;
  }
  return KernelKind::UnitaryK;
}

std::vector<double> signed_scaled_angles(const HaarSample& s) {
  const double c = scaling_constant(s.family);
  std::vector<double> out;
  for (double a : eigen_angles(s)) {
    if (s.family.kind == ClassicalFamily::Unitary) {
      out.push_back((a > pi ? a - two_pi : a) * c);
    } else {
      out.push_back(a * c);
      out.push_back(-a * c);
    }
  }
  return out;
}

DensityReport rmt_one_level(const HaarFamily& fam, std::size_t samples, std::uint64_t seed,
                            const TestFunction& phi) {
  require(samples > 0, "rmt_one_level: at least one sample required");
  std::vector<std::vector<double>> members(samples);
  for_each_chunk(samples, 64, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) members[i] = signed_scaled_angles(sample_haar(fam, derive_seed(seed, i)));
  });
  return compare_density(members, limit_kernel(fam.kind), phi, false);
}

ScaledHistogram scaled_histogram(const HaarFamily& fam, std::size_t samples, std::uint64_t seed, int bins,
                                 double xmax) {
  require(samples > 0 && bins > 0 && xmax > 0, "scaled_histogram: samples, bins and range must be positive");
  const double width = xmax / bins;
  struct Partial {
    std::vector<double> counts;
    std::size_t forced = 0;
    Partial& operator+=(const Partial& o) {
      if (counts.empty()) counts.assign(o.counts.size(), 0.0);
      for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
      forced += o.forced;
      return *this;
    }
    Partial operator+(const Partial& o) const {
      Partial r = *this;
      return r += o;
    }
  };
  const Partial total = chunked_sum<Partial>(samples, 64, [&](std::size_t b, std::size_t e) {
    Partial part;
    part.counts.assign(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t i = b; i < e; ++i) {
      const auto smp = sample_haar(fam, derive_seed(seed, i));
      if (fam.kind == ClassicalFamily::SOOdd && forced_eigenvalue_residual(smp.matrix) < 1e-8) ++part.forced;
      const double c = scaling_constant(fam);
      for (double a : eigen_angles(smp)) {
        const double x = a * c;
        if (x < xmax) part.counts[std::min<std::size_t>(static_cast<std::size_t>(x / width), bins - 1)] += 1;
      }
    }
    return part;
  });
  ScaledHistogram h;
  h.xmax = xmax;
  h.samples = samples;
  h.forced_present = total.forced;
  const KernelKind kind = limit_kernel(fam.kind);
  for (int b = 0; b < bins; ++b) {
    const double lo = b * width;
    h.centers.push_back(lo + 0.5 * width);
    h.empirical.push_back(total.counts[b] / (static_cast<double>(samples) * width));
    // Bin average of W^(1) by the midpoint rule on 64 sub-intervals.
    double avg = 0;
    for (int j = 0; j < 64; ++j) avg += w_r(kind, {lo + (j + 0.5) * width / 64});
    h.predicted.push_back(avg / 64);
    h.linf = std::max(h.linf, std::abs(h.empirical.back() - h.predicted.back()));
  }
  return h;
}

}  // namespace fsl
