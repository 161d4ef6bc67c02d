#include <algorithm>

#include "doctest.h"
#include "fsl/densities.hpp"
#include "fsl/parallel.hpp"
#include "fsl/rmt.hpp"

using namespace fsl;

TEST_SUITE("rmt") {

TEST_CASE("Haar samples are unitary and of the right shape") {
  for (auto kind : {ClassicalFamily::Unitary, ClassicalFamily::SOEven, ClassicalFamily::SOOdd,
                    ClassicalFamily::USp}) {
    HaarFamily fam{kind, 6};
    auto s = sample_haar(fam, 42);
    const auto& g = s.matrix;
    CHECK(g.rows() == fam.dim());
    const double err = (g.adjoint() * g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).norm();
    CHECK(err < 1e-10);
    if (kind != ClassicalFamily::Unitary) CHECK(std::abs(g.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("SO(2N+1) carries the forced eigenvalue at 1") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = sample_haar(HaarFamily{ClassicalFamily::SOOdd, 5}, seed);
    CHECK(forced_eigenvalue_residual(s.matrix) < 1e-8);
    CHECK(eigen_angles(s).size() == 5);
  }
}

TEST_CASE("symplectic spectrum comes in conjugate pairs") {
  auto s = sample_haar(HaarFamily{ClassicalFamily::USp, 4}, 9);
  auto full = spectrum_angles(s.family, s.matrix);
  REQUIRE(full.size() == 8);
  std::sort(full.begin(), full.end());
  for (std::size_t i = 0; i < 4; ++i) CHECK(full[i] == doctest::Approx(-full[7 - i]).epsilon(1e-8));
}

TEST_CASE("sampling is reproducible") {
  HaarFamily fam{ClassicalFamily::SOEven, 4};
  auto a = sample_haar(fam, 5), b = sample_haar(fam, 5), c = sample_haar(fam, 6);
  CHECK(a.matrix.isApprox(b.matrix, 0));
  CHECK_FALSE(a.matrix.isApprox(c.matrix, 1e-6));
}

TEST_CASE("scaling constants and limit kernels") {
  CHECK(scaling_constant(HaarFamily{ClassicalFamily::USp, 10}) == doctest::Approx((2 * 10 + 1) / (2 * pi)));
  CHECK(scaling_constant(HaarFamily{ClassicalFamily::SOEven, 10}) == doctest::Approx((2 * 10 - 1) / (2 * pi)));
  CHECK(scaling_constant(HaarFamily{ClassicalFamily::SOOdd, 10}) == doctest::Approx((2 * 10) / (2 * pi)));
  CHECK(scaling_constant(HaarFamily{ClassicalFamily::Unitary, 10}) == doctest::Approx(10 / (2 * pi)));
  CHECK(limit_kernel(ClassicalFamily::USp) == KernelKind::OddOrSympK);
  CHECK(limit_kernel(ClassicalFamily::SOOdd) == KernelKind::OddOrSympK);
  CHECK(limit_kernel(ClassicalFamily::SOEven) == KernelKind::EvenOrthK);
}

TEST_CASE("histogram is identical for different worker counts") {
  HaarFamily fam{ClassicalFamily::USp, 8};
  set_worker_count(1);
  auto a = scaled_histogram(fam, 300, 3, 10, 4);
  set_worker_count(3);
  auto b = scaled_histogram(fam, 300, 3, 10, 4);
  set_worker_count(0);
  CHECK(a.empirical == b.empirical);
  CHECK(a.linf == b.linf);
}

TEST_CASE("one-level average on USp is close to the limit") {
  auto r = rmt_one_level(HaarFamily{ClassicalFamily::USp, 20}, 2000, 1, TestFunction{1});
  CHECK(r.predicted == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(r.empirical_mean - r.predicted) < 4 * r.std_error + 0.02);
}

}
