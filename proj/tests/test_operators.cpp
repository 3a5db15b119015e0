#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qcorr/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace qcorr;
namespace oracle = qcorr::testing;

namespace {

double diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

}  // namespace

TEST_CASE("pauli_string single sigma^z is diag(1,-1)") {
  Matrix expected(2, 2);
  expected << 1, 0, 0, -1;
  CHECK(diff(pauli_string(1, {{1, PauliAxis::Z}}).matrix(), expected) == 0.0);
}

TEST_CASE("pauli_string empty factor map is the identity") {
  CHECK(diff(pauli_string(2, {}).matrix(), Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("pauli_string sigma^x (x) sigma^z against hand-expanded Kronecker") {
  // Site 1 leftmost: sigma^x on site 1, sigma^z on site 2.
  Matrix expected(4, 4);
  expected << 0, 0, 1, 0,
              0, 0, 0, -1,
              1, 0, 0, 0,
              0, -1, 0, 0;
  const Matrix built =
      pauli_string(2, {{1, PauliAxis::X}, {2, PauliAxis::Z}}).matrix();
  CHECK(diff(built, expected) == 0.0);
  CHECK(diff(built, oracle::brute_kron(oracle::pauli('x'), oracle::pauli('z'))) ==
        0.0);
}

TEST_CASE("pauli_string rejects bad sites and site counts") {
  CHECK_THROWS_AS(pauli_string(2, {{3, PauliAxis::X}}), std::invalid_argument);
  CHECK_THROWS_AS(pauli_string(2, {{0, PauliAxis::X}}), std::invalid_argument);
  CHECK_THROWS_AS(pauli_string(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(pauli_string(13, {}), std::invalid_argument);
}

TEST_CASE("pauli_string factors on disjoint sites commute exactly") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> site(1, 4);
  std::uniform_int_distribution<int> ax(0, 2);
  const PauliAxis axes[] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
  for (int trial = 0; trial < 30; ++trial) {
    const int s1 = site(rng);
    int s2 = site(rng);
    if (s1 == s2) s2 = s1 % 4 + 1;
    const Matrix a = pauli_string(4, {{s1, axes[ax(rng)]}}).matrix();
    const Matrix b = pauli_string(4, {{s2, axes[ax(rng)]}}).matrix();
    CHECK(max_abs(a * b - b * a) == 0.0);
  }
}

TEST_CASE("build_tfim with zero coupling decouples the spins") {
  const QuantumOperator h = build_tfim(2, 0.0, /*periodic=*/true);
  const Matrix expected = -(oracle::brute_kron(oracle::pauli('z'), oracle::pauli('i')) +
                            oracle::brute_kron(oracle::pauli('i'), oracle::pauli('z')));
  CHECK(diff(h.matrix(), expected) == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  const RealVector eig = es.eigenvalues();
  CHECK(eig[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(eig[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(eig[2] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(eig[3] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("build_tfim at the case-study size is Hermitian") {
  const QuantumOperator h = build_tfim(8, 1.5, /*periodic=*/true);
  CHECK(h.dim() == 256);
  CHECK(h.is_hermitian());
  CHECK(max_abs(h.matrix() - h.matrix().adjoint().eval()) < 1e-14);
}

TEST_CASE("build_tfim matches a term-by-term Pauli-string sum") {
  const int n = 3;
  const double lambda = 0.7;
  Matrix expected = Matrix::Zero(8, 8);
  for (int j = 1; j <= n; ++j) {
    expected -= pauli_string(n, {{j, PauliAxis::Z}}).matrix();
  }
  for (int j = 1; j <= n; ++j) {
    const int k = j % n + 1;
    expected -= lambda *
                pauli_string(n, {{j, PauliAxis::X}, {k, PauliAxis::X}}).matrix();
  }
  // Bit-exact: the builder is defined as exactly this sum.
  CHECK(diff(build_tfim(n, lambda, true).matrix(), expected) == 0.0);
}

TEST_CASE("build_tfim rejects chains shorter than two sites") {
  CHECK_THROWS_AS(build_tfim(1, 1.0, true), std::invalid_argument);
}

TEST_CASE("heisenberg_evolve at t=0 returns the operator bit-exactly") {
  const QuantumOperator h = build_tfim(3, 1.1, true);
  const QuantumOperator b = collective_z(3);
  CHECK(diff(heisenberg_evolve(b, h, 0.0).matrix(), b.matrix()) == 0.0);
}

TEST_CASE("heisenberg_evolve leaves a commuting observable alone") {
  const QuantumOperator h = pauli_string(1, {{1, PauliAxis::Z}});
  const QuantumOperator b = pauli_string(1, {{1, PauliAxis::Z}});
  CHECK(diff(heisenberg_evolve(b, h, 0.73).matrix(), b.matrix()) < 1e-13);
}

TEST_CASE("heisenberg_evolve matches the series-propagator oracle") {
  const QuantumOperator h = pauli_string(1, {{1, PauliAxis::Z}});
  const QuantumOperator b = pauli_string(1, {{1, PauliAxis::X}});
  const Matrix expected = oracle::series_evolve(h.matrix(), b.matrix(), 0.3);
  CHECK(diff(heisenberg_evolve(b, h, 0.3).matrix(), expected) < 1e-12);
}

TEST_CASE("heisenberg_evolve rejects a non-Hermitian Hamiltonian") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  const QuantumOperator h(m);
  const QuantumOperator b = pauli_string(1, {{1, PauliAxis::X}});
  CHECK_THROWS_AS(heisenberg_evolve(b, h, 1.0), std::invalid_argument);
}

TEST_CASE("heisenberg_evolve preserves eigenvalue multisets") {
  std::mt19937_64 rng(202);
  const QuantumOperator h(oracle::random_hermitian(16, rng), true);
  for (int trial = 0; trial < 100; ++trial) {
    const QuantumOperator b(oracle::random_hermitian(16, rng), true);
    const double t = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    Eigen::SelfAdjointEigenSolver<Matrix> before(b.matrix(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> after(
        heisenberg_evolve(b, h, t).matrix(), Eigen::EigenvaluesOnly);
    CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("propagators are unitary and invert cleanly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const QuantumOperator h(oracle::random_hermitian(8, rng), true);
    const double t = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
    const auto sd = spectral(h);
    const Matrix forward = sd->propagator(t);
    const Matrix backward = sd->propagator(-t);
    CHECK(diff(forward * backward, Matrix::Identity(8, 8)) < 1e-10);
    CHECK(diff(forward * forward.adjoint(), Matrix::Identity(8, 8)) < 1e-10);
  }
}

TEST_CASE("spectral cache returns the same decomposition per operator") {
  const QuantumOperator h = build_tfim(4, 1.5, true);
  const auto a = spectral(h);
  const auto b = spectral(h);
  CHECK(a.get() == b.get());
  const QuantumOperator copy = h;  // shared storage, same token
  CHECK(spectral(copy).get() == a.get());
}

TEST_CASE("thermal_state at beta=0 is maximally mixed") {
  const QuantumOperator h = build_tfim(3, 1.5, true);
  CHECK(diff(thermal_state(h, 0.0).matrix(), Matrix::Identity(8, 8) / 8.0) <
        1e-14);
}

TEST_CASE("thermal_state of a single spin matches the closed form") {
  const QuantumOperator h = pauli_string(1, {{1, PauliAxis::Z}});
  const double z = std::exp(-1.0) + std::exp(1.0);
  Matrix expected(2, 2);
  expected << std::exp(-1.0) / z, 0, 0, std::exp(1.0) / z;
  CHECK(diff(thermal_state(h, 1.0).matrix(), expected) < 1e-14);
}

TEST_CASE("thermal_state matches the series exponential and is stationary") {
  const QuantumOperator h = build_tfim(4, 1.5, true);
  const DensityMatrix rho = thermal_state(h, 1.0);
  // Independent route: normalized truncated series of exp(-beta H).
  Matrix series = oracle::taylor_expm(-h.matrix(), 80);
  series /= series.trace();
  CHECK(diff(rho.matrix(), series) < 1e-10);
  CHECK(std::abs(rho.matrix().trace() - Complex(1.0, 0.0)) < 1e-12);
  const double commutator =
      max_abs(rho.matrix() * h.matrix() - h.matrix() * rho.matrix());
  CHECK(commutator <= 1e-10 * max_abs(h.matrix()));
}

TEST_CASE("thermal_state rejects negative beta") {
  const QuantumOperator h = build_tfim(2, 1.0, true);
  CHECK_THROWS_AS(thermal_state(h, -0.5), std::invalid_argument);
}

TEST_CASE("product_state_c at two sites is projector (x) mixed") {
  const Matrix expected = oracle::brute_kron(
      (oracle::pauli('x') + Matrix::Identity(2, 2)) / 2.0,
      Matrix::Identity(2, 2) / 2.0);
  CHECK(diff(product_state_c(2).matrix(), expected) == 0.0);
}

TEST_CASE("product_state_c purity equals the brute-force value") {
  const DensityMatrix rho = product_state_c(8);
  CHECK(std::abs(rho.matrix().trace() - Complex(1.0, 0.0)) < 1e-12);
  const double purity = (rho.matrix() * rho.matrix()).trace().real();
  // One unit-purity projector per odd site, 1/2 per even site: 2^{-4}.
  CHECK(purity == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("product_state_c rejects odd site counts") {
  CHECK_THROWS_AS(product_state_c(3), std::invalid_argument);
}

TEST_CASE("collective_z single site is sigma^z") {
  CHECK(diff(collective_z(1).matrix(), oracle::pauli('z')) == 0.0);
}

TEST_CASE("collective_z spectrum at four sites") {
  const QuantumOperator b = collective_z(4);
  CHECK(std::abs(b.matrix().trace()) == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.matrix(), Eigen::EigenvaluesOnly);
  for (int i = 0; i < 16; ++i) {
    const double scaled = es.eigenvalues()[i] * 2.0;  // undo 1/sqrt(4)
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
    CHECK(std::abs(scaled) <= 4.0 + 1e-12);
  }
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("collective_z norm convention at eight sites") {
  Eigen::SelfAdjointEigenSolver<Matrix> es(collective_z(8).matrix(),
                                           Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().maxCoeff() ==
        doctest::Approx(8.0 / std::sqrt(8.0)).epsilon(1e-13));
}

TEST_CASE("QuantumOperator validates dimension and Hermiticity claims") {
  CHECK_THROWS_AS(QuantumOperator(Matrix::Zero(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(QuantumOperator(Matrix::Zero(2, 4)), std::invalid_argument);
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(QuantumOperator(skew, /*hermitian=*/true),
                  std::invalid_argument);
  CHECK_NOTHROW(QuantumOperator(skew, /*hermitian=*/false));
}

TEST_CASE("DensityMatrix validates Hermiticity, trace and positivity") {
  Matrix not_herm(2, 2);
  not_herm << 0.5, 0.1, -0.1, 0.5;
  CHECK_THROWS_AS(DensityMatrix{not_herm}, std::invalid_argument);

  CHECK_THROWS_AS(DensityMatrix{Matrix::Identity(2, 2)}, std::invalid_argument);

  Matrix negative(2, 2);
  negative << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);

  CHECK_NOTHROW(DensityMatrix{Matrix::Identity(4, 4) / 4.0});
}

TEST_CASE("SpectralDecomposition reconstructs its source") {
  std::mt19937_64 rng(5);
  const QuantumOperator h(oracle::random_hermitian(8, rng), true);
  const SpectralDecomposition sd(h);
  const Matrix rebuilt =
      sd.eigenvectors() *
      sd.eigenvalues().asDiagonal().toDenseMatrix().cast<Complex>() *
      sd.eigenvectors().adjoint();
  CHECK(diff(rebuilt, h.matrix()) < 1e-10);
  CHECK(diff(sd.eigenvectors() * sd.eigenvectors().adjoint(),
             Matrix::Identity(8, 8)) < 1e-10);
}
