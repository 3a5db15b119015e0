#include "qcorr/operators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cctype>
#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace qcorr {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(int v) {
  int s = 0;
  while ((1 << s) < v) ++s;
  return s;
}

Matrix single_site(PauliAxis axis) {
  Matrix m(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m << 0, 1, 1, 0;
      break;
    case PauliAxis::Y:
      m << 0, -kI, kI, 0;
      break;
    case PauliAxis::Z:
      m << 1, 0, 0, -1;
      break;
    case PauliAxis::I:
      m = Matrix::Identity(2, 2);
      break;
  }
  return m;
}

}  // namespace

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

QuantumOperator::QuantumOperator(Matrix m, bool hermitian)
    : hermitian_(hermitian) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("QuantumOperator: matrix must be square");
  }
  const int dim = static_cast<int>(m.rows());
  if (!is_power_of_two(dim) || dim > (1 << kMaxSites)) {
    throw std::invalid_argument(
        "QuantumOperator: dimension must be a power of two <= " +
        std::to_string(1 << kMaxSites) + ", got " + std::to_string(dim));
  }
  sites_ = log2_exact(dim);
  if (hermitian_) {
    const double scale = max_abs(m);
    const double residual = max_abs(m - m.adjoint().eval());
    if (residual > kHermitianTol * std::max(scale, 1e-300)) {
      throw std::invalid_argument(
          "QuantumOperator: Hermiticity claim violated, residual " +
          std::to_string(residual));
    }
  }
  mat_ = std::make_shared<const Matrix>(std::move(m));
}

DensityMatrix::DensityMatrix(Matrix rho)
    : op_([&rho] {
        const double scale = max_abs(rho);
        const double herm = max_abs(rho - rho.adjoint().eval());
        if (herm > 1e-12 * std::max(scale, 1e-300)) {
          throw std::invalid_argument(
              "DensityMatrix: not Hermitian, residual " + std::to_string(herm));
        }
        const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
        if (trace_err > 1e-12) {
          throw std::invalid_argument("DensityMatrix: trace differs from 1 by " +
                                      std::to_string(trace_err));
        }
        return QuantumOperator(std::move(rho), /*hermitian=*/true);
      }()) {
  // min eigenvalue >= -1e-10 exactly when rho + 1e-10 I is positive
  // semidefinite; the shifted Cholesky decides that without an iterative
  // eigensolve (which Eigen flags as non-converged on highly degenerate
  // projector states).
  const int d = op_.dim();
  const Matrix shifted = op_.matrix() + 1e-10 * Matrix::Identity(d, d);
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op_.matrix(),
                                             Eigen::EigenvaluesOnly);
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
}

SpectralDecomposition::SpectralDecomposition(const QuantumOperator& h)
    : source_(h.shared_matrix()) {
  if (!h.is_hermitian()) {
    throw std::invalid_argument(
        "SpectralDecomposition: operator must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  // Degenerate spectra can trip Eigen's convergence flag while the result
  // is still fine; the residual checks below are the actual gate.
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();

  const int d = static_cast<int>(eigenvalues_.size());
  const double radius =
      std::max(std::abs(eigenvalues_.minCoeff()), std::abs(eigenvalues_.maxCoeff()));
  const Matrix reconstructed = eigenvectors_ *
                               eigenvalues_.asDiagonal().toDenseMatrix().cast<Complex>() *
                               eigenvectors_.adjoint();
  if (max_abs(reconstructed - h.matrix()) > 1e-10 * std::max(radius, 1e-300)) {
    throw std::runtime_error("SpectralDecomposition: reconstruction residual too large");
  }
  const Matrix gram = eigenvectors_ * eigenvectors_.adjoint();
  if (max_abs(gram - Matrix::Identity(d, d)) > 1e-10) {
    throw std::runtime_error("SpectralDecomposition: eigenbasis not unitary");
  }
}

Matrix SpectralDecomposition::propagator(double t) const {
  const int d = static_cast<int>(eigenvalues_.size());
  if (t == 0.0) return Matrix::Identity(d, d);
  Eigen::VectorXcd phases(d);
  for (int i = 0; i < d; ++i) {
    phases[i] = std::exp(Complex(0.0, -eigenvalues_[i] * t));
  }
  return (eigenvectors_ * phases.asDiagonal()) * eigenvectors_.adjoint();
}

Matrix SpectralDecomposition::evolve(const Matrix& b, double t) const {
  if (t == 0.0) return b;
  const Matrix u = propagator(-t);  // e^{+iHt}
  return u * b * u.adjoint();
}

std::shared_ptr<const SpectralDecomposition> spectral(const QuantumOperator& h) {
  // Each cached decomposition pins its source matrix, so a token in the map
  // can never be a recycled address. FIFO eviction bounds the footprint;
  // holders of an evicted decomposition keep using it unharmed.
  constexpr std::size_t kCapacity = 32;
  static std::mutex mutex;
  static std::unordered_map<const void*, std::shared_ptr<const SpectralDecomposition>>
      cache;
  static std::deque<const void*> insertion_order;

  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(h.token());
    if (it != cache.end()) return it->second;
  }
  // Computed outside the lock: concurrent misses may duplicate work but
  // never block each other on a long diagonalization.
  auto fresh = std::make_shared<const SpectralDecomposition>(h);
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(h.token(), fresh);
  if (inserted) {
    insertion_order.push_back(h.token());
    while (insertion_order.size() > kCapacity) {
      cache.erase(insertion_order.front());
      insertion_order.pop_front();
    }
  }
  return it->second;
}

PauliAxis parse_axis(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'x':
      return PauliAxis::X;
    case 'y':
      return PauliAxis::Y;
    case 'z':
      return PauliAxis::Z;
    case 'i':
      return PauliAxis::I;
    default:
      throw std::invalid_argument(std::string("unknown Pauli axis '") + c + "'");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

QuantumOperator pauli_string(int n_sites,
                             const std::map<int, PauliAxis>& factors) {
  if (n_sites < 1 || n_sites > kMaxSites) {
    throw std::invalid_argument("pauli_string: site count " +
                                std::to_string(n_sites) + " outside 1.." +
                                std::to_string(kMaxSites));
  }
  for (const auto& [site, axis] : factors) {
    (void)axis;
    if (site < 1 || site > n_sites) {
      throw std::invalid_argument("pauli_string: site " + std::to_string(site) +
                                  " outside 1.." + std::to_string(n_sites));
    }
  }
  Matrix m = Matrix::Identity(1, 1);
  for (int site = 1; site <= n_sites; ++site) {
    auto it = factors.find(site);
    const PauliAxis axis = it == factors.end() ? PauliAxis::I : it->second;
    m = kron(m, single_site(axis));
  }
  return QuantumOperator(std::move(m), /*hermitian=*/true);
}

QuantumOperator build_tfim(int n_sites, double coupling, bool periodic,
                           double field) {
  if (n_sites < 2) {
    throw std::invalid_argument("build_tfim: need at least 2 sites");
  }
  if (n_sites > kMaxSites) {
    throw std::invalid_argument("build_tfim: site count exceeds " +
                                std::to_string(kMaxSites));
  }
  const int dim = 1 << n_sites;
  Matrix h = Matrix::Zero(dim, dim);
  for (int j = 1; j <= n_sites; ++j) {
    h -= field * pauli_string(n_sites, {{j, PauliAxis::Z}}).matrix();
  }
  const int last_bond = periodic ? n_sites : n_sites - 1;
  for (int j = 1; j <= last_bond; ++j) {
    const int k = j % n_sites + 1;
    h -= coupling *
         pauli_string(n_sites, {{j, PauliAxis::X}, {k, PauliAxis::X}}).matrix();
  }
  return QuantumOperator(std::move(h), /*hermitian=*/true);
}

QuantumOperator heisenberg_evolve(const QuantumOperator& b,
                                  const QuantumOperator& h, double t) {
  if (b.dim() != h.dim()) {
    throw std::invalid_argument("heisenberg_evolve: dimension mismatch");
  }
  if (!h.is_hermitian()) {
    throw std::invalid_argument("heisenberg_evolve: H must be Hermitian");
  }
  auto sd = spectral(h);
  return QuantumOperator(sd->evolve(b.matrix(), t), b.is_hermitian());
}

DensityMatrix thermal_state(const QuantumOperator& h, double beta) {
  if (beta < 0.0) {
    throw std::invalid_argument("thermal_state: beta must be >= 0");
  }
  if (!h.is_hermitian()) {
    throw std::invalid_argument("thermal_state: H must be Hermitian");
  }
  auto sd = spectral(h);
  const auto& eig = sd->eigenvalues();
  const int d = static_cast<int>(eig.size());
  const double ground = eig.minCoeff();
  Eigen::VectorXd weights(d);
  for (int i = 0; i < d; ++i) {
    weights[i] = std::exp(-beta * (eig[i] - ground));  // shift avoids overflow
  }
  weights /= weights.sum();
  Matrix rho = sd->eigenvectors() * weights.cast<Complex>().asDiagonal() *
               sd->eigenvectors().adjoint();
  // Symmetrize away the rounding skew so validation sees an exact Hermitian.
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return DensityMatrix(std::move(rho));
}

DensityMatrix product_state_c(int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw std::invalid_argument(
        "product_state_c: site count must be even and >= 2");
  }
  if (n_sites > kMaxSites) {
    throw std::invalid_argument("product_state_c: site count exceeds " +
                                std::to_string(kMaxSites));
  }
  const Matrix projector = (single_site(PauliAxis::X) + Matrix::Identity(2, 2)) / 2.0;
  const Matrix mixed = Matrix::Identity(2, 2) / 2.0;
  Matrix rho = Matrix::Identity(1, 1);
  for (int site = 1; site <= n_sites; ++site) {
    rho = kron(rho, site % 2 == 1 ? projector : mixed);
  }
  return DensityMatrix(std::move(rho));
}

QuantumOperator collective_z(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites) {
    throw std::invalid_argument("collective_z: site count " +
                                std::to_string(n_sites) + " outside 1.." +
                                std::to_string(kMaxSites));
  }
  const int dim = 1 << n_sites;
  Matrix b = Matrix::Zero(dim, dim);
  for (int j = 1; j <= n_sites; ++j) {
    b += pauli_string(n_sites, {{j, PauliAxis::Z}}).matrix();
  }
  b /= std::sqrt(static_cast<double>(n_sites));
  return QuantumOperator(std::move(b), /*hermitian=*/true);
}

}  // namespace qcorr
