#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <memory>

namespace qcorr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Largest supported chain length (dim = 2^12 = 4096).
inline constexpr int kMaxSites = 12;

/// Relative tolerance used when a Hermiticity claim is verified.
inline constexpr double kHermitianTol = 1e-12;

/// Largest entry magnitude; 0 for an empty matrix.
double max_abs(const Matrix& m);

/// Dense operator on an N-spin Hilbert space.
///
/// Conventions fixed for the whole library:
///   * the single-spin basis makes sigma^z diagonal and sigma^x real;
///   * site 1 is the leftmost (most significant) Kronecker factor.
///
/// The matrix is immutable and shared between copies; the address of the
/// shared storage serves as the identity token for spectral caching.
class QuantumOperator {
 public:
  /// Wraps a dim x dim matrix, dim a power of two <= 4096. If `hermitian`
  /// is set the claim is verified: max|M - M^dagger| <= 1e-12 max|M|.
  explicit QuantumOperator(Matrix m, bool hermitian = false);

  int dim() const { return static_cast<int>(mat_->rows()); }
  int sites() const { return sites_; }
  const Matrix& matrix() const { return *mat_; }
  bool is_hermitian() const { return hermitian_; }

  /// Identity of the shared matrix storage (stable across copies).
  const void* token() const { return mat_.get(); }
  std::shared_ptr<const Matrix> shared_matrix() const { return mat_; }

 private:
  std::shared_ptr<const Matrix> mat_;
  int sites_;
  bool hermitian_;
};

/// A validated state: Hermitian within 1e-12, unit trace within 1e-12,
/// smallest eigenvalue >= -1e-10. Construction is the validation.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho);

  int dim() const { return op_.dim(); }
  int sites() const { return op_.sites(); }
  const Matrix& matrix() const { return op_.matrix(); }
  const QuantumOperator& as_operator() const { return op_; }

 private:
  QuantumOperator op_;
};

/// Eigendecomposition of a Hermitian operator, validated on construction
/// (reconstruction within 1e-10 of the spectral radius, unitary eigenbasis
/// within 1e-10). Provides the propagators e^{+-iHt} used everywhere.
class SpectralDecomposition {
 public:
  explicit SpectralDecomposition(const QuantumOperator& h);

  const RealVector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  const void* source_token() const { return source_.get(); }

  /// e^{-iHt}
  Matrix propagator(double t) const;
  /// e^{+iHt} b e^{-iHt}
  Matrix evolve(const Matrix& b, double t) const;

 private:
  RealVector eigenvalues_;
  Matrix eigenvectors_;
  // Pins the diagonalized matrix: while this decomposition lives, no other
  // allocation can reuse the source address, so the token stays unambiguous.
  std::shared_ptr<const Matrix> source_;
};

/// Process-wide spectral cache, keyed on the operator's identity token.
/// Thread-safe, FIFO-bounded; concurrent misses on the same operator may
/// duplicate the diagonalization but never corrupt the result.
std::shared_ptr<const SpectralDecomposition> spectral(const QuantumOperator& h);

enum class PauliAxis { X, Y, Z, I };

PauliAxis parse_axis(char c);  // accepts x/y/z/i, case-insensitive

/// Kronecker product, a (rows x cols) blocks of b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Product of single-site Pauli factors, identity on unlisted sites.
/// Sites are 1-based and assembled in ascending order (site 1 leftmost).
QuantumOperator pauli_string(int n_sites, const std::map<int, PauliAxis>& factors);

/// Transverse-field Ising chain
///   H = -field * sum_j sigma^z_j - coupling * sum_j sigma^x_j sigma^x_{j+1},
/// with site N+1 identified with site 1 when periodic. Requires n_sites >= 2.
/// The result is assembled as the literal sum of its pauli_string terms.
QuantumOperator build_tfim(int n_sites, double coupling, bool periodic,
                           double field = 1.0);

/// Heisenberg picture: e^{+iHt} b e^{-iHt}. H must be Hermitian; its
/// decomposition is taken from the spectral cache.
QuantumOperator heisenberg_evolve(const QuantumOperator& b,
                                  const QuantumOperator& h, double t);

/// exp(-beta H)/Z for Hermitian H, beta >= 0. beta = 0 gives I/dim.
DensityMatrix thermal_state(const QuantumOperator& h, double beta);

/// The particle-hole-symmetric product state
///   prod_l [ I_{2l} (sigma^x_{2l-1} + I)/2 ],
/// i.e. (sigma^x + I)/2 on odd sites and I/2 on even sites. n_sites even.
DensityMatrix product_state_c(int n_sites);

/// (1/sqrt(N)) sum_j sigma^z_j; Hermitian and traceless.
QuantumOperator collective_z(int n_sites);

}  // namespace qcorr
