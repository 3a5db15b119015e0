#pragma once

#include "qcorr/contour.hpp"
#include "qcorr/correlation.hpp"
#include "qcorr/operators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qcorr {

enum class SymmetryKind { C, T, S };

char kind_letter(SymmetryKind k);

/// An invertible (not necessarily unitary) transform implementing a
/// generalized particle-hole (C), time-reversal (T), or chiral (S)
/// operation. Transforms are defined up to scale; every check built on
/// them is scale-invariant because the matrix and its inverse always
/// appear together.
class SymmetryTransform {
 public:
  SymmetryTransform(SymmetryKind kind, Matrix m);

  SymmetryKind kind() const { return kind_; }
  const Matrix& matrix() const { return m_; }
  const Matrix& inverse() const { return inv_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  /// M x M^{-1}
  Matrix conjugate(const Matrix& x) const { return m_ * x * inv_; }

 private:
  SymmetryKind kind_;
  Matrix m_;
  Matrix inv_;
};

/// Definite transformation sign of an observable: alpha (C), beta (T) or
/// gamma (S). Only assigned when the defining relation holds to tolerance.
struct Parity {
  SymmetryKind kind;
  int value;  // +1 or -1
};

inline constexpr double kSymmetryTol = 1e-10;

/// Whether the system (H, rho) has the claimed symmetry:
///   C: M H^T M^{-1} = -H,  M rho^T M^{-1} = rho
///   T: M H^* M^{-1} = +H,  M rho^* M^{-1} = rho
///   S: M H   M^{-1} = -H,  M rho   M^{-1} = rho
/// Residuals are measured relative to max|H| and max|rho|.
bool check_symmetry(const SymmetryTransform& tr, const QuantumOperator& h,
                    const DensityMatrix& rho, double tol = kSymmetryTol);

/// The +-1 parity of Hermitian B under the transform, or nullopt when B has
/// no definite parity (the theorems then give no constraint).
std::optional<Parity> observable_parity(const SymmetryTransform& tr,
                                        const QuantumOperator& b,
                                        double tol = kSymmetryTol);

/// S = C T^{-1}: for Hermitian H (H^T = H^*) the C and T relations compose
/// to S H S^{-1} = -H. The composition is re-verified against (h, rho) and
/// rejected if the check fails.
SymmetryTransform compose_s(const SymmetryTransform& c,
                            const SymmetryTransform& t,
                            const QuantumOperator& h, const DensityMatrix& rho,
                            double tol = kSymmetryTol);

enum class Selection { Allowed, Forbidden };

/// C-symmetry selection rule: C_n^eta vanishes identically when
/// prod_j eta_j * prod_j alpha_j = -1.
Selection selection_rule(const EtaVector& eta, const std::vector<int>& alphas);

/// Outcome of a numerical theorem verification (both sides evaluated by the
/// correlation engine). Serializes to JSON via report_json() in io.hpp.
struct TheoremReport {
  int theorem = 0;
  std::string sigma_label;
  std::vector<double> times;
  Complex left{};
  Complex right{};
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kTheoremTol = 1e-9;

/// Theorem: W_n^{sigma~} = W_n^{sigma} prod_i alpha_i for a C-symmetric
/// system and observables of definite C-parity.
TheoremReport verify_theorem1(const Permutation& sigma,
                              const std::vector<double>& times,
                              const std::vector<std::string>& observables,
                              const SymmetryTransform& c,
                              const CorrelationEngine& engine,
                              double tol = kTheoremTol);

/// Theorem: W_n^{sigma} = W_n^{sigma~}({t -> -t}) prod_j beta_j for a
/// T-symmetric system in a stationary state.
TheoremReport verify_theorem2(const Permutation& sigma,
                              const std::vector<double>& times,
                              const std::vector<std::string>& observables,
                              const SymmetryTransform& t,
                              const CorrelationEngine& engine,
                              double tol = kTheoremTol);

/// Theorem: W_n^{sigma} = W_n^{sigma}({t -> -t}) prod_i gamma_i for an
/// S-symmetric system in a stationary state.
TheoremReport verify_theorem3(const Permutation& sigma,
                              const std::vector<double>& times,
                              const std::vector<std::string>& observables,
                              const SymmetryTransform& s,
                              const CorrelationEngine& engine,
                              double tol = kTheoremTol);

}  // namespace qcorr
