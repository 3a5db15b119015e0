#pragma once

#include "qcorr/contour.hpp"
#include "qcorr/operators.hpp"

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qcorr {

/// A labeled Wightman correlation W_n^sigma: observables (by registry
/// label) at strictly increasing times, traced in the order given by sigma.
struct WightmanSpec {
  Permutation sigma;
  std::vector<double> times;
  std::vector<std::string> observables;

  WightmanSpec(Permutation sigma_, std::vector<double> times_,
               std::vector<std::string> observables_);
};

/// A physical correlation C_n^eta (nested commutators/anti-commutators).
struct CtocSpec {
  EtaVector eta;
  std::vector<double> times;
  std::vector<std::string> observables;

  CtocSpec(EtaVector eta_, std::vector<double> times_,
           std::vector<std::string> observables_);
};

/// One named output column of a sweep. Real-valued series keep a zero
/// imaginary part and serialize as a single column.
struct Series {
  std::string label;
  bool complex_valued = false;
  std::vector<Complex> values;
};

/// Data carrier for a one-axis parameter sweep. NaN is rejected.
struct SweepResult {
  std::string axis;
  std::vector<double> grid;
  std::vector<Series> series;
};

/// A correlation template evaluated at every grid point of a sweep.
/// The grid value replaces base_times[axis_slot-1] (axis_slot 0 = last
/// slot); times_fn, when set, supplies the full time vector instead.
struct SweepTemplate {
  std::variant<EtaVector, Permutation> correlation;
  std::vector<std::string> observables;
  std::vector<double> base_times;
  int axis_slot = 0;
  std::function<std::vector<double>(double)> times_fn;
  std::string label;  // CSV column label; defaulted from the correlation

  int order() const;
  std::string default_label() const;
};

/// Evaluates Wightman and physical correlations for one fixed system
/// (Hamiltonian, initial state, named Hermitian observables).
///
/// ctoc_direct nests superoperators; ctoc_via_expansion sums the Wightman
/// expansion. The two routes share no arithmetic and must agree to 1e-10,
/// which the tests enforce.
///
/// Evolved observables are cached per (label, time). Pinned entries persist
/// for a sweep's fixed times; scratch entries live for one sweep point. All
/// methods are const and thread-safe.
class CorrelationEngine {
 public:
  CorrelationEngine(QuantumOperator h, DensityMatrix rho,
                    std::map<std::string, QuantumOperator> observables);

  Complex wightman(const WightmanSpec& spec) const;
  double ctoc_direct(const CtocSpec& spec) const;
  double ctoc_via_expansion(const CtocSpec& spec) const;

  /// Trace evaluation without the increasing-times requirement; slot j
  /// carries observables[j-1] at times[j-1]. The theorem verifiers use
  /// this for negated-time evaluations.
  Complex wightman_raw(const Permutation& sigma,
                       const std::vector<std::string>& observables,
                       const std::vector<double>& times) const;

  SweepResult sweep(const std::vector<SweepTemplate>& templates,
                    const std::string& axis_name,
                    const std::vector<double>& grid) const;

  /// B_label(t) = e^{+iHt} B_label e^{-iHt}, cached per (label, time).
  QuantumOperator evolved(const std::string& label, double t) const;

  /// Releases the non-pinned evolved-operator entries. Sweeps call this
  /// between grid points; long-running callers should too.
  void clear_scratch() const;

  const QuantumOperator& hamiltonian() const { return h_; }
  const DensityMatrix& state() const { return rho_; }
  const QuantumOperator& observable(const std::string& label) const;

  /// max|[rho, H]| / max|H|, the stationarity residual.
  double stationarity_residual() const;

 private:
  Complex trace_string_value(const Permutation& sigma,
                             const std::vector<std::string>& observables,
                             const std::vector<double>& times) const;
  double real_checked(Complex value, const char* what) const;
  void pin(const std::string& label, double t) const;
  Matrix evolve_matrix(const std::string& label, double t) const;
  /// rho with the superoperators of slots 1..count applied.
  Matrix super_prefix(const EtaVector& eta,
                      const std::vector<std::string>& observables,
                      const std::vector<double>& times, int count) const;

  QuantumOperator h_;
  DensityMatrix rho_;
  std::map<std::string, QuantumOperator> observables_;
  std::shared_ptr<const SpectralDecomposition> spectral_;

  using CacheKey = std::pair<std::string, double>;
  mutable std::mutex cache_mutex_;
  mutable std::map<CacheKey, QuantumOperator> pinned_;
  mutable std::map<CacheKey, QuantumOperator> scratch_;
  // V^dagger B V per label: turns each evolution into a phase twist plus
  // two rotations.
  mutable std::map<std::string, Matrix> eigenbasis_;
};

/// Superoperator channels of a Hermitian probe B:
///   + : A -> (BA + AB)/2   (noise channel; Tr[B^+ rho] = <B>)
///   - : A -> -i(BA - AB)   (drive channel)
/// Hermitian B and A give a Hermitian result.
QuantumOperator apply_super(const QuantumOperator& b, EtaSign sign,
                            const QuantumOperator& a);

/// Absolute threshold below which a forbidden correlation is accepted as
/// zero, and the floor an allowed one must reach somewhere on a sweep.
inline constexpr double kZeroThreshold = 1e-8;
inline constexpr double kNonzeroFloor = 1e-3;

/// Tolerance on the imaginary residue of a physical correlation.
inline constexpr double kRealityTol = 1e-10;

}  // namespace qcorr
