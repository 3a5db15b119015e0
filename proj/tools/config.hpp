#pragma once

#include "qcorr/contour.hpp"
#include "qcorr/correlation.hpp"
#include "qcorr/operators.hpp"
#include "qcorr/symmetry.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcorr::tool {

/// Invalid configuration; the message names the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  enum class Kind { Tfim, SingleSpinZ };
  Kind kind = Kind::Tfim;
  int n_sites = 8;
  double coupling = 1.5;
  bool periodic = true;
  double field = 1.0;
  /// Strength of a sigma^x_1 sigma^y_2 sigma^z_3 term that spoils the
  /// time-reversal structure; negative-control knob, 0 = off.
  double t_breaking = 0.0;
};

struct StateSpec {
  enum class Kind { ProductC, Thermal, MaximallyMixed };
  Kind kind = Kind::ProductC;
  double beta = 1.0;
};

struct ObservableSpec {
  enum class Kind { CollectiveZ, SitePauli };
  Kind kind = Kind::CollectiveZ;
  int site = 1;
  PauliAxis axis = PauliAxis::Y;
};

struct GridSpec {
  double start = 2.05;
  double stop = 8.0;
  double step = 0.05;

  std::vector<double> points() const;
};

struct CorrelationRequest {
  enum class Kind { Ctoc, Wightman };
  Kind kind = Kind::Ctoc;
  std::string label;  // eta display ("+-+") or sigma trace string ("213")
};

struct VerifyRequest {
  int theorem = 0;
  std::string sigma;          // trace string; empty in random-instance mode
  std::vector<double> times;  // explicit instance; empty -> sweep or random
  bool sweep = false;         // last time rides the grid
  int instances = 0;          // random-instance mode when > 0
  int max_order = 3;
};

struct RunConfig {
  ModelSpec model;
  StateSpec state;
  ObservableSpec observable;
  GridSpec grid;
  std::vector<double> fixed_times{0.0, 2.0};
  std::vector<CorrelationRequest> correlations;
  std::vector<VerifyRequest> verify;
  std::vector<SymmetryKind> symmetries;
  double tolerance = 1e-8;
  std::uint64_t seed = 12345;
  std::string out_csv;   // empty -> command default
  std::string out_json;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

QuantumOperator build_model(const ModelSpec& model);
DensityMatrix build_state(const StateSpec& state, const ModelSpec& model,
                          const QuantumOperator& h);
QuantumOperator build_observable(const ObservableSpec& spec, int n_sites);
std::string observable_name(const ObservableSpec& spec);

/// The transform under which the configured model carries the symmetry:
/// for the Ising chain C = prod sigma^x_{2l-1} sigma^y_{2l} (even chains)
/// and T = prod sigma^z_l; for the single-spin toy C = sigma^x, T = I.
/// S is composed as C T^{-1} and re-verified against (h, rho).
SymmetryTransform canonical_transform(SymmetryKind kind, const ModelSpec& model,
                                      const QuantumOperator& h,
                                      const DensityMatrix& rho);

}  // namespace qcorr::tool
