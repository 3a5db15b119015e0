#include "qcorr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace qcorr {

namespace {

void validate_label_vectors(int n, const std::vector<double>& times,
                            const std::vector<std::string>& observables,
                            bool strictly_increasing) {
  if (static_cast<int>(times.size()) != n ||
      static_cast<int>(observables.size()) != n) {
    throw std::invalid_argument(
        "correlation spec: times and observables must both have length n");
  }
  for (double t : times) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("correlation spec: non-finite time");
    }
  }
  if (strictly_increasing) {
    for (int i = 1; i < n; ++i) {
      if (!(times[i - 1] < times[i])) {
        throw std::invalid_argument(
            "correlation spec: times must be strictly increasing");
      }
    }
  }
}

// Tr[a * x] without forming the product.
Complex trace_product(const Matrix& a, const Matrix& x) {
  return a.cwiseProduct(x.transpose()).sum();
}

Matrix super_matrix(const Matrix& b, EtaSign sign, const Matrix& a) {
  if (b.rows() != a.rows() || b.cols() != a.cols()) {
    throw std::invalid_argument("apply_super: dimension mismatch");
  }
  const Matrix ba = b * a;
  const Matrix ab = a * b;
  if (sign == EtaSign::Plus) return (ba + ab) / 2.0;
  return Complex(0.0, -1.0) * (ba - ab);
}

}  // namespace

WightmanSpec::WightmanSpec(Permutation sigma_, std::vector<double> times_,
                           std::vector<std::string> observables_)
    : sigma(std::move(sigma_)),
      times(std::move(times_)),
      observables(std::move(observables_)) {
  validate_label_vectors(sigma.order(), times, observables,
                         /*strictly_increasing=*/true);
}

CtocSpec::CtocSpec(EtaVector eta_, std::vector<double> times_,
                   std::vector<std::string> observables_)
    : eta(std::move(eta_)),
      times(std::move(times_)),
      observables(std::move(observables_)) {
  validate_label_vectors(eta.order(), times, observables,
                         /*strictly_increasing=*/true);
}

int SweepTemplate::order() const {
  if (const auto* eta = std::get_if<EtaVector>(&correlation)) return eta->order();
  return std::get<Permutation>(correlation).order();
}

std::string SweepTemplate::default_label() const {
  if (const auto* eta = std::get_if<EtaVector>(&correlation)) {
    return "C:" + eta->display();
  }
  return "W:" + std::get<Permutation>(correlation).trace_string();
}

CorrelationEngine::CorrelationEngine(
    QuantumOperator h, DensityMatrix rho,
    std::map<std::string, QuantumOperator> observables)
    : h_(std::move(h)), rho_(std::move(rho)), observables_(std::move(observables)) {
  if (!h_.is_hermitian()) {
    throw std::invalid_argument("CorrelationEngine: H must be Hermitian");
  }
  if (h_.dim() != rho_.dim()) {
    throw std::invalid_argument("CorrelationEngine: H and rho dimensions differ");
  }
  for (const auto& [label, op] : observables_) {
    if (op.dim() != h_.dim()) {
      throw std::invalid_argument("CorrelationEngine: observable '" + label +
                                  "' has mismatched dimension");
    }
    if (!op.is_hermitian()) {
      throw std::invalid_argument("CorrelationEngine: observable '" + label +
                                  "' must be Hermitian");
    }
  }
  spectral_ = spectral(h_);
}

const QuantumOperator& CorrelationEngine::observable(const std::string& label) const {
  auto it = observables_.find(label);
  if (it == observables_.end()) {
    throw std::invalid_argument("CorrelationEngine: unknown observable '" +
                                label + "'");
  }
  return it->second;
}

Matrix CorrelationEngine::evolve_matrix(const std::string& label,
                                        double t) const {
  const QuantumOperator& base = observable(label);
  if (t == 0.0) return base.matrix();
  const Matrix* tilde = nullptr;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = eigenbasis_.find(label);
    if (it != eigenbasis_.end()) tilde = &it->second;
  }
  const Matrix& v = spectral_->eigenvectors();
  if (!tilde) {
    Matrix fresh = v.adjoint() * base.matrix() * v;
    std::lock_guard<std::mutex> lock(cache_mutex_);
    tilde = &eigenbasis_.emplace(label, std::move(fresh)).first->second;
  }
  // B(t)_ij in the eigenbasis is e^{i(E_i - E_j)t} B~_ij.
  const auto& eig = spectral_->eigenvalues();
  const int d = static_cast<int>(eig.size());
  Eigen::VectorXcd phases(d);
  for (int i = 0; i < d; ++i) phases[i] = std::exp(Complex(0.0, eig[i] * t));
  Matrix twisted(d, d);
  for (int j = 0; j < d; ++j) {
    const Complex pj = std::conj(phases[j]);
    for (int i = 0; i < d; ++i) {
      twisted(i, j) = phases[i] * pj * (*tilde)(i, j);
    }
  }
  return v * twisted * v.adjoint();
}

QuantumOperator CorrelationEngine::evolved(const std::string& label,
                                           double t) const {
  const CacheKey key{label, t};
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = pinned_.find(key); it != pinned_.end()) return it->second;
    if (auto it = scratch_.find(key); it != scratch_.end()) return it->second;
  }
  QuantumOperator result(evolve_matrix(label, t),
                         observable(label).is_hermitian());
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = scratch_.emplace(key, std::move(result));
  return it->second;
}

void CorrelationEngine::pin(const std::string& label, double t) const {
  const CacheKey key{label, t};
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (pinned_.count(key)) return;
  }
  QuantumOperator result(evolve_matrix(label, t),
                         observable(label).is_hermitian());
  std::lock_guard<std::mutex> lock(cache_mutex_);
  pinned_.emplace(key, std::move(result));
}

void CorrelationEngine::clear_scratch() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  scratch_.clear();
}

Complex CorrelationEngine::trace_string_value(
    const Permutation& sigma, const std::vector<std::string>& observables,
    const std::vector<double>& times) const {
  const int n = sigma.order();
  validate_label_vectors(n, times, observables, /*strictly_increasing=*/false);
  // Right-to-left from rho: X <- B_{sigma(i)}(t_{sigma(i)}) X, the last
  // factor folded into the trace.
  Matrix x = rho_.matrix();
  for (int i = 1; i < n; ++i) {
    const int slot = sigma.image(i);
    const QuantumOperator b = evolved(observables[slot - 1], times[slot - 1]);
    x = (b.matrix() * x).eval();
  }
  const int top = sigma.image(n);
  const QuantumOperator b_top = evolved(observables[top - 1], times[top - 1]);
  return trace_product(b_top.matrix(), x);
}

Complex CorrelationEngine::wightman(const WightmanSpec& spec) const {
  return trace_string_value(spec.sigma, spec.observables, spec.times);
}

Complex CorrelationEngine::wightman_raw(
    const Permutation& sigma, const std::vector<std::string>& observables,
    const std::vector<double>& times) const {
  return trace_string_value(sigma, observables, times);
}

double CorrelationEngine::real_checked(Complex value, const char* what) const {
  if (std::abs(value.imag()) > kRealityTol) {
    throw std::runtime_error(std::string(what) +
                             ": imaginary residue " + std::to_string(value.imag()) +
                             " exceeds tolerance (non-Hermitian input or bug)");
  }
  return value.real();
}

Matrix CorrelationEngine::super_prefix(const EtaVector& eta,
                                       const std::vector<std::string>& observables,
                                       const std::vector<double>& times,
                                       int count) const {
  Matrix x = rho_.matrix();
  for (int j = 1; j <= count; ++j) {
    const QuantumOperator b = evolved(observables[j - 1], times[j - 1]);
    x = super_matrix(b.matrix(), eta.sign(j), x);
  }
  return x;
}

double CorrelationEngine::ctoc_direct(const CtocSpec& spec) const {
  const int n = spec.eta.order();
  const Matrix x = super_prefix(spec.eta, spec.observables, spec.times, n - 1);
  const QuantumOperator top = evolved(spec.observables[n - 1], spec.times[n - 1]);
  // Tr[B^+_n X] collapses to Tr[B_n X].
  return real_checked(trace_product(top.matrix(), x), "ctoc_direct");
}

double CorrelationEngine::ctoc_via_expansion(const CtocSpec& spec) const {
  Complex sum{0.0, 0.0};
  for (const ExpansionTerm& term : expand_ctoc(spec.eta)) {
    sum += term.coeff *
           trace_string_value(term.sigma, spec.observables, spec.times);
  }
  return real_checked(sum, "ctoc_via_expansion");
}

SweepResult CorrelationEngine::sweep(const std::vector<SweepTemplate>& templates,
                                     const std::string& axis_name,
                                     const std::vector<double>& grid) const {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) {
      throw std::invalid_argument("sweep: grid must be strictly increasing");
    }
  }

  SweepResult result;
  result.axis = axis_name;
  result.grid = grid;
  result.series.reserve(templates.size());
  for (const SweepTemplate& tpl : templates) {
    Series s;
    s.label = tpl.label.empty() ? tpl.default_label() : tpl.label;
    s.complex_valued = std::holds_alternative<Permutation>(tpl.correlation);
    s.values.reserve(grid.size());
    result.series.push_back(std::move(s));
  }
  if (templates.empty()) return result;

  // Times that do not ride the axis are pinned across the whole sweep.
  for (const SweepTemplate& tpl : templates) {
    if (tpl.times_fn) continue;
    const int n = tpl.order();
    if (static_cast<int>(tpl.base_times.size()) != n ||
        static_cast<int>(tpl.observables.size()) != n) {
      throw std::invalid_argument(
          "sweep: template base_times/observables must have length n");
    }
    const int axis_slot = tpl.axis_slot == 0 ? n : tpl.axis_slot;
    if (axis_slot < 1 || axis_slot > n) {
      throw std::invalid_argument("sweep: axis slot outside 1..n");
    }
    for (int j = 1; j <= n; ++j) {
      if (j != axis_slot) pin(tpl.observables[j - 1], tpl.base_times[j - 1]);
    }
  }

  auto point_times = [](const SweepTemplate& tpl, double g) {
    if (tpl.times_fn) return tpl.times_fn(g);
    std::vector<double> times = tpl.base_times;
    const int axis_slot = tpl.axis_slot == 0 ? tpl.order() : tpl.axis_slot;
    times[axis_slot - 1] = g;
    return times;
  };

  // The superoperator nest below the axis slot never changes across the
  // grid; fold it once so a CTOC point costs one evolution and a trace.
  std::vector<std::optional<Matrix>> prefixes(templates.size());
  std::vector<int> prefix_counts(templates.size(), 0);
  for (std::size_t k = 0; k < templates.size(); ++k) {
    const SweepTemplate& tpl = templates[k];
    const auto* eta = std::get_if<EtaVector>(&tpl.correlation);
    if (!eta || tpl.times_fn) continue;
    const int n = tpl.order();
    const int axis_slot = tpl.axis_slot == 0 ? n : tpl.axis_slot;
    prefix_counts[k] = axis_slot - 1;
    prefixes[k] = super_prefix(*eta, tpl.observables, tpl.base_times,
                               prefix_counts[k]);
  }

  for (double g : grid) {
    for (std::size_t k = 0; k < templates.size(); ++k) {
      const SweepTemplate& tpl = templates[k];
      const std::vector<double> times = point_times(tpl, g);
      for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i - 1] < times[i])) {
          throw std::invalid_argument(
              "sweep: grid point " + std::to_string(g) +
              " violates the time ordering of template '" +
              result.series[k].label + "'");
        }
      }
      Complex value;
      if (const auto* eta = std::get_if<EtaVector>(&tpl.correlation)) {
        const int n = eta->order();
        Matrix x;
        if (prefixes[k]) {
          x = *prefixes[k];
          for (int j = prefix_counts[k] + 1; j <= n - 1; ++j) {
            const QuantumOperator b = evolved(tpl.observables[j - 1], times[j - 1]);
            x = super_matrix(b.matrix(), eta->sign(j), x);
          }
        } else {
          x = super_prefix(*eta, tpl.observables, times, n - 1);
        }
        const QuantumOperator top = evolved(tpl.observables[n - 1], times[n - 1]);
        value = real_checked(trace_product(top.matrix(), x), "sweep");
      } else {
        value = wightman(
            WightmanSpec(std::get<Permutation>(tpl.correlation), times,
                         tpl.observables));
      }
      if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw std::runtime_error("sweep: non-finite correlation value");
      }
      result.series[k].values.push_back(value);
    }
    clear_scratch();
  }
  return result;
}

double CorrelationEngine::stationarity_residual() const {
  const Matrix& h = h_.matrix();
  const Matrix& rho = rho_.matrix();
  const double scale = std::max(max_abs(h), 1e-300);
  return max_abs(rho * h - h * rho) / scale;
}

QuantumOperator apply_super(const QuantumOperator& b, EtaSign sign,
                            const QuantumOperator& a) {
  const bool hermitian_out = b.is_hermitian() && a.is_hermitian();
  return QuantumOperator(super_matrix(b.matrix(), sign, a.matrix()),
                         hermitian_out);
}

}  // namespace qcorr
