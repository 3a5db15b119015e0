#include "qcorr/symmetry.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qcorr {

namespace {

double relative_residual(const Matrix& residual, const Matrix& reference) {
  return max_abs(residual) / std::max(max_abs(reference), 1e-300);
}

/// Per-slot parities for the theorem verifiers; throws when any observable
/// lacks a definite parity.
std::vector<int> required_parities(const SymmetryTransform& tr,
                                   const std::vector<std::string>& observables,
                                   const CorrelationEngine& engine, double tol) {
  std::vector<int> parities;
  parities.reserve(observables.size());
  for (const std::string& label : observables) {
    auto parity = observable_parity(tr, engine.observable(label), tol);
    if (!parity) {
      throw std::invalid_argument("observable '" + label +
                                  "' has no definite parity under the " +
                                  std::string(1, kind_letter(tr.kind())) +
                                  "-transform");
    }
    parities.push_back(parity->value);
  }
  return parities;
}

int product(const std::vector<int>& values) {
  int p = 1;
  for (int v : values) p *= v;
  return p;
}

void require_symmetric(const SymmetryTransform& tr, const CorrelationEngine& engine) {
  if (!check_symmetry(tr, engine.hamiltonian(), engine.state())) {
    throw std::invalid_argument(
        std::string("system is not ") + kind_letter(tr.kind()) +
        "-symmetric under the supplied transform");
  }
}

void require_stationary(const CorrelationEngine& engine) {
  if (engine.stationarity_residual() > 1e-10) {
    throw std::invalid_argument(
        "initial state is not stationary ([rho, H] != 0)");
  }
}

std::vector<double> negated(const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(-t);
  return out;
}

TheoremReport make_report(int theorem, const Permutation& sigma,
                          const std::vector<double>& times, Complex left,
                          Complex right, double tol) {
  TheoremReport report;
  report.theorem = theorem;
  report.sigma_label = sigma.trace_string();
  report.times = times;
  report.left = left;
  report.right = right;
  report.max_deviation = std::abs(left - right);
  report.tolerance = tol;
  report.pass = report.max_deviation <= tol;
  return report;
}

}  // namespace

char kind_letter(SymmetryKind k) {
  switch (k) {
    case SymmetryKind::C:
      return 'C';
    case SymmetryKind::T:
      return 'T';
    case SymmetryKind::S:
      return 'S';
  }
  return '?';
}

SymmetryTransform::SymmetryTransform(SymmetryKind kind, Matrix m)
    : kind_(kind), m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw std::invalid_argument("SymmetryTransform: matrix must be square");
  }
  const int d = static_cast<int>(m_.rows());
  const double scale = max_abs(m_);
  if (!(scale > 0.0) || !m_.allFinite()) {
    throw std::invalid_argument("SymmetryTransform: matrix entries invalid");
  }
  Eigen::PartialPivLU<Matrix> lu(m_);
  // Scale-normalized |det|: log|det(M/scale)| must clear the singularity
  // threshold. Computed in log space to survive large dimensions.
  double log_abs_det = 0.0;
  for (int i = 0; i < d; ++i) {
    const double u = std::abs(lu.matrixLU()(i, i));
    if (u == 0.0) {
      throw std::invalid_argument("SymmetryTransform: matrix is singular");
    }
    log_abs_det += std::log(u);
  }
  if (log_abs_det - d * std::log(scale) <= std::log(1e-12)) {
    throw std::invalid_argument(
        "SymmetryTransform: matrix is numerically singular");
  }
  inv_ = lu.inverse();
  if (!inv_.allFinite()) {
    throw std::invalid_argument("SymmetryTransform: inverse is not finite");
  }
}

bool check_symmetry(const SymmetryTransform& tr, const QuantumOperator& h,
                    const DensityMatrix& rho, double tol) {
  if (tr.dim() != h.dim() || tr.dim() != rho.dim()) {
    throw std::invalid_argument("check_symmetry: dimension mismatch");
  }
  const Matrix& hm = h.matrix();
  const Matrix& rm = rho.matrix();
  Matrix h_image, rho_image;
  switch (tr.kind()) {
    case SymmetryKind::C:
      h_image = tr.conjugate(hm.transpose());
      rho_image = tr.conjugate(rm.transpose());
      break;
    case SymmetryKind::T:
      h_image = tr.conjugate(hm.conjugate());
      rho_image = tr.conjugate(rm.conjugate());
      break;
    case SymmetryKind::S:
      h_image = tr.conjugate(hm);
      rho_image = tr.conjugate(rm);
      break;
  }
  const double h_sign = tr.kind() == SymmetryKind::T ? +1.0 : -1.0;
  return relative_residual(h_image - h_sign * hm, hm) <= tol &&
         relative_residual(rho_image - rm, rm) <= tol;
}

std::optional<Parity> observable_parity(const SymmetryTransform& tr,
                                        const QuantumOperator& b, double tol) {
  if (tr.dim() != b.dim()) {
    throw std::invalid_argument("observable_parity: dimension mismatch");
  }
  if (!b.is_hermitian()) {
    throw std::invalid_argument("observable_parity: B must be Hermitian");
  }
  const Matrix& bm = b.matrix();
  Matrix image;
  switch (tr.kind()) {
    case SymmetryKind::C:
      image = tr.conjugate(bm.transpose());
      break;
    case SymmetryKind::T:
      image = tr.conjugate(bm.conjugate());
      break;
    case SymmetryKind::S:
      image = tr.conjugate(bm);
      break;
  }
  if (relative_residual(image - bm, bm) <= tol) {
    return Parity{tr.kind(), +1};
  }
  if (relative_residual(image + bm, bm) <= tol) {
    return Parity{tr.kind(), -1};
  }
  return std::nullopt;
}

SymmetryTransform compose_s(const SymmetryTransform& c,
                            const SymmetryTransform& t,
                            const QuantumOperator& h, const DensityMatrix& rho,
                            double tol) {
  if (c.kind() != SymmetryKind::C || t.kind() != SymmetryKind::T) {
    throw std::invalid_argument("compose_s: expected a C and a T transform");
  }
  if (c.dim() != t.dim()) {
    throw std::invalid_argument("compose_s: transform dimensions differ");
  }
  SymmetryTransform s(SymmetryKind::S, c.matrix() * t.inverse());
  if (!check_symmetry(s, h, rho, tol)) {
    throw std::invalid_argument(
        "compose_s: composed transform fails the S-symmetry check "
        "(is the state S-symmetric?)");
  }
  return s;
}

Selection selection_rule(const EtaVector& eta, const std::vector<int>& alphas) {
  if (static_cast<int>(alphas.size()) != eta.order()) {
    throw std::invalid_argument("selection_rule: alpha count differs from order");
  }
  int alpha_product = 1;
  for (int a : alphas) {
    if (a != 1 && a != -1) {
      throw std::invalid_argument("selection_rule: parities must be +-1");
    }
    alpha_product *= a;
  }
  return eta.sign_product() * alpha_product == -1 ? Selection::Forbidden
                                                  : Selection::Allowed;
}

TheoremReport verify_theorem1(const Permutation& sigma,
                              const std::vector<double>& times,
                              const std::vector<std::string>& observables,
                              const SymmetryTransform& c,
                              const CorrelationEngine& engine, double tol) {
  if (c.kind() != SymmetryKind::C) {
    throw std::invalid_argument("verify_theorem1: transform kind must be C");
  }
  require_symmetric(c, engine);
  const std::vector<int> alphas = required_parities(c, observables, engine, tol);

  const Complex left = engine.wightman_raw(reverse_sigma(sigma), observables, times);
  const Complex right =
      engine.wightman_raw(sigma, observables, times) * Complex(product(alphas), 0.0);
  engine.clear_scratch();
  return make_report(1, sigma, times, left, right, tol);
}

TheoremReport verify_theorem2(const Permutation& sigma,
                              const std::vector<double>& times,
                              const std::vector<std::string>& observables,
                              const SymmetryTransform& t,
                              const CorrelationEngine& engine, double tol) {
  if (t.kind() != SymmetryKind::T) {
    throw std::invalid_argument("verify_theorem2: transform kind must be T");
  }
  require_symmetric(t, engine);
  require_stationary(engine);
  const std::vector<int> betas = required_parities(t, observables, engine, tol);

  const Complex left = engine.wightman_raw(sigma, observables, times);
  const Complex right =
      engine.wightman_raw(reverse_sigma(sigma), observables, negated(times)) *
      Complex(product(betas), 0.0);
  engine.clear_scratch();
  return make_report(2, sigma, times, left, right, tol);
}

TheoremReport verify_theorem3(const Permutation& sigma,
                              const std::vector<double>& times,
                              const std::vector<std::string>& observables,
                              const SymmetryTransform& s,
                              const CorrelationEngine& engine, double tol) {
  if (s.kind() != SymmetryKind::S) {
    throw std::invalid_argument("verify_theorem3: transform kind must be S");
  }
  require_symmetric(s, engine);
  require_stationary(engine);
  const std::vector<int> gammas = required_parities(s, observables, engine, tol);

  const Complex left = engine.wightman_raw(sigma, observables, times);
  const Complex right =
      engine.wightman_raw(sigma, observables, negated(times)) *
      Complex(product(gammas), 0.0);
  engine.clear_scratch();
  return make_report(3, sigma, times, left, right, tol);
}

}  // namespace qcorr
