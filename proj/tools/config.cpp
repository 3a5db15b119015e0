#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace qcorr::tool {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback,
                 const std::string& path) {
  const json* v = find(j, key);
  return v ? number_at(*v, path + "." + key) : fallback;
}

int integer_or(const json& j, const char* key, int fallback,
               const std::string& path) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
  return v->get<int>();
}

bool boolean_or(const json& j, const char* key, bool fallback,
                const std::string& path) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

ModelSpec parse_model(const json& j) {
  ModelSpec m;
  const std::string kind =
      find(j, "kind") ? string_at(*find(j, "kind"), "model.kind") : "tfim";
  if (kind == "tfim") {
    m.kind = ModelSpec::Kind::Tfim;
  } else if (kind == "single-spin-z") {
    m.kind = ModelSpec::Kind::SingleSpinZ;
  } else {
    fail("model.kind", "unknown model '" + kind + "'");
  }
  m.n_sites = integer_or(j, "n_sites", m.kind == ModelSpec::Kind::Tfim ? 8 : 1,
                         "model");
  m.coupling = number_or(j, "lambda", 1.5, "model");
  m.periodic = boolean_or(j, "periodic", true, "model");
  m.field = number_or(j, "field", 1.0, "model");
  m.t_breaking = number_or(j, "t_breaking", 0.0, "model");
  if (m.kind == ModelSpec::Kind::Tfim) {
    if (m.n_sites < 2 || m.n_sites > kMaxSites) {
      fail("model.n_sites", "must be in 2.." + std::to_string(kMaxSites));
    }
  } else if (m.n_sites != 1) {
    fail("model.n_sites", "single-spin-z fixes n_sites = 1");
  }
  if (m.t_breaking != 0.0 && m.n_sites < 3) {
    fail("model.t_breaking", "needs at least 3 sites");
  }
  return m;
}

StateSpec parse_state(const json& j, const ModelSpec& model) {
  StateSpec s;
  const std::string kind =
      find(j, "kind") ? string_at(*find(j, "kind"), "state.kind") : "product-c";
  if (kind == "product-c") {
    s.kind = StateSpec::Kind::ProductC;
    if (model.n_sites % 2 != 0) {
      fail("state.kind", "product-c needs an even site count");
    }
  } else if (kind == "thermal") {
    s.kind = StateSpec::Kind::Thermal;
  } else if (kind == "maximally-mixed") {
    s.kind = StateSpec::Kind::MaximallyMixed;
  } else {
    fail("state.kind", "unknown state '" + kind + "'");
  }
  s.beta = number_or(j, "beta", 1.0, "state");
  if (s.beta < 0.0) fail("state.beta", "must be >= 0");
  return s;
}

ObservableSpec parse_observable(const json& j, const ModelSpec& model) {
  ObservableSpec o;
  const std::string kind = find(j, "kind")
                               ? string_at(*find(j, "kind"), "observable.kind")
                               : "collective-z";
  if (kind == "collective-z") {
    o.kind = ObservableSpec::Kind::CollectiveZ;
  } else if (kind == "site-pauli") {
    o.kind = ObservableSpec::Kind::SitePauli;
    o.site = integer_or(j, "site", 1, "observable");
    if (o.site < 1 || o.site > model.n_sites) {
      fail("observable.site", "outside 1.." + std::to_string(model.n_sites));
    }
    const std::string axis = find(j, "axis")
                                 ? string_at(*find(j, "axis"), "observable.axis")
                                 : "y";
    if (axis.size() != 1) fail("observable.axis", "expected x, y or z");
    try {
      o.axis = parse_axis(axis[0]);
    } catch (const std::invalid_argument&) {
      fail("observable.axis", "expected x, y or z");
    }
    if (o.axis == PauliAxis::I) fail("observable.axis", "expected x, y or z");
  } else {
    fail("observable.kind", "unknown observable '" + kind + "'");
  }
  return o;
}

GridSpec parse_grid(const json& j) {
  GridSpec g;
  g.start = number_or(j, "start", g.start, "grid");
  g.stop = number_or(j, "stop", g.stop, "grid");
  g.step = number_or(j, "step", g.step, "grid");
  if (g.step <= 0.0) fail("grid.step", "must be > 0");
  if (g.stop < g.start) fail("grid.stop", "must be >= grid.start");
  if ((g.stop - g.start) / g.step > 1e6) {
    fail("grid.step", "more than 1e6 grid points");
  }
  return g;
}

CorrelationRequest parse_correlation(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  CorrelationRequest r;
  const std::string type =
      find(j, "type") ? string_at(*find(j, "type"), path + ".type") : "ctoc";
  if (type == "ctoc") {
    r.kind = CorrelationRequest::Kind::Ctoc;
    const json* eta = find(j, "eta");
    if (!eta) fail(path + ".eta", "required for type=ctoc");
    r.label = string_at(*eta, path + ".eta");
    try {
      (void)EtaVector::parse(r.label);
    } catch (const std::invalid_argument& e) {
      fail(path + ".eta", e.what());
    }
  } else if (type == "wightman") {
    r.kind = CorrelationRequest::Kind::Wightman;
    const json* sigma = find(j, "sigma");
    if (!sigma) fail(path + ".sigma", "required for type=wightman");
    r.label = string_at(*sigma, path + ".sigma");
    try {
      (void)Permutation::from_trace_string(r.label);
    } catch (const std::invalid_argument& e) {
      fail(path + ".sigma", e.what());
    }
  } else {
    fail(path + ".type", "expected 'ctoc' or 'wightman'");
  }
  return r;
}

VerifyRequest parse_verify(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  VerifyRequest v;
  v.theorem = integer_or(j, "theorem", 0, path);
  if (v.theorem < 1 || v.theorem > 3) fail(path + ".theorem", "expected 1, 2 or 3");
  if (const json* sig = find(j, "sigma")) {
    v.sigma = string_at(*sig, path + ".sigma");
    try {
      (void)Permutation::from_trace_string(v.sigma);
    } catch (const std::invalid_argument& e) {
      fail(path + ".sigma", e.what());
    }
  }
  if (const json* times = find(j, "times")) {
    if (!times->is_array()) fail(path + ".times", "expected an array");
    for (std::size_t i = 0; i < times->size(); ++i) {
      v.times.push_back(
          number_at((*times)[i], path + ".times[" + std::to_string(i) + "]"));
    }
  }
  v.sweep = boolean_or(j, "sweep", false, path);
  v.instances = integer_or(j, "instances", 0, path);
  v.max_order = integer_or(j, "max_order", 3, path);
  if (v.instances < 0) fail(path + ".instances", "must be >= 0");
  if (v.max_order < 1 || v.max_order > 6) fail(path + ".max_order", "expected 1..6");
  if (v.instances == 0 && v.sigma.empty()) {
    fail(path, "needs either 'sigma' or 'instances'");
  }
  if (!v.times.empty() && v.sweep) {
    fail(path, "'times' and 'sweep' are mutually exclusive");
  }
  return v;
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> pts;
  // Half-step guard keeps the count stable against rounding.
  for (double t = start; t <= stop + step / 2; t += step) pts.push_back(t);
  return pts;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config root: expected an object");
  RunConfig cfg;
  cfg.model = parse_model(find(j, "model") ? *find(j, "model") : json::object());
  cfg.state =
      parse_state(find(j, "state") ? *find(j, "state") : json::object(), cfg.model);
  cfg.observable = parse_observable(
      find(j, "observable") ? *find(j, "observable") : json::object(), cfg.model);
  cfg.grid = parse_grid(find(j, "grid") ? *find(j, "grid") : json::object());

  if (const json* times = find(j, "times")) {
    if (!times->is_array()) throw ConfigError("times: expected an array");
    cfg.fixed_times.clear();
    for (std::size_t i = 0; i < times->size(); ++i) {
      cfg.fixed_times.push_back(
          number_at((*times)[i], "times[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 1; i < cfg.fixed_times.size(); ++i) {
      if (!(cfg.fixed_times[i - 1] < cfg.fixed_times[i])) {
        fail("times", "must be strictly increasing");
      }
    }
  }

  if (const json* corr = find(j, "correlations")) {
    if (!corr->is_array()) throw ConfigError("correlations: expected an array");
    for (std::size_t i = 0; i < corr->size(); ++i) {
      cfg.correlations.push_back(parse_correlation(
          (*corr)[i], "correlations[" + std::to_string(i) + "]"));
    }
  }

  if (const json* verify = find(j, "verify")) {
    if (!verify->is_array()) throw ConfigError("verify: expected an array");
    for (std::size_t i = 0; i < verify->size(); ++i) {
      cfg.verify.push_back(
          parse_verify((*verify)[i], "verify[" + std::to_string(i) + "]"));
    }
  }

  if (const json* syms = find(j, "symmetries")) {
    if (!syms->is_array()) throw ConfigError("symmetries: expected an array");
    for (std::size_t i = 0; i < syms->size(); ++i) {
      const std::string path = "symmetries[" + std::to_string(i) + "]";
      const std::string s = string_at((*syms)[i], path);
      if (s == "C") {
        cfg.symmetries.push_back(SymmetryKind::C);
      } else if (s == "T") {
        cfg.symmetries.push_back(SymmetryKind::T);
      } else if (s == "S") {
        cfg.symmetries.push_back(SymmetryKind::S);
      } else {
        fail(path, "expected C, T or S");
      }
    }
  }

  cfg.tolerance = number_or(j, "tolerance", cfg.tolerance, "config");
  if (cfg.tolerance <= 0.0) throw ConfigError("tolerance: must be > 0");
  if (const json* seed = find(j, "seed")) {
    if (!seed->is_number_unsigned() && !seed->is_number_integer()) {
      throw ConfigError("seed: expected an integer");
    }
    cfg.seed = seed->get<std::uint64_t>();
  }

  if (const json* output = find(j, "output")) {
    if (!output->is_object()) throw ConfigError("output: expected an object");
    if (const json* csv = find(*output, "csv")) {
      cfg.out_csv = string_at(*csv, "output.csv");
    }
    if (const json* js = find(*output, "json")) {
      cfg.out_json = string_at(*js, "output.json");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

QuantumOperator build_model(const ModelSpec& model) {
  Matrix h;
  switch (model.kind) {
    case ModelSpec::Kind::Tfim:
      h = build_tfim(model.n_sites, model.coupling, model.periodic, model.field)
              .matrix();
      break;
    case ModelSpec::Kind::SingleSpinZ:
      h = -model.field * pauli_string(1, {{1, PauliAxis::Z}}).matrix();
      break;
  }
  if (model.t_breaking != 0.0) {
    h += model.t_breaking *
         pauli_string(model.n_sites, {{1, PauliAxis::X},
                                      {2, PauliAxis::Y},
                                      {3, PauliAxis::Z}})
             .matrix();
  }
  return QuantumOperator(std::move(h), /*hermitian=*/true);
}

DensityMatrix build_state(const StateSpec& state, const ModelSpec& model,
                          const QuantumOperator& h) {
  switch (state.kind) {
    case StateSpec::Kind::ProductC:
      return product_state_c(model.n_sites);
    case StateSpec::Kind::Thermal:
      return thermal_state(h, state.beta);
    case StateSpec::Kind::MaximallyMixed:
      break;
  }
  const int d = h.dim();
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

QuantumOperator build_observable(const ObservableSpec& spec, int n_sites) {
  switch (spec.kind) {
    case ObservableSpec::Kind::CollectiveZ:
      return collective_z(n_sites);
    case ObservableSpec::Kind::SitePauli:
      break;
  }
  return pauli_string(n_sites, {{spec.site, spec.axis}});
}

std::string observable_name(const ObservableSpec& spec) {
  if (spec.kind == ObservableSpec::Kind::CollectiveZ) return "collective-z";
  const char axis = spec.axis == PauliAxis::X ? 'x'
                    : spec.axis == PauliAxis::Y ? 'y'
                                                : 'z';
  return std::string("sigma^") + axis + "_" + std::to_string(spec.site);
}

SymmetryTransform canonical_transform(SymmetryKind kind, const ModelSpec& model,
                                      const QuantumOperator& h,
                                      const DensityMatrix& rho) {
  const int n = model.n_sites;
  auto make_c = [&]() {
    if (model.kind == ModelSpec::Kind::SingleSpinZ) {
      return SymmetryTransform(SymmetryKind::C,
                               pauli_string(1, {{1, PauliAxis::X}}).matrix());
    }
    if (n % 2 != 0) {
      throw ConfigError(
          "symmetries: the staggered C-transform needs an even chain");
    }
    std::map<int, PauliAxis> factors;
    for (int l = 1; l <= n / 2; ++l) {
      factors[2 * l - 1] = PauliAxis::X;
      factors[2 * l] = PauliAxis::Y;
    }
    return SymmetryTransform(SymmetryKind::C, pauli_string(n, factors).matrix());
  };
  auto make_t = [&]() {
    if (model.kind == ModelSpec::Kind::SingleSpinZ) {
      return SymmetryTransform(SymmetryKind::T, Matrix::Identity(2, 2));
    }
    std::map<int, PauliAxis> factors;
    for (int l = 1; l <= n; ++l) factors[l] = PauliAxis::Z;
    return SymmetryTransform(SymmetryKind::T, pauli_string(n, factors).matrix());
  };
  switch (kind) {
    case SymmetryKind::C:
      return make_c();
    case SymmetryKind::T:
      return make_t();
    case SymmetryKind::S:
      break;
  }
  return compose_s(make_c(), make_t(), h, rho);
}

}  // namespace qcorr::tool
