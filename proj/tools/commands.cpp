#include "commands.hpp"

#include "qcorr/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace qcorr::tool {

namespace {

using ordered_json = nlohmann::ordered_json;

int run_guarded(std::ostream& out, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    out << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    out << "failure: " << e.what() << "\n";
    return kExitViolation;
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ostringstream os;
  write_csv(result, os);
  write_text_file(path, os.str());
}

GridSpec grid_from(const CommandOptions& options, GridSpec grid) {
  if (options.grid_start) grid.start = *options.grid_start;
  if (options.grid_stop) grid.stop = *options.grid_stop;
  if (options.grid_step) grid.step = *options.grid_step;
  if (grid.step <= 0.0) throw ConfigError("grid.step: must be > 0");
  if (grid.stop < grid.start) throw ConfigError("grid.stop: must be >= grid.start");
  if ((grid.stop - grid.start) / grid.step > 1e6) {
    throw ConfigError("grid.step: more than 1e6 grid points");
  }
  return grid;
}

std::string stem_or(const CommandOptions& options, const char* fallback) {
  return options.out_stem.empty() ? fallback : options.out_stem;
}

double max_abs_value(const Series& series) {
  double m = 0.0;
  for (Complex v : series.values) m = std::max(m, std::abs(v));
  return m;
}

struct Table1Row {
  std::string name;
  ObservableSpec observable;
  int expected_parity;
};

struct Table1Cell {
  std::string row;
  std::string observable;
  std::string eta;
  int order;
  Selection predicted;
  double max_abs;
  bool confirmed;
};

SymmetryTransform staggered_c(int n_sites) {
  std::map<int, PauliAxis> factors;
  for (int l = 1; l <= n_sites / 2; ++l) {
    factors[2 * l - 1] = PauliAxis::X;
    factors[2 * l] = PauliAxis::Y;
  }
  return SymmetryTransform(SymmetryKind::C,
                           pauli_string(n_sites, factors).matrix());
}

const char* const kThirdOrderEtas[] = {"+--", "++-", "+-+", "+++"};

SweepTemplate ctoc_template(const std::string& eta, double t1, double t2) {
  const EtaVector parsed = EtaVector::parse(eta);
  SweepTemplate tpl{parsed, {}, {}, 0, {}, ""};
  const int n = parsed.order();
  tpl.observables.assign(n, "B");
  tpl.base_times.assign(n, 0.0);
  if (n >= 2) tpl.base_times[0] = t1;
  if (n >= 3) tpl.base_times[1] = t2;
  tpl.axis_slot = n;
  return tpl;
}

}  // namespace

int cmd_table1(const CommandOptions& options, std::ostream& out) {
  return run_guarded(out, [&]() -> int {
    const int n_sites = options.n_sites.value_or(8);
    const double coupling = options.coupling.value_or(1.5);
    const double tol = options.tolerance.value_or(kZeroThreshold);
    const GridSpec grid = grid_from(options, GridSpec{});
    const double t1 = 0.0, t2 = 2.0;
    if (n_sites % 2 != 0) {
      throw ConfigError("--n: the product-C state needs an even chain");
    }

    const QuantumOperator h = build_tfim(n_sites, coupling, true);
    const DensityMatrix rho = product_state_c(n_sites);
    const SymmetryTransform c = staggered_c(n_sites);
    if (!check_symmetry(c, h, rho)) {
      throw std::runtime_error("model lost its C-symmetry; cannot apply Table 1");
    }

    const Table1Row rows[] = {
        {"B^T->-B", {ObservableSpec::Kind::CollectiveZ, 1, PauliAxis::Y}, -1},
        {"B^T->+B", {ObservableSpec::Kind::SitePauli, 1, PauliAxis::Y}, +1},
    };

    std::vector<Table1Cell> cells;
    bool all_confirmed = true;
    for (const Table1Row& row : rows) {
      const QuantumOperator b = build_observable(row.observable, n_sites);
      const auto parity = observable_parity(c, b);
      if (!parity || parity->value != row.expected_parity) {
        throw std::runtime_error("observable parity drifted for row " + row.name);
      }
      CorrelationEngine engine(h, rho, {{"B", b}});

      std::vector<SweepTemplate> templates;
      for (const char* eta : {"+-", "++"}) templates.push_back(ctoc_template(eta, t1, t2));
      for (const char* eta : kThirdOrderEtas) templates.push_back(ctoc_template(eta, t1, t2));

      const SweepResult sweep = engine.sweep(templates, "t3", grid.points());
      for (std::size_t i = 0; i < templates.size(); ++i) {
        const EtaVector& eta = std::get<EtaVector>(templates[i].correlation);
        const std::vector<int> alphas(eta.order(), row.expected_parity);
        const Selection predicted = selection_rule(eta, alphas);
        const double measured = max_abs_value(sweep.series[i]);
        const bool confirmed = predicted == Selection::Forbidden
                                   ? measured <= tol
                                   : measured >= kNonzeroFloor;
        all_confirmed = all_confirmed && confirmed;
        cells.push_back({row.name, observable_name(row.observable),
                         eta.display(), eta.order(), predicted, measured,
                         confirmed});
        out << "  " << row.name << "  C:" << eta.display()
            << (predicted == Selection::Forbidden ? "  predicted 0 " : "  predicted - ")
            << " max|C| = " << measured << (confirmed ? "  ok" : "  VIOLATED")
            << "\n";
      }
    }

    const std::string stem = stem_or(options, "table1");
    std::ostringstream csv;
    csv << "row,observable,eta,order,predicted,max_abs,threshold,confirmed\n";
    for (const Table1Cell& cell : cells) {
      csv << cell.row << ',' << cell.observable << ',' << cell.eta << ','
          << cell.order << ','
          << (cell.predicted == Selection::Forbidden ? "0" : "-") << ','
          << format_double(cell.max_abs) << ','
          << format_double(cell.predicted == Selection::Forbidden ? tol
                                                                  : kNonzeroFloor)
          << ',' << (cell.confirmed ? "true" : "false") << '\n';
    }
    write_text_file(stem + ".csv", csv.str());

    ordered_json report;
    report["model"] = {{"kind", "tfim"},
                       {"n_sites", n_sites},
                       {"lambda", coupling},
                       {"periodic", true}};
    report["state"] = "product-c";
    report["grid"] = {{"start", grid.start}, {"stop", grid.stop}, {"step", grid.step}};
    report["tolerance"] = tol;
    report["nonzero_floor"] = kNonzeroFloor;
    ordered_json jcells = ordered_json::array();
    for (const Table1Cell& cell : cells) {
      jcells.push_back({{"row", cell.row},
                        {"observable", cell.observable},
                        {"eta", cell.eta},
                        {"order", cell.order},
                        {"predicted", cell.predicted == Selection::Forbidden ? "0" : "-"},
                        {"max_abs", cell.max_abs},
                        {"confirmed", cell.confirmed}});
    }
    report["cells"] = std::move(jcells);
    report["pass"] = all_confirmed;
    write_text_file(stem + ".json", report.dump(2));

    out << (all_confirmed ? "table1: all selection rules confirmed\n"
                          : "table1: selection-rule violation\n");
    return all_confirmed ? kExitOk : kExitViolation;
  });
}

int cmd_fig4(char variant, const CommandOptions& options, std::ostream& out) {
  return run_guarded(out, [&]() -> int {
    if (variant != 'a' && variant != 'b') {
      throw ConfigError("fig4: variant must be 'a' or 'b'");
    }
    const int n_sites = options.n_sites.value_or(8);
    const double coupling = options.coupling.value_or(1.5);
    const double tol = options.tolerance.value_or(kZeroThreshold);
    const GridSpec grid = grid_from(options, GridSpec{});
    const double t1 = 0.0, t2 = 2.0;

    ModelSpec model;
    model.n_sites = n_sites;
    model.coupling = coupling;
    model.t_breaking = options.t_breaking;
    if (model.t_breaking != 0.0 && n_sites < 3) {
      throw ConfigError("--t-break: needs at least 3 sites");
    }
    const QuantumOperator h = build_model(model);

    if (variant == 'a') {
      if (n_sites % 2 != 0) {
        throw ConfigError("--n: the product-C state needs an even chain");
      }
      const DensityMatrix rho = product_state_c(n_sites);
      CorrelationEngine engine(h, rho, {{"B", collective_z(n_sites)}});
      std::vector<SweepTemplate> templates;
      for (const char* eta : kThirdOrderEtas) templates.push_back(ctoc_template(eta, t1, t2));
      const SweepResult sweep = engine.sweep(templates, "t3", grid.points());
      write_sweep_csv(stem_or(options, "fig4a") + ".csv", sweep);

      bool ok = true;
      for (std::size_t i = 0; i < sweep.series.size(); ++i) {
        const EtaVector& eta = std::get<EtaVector>(templates[i].correlation);
        const std::vector<int> alphas(eta.order(), -1);  // collective z is C-odd
        const bool forbidden = selection_rule(eta, alphas) == Selection::Forbidden;
        const double measured = max_abs_value(sweep.series[i]);
        const bool confirmed = forbidden ? measured <= tol : measured >= kNonzeroFloor;
        ok = ok && confirmed;
        out << "  C:" << eta.display() << "  max|C| = " << measured
            << (forbidden ? "  (must vanish)" : "  (structured)")
            << (confirmed ? "  ok" : "  VIOLATED") << "\n";
      }
      out << (ok ? "fig4 a: zero pattern confirmed\n"
                 : "fig4 a: zero pattern violated\n");
      return ok ? kExitOk : kExitViolation;
    }

    // Variant b: the rank-2 OTOC W^{213} against the CTOC W^{21'3} with
    // t'_1 = t3 + t2 - t1, equal point by point for a T-symmetric system.
    const double beta = options.beta.value_or(1.0);
    const DensityMatrix rho = thermal_state(h, beta);
    CorrelationEngine engine(h, rho, {{"B", collective_z(n_sites)}});

    SweepTemplate w213{Permutation::from_trace_string("213"),
                       {"B", "B", "B"},
                       {t1, t2, 0.0},
                       3,
                       {},
                       "W:213"};
    SweepTemplate w21p3{Permutation::from_trace_string("132"),
                        {"B", "B", "B"},
                        {},
                        0,
                        [t1, t2](double g) {
                          return std::vector<double>{t2, g, g + t2 - t1};
                        },
                        "W:21'3"};
    const SweepResult sweep =
        engine.sweep({w213, w21p3}, "t3", grid.points());
    write_sweep_csv(stem_or(options, "fig4b") + ".csv", sweep);

    double max_re = 0.0, max_im = 0.0;
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
      const Complex d = sweep.series[0].values[i] - sweep.series[1].values[i];
      max_re = std::max(max_re, std::abs(d.real()));
      max_im = std::max(max_im, std::abs(d.imag()));
    }
    const bool ok = max_re <= tol && max_im <= tol;
    out << "  beta = " << beta << "  max|Re dev| = " << max_re
        << "  max|Im dev| = " << max_im << "\n";
    out << (ok ? "fig4 b: W:213 and W:21'3 agree pointwise\n"
               : "fig4 b: T-symmetry identity violated\n");
    return ok ? kExitOk : kExitViolation;
  });
}

int cmd_ranks(int order, const CommandOptions& options, std::ostream& out) {
  return run_guarded(out, [&]() -> int {
    const RankHistogram hist = enumerate_ranks(order);
    out << "rank census for order " << order << " (" << hist.total()
        << " labels)\n";
    std::ostringstream csv;
    csv << "rank,count\n";
    for (const auto& [r, count] : hist.counts) {
      out << "  rank " << r << ": " << count << "\n";
      csv << r << ',' << count << '\n';
    }
    write_text_file(stem_or(options, "ranks") + ".csv", csv.str());
    return kExitOk;
  });
}

namespace {

struct EvalContext {
  RunConfig cfg;
  QuantumOperator h;
  DensityMatrix rho;
  CorrelationEngine engine;
};

TheoremReport verify_one(const EvalContext& ctx, int theorem,
                         const Permutation& sigma,
                         const std::vector<double>& times) {
  const std::vector<std::string> obs(sigma.order(), "B");
  switch (theorem) {
    case 1:
      return verify_theorem1(
          sigma, times, obs,
          canonical_transform(SymmetryKind::C, ctx.cfg.model, ctx.h, ctx.rho),
          ctx.engine);
    case 2:
      return verify_theorem2(
          sigma, times, obs,
          canonical_transform(SymmetryKind::T, ctx.cfg.model, ctx.h, ctx.rho),
          ctx.engine);
    default:
      return verify_theorem3(
          sigma, times, obs,
          canonical_transform(SymmetryKind::S, ctx.cfg.model, ctx.h, ctx.rho),
          ctx.engine);
  }
}

std::vector<double> sweep_times(const RunConfig& cfg, int order, double axis_value,
                                const std::string& what) {
  if (static_cast<int>(cfg.fixed_times.size()) < order - 1) {
    throw ConfigError("times: need at least " + std::to_string(order - 1) +
                      " fixed entries for " + what);
  }
  std::vector<double> times(cfg.fixed_times.begin(),
                            cfg.fixed_times.begin() + (order - 1));
  times.push_back(axis_value);
  if (order >= 2 && !(times[order - 2] < cfg.grid.start)) {
    throw ConfigError("grid.start: must exceed times[" +
                      std::to_string(order - 2) + "] for " + what);
  }
  return times;
}

}  // namespace

int cmd_eval(const std::string& config_path, const CommandOptions& options,
             std::ostream& out) {
  return run_guarded(out, [&]() -> int {
    RunConfig cfg = load_config(config_path);
    if (options.n_sites) cfg.model.n_sites = *options.n_sites;
    if (options.coupling) cfg.model.coupling = *options.coupling;
    if (options.beta) cfg.state.beta = *options.beta;
    if (options.tolerance) cfg.tolerance = *options.tolerance;
    if (options.seed) cfg.seed = *options.seed;
    if (options.grid_start) cfg.grid.start = *options.grid_start;
    if (options.grid_stop) cfg.grid.stop = *options.grid_stop;
    if (options.grid_step) cfg.grid.step = *options.grid_step;
    if (options.t_breaking != 0.0) cfg.model.t_breaking = options.t_breaking;

    // Flag overrides bypass the parser; recheck what they can break.
    if (cfg.model.kind == ModelSpec::Kind::Tfim &&
        (cfg.model.n_sites < 2 || cfg.model.n_sites > kMaxSites)) {
      throw ConfigError("--n: must be in 2.." + std::to_string(kMaxSites));
    }
    if (cfg.state.kind == StateSpec::Kind::ProductC && cfg.model.n_sites % 2 != 0) {
      throw ConfigError("--n: the product-C state needs an even chain");
    }
    if (cfg.state.beta < 0.0) throw ConfigError("--beta: must be >= 0");
    if (cfg.tolerance <= 0.0) throw ConfigError("--tolerance: must be > 0");
    if (cfg.grid.step <= 0.0) throw ConfigError("grid.step: must be > 0");
    if (cfg.grid.stop < cfg.grid.start) {
      throw ConfigError("grid.stop: must be >= grid.start");
    }
    if ((cfg.grid.stop - cfg.grid.start) / cfg.grid.step > 1e6) {
      throw ConfigError("grid.step: more than 1e6 grid points");
    }
    if (cfg.model.t_breaking != 0.0 && cfg.model.n_sites < 3) {
      throw ConfigError("model.t_breaking: needs at least 3 sites");
    }

    const QuantumOperator h = build_model(cfg.model);
    const DensityMatrix rho = build_state(cfg.state, cfg.model, h);
    const QuantumOperator b = build_observable(cfg.observable, cfg.model.n_sites);
    EvalContext ctx{cfg, h, rho, CorrelationEngine(h, rho, {{"B", b}})};

    const std::string stem = stem_or(options, "eval");
    const std::string csv_path =
        !options.out_stem.empty() || cfg.out_csv.empty() ? stem + ".csv"
                                                         : cfg.out_csv;
    const std::string json_path =
        !options.out_stem.empty() || cfg.out_json.empty() ? stem + ".json"
                                                          : cfg.out_json;

    // Correlation sweep.
    ordered_json sweep_mirror;
    if (!cfg.correlations.empty()) {
      std::vector<SweepTemplate> templates;
      for (const CorrelationRequest& req : cfg.correlations) {
        const bool is_ctoc = req.kind == CorrelationRequest::Kind::Ctoc;
        std::variant<EtaVector, Permutation> correlation =
            is_ctoc ? std::variant<EtaVector, Permutation>(EtaVector::parse(req.label))
                    : std::variant<EtaVector, Permutation>(
                          Permutation::from_trace_string(req.label));
        SweepTemplate tpl{std::move(correlation), {}, {}, 0, {}, ""};
        const int n = tpl.order();
        tpl.observables.assign(n, "B");
        tpl.base_times = sweep_times(cfg, n, cfg.grid.start, tpl.default_label());
        tpl.axis_slot = n;
        templates.push_back(std::move(tpl));
      }
      // The axis is each template's last time slot; name it after the first.
      const std::string axis = "t" + std::to_string(templates.front().order());
      const SweepResult sweep = ctx.engine.sweep(templates, axis, cfg.grid.points());
      write_sweep_csv(csv_path, sweep);
      sweep_mirror = ordered_json::parse(sweep_json(sweep));
      out << "wrote " << csv_path << " (" << sweep.grid.size() << " points, "
          << sweep.series.size() << " series)\n";
    }

    // Symmetry checks.
    ordered_json checks = ordered_json::array();
    for (SymmetryKind kind : cfg.symmetries) {
      ordered_json entry;
      entry["kind"] = std::string(1, kind_letter(kind));
      try {
        const SymmetryTransform tr = canonical_transform(kind, cfg.model, h, rho);
        const bool holds = check_symmetry(tr, h, rho);
        entry["holds"] = holds;
        if (const auto parity = observable_parity(tr, b)) {
          entry["parity"] = parity->value;
        } else {
          entry["parity"] = nullptr;
        }
      } catch (const std::exception& e) {
        entry["holds"] = false;
        entry["note"] = e.what();
      }
      out << "symmetry " << entry["kind"].get<std::string>() << ": "
          << (entry["holds"].get<bool>() ? "holds" : "broken") << "\n";
      checks.push_back(std::move(entry));
    }

    // Theorem verifications.
    std::vector<TheoremReport> reports;
    bool all_pass = true;
    for (const VerifyRequest& req : cfg.verify) {
      if (req.instances > 0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> time_dist(-2.0, 2.0);
        std::optional<TheoremReport> worst;
        bool every_pass = true;
        for (int k = 0; k < req.instances; ++k) {
          const int n = 1 + static_cast<int>(rng() % req.max_order);
          std::vector<int> images(n);
          for (int i = 0; i < n; ++i) images[i] = i + 1;
          std::shuffle(images.begin(), images.end(), rng);
          std::vector<double> times(n);
          for (double& t : times) t = time_dist(rng);
          std::sort(times.begin(), times.end());
          for (int i = 1; i < n; ++i) {
            if (times[i] - times[i - 1] < 1e-3) times[i] = times[i - 1] + 1e-3;
          }
          TheoremReport r = verify_one(ctx, req.theorem, Permutation(images), times);
          every_pass = every_pass && r.pass;
          if (!worst || r.max_deviation > worst->max_deviation) worst = r;
        }
        worst->pass = every_pass;
        reports.push_back(*worst);
      } else if (req.sweep) {
        const Permutation sigma = Permutation::from_trace_string(req.sigma);
        std::optional<TheoremReport> worst;
        bool every_pass = true;
        for (double g : cfg.grid.points()) {
          const std::vector<double> times =
              sweep_times(cfg, sigma.order(), g, "verify W:" + req.sigma);
          TheoremReport r = verify_one(ctx, req.theorem, sigma, times);
          every_pass = every_pass && r.pass;
          if (!worst || r.max_deviation > worst->max_deviation) worst = r;
        }
        worst->pass = every_pass;
        reports.push_back(*worst);
      } else {
        const Permutation sigma = Permutation::from_trace_string(req.sigma);
        std::vector<double> times = req.times;
        if (times.empty()) {
          times = sweep_times(cfg, sigma.order(), cfg.grid.start,
                              "verify W:" + req.sigma);
        } else if (static_cast<int>(times.size()) != sigma.order()) {
          throw ConfigError("verify.times: expected " +
                            std::to_string(sigma.order()) + " entries");
        }
        reports.push_back(verify_one(ctx, req.theorem, sigma, times));
      }
      const TheoremReport& last = reports.back();
      all_pass = all_pass && last.pass;
      out << "theorem " << last.theorem << " [" << last.sigma_label
          << "]: " << (last.pass ? "pass" : "FAIL")
          << "  max deviation " << last.max_deviation << "\n";
    }

    ordered_json report;
    report["config"] = config_path;
    report["tolerance"] = cfg.tolerance;
    report["seed"] = cfg.seed;
    if (!sweep_mirror.is_null()) report["sweep"] = std::move(sweep_mirror);
    report["symmetry_checks"] = std::move(checks);
    {
      ordered_json jreports = ordered_json::array();
      for (const TheoremReport& r : reports) {
        jreports.push_back(ordered_json::parse(report_json(r, -1)));
      }
      report["verifications"] = std::move(jreports);
    }
    report["pass"] = all_pass;
    write_text_file(json_path, report.dump(2));
    out << "wrote " << json_path << "\n";

    return all_pass ? kExitOk : kExitViolation;
  });
}

}  // namespace qcorr::tool
