#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

void add_common_flags(CLI::App* cmd, qcorr::tool::CommandOptions& options) {
  cmd->add_option("--tolerance", options.tolerance,
                  "zero threshold for forbidden correlations (default 1e-8)");
  cmd->add_option("--grid-start", options.grid_start,
                  "first t3 grid point (default 2.05)");
  cmd->add_option("--grid-stop", options.grid_stop,
                  "last t3 grid point (default 8.0)");
  cmd->add_option("--grid-step", options.grid_step,
                  "t3 grid spacing (default 0.05)");
  cmd->add_option("--out", options.out_stem,
                  "output stem; writes <stem>.csv (and <stem>.json)");
  cmd->add_option("--seed", options.seed,
                  "seed for randomized verification sampling (default 12345)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qcorr::tool;

  CLI::App app{
      "qcorr - correlation functions of small spin chains and their\n"
      "constraints under generalized C/T/S symmetries"};
  app.require_subcommand(1);

  CommandOptions table1_options, fig4_options, ranks_options, eval_options;
  std::string fig4_variant, eval_config;
  int ranks_order = 0;

  CLI::App* table1 = app.add_subcommand(
      "table1",
      "reproduce the C-symmetry selection-rule table on the Ising chain");
  add_common_flags(table1, table1_options);
  table1->add_option("--n", table1_options.n_sites, "chain length (default 8)");
  table1->add_option("--lambda", table1_options.coupling,
                     "Ising coupling (default 1.5)");

  CLI::App* fig4 = app.add_subcommand(
      "fig4", "third-order correlation sweeps: variant 'a' (CTOC zero pattern) "
              "or 'b' (W:213 vs W:21'3 under time reversal)");
  fig4->add_option("variant", fig4_variant, "a or b")->required();
  add_common_flags(fig4, fig4_options);
  fig4->add_option("--n", fig4_options.n_sites, "chain length (default 8)");
  fig4->add_option("--lambda", fig4_options.coupling,
                   "Ising coupling (default 1.5)");
  fig4->add_option("--beta", fig4_options.beta,
                   "inverse temperature for variant b (default 1.0)");
  fig4->add_option("--t-break", fig4_options.t_breaking,
                   "strength of a T-breaking three-site term (negative control)");

  CLI::App* ranks = app.add_subcommand(
      "ranks", "census of contour ranks over all labels of one order");
  ranks->add_option("order", ranks_order, "correlation order (1..8)")->required();
  ranks->add_option("--out", ranks_options.out_stem, "output stem");

  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate correlations and verifications from a JSON config");
  eval->add_option("--config", eval_config, "path to the JSON run config")
      ->required();
  add_common_flags(eval, eval_options);
  eval->add_option("--n", eval_options.n_sites, "override model.n_sites");
  eval->add_option("--lambda", eval_options.coupling, "override model.lambda");
  eval->add_option("--beta", eval_options.beta, "override state.beta");
  eval->add_option("--t-break", eval_options.t_breaking,
                   "override model.t_breaking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  if (table1->parsed()) return cmd_table1(table1_options, std::cout);
  if (fig4->parsed()) {
    if (fig4_variant.size() != 1) {
      std::cout << "fig4: variant must be 'a' or 'b'\n";
      return kExitBadInput;
    }
    return cmd_fig4(fig4_variant[0], fig4_options, std::cout);
  }
  if (ranks->parsed()) return cmd_ranks(ranks_order, ranks_options, std::cout);
  if (eval->parsed()) return cmd_eval(eval_config, eval_options, std::cout);
  return kExitBadInput;
}
