#pragma once

#include "config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qcorr::tool {

inline constexpr int kExitOk = 0;         // success / predictions confirmed
inline constexpr int kExitViolation = 1;  // a numerical assertion failed
inline constexpr int kExitBadInput = 2;   // invalid configuration or flags

/// Flag overrides shared by the subcommands; unset fields keep the
/// subcommand defaults documented in --help.
struct CommandOptions {
  std::optional<int> n_sites;
  std::optional<double> coupling;
  std::optional<double> beta;
  std::optional<double> grid_start;
  std::optional<double> grid_stop;
  std::optional<double> grid_step;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  double t_breaking = 0.0;
  std::string out_stem;
};

int cmd_table1(const CommandOptions& options, std::ostream& out);
int cmd_fig4(char variant, const CommandOptions& options, std::ostream& out);
int cmd_ranks(int order, const CommandOptions& options, std::ostream& out);
int cmd_eval(const std::string& config_path, const CommandOptions& options,
             std::ostream& out);

}  // namespace qcorr::tool
