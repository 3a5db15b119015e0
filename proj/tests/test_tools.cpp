#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commands.hpp"
#include "config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qcorr;
using namespace qcorr::tool;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string write_config(const nlohmann::json& j, const std::string& name) {
  const std::string path = name;
  std::ofstream f(path);
  f << j.dump(2);
  return path;
}

nlohmann::json toy_config() {
  return nlohmann::json{
      {"model", {{"kind", "single-spin-z"}}},
      {"state", {{"kind", "maximally-mixed"}}},
      {"observable", {{"kind", "site-pauli"}, {"site", 1}, {"axis", "x"}}},
      {"grid", {{"start", 0.1}, {"stop", 2.0}, {"step", 0.1}}},
      {"times", {0.0}},
      {"correlations", {{{"type", "ctoc"}, {"eta", "++"}}}},
  };
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("parse_config fills documented defaults") {
  const RunConfig cfg = parse_config(nlohmann::json::object());
  CHECK(cfg.model.kind == ModelSpec::Kind::Tfim);
  CHECK(cfg.model.n_sites == 8);
  CHECK(cfg.model.coupling == 1.5);
  CHECK(cfg.model.periodic);
  CHECK(cfg.state.kind == StateSpec::Kind::ProductC);
  CHECK(cfg.state.beta == 1.0);
  CHECK(cfg.grid.start == 2.05);
  CHECK(cfg.grid.stop == 8.0);
  CHECK(cfg.grid.step == 0.05);
  CHECK(cfg.fixed_times == std::vector<double>{0.0, 2.0});
  CHECK(cfg.tolerance == 1e-8);
  CHECK(cfg.seed == 12345);
}

TEST_CASE("parse_config reports the offending field path") {
  auto expect_error = [](nlohmann::json j, const char* needle) {
    try {
      parse_config(j);
      FAIL_CHECK("expected ConfigError for ", needle);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error({{"state", {{"beta", -1.0}}}}, "state.beta");
  expect_error({{"model", {{"kind", "bogus"}}}}, "model.kind");
  expect_error({{"model", {{"n_sites", 13}}}}, "model.n_sites");
  expect_error({{"grid", {{"step", 0.0}}}}, "grid.step");
  expect_error({{"grid", {{"start", 5.0}, {"stop", 4.0}}}}, "grid.stop");
  expect_error({{"observable", {{"kind", "site-pauli"}, {"site", 9}}}},
               "observable.site");
  expect_error({{"correlations", {{{"type", "ctoc"}, {"eta", "-++"}}}},
                {"model", {{"n_sites", 4}}}},
               "correlations[0].eta");
  expect_error({{"correlations", {{{"type", "wightman"}, {"sigma", "2x1"}}}}},
               "correlations[0].sigma");
  expect_error({{"times", {2.0, 1.0}}}, "times");
  expect_error({{"verify", {{{"theorem", 4}, {"sigma", "12"}}}}},
               "verify[0].theorem");
  expect_error({{"verify", {{{"theorem", 2}}}}}, "verify[0]");
  expect_error({{"symmetries", {"Q"}}}, "symmetries[0]");
  expect_error({{"state", {{"kind", "product-c"}}},
                {"model", {{"n_sites", 5}}}},
               "state.kind");
}

TEST_CASE("grid points include both endpoints") {
  GridSpec g{2.05, 8.0, 0.05};
  const std::vector<double> pts = g.points();
  CHECK(pts.size() == 120);
  CHECK(pts.front() == 2.05);
  CHECK(std::abs(pts.back() - 8.0) < 1e-9);
}

TEST_CASE("cmd_ranks writes the census and honors the order guard") {
  std::ostringstream out;
  CommandOptions options;
  options.out_stem = "tools_ranks";
  CHECK(cmd_ranks(3, options, out) == kExitOk);
  const auto rows = read_csv("tools_ranks.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"rank", "count"});
  CHECK(rows[1] == std::vector<std::string>{"1", "4"});
  CHECK(rows[2] == std::vector<std::string>{"2", "2"});

  std::ostringstream err;
  CHECK(cmd_ranks(9, options, err) == kExitBadInput);
  CHECK(err.str().find("1..8") != std::string::npos);
}

TEST_CASE("cmd_eval reproduces the single-spin cosine series") {
  const std::string path = write_config(toy_config(), "tools_toy.json");
  CommandOptions options;
  options.out_stem = "tools_toy";
  std::ostringstream out;
  REQUIRE(cmd_eval(path, options, out) == kExitOk);

  const auto rows = read_csv("tools_toy.csv");
  REQUIRE(rows.size() == 21);  // header + 20 points
  CHECK(rows[0] == std::vector<std::string>{"t2", "C:++"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][0]);
    const double value = std::stod(rows[i][1]);
    CHECK(value == doctest::Approx(std::cos(2 * t)).epsilon(1e-10));
  }
}

TEST_CASE("cmd_eval output is byte-identical across runs") {
  nlohmann::json j = toy_config();
  j["model"] = {{"kind", "tfim"}, {"n_sites", 4}, {"lambda", 1.5}};
  j["state"] = {{"kind", "maximally-mixed"}};
  j["observable"] = {{"kind", "collective-z"}};
  j["grid"] = {{"start", 2.05}, {"stop", 3.0}, {"step", 0.05}};
  j["times"] = {0.0, 2.0};
  j["correlations"] = {{{"type", "ctoc"}, {"eta", "+-+"}},
                       {{"type", "wightman"}, {"sigma", "213"}}};
  j["verify"] = {{{"theorem", 3}, {"instances", 5}},
                 {{"theorem", 2}, {"sigma", "213"}, {"sweep", true}}};
  j["symmetries"] = {"C", "T", "S"};
  const std::string path = write_config(j, "tools_det.json");

  CommandOptions options;
  options.out_stem = "tools_det_a";
  std::ostringstream out_a;
  REQUIRE(cmd_eval(path, options, out_a) == kExitOk);
  const std::string csv_a = slurp("tools_det_a.csv");
  const std::string json_a = slurp("tools_det_a.json");

  options.out_stem = "tools_det_b";
  std::ostringstream out_b;
  REQUIRE(cmd_eval(path, options, out_b) == kExitOk);
  CHECK(slurp("tools_det_b.csv") == csv_a);
  // The stem is echoed in the report; compare the payload sections.
  const auto a = nlohmann::json::parse(json_a);
  const auto b = nlohmann::json::parse(slurp("tools_det_b.json"));
  CHECK(a["sweep"] == b["sweep"]);
  CHECK(a["verifications"] == b["verifications"]);
  CHECK(a["symmetry_checks"] == b["symmetry_checks"]);
  REQUIRE(a["verifications"].size() == 2);
  CHECK(a["verifications"][1]["theorem"] == 2);
  CHECK(a["verifications"][1]["pass"].get<bool>());
}

TEST_CASE("cmd_eval rejects a grid that violates the time ordering") {
  nlohmann::json j = toy_config();
  j["model"] = {{"kind", "tfim"}, {"n_sites", 4}};
  j["state"] = {{"kind", "maximally-mixed"}};
  j["observable"] = {{"kind", "collective-z"}};
  j["times"] = {0.0, 2.0};
  j["grid"] = {{"start", 1.0}, {"stop", 3.0}, {"step", 0.5}};  // t3 < t2
  j["correlations"] = {{{"type", "ctoc"}, {"eta", "+-+"}}};
  const std::string path = write_config(j, "tools_badgrid.json");
  std::ostringstream out;
  CommandOptions options;
  options.out_stem = "tools_badgrid";
  CHECK(cmd_eval(path, options, out) == kExitBadInput);
  CHECK(out.str().find("grid.start") != std::string::npos);
}

TEST_CASE("cmd_eval flags missing and malformed config files") {
  CommandOptions options;
  std::ostringstream out;
  CHECK(cmd_eval("no_such_file.json", options, out) == kExitBadInput);
  {
    std::ofstream f("tools_broken.json");
    f << "{ not json";
  }
  std::ostringstream out2;
  CHECK(cmd_eval("tools_broken.json", options, out2) == kExitBadInput);
  CHECK(out2.str().find("valid JSON") != std::string::npos);
}

TEST_CASE("cmd_table1 confirms the selection rules on a small chain") {
  CommandOptions options;
  options.n_sites = 4;
  options.out_stem = "tools_table1";
  std::ostringstream out;
  REQUIRE(cmd_table1(options, out) == kExitOk);
  const auto report = nlohmann::json::parse(slurp("tools_table1.json"));
  CHECK(report["pass"].get<bool>());
  CHECK(report["cells"].size() == 12);
  int forbidden = 0;
  for (const auto& cell : report["cells"]) {
    if (cell["predicted"] == "0") {
      ++forbidden;
      CHECK(cell["max_abs"].get<double>() <= 1e-8);
    }
  }
  CHECK(forbidden == 6);
}

TEST_CASE("cmd_fig4 validates its variant and sites") {
  CommandOptions options;
  std::ostringstream out;
  CHECK(cmd_fig4('c', options, out) == kExitBadInput);
  options.n_sites = 5;
  std::ostringstream out2;
  CHECK(cmd_fig4('a', options, out2) == kExitBadInput);
}

TEST_CASE("cmd_fig4 b passes clean and fails under the T-breaking term") {
  // Six sites: four-site rings carry an accidental symmetry that protects
  // the identity even with the three-site term switched on.
  CommandOptions options;
  options.n_sites = 6;
  options.out_stem = "tools_fig4b";
  options.grid_stop = 4.0;
  std::ostringstream out;
  REQUIRE(cmd_fig4('b', options, out) == kExitOk);

  const auto rows = read_csv("tools_fig4b.csv");
  CHECK(rows[0] == std::vector<std::string>{"t3", "W:213:re", "W:213:im",
                                            "W:21'3:re", "W:21'3:im"});

  options.t_breaking = 0.4;
  std::ostringstream out_broken;
  CHECK(cmd_fig4('b', options, out_broken) == kExitViolation);
  CHECK(out_broken.str().find("violated") != std::string::npos);
}
