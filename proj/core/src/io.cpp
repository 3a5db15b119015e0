#include "qcorr/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

namespace qcorr {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json complex_json(Complex v) {
  return ordered_json{{"re", v.real()}, {"im", v.imag()}};
}

ordered_json report_body(const TheoremReport& r) {
  ordered_json j;
  j["theorem"] = r.theorem;
  j["sigma"] = r.sigma_label;
  j["times"] = r.times;
  j["left"] = complex_json(r.left);
  j["right"] = complex_json(r.right);
  j["max_deviation"] = r.max_deviation;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const SweepResult& result, std::ostream& os) {
  os << result.axis;
  for (const Series& s : result.series) {
    if (s.complex_valued) {
      os << ',' << s.label << ":re" << ',' << s.label << ":im";
    } else {
      os << ',' << s.label;
    }
  }
  os << '\n';
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    os << format_double(result.grid[i]);
    for (const Series& s : result.series) {
      os << ',' << format_double(s.values[i].real());
      if (s.complex_valued) os << ',' << format_double(s.values[i].imag());
    }
    os << '\n';
  }
}

std::string sweep_json(const SweepResult& result, int indent) {
  ordered_json j;
  j["axis"] = result.axis;
  j["grid"] = result.grid;
  ordered_json series = ordered_json::array();
  for (const Series& s : result.series) {
    ordered_json entry;
    entry["label"] = s.label;
    entry["complex"] = s.complex_valued;
    if (s.complex_valued) {
      std::vector<double> re, im;
      re.reserve(s.values.size());
      im.reserve(s.values.size());
      for (Complex v : s.values) {
        re.push_back(v.real());
        im.push_back(v.imag());
      }
      entry["re"] = re;
      entry["im"] = im;
    } else {
      std::vector<double> re;
      re.reserve(s.values.size());
      for (Complex v : s.values) re.push_back(v.real());
      entry["values"] = re;
    }
    series.push_back(std::move(entry));
  }
  j["series"] = std::move(series);
  return j.dump(indent);
}

std::string report_json(const TheoremReport& report, int indent) {
  return report_body(report).dump(indent);
}

std::string report_json(const std::vector<TheoremReport>& reports, int indent) {
  ordered_json j = ordered_json::array();
  for (const TheoremReport& r : reports) j.push_back(report_body(r));
  return j.dump(indent);
}

}  // namespace qcorr
