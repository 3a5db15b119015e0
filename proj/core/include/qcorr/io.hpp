#pragma once

#include "qcorr/correlation.hpp"
#include "qcorr/symmetry.hpp"

#include <iosfwd>
#include <string>

namespace qcorr {

/// Full round-trip precision (17 significant digits, '.' decimal).
std::string format_double(double v);

/// CSV with a header row: first column the axis, then one column per real
/// series and a :re/:im column pair per complex series.
void write_csv(const SweepResult& result, std::ostream& os);

/// JSON mirror of the CSV structure. Key order is stable.
std::string sweep_json(const SweepResult& result, int indent = 2);

/// JSON document for CI consumption: theorem id, instance parameters,
/// deviations, tolerance, pass flag. Key order is stable.
std::string report_json(const TheoremReport& report, int indent = 2);
std::string report_json(const std::vector<TheoremReport>& reports,
                        int indent = 2);

}  // namespace qcorr
