#pragma once

#include <ostream>

#include "lamcon/config.hpp"
#include "lamcon/serialize.hpp"

namespace lamcon {

/// One verification row: a named check with its measured value, tolerance and
/// verdict. `ref` is the short reference tag printed in the report table.
struct CheckRow {
    std::string id;
    std::string ref;
    std::string description;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_ms = 0.0;
    json extra = json::object();
};

json row_to_json(const CheckRow& row);

struct RunReport {
    int exit_code = 0;
    json document;
    std::vector<CheckRow> rows;
};

/// Execute the configured pipeline: build the solution, run the requested
/// steps, write report.json (and CSV plot data when requested) into out_dir.
/// Deterministic for fixed config + seed up to the timestamp field.
RunReport run(const ExperimentConfig& cfg);

enum class VerifyLevel { Fast, Full };

/// The builtin verification suite: every acceptance criterion as a row
/// (full level adds the grid-refinement convergence studies).
std::vector<CheckRow> verify_suite(VerifyLevel level);

/// Print "ref description: PASS/FAIL value" lines; returns the number of
/// failures.
int print_rows(const std::vector<CheckRow>& rows, std::ostream& os);

}  // namespace lamcon
