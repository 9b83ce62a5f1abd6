#pragma once
#include "patchpert/sweep.hpp"

#include <string>
#include <vector>

namespace patchpert {

// One acceptance criterion outcome.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Writes <scenario>.csv, <scenario>.svg (log-log plots with slope guides) and
// <scenario>.md under out_dir. CSV column order is fixed and documented in
// the header row.
void emit_report(const std::vector<SweepRecord>& records,
                 const std::vector<FitResult>& fits, const std::string& out_dir,
                 const std::string& scenario);

std::string csv_path(const std::string& out_dir, const std::string& scenario);
void write_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> parse_csv(const std::string& path);

void write_acceptance_report(const std::vector<CriterionResult>& results,
                             const std::string& out_dir);

} // namespace patchpert
