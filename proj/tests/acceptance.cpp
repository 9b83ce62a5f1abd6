// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion.
#include "patchpert/acceptance.hpp"
#include "patchpert/report.hpp"

#include <cstdio>

using namespace patchpert;

int main() {
    SweepConfig base;
    base.mesh_h = 0.025;
    base.out_dir = "acceptance_out";
    const auto results = run_acceptance(base);
    write_acceptance_report(results, base.out_dir);
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s | %2d. %s | %s\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 1;
}
