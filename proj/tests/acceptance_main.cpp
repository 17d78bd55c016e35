// Acceptance suite: runs every criterion end to end and prints one pass/fail
// line each. Exit code 0 only when all criteria hold.

#include <cstdio>

#include "adsim/acceptance.hpp"

int main() {
    bool all = true;
    for (const adsim::CriterionResult& r : adsim::run_acceptance()) {
        std::printf("%s\n", adsim::format_criterion(r).c_str());
        std::fflush(stdout);
        all = all && r.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria pass"
                            : "acceptance: FAILURES present");
    return all ? 0 : 1;
}
