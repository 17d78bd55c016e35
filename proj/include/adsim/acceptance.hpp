#pragma once

// The acceptance checks: quantitative steady-state/algebraic criteria plus
// transient property checks, each returning a pass/fail with a one-line
// detail. The same thresholds back `simtool run --check` and the acceptance
// test suite; there are no hidden tolerances.

#include <functional>
#include <string>
#include <vector>

#include "adsim/sim.hpp"

namespace adsim {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Run every acceptance criterion (executes all required scenarios).
std::vector<CriterionResult> run_acceptance();

/// Criteria relevant to one finished run of a named built-in scenario, for
/// `simtool run --check`. Re-runs companion scenarios where a criterion needs
/// them.
std::vector<CriterionResult> check_scenario(const std::string& name,
                                            const RunResult& result);

/// Render one pass/fail line.
std::string format_criterion(const CriterionResult& r);

// Individual criteria (grouped where one scenario covers several checks).
CriterionResult criterion_gamma_bound();
CriterionResult criterion_interconnection_angle();
CriterionResult criterion_droop_steady_state(const RunResult& loadstep);
CriterionResult criterion_direct_vs_indirect(const RunResult& direct,
                                             const RunResult& indirect);
CriterionResult criterion_synchronization(const RunResult& sync_lossless,
                                          const RunResult& sync_lossy);
CriterionResult criterion_power_sharing(const RunResult& sharing_r1,
                                        const RunResult& sharing_r2);
CriterionResult criterion_reactive_power(const RunResult& sync_run,
                                         const RunResult& mismatch_run);
CriterionResult criterion_clock_drift(const DriftDemoResult& demo);
CriterionResult criterion_tuning_trends(const std::vector<SummaryReport>& alpha_sweep,
                                        const std::vector<double>& alphas,
                                        const std::vector<SummaryReport>& gamma_sweep,
                                        const std::vector<double>& gammas);
CriterionResult criterion_oracle_equivalence(const std::vector<const RunResult*>& runs);
CriterionResult criterion_numerics(const RunResult& coarse, const RunResult& fine);
CriterionResult criterion_cost_decay(const RunResult& converged);

/// Sync run with a +1 V source-amplitude offset on converter I.
ScenarioSpec amplitude_mismatch_sync_spec(double extra_volts = 1.0);

}  // namespace adsim
