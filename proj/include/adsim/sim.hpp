#pragma once

// Hybrid fixed-step execution engine: classical RK4 on the continuous plant
// between controller samples, zero-order-hold controller outputs, event
// scheduling, per-converter clock drift and trace recording.
//
// Two plant backends:
//  - SingleConverter: full abc averaged model (boost + DC/AC + LC filter with
//    the local load on the capacitor node).
//  - ReducedNetwork: the two-source reduction used by the interconnection
//    studies; converters enter as their switching-voltage phasors feeding RL
//    lines to an algebraic resistive node, simulated in a frame rotating at
//    the nominal frequency.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adsim/analysis.hpp"
#include "adsim/control.hpp"
#include "adsim/plant.hpp"
#include "adsim/powerflow.hpp"

namespace adsim {

struct ClockModel {
    std::vector<double> epsilon;       // per-converter relative drift
    bool master_clock_enabled = false;

    double effective_epsilon(std::size_t k) const {
        if (master_clock_enabled || k >= epsilon.size()) {
            return 0.0;
        }
        return epsilon[k];
    }
};

enum class EventAction { CloseBreaker, LoadStep, EnableModulation, SetGains };

struct Event {
    double time = 0.0;
    EventAction action = EventAction::CloseBreaker;
    int target = 0;               // converter index, or load node for LoadStep
    double new_resistance = 0.0;  // LoadStep [ohm]
    DroopGains gains;             // SetGains
};

enum class ControlMode { Direct, Indirect };

struct ConverterConfig {
    BoostParams boost;
    BoostControlGains boost_control;
    AcFilterParams filter;
    DroopGains droop;
    IndirectGains indirect;
    ControlMode mode = ControlMode::Direct;
    double modulation_amplitude = 0.86738431825549835;  // 2 V*/V_dc_nom
    bool stiff_dc = false;            // hold V_dc at its setpoint, skip the boost
    bool modulation_on = true;        // at t = 0
    bool breaker_closed = true;       // at t = 0 (reduced network only)
};

enum class NetworkModel { SingleConverter, ReducedNetwork };

struct ScenarioSpec {
    std::string name = "custom";
    NetworkModel model = NetworkModel::SingleConverter;
    std::vector<ConverterConfig> converters;
    NetworkTopology topology;   // reduced network only
    ClockModel clock;
    std::vector<Event> events;
    double duration = 1.0;
    double plant_dt = 1e-5;
    double controller_ts = 1e-4;
    double power_filter_window = 0.02;  // [s], 0 disables
    SteadyStateWindow steady;
    int record_decimation = 10;
    std::vector<std::string> record_channels;  // empty records everything
    bool pll_seed = true;   // seed the nominal angle from the node PLL on enable
    PllGains pll;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    int substeps_per_tick() const;
};

struct TraceRecorder {
    double dt = 0.0;  // sample period = plant_dt * decimation
    std::vector<double> time;
    std::vector<std::string> names;
    std::vector<std::vector<double>> channels;
    struct Marker {
        double time = 0.0;
        std::string label;
    };
    std::vector<Marker> markers;

    bool has(const std::string& name) const;
    const std::vector<double>& channel(const std::string& name) const;
    std::size_t samples() const { return time.size(); }
};

struct ConverterSummary {
    double p_steady = 0.0;
    double q_steady = 0.0;
    double p_star = 0.0;            // gains in effect at the end of the run
    double gamma = 0.0;
    double alpha = 0.0;
    double delta_theta_steady = 0.0;
    double droop_residual = 0.0;    // gamma*dtheta + P - P* at steady state
    double freq_error_hz = 0.0;     // |f - 50| over the tail window (max)
    double min_freq_hz = 0.0;       // after the last event
    double max_freq_hz = 0.0;
    double v_dc_final = 0.0;
    double i_b_final = 0.0;
    double source_amplitude = 0.0;  // reduced model: |e_k| at steady state
    std::optional<double> settle_time;  // steady-state detector on P
};

struct SummaryReport {
    std::string scenario;
    bool completed = true;
    std::string abort_reason;
    double duration = 0.0;
    std::vector<ConverterSummary> converters;
    double angle_diff_12 = 0.0;         // modulation angle difference, steady
    double theta_star_offset_12 = 0.0;  // nominal-angle offset in effect
    double node_voltage_amplitude = 0.0;
    double load_power = 0.0;
    bool security_ok = true;
    SaturationCounters saturations;
    double running_cost_total = 0.0;
    double cost_tail_peak_ratio = 0.0;  // max integrand over final 10% / peak
    std::optional<TwoSourceSolution> oracle;  // reduced two-converter runs
    std::vector<double> terminal_state;
    std::vector<std::string> state_names;
};

struct RunResult {
    TraceRecorder trace;
    SummaryReport summary;
};

/// Execute one scenario. Aborts (completed = false, partial trace kept) if any
/// state goes non-finite.
RunResult run_scenario(const ScenarioSpec& spec);

/// Apply `values` one at a time to the dotted `parameter` path and run each
/// variant. Supported paths: droop.alpha, droop.gamma, droop.p_star (all
/// converters), network.r_load, network.r_line, clock.delta_epsilon.
/// Throws std::invalid_argument for anything else.
std::vector<SummaryReport> sweep(const ScenarioSpec& spec, const std::string& parameter,
                                 const std::vector<double>& values);

void apply_parameter(ScenarioSpec& spec, const std::string& parameter, double value);

struct DriftDemoResult {
    RunResult drift;        // +-delta_epsilon/2, free clocks
    RunResult master;       // same drifts, master clock enabled
    RunResult zero_drift;   // epsilon = 0 baseline
};

/// Two-converter clock-drift study: a drifting run, its master-clock
/// companion and the zero-drift baseline.
DriftDemoResult clock_drift_demo(const ScenarioSpec& spec, double delta_epsilon);

/// Wrap-aware difference mapped to (-pi, pi].
double angle_difference(double a, double b);

}  // namespace adsim
