#pragma once

// Built-in scenario definitions with the hardware-default parameter set:
// single-converter black start and load step, two-converter synchronization,
// power sharing and the clock-drift study.

#include <string>

#include "adsim/sim.hpp"

namespace adsim {

/// Nominal AC amplitude 230*sqrt(2) [V].
inline constexpr double kNominalAcAmplitude = 325.26911934581186;
/// Nominal total active power [W].
inline constexpr double kNominalPower = 2880.0;
/// Reduced-frame line reactance at 50 Hz for the default 0.7 mH line [ohm].
inline constexpr double kDefaultLineReactance = 0.21991148575128552;

BoostParams default_boost();
BoostControlGains default_boost_control();
AcFilterParams default_filter();
DroopGains default_droop();
IndirectGains default_indirect();
ConverterConfig default_converter();

/// Load that draws the nominal power at nominal amplitude in the reduced
/// frame: V*^2 / P* [ohm].
double default_reduced_load_resistance();

ScenarioSpec builtin_blackstart();
/// Load step from the default local load to `step_resistance` at 0.2 s.
ScenarioSpec builtin_loadstep(ControlMode mode = ControlMode::Direct,
                              double step_resistance = 41.94);
/// Converter I feeds the load from t = 0; converter II interconnects at 1 s
/// with its nominal angle seeded from the node PLL.
ScenarioSpec builtin_sync(double r_line = 0.02, bool pll_seed = true);
/// Synchronization followed by a gain change to the sharing setup
/// (gamma_1/gamma_2 = P*_1/P*_2 = ratio) at 3 s.
ScenarioSpec builtin_sharing(double ratio = 1.0, double r_line = 0.02,
                             double gamma_2 = 500.0);
/// Two drifting converters on stiff DC links with a weak droop, for the
/// uncompensated clock-drift study.
ScenarioSpec builtin_drift();

/// Builder lookup for the CLI: blackstart, loadstep, sync, sharing, drift.
/// Throws std::invalid_argument for unknown names.
ScenarioSpec builtin_by_name(const std::string& name);

}  // namespace adsim
