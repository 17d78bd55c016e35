#pragma once

// Post-processing and online metrics: instantaneous power, steady-state
// detection, frequency/RoCoF estimation, an SRF-PLL for node-angle
// measurement, droop-balance verification, the running-cost evaluation and
// power-sharing metrics.

#include <cstddef>
#include <optional>
#include <vector>

#include "adsim/control.hpp"
#include "adsim/frames.hpp"

namespace adsim {

struct PowerPQ {
    double p = 0.0;  // [W]
    double q = 0.0;  // [var], lagging current positive
};

/// P = v.i_o in abc; Q from the two-axis frame at the converter angle,
/// Q = 1.5*(v_q i_d - v_d i_q). Equivalent to the 90-degree-rotation form for
/// balanced signals.
PowerPQ instantaneous_power(const ThreePhase& v, const ThreePhase& i_o, double theta);

struct SteadyStateWindow {
    double window = 0.2;      // [s]
    double tolerance = 5e-3;  // relative band
};

/// Earliest time after which the channel stays within +-tolerance of its
/// trailing-window mean until the end of the trace; nullopt if it never does.
/// The band is relative to max(|window mean|, floor).
std::optional<double> detect_steady_state(const std::vector<double>& channel, double dt,
                                          const SteadyStateWindow& w, double floor = 1e-9);

/// Remove 2*pi jumps from a wrapped angle trace.
std::vector<double> unwrap_angles(const std::vector<double>& theta);

struct FrequencyTraces {
    std::vector<double> omega;  // [rad/s]
    std::vector<double> rocof;  // [rad/s^2]
};

/// Central finite differences of an (unwrapped) angle trace; one-sided at the
/// endpoints. Wrapped input is unwrapped first.
FrequencyTraces frequency_and_rocof(const std::vector<double>& theta_trace, double dt);

// ---------------------------------------------------------------------------
// Synchronous-reference-frame PLL

struct PllGains {
    double kp = 100.0;
    double ki = 2000.0;
};

struct PllState {
    double theta_hat = 0.0;
    double omega_hat = 100.0 * 3.14159265358979323846;
    double integrator = 0.0;   // [rad/s]
    bool locked_input = true;  // input above the lock threshold last step
    bool lock_lost = false;    // diagnostic, see pll_step
    // Phase-detector error bookkeeping for the lock diagnostic.
    double err_accum = 0.0;
    double err_window_mean = -1.0;
    double window_elapsed = 0.0;
    std::size_t window_count = 0;
};

/// One PLL step on a three-phase voltage. The phase-detector error is the
/// q-axis at theta_hat normalized by the signal amplitude; below 1% of
/// nominal amplitude the loop coasts and flags the input. The lock_lost
/// diagnostic latches when the mean |error| fails to decrease over a 0.2 s
/// window while still large, or the frequency estimate leaves
/// [0.5, 1.5] * nominal.
PllState pll_step(const PllState& s, const ThreePhase& v, double ts,
                  const PllGains& gains, double omega_nominal,
                  double nominal_amplitude);

// ---------------------------------------------------------------------------
// Droop-law verification and cost

/// gamma*(theta_s - theta_star) + P_s - P*; near zero at a valid droop
/// steady state.
double droop_law_residual(const DroopGains& g, double theta_s, double theta_star,
                          double p_s);

struct RunningCost {
    double total = 0.0;               // trapezoidal integral
    std::vector<double> integrand;    // alpha u^2 + (1/4 alpha)(g theta~ + P - P*)^2
};

RunningCost running_cost(const std::vector<double>& theta_error,
                         const std::vector<double>& power,
                         const std::vector<double>& u, const DroopGains& g, double dt);

struct SharingMetrics {
    double ratio = 0.0;
    double relative_error = 0.0;  // vs expected ratio
    double p1_mean = 0.0;
    double p2_mean = 0.0;
};

/// Ratio of steady-state means over the trailing window. Throws
/// std::domain_error when the denominator mean is below 1 W.
SharingMetrics sharing_metrics(const std::vector<double>& p1,
                               const std::vector<double>& p2, double dt,
                               double window, double r_expected);

// ---------------------------------------------------------------------------
// Single-frequency spectrum scan (drift-peak detection)

struct SpectralPeak {
    double frequency = 0.0;  // [Hz]
    double magnitude = 0.0;  // Hann-windowed DFT magnitude, mean removed
};

/// Goertzel-style magnitude at one frequency (mean removed, Hann window).
double spectral_magnitude(const std::vector<double>& x, double dt, double f_hz);

/// Densely scans [f_min, f_max] and returns the largest magnitude.
SpectralPeak dominant_frequency(const std::vector<double>& x, double dt, double f_min,
                                double f_max, double f_step);

}  // namespace adsim
