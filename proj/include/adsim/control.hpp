#pragma once

// Discrete-time controllers: the angle-droop law (forward-Euler form with
// nominal-angle wrapping), direct modulation synthesis, the cascaded PI pair
// for the boost stage, and the indirect dq voltage/current controller.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "adsim/frames.hpp"
#include "adsim/plant.hpp"

namespace adsim {

// ---------------------------------------------------------------------------
// Angle droop

struct DroopGains {
    double alpha = 2000.0;        // input-effort gain [>0]
    double gamma = 5e4;           // power-to-angle gain [W/rad, >0]
    double omega_star = 100.0 * 3.14159265358979323846;  // [rad/s]
    double p_star = 2880.0;       // nominal active power [W]
    double theta_star_0 = 0.0;    // initial nominal angle [rad]
};

struct DroopState {
    double theta_star = 0.0;      // wrapped nominal angle [rad]
    double delta_theta = 0.0;     // error coordinate [rad]
    std::uint64_t large_error_count = 0;  // samples with |delta_theta| >= pi/2
};

struct DroopOutput {
    double theta = 0.0;    // modulation angle = theta_star + delta_theta, wrapped
    double omega = 0.0;    // controller frequency omega_star + u
    double u = 0.0;        // droop input [rad/s]
};

/// One forward-Euler droop step:
///   u          = -(1/2a)(g*dtheta + P - P*)
///   dtheta[+1] = dtheta + Ts*u
///   theta*[+1] = wrap(theta* + Ts*w*)
/// Pass `wrap_nominal = false` to keep theta* unbounded (numeric-equivalence
/// studies only; both forms drive identical modulation).
DroopOutput droop_step(const DroopGains& g, DroopState& s, double p_measured,
                       double ts, bool wrap_nominal = true);

/// Fixed point of the droop error coordinate for constant power.
inline double droop_fixed_point(const DroopGains& g, double p_measured) {
    return (g.p_star - p_measured) / g.gamma;
}

/// Modulation vector A*(sin t, sin(t-2pi/3), sin(t+2pi/3)).
/// Throws std::invalid_argument unless 0 < A < 1.
ThreePhase direct_modulation(double theta, double amplitude);

/// AC bridge duty from a modulation component: 1/2 + u/2.
double ac_duty_from_modulation(double u_bar);

// ---------------------------------------------------------------------------
// PI building block

struct PiState {
    double integral = 0.0;
    bool frozen = false;   // anti-windup: conditional integration
};

// ---------------------------------------------------------------------------
// Boost cascaded control

struct BoostControlGains {
    double k_p = 0.3;      // DC-voltage loop
    double k_i = 12.0;
    double k_bp = 10.0;    // current loop (faster than the voltage loop)
    double k_bi = 200.0;
    double v_dc_star = 750.0;
    double d_max = 0.95;
};

struct BoostControlState {
    PiState voltage;
    PiState current;
};

struct BoostMeasurement {
    double v_dc = 0.0;
    double i_b = 0.0;
};

/// One step of the cascaded boost control; returns the duty cycle in
/// [0, d_max]. Both integrators freeze while the duty saturates.
double boost_control_step(const BoostControlGains& g, const BoostParams& plant,
                          BoostControlState& s, const BoostMeasurement& m, double ts,
                          SaturationCounters* counters = nullptr);

// ---------------------------------------------------------------------------
// Indirect (cascaded dq) modulation controller

struct IndirectGains {
    double k_vp = 0.05;
    double k_vi = 0.4;
    double k_ip = 10.0;
    double k_ii = 240.0;
    double v_star = 325.26911934581186;  // reference voltage amplitude [V]
};

struct IndirectState {
    PiState voltage_d, voltage_q;
    PiState current_d, current_q;
};

struct IndirectMeasurement {
    ThreePhase v;     // filter capacitor voltage
    ThreePhase i;     // filter inductor current
    ThreePhase i_o;   // output current
    double v_dc = 0.0;
};

/// Cascaded voltage/current control in the dq frame at the droop angle.
/// The outer loop shapes a current reference with the shunt admittance
/// feedforward Y = G + C*w*J; the inner loop produces the switching voltage
/// through Z = R + L*w*J, and the modulation is recovered in abc and clamped
/// to [-1, 1] with conditional integration on all four integrators.
ThreePhase indirect_control_step(const IndirectGains& g, IndirectState& s,
                                 double theta, const IndirectMeasurement& m,
                                 const AcFilterParams& filter, double omega_star,
                                 double ts, SaturationCounters* counters = nullptr);

// ---------------------------------------------------------------------------
// Power measurement filter

/// Fixed-window moving average (one fundamental cycle by default) applied to
/// the droop power feedback. A window of zero samples passes values through.
class MovingAverage {
  public:
    explicit MovingAverage(std::size_t window = 0) { reset(window); }

    void reset(std::size_t window);
    double push(double x);
    double value() const { return value_; }

  private:
    std::vector<double> buf_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    double sum_ = 0.0;
    double value_ = 0.0;
};

}  // namespace adsim
