#pragma once

// Algebraic steady-state analysis of the reduced two-source network: the
// power-transfer and reactive-power expressions, droop steady-state
// prediction, gain-bound helper, and the nonlinear fixed-point solve used as
// the independent oracle for the dynamic simulations.
//
// All quantities here live in the reduced single-line frame: amplitudes are
// phase peaks, powers are the frame-natural products (P = V_k V_0 / X * sin).

#include "adsim/control.hpp"

namespace adsim {

struct PhasorBus {
    double v = 0.0;       // amplitude [V], > 0
    double theta = 0.0;   // angle [rad]
};

/// Active power transferred over a purely inductive branch.
double line_power(double v_k, double v_0, double x_k0, double dtheta);

/// Source angle that transfers p_star over the branch: theta0 + asin(...).
/// Throws std::domain_error when |p_star*x/(v0*v1)| > 1 (infeasible transfer).
double interconnection_angle(double p_star, double x_10, double v_0, double v_1,
                             double theta_0);

struct ReactivePower {
    double full = 0.0;         // (Vk/Xkj) * (Vk - Vj cos dtheta)
    double small_signal = 0.0; // (Vk/Xkj) * (Vk - Vj)
};

ReactivePower reactive_power_kron(double v_k, double v_j, double x_kj, double dtheta);

/// Steady-state angle induced by the droop law: theta* + (P* - P_s)/gamma.
double droop_steady_angle(const DroopGains& g, double p_s);

/// Upper scale for the power-to-angle gain: V_k V_0 / X_k0. Callers compare
/// gamma against it (sharing stays clean for ratios well below 1).
double gamma_bound(double v_k, double v_0, double x_k0);

/// Nominal power ratio r = P*_1/P*_2 = gamma_1/gamma_2. Throws
/// std::invalid_argument when the two pairs disagree (1e-9 relative).
double sharing_ratio(const DroopGains& g1, const DroopGains& g2);

// ---------------------------------------------------------------------------
// Reduced two-source, one-load network

struct ReducedTwoSource {
    double v1 = 325.26911934581186;
    double v2 = 325.26911934581186;
    double v0 = 325.26911934581186;  // nominal node amplitude (small-signal route)
    double x10 = 0.21991148575128552;
    double x20 = 0.21991148575128552;
    double r_line1 = 0.0;
    double r_line2 = 0.0;
    double r_load = 105800.0 / 2880.0;
};

struct TwoSourceSolution {
    PhasorBus bus1, bus2, bus0;
    double p1 = 0.0, p2 = 0.0;       // injected at the sources
    double q1 = 0.0, q2 = 0.0;
    double p_load = 0.0;
    double line_loss1 = 0.0, line_loss2 = 0.0;
    double delta_p1 = 0.0, delta_p2 = 0.0;  // P*_k - P_k
    bool security_ok = true;          // every edge angle inside (-pi/2, pi/2)
    int iterations = 0;
    double residual = 0.0;            // max droop-balance residual [W]
    // Linearized (small-signal) companion solution.
    double p1_small = 0.0, p2_small = 0.0;
    double theta0_small = 0.0;
};

/// Damped fixed-point solve of the coupled droop + power-flow + load-balance
/// system. gains[k].theta_star_0 carries the nominal-angle offsets. Throws
/// std::runtime_error with the residual if 1e4 iterations do not reach 1e-9 W.
TwoSourceSolution solve_two_source_steady_state(const ReducedTwoSource& net,
                                                const DroopGains& gains1,
                                                const DroopGains& gains2);

}  // namespace adsim
