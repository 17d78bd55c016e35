#pragma once

// Continuous-time averaged models: boost stage, DC/AC stage with LC output
// filter, RL lines and resistive loads. All functions here are pure
// state-derivative evaluations for the fixed-step integrator.

#include <cstdint>
#include <string>
#include <vector>

#include "adsim/frames.hpp"

namespace adsim {

/// Boost (DC/DC) stage parameters. V_b is a stiff source.
struct BoostParams {
    double l_b = 2.36e-3;    // boost inductance [H]
    double r_b = 1e-3;       // parasitic resistance [ohm]
    double c_dc = 3e-3;      // DC-link capacitance [F]
    double g_dc = 2.13e-4;   // DC-side loss conductance [S]
    double v_b = 600.0;      // source voltage [V]
    double v_min = 1.0;      // DC-link divide clamp [V]
};

struct BoostState {
    double i_b = 0.0;    // inductor current [A]
    double v_dc = 0.0;   // DC-link voltage [V]
};

/// DC/AC output filter. g is the conductance from the capacitor node to
/// ground; in the single-converter scenario it is the load itself.
struct AcFilterParams {
    double l = 2.36e-3;
    double r = 1e-3;
    double c = 1e-5;
    double g = 1.0 / 58.77;
};

struct AcState {
    ThreePhase i;   // filter inductor current [A]
    ThreePhase v;   // filter capacitor voltage [V]
};

struct LineParams {
    double r_l = 0.02;    // series resistance [ohm]
    double l_l = 7e-4;    // series inductance [H]
};

/// Saturation / clamping diagnostics accumulated over a run.
struct SaturationCounters {
    std::uint64_t boost_duty = 0;
    std::uint64_t modulation = 0;
    std::uint64_t dc_link_clamp = 0;
};

/// dI_b/dt, dV_dc/dt for the boost stage alone. The DC/AC draw from the link
/// is composed at the converter-unit level, not here.
BoostState boost_derivatives(const BoostParams& p, const BoostState& s, double v_c);

/// Switch-node voltage from the boost duty cycle: (1-d)*V_dc. Out-of-range
/// duty is clamped and counted.
double duty_to_vc(double duty, double v_dc, SaturationCounters* counters = nullptr);

/// Filter derivatives per phase: L di = -R i + 0.5 u V_dc - v,
/// C dv = -G v + i - i_o. Modulation components are clamped to [-1, 1].
AcState dcac_derivatives(const AcFilterParams& p, const AcState& s, ThreePhase u_bar,
                         double v_dc, const ThreePhase& i_o,
                         SaturationCounters* counters = nullptr);

// ---------------------------------------------------------------------------
// Network: converters joined to load nodes by RL lines. The load nodes are
// purely resistive and algebraic (no capacitance), so the whole network stays
// an ODE in the line currents.

struct Line {
    int from_converter = 0;   // index into converters
    int to_node = 0;          // index into load nodes
    LineParams params;
};

struct Load {
    int node = 0;
    double resistance = 0.0;  // per-phase [ohm]
};

struct NetworkTopology {
    int n_converters = 1;
    std::vector<Line> lines;
    std::vector<Load> loads;

    /// Throws std::invalid_argument naming the offending element if a line or
    /// load references a missing endpoint or a load node has no line.
    void validate() const;
    int n_nodes() const;
};

/// One-component slice of the network algebra. Solves the algebraic load
/// nodes v_0 = R_load * sum(i_l) and returns, per line, the unscaled current
/// derivative L di/dt = v_conv - R_l i - v_0 along with per-converter port
/// currents. Componentwise: callers run it once per phase (abc) or once per
/// axis (dq); any rotating-frame coupling is added by the integrator.
struct NetworkFlow {
    std::vector<double> di_dt;          // per line
    std::vector<double> port_current;   // per converter (sum of its lines)
    std::vector<double> node_voltage;   // per load node
};

NetworkFlow network_port_currents(const NetworkTopology& topo,
                                  const std::vector<double>& converter_voltages,
                                  const std::vector<double>& line_currents);

}  // namespace adsim
