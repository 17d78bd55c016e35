#include "adsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adsim {

BoostState boost_derivatives(const BoostParams& p, const BoostState& s, double v_c) {
    BoostState d;
    d.i_b = (-p.r_b * s.i_b + p.v_b - v_c) / p.l_b;
    // I_dc = V_b I_b / V_dc transfers the full source power to the link; the
    // divide is clamped because the expression is singular at black start.
    const double i_dc = p.v_b * s.i_b / std::max(s.v_dc, p.v_min);
    d.v_dc = (-p.g_dc * s.v_dc + i_dc) / p.c_dc;
    return d;
}

double duty_to_vc(double duty, double v_dc, SaturationCounters* counters) {
    if (duty < 0.0 || duty > 1.0) {
        duty = std::clamp(duty, 0.0, 1.0);
        if (counters) {
            ++counters->boost_duty;
        }
    }
    return (1.0 - duty) * v_dc;
}

namespace {

double clamp_modulation(double u, SaturationCounters* counters) {
    if (u < -1.0 || u > 1.0) {
        if (counters) {
            ++counters->modulation;
        }
        return std::clamp(u, -1.0, 1.0);
    }
    return u;
}

}  // namespace

AcState dcac_derivatives(const AcFilterParams& p, const AcState& s, ThreePhase u_bar,
                         double v_dc, const ThreePhase& i_o,
                         SaturationCounters* counters) {
    u_bar.a = clamp_modulation(u_bar.a, counters);
    u_bar.b = clamp_modulation(u_bar.b, counters);
    u_bar.c = clamp_modulation(u_bar.c, counters);
    AcState d;
    d.i = (1.0 / p.l) * ((0.5 * v_dc) * u_bar - (p.r * s.i) - s.v);
    d.v = (1.0 / p.c) * (s.i - (p.g * s.v) - i_o);
    return d;
}

void NetworkTopology::validate() const {
    if (n_converters < 1) {
        throw std::invalid_argument("topology: n_converters must be >= 1");
    }
    const int nn = n_nodes();
    std::vector<bool> node_fed(static_cast<std::size_t>(nn), false);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.from_converter < 0 || l.from_converter >= n_converters) {
            throw std::invalid_argument("topology: line " + std::to_string(i) +
                                        " references missing converter " +
                                        std::to_string(l.from_converter));
        }
        if (l.to_node < 0) {
            throw std::invalid_argument("topology: line " + std::to_string(i) +
                                        " references negative node");
        }
        if (l.params.l_l <= 0.0 || l.params.r_l < 0.0) {
            throw std::invalid_argument("topology: line " + std::to_string(i) +
                                        " needs l_l > 0 and r_l >= 0");
        }
        node_fed[static_cast<std::size_t>(l.to_node)] = true;
    }
    for (const Load& ld : loads) {
        if (ld.resistance <= 0.0) {
            throw std::invalid_argument("topology: load resistance must be > 0");
        }
        if (ld.node < 0 || ld.node >= nn ||
            !node_fed[static_cast<std::size_t>(ld.node)]) {
            throw std::invalid_argument("topology: load node " + std::to_string(ld.node) +
                                        " is not connected to any line");
        }
    }
}

int NetworkTopology::n_nodes() const {
    int nn = 0;
    for (const Line& l : lines) {
        nn = std::max(nn, l.to_node + 1);
    }
    for (const Load& ld : loads) {
        nn = std::max(nn, ld.node + 1);
    }
    return nn;
}

NetworkFlow network_port_currents(const NetworkTopology& topo,
                                  const std::vector<double>& converter_voltages,
                                  const std::vector<double>& line_currents) {
    if (converter_voltages.size() != static_cast<std::size_t>(topo.n_converters) ||
        line_currents.size() != topo.lines.size()) {
        throw std::invalid_argument("network_port_currents: size mismatch");
    }
    NetworkFlow flow;
    const int nn = topo.n_nodes();
    flow.node_voltage.assign(static_cast<std::size_t>(nn), 0.0);
    flow.port_current.assign(static_cast<std::size_t>(topo.n_converters), 0.0);
    flow.di_dt.resize(topo.lines.size());

    // Load nodes are algebraic: v_0 = R_load * sum of incoming line currents.
    std::vector<double> node_sum(static_cast<std::size_t>(nn), 0.0);
    for (std::size_t i = 0; i < topo.lines.size(); ++i) {
        node_sum[static_cast<std::size_t>(topo.lines[i].to_node)] += line_currents[i];
    }
    for (const Load& ld : topo.loads) {
        flow.node_voltage[static_cast<std::size_t>(ld.node)] =
            ld.resistance * node_sum[static_cast<std::size_t>(ld.node)];
    }

    for (std::size_t i = 0; i < topo.lines.size(); ++i) {
        const Line& l = topo.lines[i];
        const double v_k = converter_voltages[static_cast<std::size_t>(l.from_converter)];
        const double v_0 = flow.node_voltage[static_cast<std::size_t>(l.to_node)];
        flow.di_dt[i] = (v_k - l.params.r_l * line_currents[i] - v_0) / l.params.l_l;
        flow.port_current[static_cast<std::size_t>(l.from_converter)] += line_currents[i];
    }
    return flow;
}

}  // namespace adsim
