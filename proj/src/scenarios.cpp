#include "adsim/scenarios.hpp"

#include <stdexcept>

namespace adsim {

BoostParams default_boost() {
    BoostParams p;
    p.l_b = 2.36e-3;
    p.r_b = 1e-3;
    p.c_dc = 3e-3;
    p.g_dc = 2.13e-4;  // calibrated so V_b I_b = G_dc V_dc^2 + P* gives I_b = 5 A
    p.v_b = 600.0;
    p.v_min = 1.0;
    return p;
}

BoostControlGains default_boost_control() {
    BoostControlGains g;
    g.k_p = 0.3;
    g.k_i = 12.0;
    g.k_bp = 10.0;
    g.k_bi = 200.0;
    g.v_dc_star = 750.0;
    g.d_max = 0.95;
    return g;
}

AcFilterParams default_filter() {
    AcFilterParams f;
    f.l = 2.36e-3;
    f.r = 1e-3;
    f.c = 1e-5;
    f.g = 1.0 / 58.77;
    return f;
}

DroopGains default_droop() {
    DroopGains g;
    g.alpha = 2000.0;
    g.gamma = 5e4;
    g.omega_star = 100.0 * 3.14159265358979323846;
    g.p_star = kNominalPower;
    g.theta_star_0 = 0.0;
    return g;
}

IndirectGains default_indirect() {
    IndirectGains g;
    g.k_vp = 0.05;
    g.k_vi = 0.4;
    g.k_ip = 10.0;
    g.k_ii = 240.0;
    g.v_star = kNominalAcAmplitude;
    return g;
}

ConverterConfig default_converter() {
    ConverterConfig c;
    c.boost = default_boost();
    c.boost_control = default_boost_control();
    c.filter = default_filter();
    c.droop = default_droop();
    c.indirect = default_indirect();
    c.mode = ControlMode::Direct;
    c.modulation_amplitude = 2.0 * kNominalAcAmplitude / 750.0;
    return c;
}

double default_reduced_load_resistance() {
    return kNominalAcAmplitude * kNominalAcAmplitude / kNominalPower;
}

namespace {

ScenarioSpec single_converter_base(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.model = NetworkModel::SingleConverter;
    s.converters = {default_converter()};
    s.duration = 2.0;
    s.plant_dt = 1e-5;
    s.controller_ts = 1e-4;
    s.record_decimation = 10;
    return s;
}

ScenarioSpec two_converter_base(const std::string& name, double r_line) {
    ScenarioSpec s;
    s.name = name;
    s.model = NetworkModel::ReducedNetwork;
    s.converters = {default_converter(), default_converter()};
    s.topology.n_converters = 2;
    LineParams lp;
    lp.r_l = r_line;
    lp.l_l = 7e-4;
    s.topology.lines = {{0, 0, lp}, {1, 0, lp}};
    s.topology.loads = {{0, default_reduced_load_resistance()}};
    s.duration = 3.0;
    s.plant_dt = 1e-5;
    s.controller_ts = 1e-4;
    s.record_decimation = 10;
    return s;
}

}  // namespace

ScenarioSpec builtin_blackstart() {
    return single_converter_base("blackstart");
}

ScenarioSpec builtin_loadstep(ControlMode mode, double step_resistance) {
    ScenarioSpec s = single_converter_base("loadstep");
    s.converters[0].mode = mode;
    Event step;
    step.time = 0.2;
    step.action = EventAction::LoadStep;
    step.target = 0;
    step.new_resistance = step_resistance;
    s.events = {step};
    return s;
}

ScenarioSpec builtin_sync(double r_line, bool pll_seed) {
    ScenarioSpec s = two_converter_base("sync", r_line);
    s.pll_seed = pll_seed;
    // Converter I carries the full setpoint; converter II interconnects with
    // a zero power setpoint.
    s.converters[0].droop.p_star = kNominalPower;
    s.converters[1].droop.p_star = 0.0;
    s.converters[1].modulation_on = false;
    s.converters[1].breaker_closed = false;
    Event close;
    close.time = 1.0;
    close.action = EventAction::CloseBreaker;
    close.target = 1;
    Event enable;
    enable.time = 1.0;
    enable.action = EventAction::EnableModulation;
    enable.target = 1;
    s.events = {close, enable};
    return s;
}

ScenarioSpec builtin_sharing(double ratio, double r_line, double gamma_2) {
    if (!(ratio > 0.0)) {
        throw std::invalid_argument("sharing: ratio must be > 0");
    }
    ScenarioSpec s = builtin_sync(r_line, true);
    s.name = "sharing";
    s.duration = 5.0;
    const double share_time = 3.0;
    DroopGains g2 = default_droop();
    g2.gamma = gamma_2;
    g2.p_star = kNominalPower / (1.0 + ratio);
    DroopGains g1 = g2;
    g1.gamma = gamma_2 * ratio;
    g1.p_star = kNominalPower - g2.p_star;
    Event e1;
    e1.time = share_time;
    e1.action = EventAction::SetGains;
    e1.target = 0;
    e1.gains = g1;
    Event e2 = e1;
    e2.target = 1;
    e2.gains = g2;
    s.events.push_back(e1);
    s.events.push_back(e2);
    return s;
}

ScenarioSpec builtin_drift() {
    ScenarioSpec s = two_converter_base("drift", 0.02);
    s.duration = 10.0;
    s.record_decimation = 100;
    for (ConverterConfig& c : s.converters) {
        // Weak droop and stiff DC links: the study isolates the raw
        // integration drift, and the circulating power at large angle
        // excursions is far beyond what a 3 kW boost stage could supply.
        c.stiff_dc = true;
        c.droop.alpha = 1e6;
        c.droop.p_star = 0.5 * kNominalPower;
    }
    s.clock.epsilon = {0.0, 0.0};
    return s;
}

ScenarioSpec builtin_by_name(const std::string& name) {
    if (name == "blackstart") return builtin_blackstart();
    if (name == "loadstep") return builtin_loadstep();
    if (name == "sync") return builtin_sync();
    if (name == "sharing") return builtin_sharing();
    if (name == "drift") return builtin_drift();
    throw std::invalid_argument("unknown scenario '" + name +
                                "' (expected blackstart, loadstep, sync, sharing or drift)");
}

}  // namespace adsim
