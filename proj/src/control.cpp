#include "adsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adsim {

DroopOutput droop_step(const DroopGains& g, DroopState& s, double p_measured,
                       double ts, bool wrap_nominal) {
    if (!(ts > 0.0) || !std::isfinite(p_measured)) {
        throw std::invalid_argument("droop_step: need ts > 0 and finite power");
    }
    const double u = -(0.5 / g.alpha) * (g.gamma * s.delta_theta + p_measured - g.p_star);
    s.delta_theta += ts * u;
    const double advanced = s.theta_star + ts * g.omega_star;
    s.theta_star = wrap_nominal ? wrap_angle(advanced) : advanced;
    if (std::abs(s.delta_theta) >= 3.14159265358979323846) {
        ++s.large_error_count;  // error coordinate left the principal branch
    }
    DroopOutput out;
    out.u = u;
    out.omega = g.omega_star + u;
    out.theta = wrap_angle(s.theta_star + s.delta_theta);
    return out;
}

ThreePhase direct_modulation(double theta, double amplitude) {
    if (!(amplitude > 0.0) || !(amplitude < 1.0)) {
        throw std::invalid_argument("direct_modulation: amplitude must lie in (0, 1)");
    }
    return synth_three_phase(amplitude, theta);
}

double ac_duty_from_modulation(double u_bar) {
    return 0.5 + 0.5 * u_bar;
}

double boost_control_step(const BoostControlGains& g, const BoostParams& plant,
                          BoostControlState& s, const BoostMeasurement& m, double ts,
                          SaturationCounters* counters) {
    const double v_dc = std::max(m.v_dc, plant.v_min);
    const double err_v = m.v_dc - g.v_dc_star;
    const double i_b_ref = (v_dc / plant.v_b) *
                           (plant.g_dc * m.v_dc - g.k_p * err_v - g.k_i * s.voltage.integral);
    const double err_i = m.i_b - i_b_ref;
    const double v_l_ref =
        plant.r_b * m.i_b - g.k_bp * err_i - g.k_bi * s.current.integral;
    double duty = 1.0 - (plant.v_b - v_l_ref) / v_dc;

    const bool saturated = duty < 0.0 || duty > g.d_max;
    if (saturated) {
        duty = std::clamp(duty, 0.0, g.d_max);
        if (counters) {
            ++counters->boost_duty;
        }
    }
    s.voltage.frozen = saturated;
    s.current.frozen = saturated;
    if (!saturated) {
        s.voltage.integral += ts * err_v;
        s.current.integral += ts * err_i;
    }
    return duty;
}

namespace {

inline DqPair apply_j(const DqPair& x) {  // 90-degree rotation, (d, q) as d + jq
    return {-x.q, x.d};
}

}  // namespace

ThreePhase indirect_control_step(const IndirectGains& g, IndirectState& s,
                                 double theta, const IndirectMeasurement& m,
                                 const AcFilterParams& filter, double omega_star,
                                 double ts, SaturationCounters* counters) {
    const DqPair v = park(theta, m.v);
    const DqPair i = park(theta, m.i);
    const DqPair i_o = park(theta, m.i_o);

    // Outer voltage loop: reference current with shunt admittance feedforward.
    const DqPair v_err{v.d - g.v_star, v.q};
    const DqPair jv = apply_j(v);
    const DqPair i_ref{
        filter.g * v.d + filter.c * omega_star * jv.d + i_o.d - g.k_vp * v_err.d -
            g.k_vi * s.voltage_d.integral,
        filter.g * v.q + filter.c * omega_star * jv.q + i_o.q - g.k_vp * v_err.q -
            g.k_vi * s.voltage_q.integral};

    // Inner current loop: switching voltage through the series impedance.
    const DqPair i_err{i.d - i_ref.d, i.q - i_ref.q};
    const DqPair ji = apply_j(i);
    const DqPair v_m{
        filter.r * i.d + filter.l * omega_star * ji.d + v.d - g.k_ip * i_err.d -
            g.k_ii * s.current_d.integral,
        filter.r * i.q + filter.l * omega_star * ji.q + v.q - g.k_ip * i_err.q -
            g.k_ii * s.current_q.integral};

    const double v_dc = std::max(m.v_dc, 1.0);
    ThreePhase u_bar = (2.0 / v_dc) * inverse_park(theta, v_m);

    bool saturated = false;
    for (double* u : {&u_bar.a, &u_bar.b, &u_bar.c}) {
        if (*u < -1.0 || *u > 1.0) {
            *u = std::clamp(*u, -1.0, 1.0);
            saturated = true;
            if (counters) {
                ++counters->modulation;
            }
        }
    }
    // Directional conditional integration: while the modulation clamps, only
    // increments that pull the switching-voltage command toward the feasible
    // set may accumulate (positive error on an axis shrinks that axis of
    // v_m). A blanket freeze can lock the loop in a clipped equilibrium when
    // the command is infeasible at black start.
    const auto blocked = [&](double err, double cmd_axis) {
        return saturated && err * cmd_axis <= 0.0;
    };
    s.voltage_d.frozen = blocked(v_err.d, v_m.d);
    s.voltage_q.frozen = blocked(v_err.q, v_m.q);
    s.current_d.frozen = blocked(i_err.d, v_m.d);
    s.current_q.frozen = blocked(i_err.q, v_m.q);
    if (!s.voltage_d.frozen) s.voltage_d.integral += ts * v_err.d;
    if (!s.voltage_q.frozen) s.voltage_q.integral += ts * v_err.q;
    if (!s.current_d.frozen) s.current_d.integral += ts * i_err.d;
    if (!s.current_q.frozen) s.current_q.integral += ts * i_err.q;
    return u_bar;
}

void MovingAverage::reset(std::size_t window) {
    buf_.assign(window, 0.0);
    head_ = 0;
    count_ = 0;
    sum_ = 0.0;
    value_ = 0.0;
}

double MovingAverage::push(double x) {
    if (buf_.empty()) {
        value_ = x;
        return value_;
    }
    if (count_ == buf_.size()) {
        sum_ -= buf_[head_];
    } else {
        ++count_;
    }
    buf_[head_] = x;
    head_ = (head_ + 1) % buf_.size();
    sum_ += x;
    value_ = sum_ / static_cast<double>(count_);
    return value_;
}

}  // namespace adsim
