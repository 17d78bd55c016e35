#include "adsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace adsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ScenarioSpec::validate() const {
    if (converters.empty()) {
        throw std::invalid_argument("spec: at least one converter required");
    }
    if (!(duration >= 0.0)) {
        throw std::invalid_argument("spec: duration must be >= 0");
    }
    if (!(plant_dt > 0.0) || !(controller_ts > 0.0)) {
        throw std::invalid_argument("spec: plant_dt and controller_ts must be > 0");
    }
    const double ratio = controller_ts / plant_dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0) {
        throw std::invalid_argument("spec: plant_dt must divide controller_ts");
    }
    if (record_decimation < 1) {
        throw std::invalid_argument("spec: record_decimation must be >= 1");
    }
    for (std::size_t k = 0; k < converters.size(); ++k) {
        const ConverterConfig& c = converters[k];
        const std::string who = "converter " + std::to_string(k);
        if (!(c.modulation_amplitude > 0.0) || !(c.modulation_amplitude < 1.0)) {
            throw std::invalid_argument(who + ": modulation amplitude must lie in (0, 1)");
        }
        if (!(c.droop.alpha > 0.0)) {
            throw std::invalid_argument(who + ": alpha > 0 required");
        }
        if (!(c.droop.gamma > 0.0)) {
            throw std::invalid_argument(who + ": gamma > 0 required");
        }
        if (!(c.droop.omega_star > 0.0)) {
            throw std::invalid_argument(who + ": omega_star > 0 required");
        }
        if (!(c.filter.l > 0.0) || !(c.filter.c > 0.0) || c.filter.r < 0.0 || c.filter.g < 0.0) {
            throw std::invalid_argument(who + ": filter needs L, C > 0 and R, G >= 0");
        }
        if (model == NetworkModel::ReducedNetwork &&
            c.droop.omega_star != converters[0].droop.omega_star) {
            throw std::invalid_argument("spec: reduced network requires a common omega_star");
        }
        if (model == NetworkModel::ReducedNetwork && c.mode == ControlMode::Indirect) {
            throw std::invalid_argument(
                who + ": indirect control needs the full filter model "
                      "(single-converter network)");
        }
    }
    if (model == NetworkModel::ReducedNetwork) {
        topology.validate();
        if (topology.n_converters != static_cast<int>(converters.size())) {
            throw std::invalid_argument("spec: topology converter count mismatch");
        }
        if (topology.lines.size() != converters.size()) {
            throw std::invalid_argument("spec: reduced network expects one line per converter");
        }
    }
    double prev = 0.0;
    for (const Event& e : events) {
        if (e.time < 0.0) {
            throw std::invalid_argument("spec: event times must be >= 0");
        }
        if (e.time < prev) {
            throw std::invalid_argument("spec: events must be sorted by time");
        }
        prev = e.time;
    }
}

int ScenarioSpec::substeps_per_tick() const {
    return static_cast<int>(std::round(controller_ts / plant_dt));
}

bool TraceRecorder::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& TraceRecorder::channel(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return channels[i];
        }
    }
    throw std::invalid_argument("trace: no channel named '" + name + "'");
}

double angle_difference(double a, double b) {
    double d = wrap_angle(a - b);
    if (d > kPi) {
        d -= kTwoPi;
    }
    return d;
}

namespace {

// ---------------------------------------------------------------------------
// Shared runtime pieces

struct ConverterRuntime {
    ConverterConfig cfg;  // live copy; SetGains mutates droop gains
    BoostState boost;
    BoostControlState boost_ctrl;
    DroopState droop;
    IndirectState indirect;
    MovingAverage p_filter;
    bool modulation_on = false;
    bool droop_active = false;
    bool breaker_closed = false;
    double eps = 0.0;

    // Held controller outputs. Duty and the dq command are zero-order held;
    // the modulation phase accumulates continuously at the local clock rate
    // between ticks, matching a phase-accumulating modulator.
    double duty = 0.0;
    double theta_mod = 0.0;   // droop angle commanded for the next tick
    double tick_time = 0.0;
    double ts_global = 1e-4;
    DqPair u_dq;              // indirect mode: held dq modulation command
    double u_droop = 0.0;
    double omega_phys = 0.0;
    double p_raw = 0.0;
    double p_filt = 0.0;
    double q_raw = 0.0;

    // The droop step returns the angle for the next sample instant; the
    // modulator accumulates phase at the local clock rate so the command is
    // reached exactly at the next tick.
    double phase_at(double t) const {
        return theta_mod +
               (1.0 + eps) * cfg.droop.omega_star * (t - tick_time - ts_global);
    }
};

void rk4_step(std::vector<double>& x, double t, double dt,
              const std::function<void(double, const std::vector<double>&,
                                       std::vector<double>&)>& f) {
    static thread_local std::vector<double> k1, k2, k3, k4, tmp;
    const std::size_t n = x.size();
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    tmp.resize(n);
    f(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    f(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    f(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    f(t + dt, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

double tail_mean(const std::vector<double>& x, std::size_t win) {
    if (x.empty()) {
        return 0.0;
    }
    win = std::min(win, x.size());
    return std::accumulate(x.end() - static_cast<std::ptrdiff_t>(win), x.end(), 0.0) /
           static_cast<double>(win);
}

// Engine shared by both plant backends. Channel values are produced by
// registered getters so recording stays uniform.
class Engine {
  public:
    explicit Engine(const ScenarioSpec& spec) : spec_(spec) {
        spec_.validate();
        frame_omega_ = spec_.converters[0].droop.omega_star;
        const std::size_t window_samples =
            spec_.power_filter_window > 0.0
                ? static_cast<std::size_t>(std::round(spec_.power_filter_window /
                                                      spec_.controller_ts))
                : 0;
        for (std::size_t k = 0; k < spec_.converters.size(); ++k) {
            ConverterRuntime r;
            r.cfg = spec_.converters[k];
            r.eps = spec_.clock.effective_epsilon(k);
            r.boost.i_b = 0.0;
            r.boost.v_dc = r.cfg.stiff_dc ? r.cfg.boost_control.v_dc_star : r.cfg.boost.v_b;
            r.p_filter.reset(window_samples);
            r.modulation_on = r.cfg.modulation_on;
            r.droop_active = r.cfg.modulation_on;
            r.breaker_closed = r.cfg.breaker_closed;
            r.droop.theta_star = wrap_angle(r.cfg.droop.theta_star_0);
            r.ts_global = spec_.controller_ts;
            conv_.push_back(r);
        }
        topo_ = spec_.topology;
        pll_.omega_hat = frame_omega_;
    }

    RunResult run() {
        init_states();
        trace_.dt = spec_.plant_dt * spec_.record_decimation;
        const std::int64_t n_steps =
            static_cast<std::int64_t>(std::round(spec_.duration / spec_.plant_dt));
        const int substeps = spec_.substeps_per_tick();
        std::size_t next_event = 0;

        for (std::int64_t step = 0; n_steps > 0 && step <= n_steps; ++step) {
            const double t = static_cast<double>(step) * spec_.plant_dt;
            if (step % substeps == 0) {
                while (next_event < spec_.events.size() &&
                       spec_.events[next_event].time <= t + 1e-12) {
                    apply_event(spec_.events[next_event], t);
                    ++next_event;
                }
                // A diverged plant can overflow derived quantities (powers)
                // while the raw states are still finite; both cases abort
                // with the partial trace kept.
                try {
                    controller_tick(t);
                } catch (const std::invalid_argument& e) {
                    abort_run(t, e.what());
                    break;
                }
            }
            if (step % spec_.record_decimation == 0) {
                record(t);
            }
            if (step == n_steps) {
                break;
            }
            rk4_step(x_, t, spec_.plant_dt,
                     [this](double tt, const std::vector<double>& xx,
                            std::vector<double>& dd) { derivatives(tt, xx, dd); });
            sync_from_state();
            if (!all_finite()) {
                abort_run(t + spec_.plant_dt, "non-finite state");
                break;
            }
        }
        finalize();
        return {std::move(trace_), std::move(summary_)};
    }

  protected:
    virtual void init_states() = 0;
    virtual void derivatives(double t, const std::vector<double>& x,
                             std::vector<double>& dxdt) = 0;
    virtual void controller_tick(double t) = 0;
    virtual void register_channels() = 0;
    virtual void sync_from_state() {}
    virtual void fill_network_summary(std::size_t) {}

    void add_channel(const std::string& name, std::function<double()> getter) {
        trace_.names.push_back(name);
        trace_.channels.emplace_back();
        getters_.push_back(std::move(getter));
    }

    void add_converter_channels(std::size_t k) {
        const std::string p = "c" + std::to_string(k) + ".";
        ConverterRuntime* r = &conv_[k];
        add_channel(p + "v_dc", [r] { return r->boost.v_dc; });
        add_channel(p + "i_b", [r] { return r->boost.i_b; });
        add_channel(p + "duty", [r] { return r->duty; });
        add_channel(p + "p", [r] { return r->p_raw; });
        add_channel(p + "p_filt", [r] { return r->p_filt; });
        add_channel(p + "q", [r] { return r->q_raw; });
        add_channel(p + "u", [r] { return r->u_droop; });
        add_channel(p + "omega", [r] { return r->omega_phys; });
        add_channel(p + "freq_hz", [r] { return r->omega_phys / kTwoPi; });
        add_channel(p + "delta_theta", [r] { return r->droop.delta_theta; });
        add_channel(p + "theta_star", [r] { return r->droop.theta_star; });
        add_channel(p + "theta_mod", [r] { return r->theta_mod; });
    }

    void boost_tick(ConverterRuntime& r, double ts_eff) {
        if (r.cfg.stiff_dc) {
            r.boost.v_dc = r.cfg.boost_control.v_dc_star;
            r.duty = 0.0;
            return;
        }
        r.duty = boost_control_step(r.cfg.boost_control, r.cfg.boost, r.boost_ctrl,
                                    {r.boost.v_dc, r.boost.i_b}, ts_eff,
                                    &summary_.saturations);
    }

    void droop_tick(ConverterRuntime& r, double ts_eff, double t) {
        r.tick_time = t;
        if (!r.droop_active) {
            r.u_droop = 0.0;
            r.omega_phys = 0.0;
            return;
        }
        const DroopOutput out = droop_step(r.cfg.droop, r.droop, r.p_filt, ts_eff);
        r.theta_mod = out.theta;
        r.u_droop = out.u;
        r.omega_phys = (1.0 + r.eps) * out.omega;
    }

    void apply_event(const Event& e, double t) {
        switch (e.action) {
            case EventAction::CloseBreaker:
                conv_.at(static_cast<std::size_t>(e.target)).breaker_closed = true;
                trace_.markers.push_back({t, "close-breaker-" + std::to_string(e.target)});
                break;
            case EventAction::EnableModulation: {
                ConverterRuntime& r = conv_.at(static_cast<std::size_t>(e.target));
                r.modulation_on = true;
                r.droop_active = true;
                r.droop.delta_theta = 0.0;
                r.droop.theta_star = seed_nominal_angle(r, t);
                r.p_filter.reset(spec_.power_filter_window > 0.0
                                     ? static_cast<std::size_t>(std::round(
                                           spec_.power_filter_window / spec_.controller_ts))
                                     : 0);
                trace_.markers.push_back({t, "enable-modulation-" + std::to_string(e.target)});
                break;
            }
            case EventAction::SetGains: {
                ConverterRuntime& r = conv_.at(static_cast<std::size_t>(e.target));
                r.cfg.droop.alpha = e.gains.alpha;
                r.cfg.droop.gamma = e.gains.gamma;
                r.cfg.droop.p_star = e.gains.p_star;
                trace_.markers.push_back({t, "set-gains-" + std::to_string(e.target)});
                break;
            }
            case EventAction::LoadStep:
                apply_load_step(e);
                trace_.markers.push_back({t, "load-step"});
                break;
        }
        last_event_time_ = t;
    }

    virtual void apply_load_step(const Event& e) = 0;
    virtual double seed_nominal_angle(ConverterRuntime& r, double t) = 0;

    void record(double t) {
        if (!channels_ready_) {
            register_channels();
            apply_channel_selection();
            channels_ready_ = true;
        }
        record_time_ = t;
        trace_.time.push_back(t);
        for (std::size_t i = 0; i < getters_.size(); ++i) {
            trace_.channels[i].push_back(getters_[i]());
        }
    }

    void apply_channel_selection() {
        if (spec_.record_channels.empty()) {
            return;
        }
        for (const std::string& want : spec_.record_channels) {
            if (!trace_.has(want)) {
                throw std::invalid_argument("spec: no recordable signal named '" + want +
                                            "'");
            }
        }
        std::vector<std::string> names;
        std::vector<std::vector<double>> channels;
        std::vector<std::function<double()>> getters;
        for (std::size_t i = 0; i < trace_.names.size(); ++i) {
            if (std::find(spec_.record_channels.begin(), spec_.record_channels.end(),
                          trace_.names[i]) != spec_.record_channels.end()) {
                names.push_back(trace_.names[i]);
                channels.push_back(std::move(trace_.channels[i]));
                getters.push_back(std::move(getters_[i]));
            }
        }
        trace_.names = std::move(names);
        trace_.channels = std::move(channels);
        getters_ = std::move(getters);
    }

    bool all_finite() const {
        for (double v : x_) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

    void abort_run(double t, const std::string& why) {
        summary_.completed = false;
        summary_.abort_reason = why + " at t = " + std::to_string(t) + " s";
        trace_.markers.push_back({t, "abort"});
    }

    // Restricted channel selections drop parts of the summary along with
    // their source signals.
    void finalize() {
        summary_.scenario = spec_.name;
        summary_.duration = spec_.duration;
        summary_.terminal_state = x_;
        summary_.state_names = state_names_;
        if (trace_.time.empty()) {
            return;
        }
        const std::size_t win = std::max<std::size_t>(
            1, static_cast<std::size_t>(spec_.steady.window / trace_.dt));
        for (std::size_t k = 0; k < conv_.size(); ++k) {
            const std::string p = "c" + std::to_string(k) + ".";
            ConverterSummary cs;
            const ConverterRuntime& r = conv_[k];
            cs.p_star = r.cfg.droop.p_star;
            cs.gamma = r.cfg.droop.gamma;
            cs.alpha = r.cfg.droop.alpha;
            if (trace_.has(p + "p")) {
                cs.p_steady = tail_mean(trace_.channel(p + "p"), win);
                try {
                    cs.settle_time = detect_steady_state(trace_.channel(p + "p"),
                                                         trace_.dt, spec_.steady);
                } catch (const std::invalid_argument&) {
                    cs.settle_time = std::nullopt;
                }
            }
            if (trace_.has(p + "q")) {
                cs.q_steady = tail_mean(trace_.channel(p + "q"), win);
            }
            if (trace_.has(p + "delta_theta")) {
                cs.delta_theta_steady = tail_mean(trace_.channel(p + "delta_theta"), win);
            }
            cs.droop_residual =
                cs.gamma * cs.delta_theta_steady + cs.p_steady - cs.p_star;
            cs.v_dc_final = r.boost.v_dc;
            cs.i_b_final = r.boost.i_b;
            if (trace_.has(p + "freq_hz")) {
                const std::vector<double>& f = trace_.channel(p + "freq_hz");
                const double f_star = r.cfg.droop.omega_star / kTwoPi;
                double worst = 0.0;
                for (std::size_t i = f.size() - std::min(win, f.size()); i < f.size();
                     ++i) {
                    worst = std::max(worst, std::abs(f[i] - f_star));
                }
                cs.freq_error_hz = worst;
                const std::size_t i0 = std::min<std::size_t>(
                    static_cast<std::size_t>(std::max(0.0, last_event_time_) / trace_.dt),
                    f.size() - 1);
                double fmin = f[i0];
                double fmax = fmin;
                for (std::size_t i = i0; i < f.size(); ++i) {
                    fmin = std::min(fmin, f[i]);
                    fmax = std::max(fmax, f[i]);
                }
                cs.min_freq_hz = fmin;
                cs.max_freq_hz = fmax;
            }
            if (trace_.has(p + "e_amp")) {
                cs.source_amplitude = tail_mean(trace_.channel(p + "e_amp"), win);
            }
            summary_.converters.push_back(cs);
        }
        if (conv_.size() >= 2 && trace_.has("c0.theta_mod") && trace_.has("c1.theta_mod") &&
            trace_.has("c0.theta_star") && trace_.has("c1.theta_star")) {
            const std::vector<double>& th1 = trace_.channel("c0.theta_mod");
            const std::vector<double>& th2 = trace_.channel("c1.theta_mod");
            const std::vector<double>& ts1 = trace_.channel("c0.theta_star");
            const std::vector<double>& ts2 = trace_.channel("c1.theta_star");
            const std::size_t w = std::min(win, th1.size());
            double acc = 0.0, acc_star = 0.0;
            for (std::size_t i = th1.size() - w; i < th1.size(); ++i) {
                acc += angle_difference(th1[i], th2[i]);
                acc_star += angle_difference(ts1[i], ts2[i]);
            }
            summary_.angle_diff_12 = acc / static_cast<double>(w);
            summary_.theta_star_offset_12 = acc_star / static_cast<double>(w);
        }
        // Running cost for the first converter over the whole record.
        if (trace_.has("c0.delta_theta") && trace_.has("c0.p_filt") && trace_.has("c0.u")) {
            const RunningCost rc =
                running_cost(trace_.channel("c0.delta_theta"), trace_.channel("c0.p_filt"),
                             trace_.channel("c0.u"), conv_[0].cfg.droop, trace_.dt);
            summary_.running_cost_total = rc.total;
            double peak = 0.0;
            for (double v : rc.integrand) {
                peak = std::max(peak, v);
            }
            double tail_peak = 0.0;
            const std::size_t tail = rc.integrand.size() / 10;
            for (std::size_t i = rc.integrand.size() - tail; i < rc.integrand.size(); ++i) {
                tail_peak = std::max(tail_peak, rc.integrand[i]);
            }
            summary_.cost_tail_peak_ratio = peak > 0.0 ? tail_peak / peak : 0.0;
        }
        summary_.security_ok = security_violation_time_ < 0.0 ||
                               security_violation_time_ <
                                   spec_.duration - spec_.steady.window;
        fill_network_summary(win);
    }

    ScenarioSpec spec_;
    std::vector<ConverterRuntime> conv_;
    NetworkTopology topo_;
    PllState pll_;
    double frame_omega_ = 0.0;
    double last_event_time_ = 0.0;
    double record_time_ = 0.0;
    double security_violation_time_ = -1.0;
    bool channels_ready_ = false;
    std::vector<double> x_;
    std::vector<std::string> state_names_;
    TraceRecorder trace_;
    SummaryReport summary_;
    std::vector<std::function<double()>> getters_;
};

// ---------------------------------------------------------------------------
// Single-converter abc model: boost + DC/AC + LC filter with the local load.

class SingleConverterEngine : public Engine {
  public:
    using Engine::Engine;

  protected:
    void init_states() override {
        const ConverterRuntime& r = conv_[0];
        x_ = {r.boost.i_b, r.boost.v_dc, 0, 0, 0, 0, 0, 0};
        state_names_ = {"i_b", "v_dc", "i_a", "i_b_ph", "i_c", "v_a", "v_b", "v_c"};
        sync_from_state();
    }

    void sync_from_state() override {
        conv_[0].boost.i_b = x_[0];
        conv_[0].boost.v_dc = conv_[0].cfg.stiff_dc ? conv_[0].cfg.boost_control.v_dc_star
                                                    : x_[1];
        ac_.i = {x_[2], x_[3], x_[4]};
        ac_.v = {x_[5], x_[6], x_[7]};
    }

    ThreePhase modulation_at(const ConverterRuntime& r, double t) const {
        if (!r.modulation_on || !r.droop_active) {
            return {};
        }
        const double phase = r.phase_at(t);
        if (r.cfg.mode == ControlMode::Direct) {
            return synth_three_phase(r.cfg.modulation_amplitude, phase);
        }
        return inverse_park(phase, r.u_dq);
    }

    void derivatives(double t, const std::vector<double>& x,
                     std::vector<double>& dxdt) override {
        const ConverterRuntime& r = conv_[0];
        dxdt.assign(8, 0.0);
        const BoostState bs{x[0], r.cfg.stiff_dc ? r.cfg.boost_control.v_dc_star : x[1]};
        const AcState ac{{x[2], x[3], x[4]}, {x[5], x[6], x[7]}};
        const ThreePhase u = modulation_at(r, t);
        if (!r.cfg.stiff_dc) {
            const double v_c = (1.0 - r.duty) * bs.v_dc;
            const BoostState db = boost_derivatives(r.cfg.boost, bs, v_c);
            // DC/AC bridge draw from the link closes the power balance.
            const double i_inv = 0.5 * dot(u, ac.i);
            dxdt[0] = db.i_b;
            dxdt[1] = db.v_dc - i_inv / r.cfg.boost.c_dc;
        }
        const AcState dac = dcac_derivatives(r.cfg.filter, ac, u, bs.v_dc, ThreePhase{});
        dxdt[2] = dac.i.a;
        dxdt[3] = dac.i.b;
        dxdt[4] = dac.i.c;
        dxdt[5] = dac.v.a;
        dxdt[6] = dac.v.b;
        dxdt[7] = dac.v.c;
    }

    void controller_tick(double t) override {
        ConverterRuntime& r = conv_[0];
        const double ts_eff = (1.0 + r.eps) * spec_.controller_ts;
        boost_tick(r, ts_eff);
        // Droop feedback: power delivered to the local load.
        const ThreePhase i_load = r.cfg.filter.g * ac_.v;
        const PowerPQ pq = instantaneous_power(ac_.v, i_load, r.phase_at(t));
        r.p_raw = pq.p;
        r.q_raw = pq.q;
        r.p_filt = r.p_filter.push(r.p_raw);
        droop_tick(r, ts_eff, t);
        if (!r.droop_active) {
            return;
        }
        if (r.cfg.mode == ControlMode::Indirect) {
            const IndirectMeasurement m{ac_.v, ac_.i, i_load, r.boost.v_dc};
            const ThreePhase u_abc =
                indirect_control_step(r.cfg.indirect, r.indirect, r.theta_mod, m,
                                      r.cfg.filter, r.cfg.droop.omega_star, ts_eff,
                                      &summary_.saturations);
            r.u_dq = park(r.theta_mod, u_abc);
        }
    }

    void apply_load_step(const Event& e) override {
        if (!(e.new_resistance > 0.0)) {
            throw std::invalid_argument("load step: resistance must be > 0");
        }
        conv_[0].cfg.filter.g = 1.0 / e.new_resistance;
    }

    double seed_nominal_angle(ConverterRuntime& r, double t) override {
        return wrap_angle(r.cfg.droop.theta_star_0 +
                          (1.0 + r.eps) * r.cfg.droop.omega_star * t);
    }

    void register_channels() override {
        add_converter_channels(0);
        add_channel("c0.i_a", [this] { return ac_.i.a; });
        add_channel("c0.i_b_ph", [this] { return ac_.i.b; });
        add_channel("c0.i_c", [this] { return ac_.i.c; });
        add_channel("c0.v_a", [this] { return ac_.v.a; });
        add_channel("c0.v_b", [this] { return ac_.v.b; });
        add_channel("c0.v_c", [this] { return ac_.v.c; });
        add_channel("c0.v_amp", [this] {
            return std::sqrt((2.0 / 3.0) * dot(ac_.v, ac_.v));
        });
        add_channel("c0.i_amp", [this] {
            return std::sqrt((2.0 / 3.0) * dot(ac_.i, ac_.i));
        });
        add_channel("c0.duty_ac_a", [this] {
            return ac_duty_from_modulation(modulation_at(conv_[0], record_time_).a);
        });
    }

    void fill_network_summary(std::size_t win) override {
        if (trace_.has("c0.p")) {
            summary_.load_power = tail_mean(trace_.channel("c0.p"), win);
        }
    }

  private:
    AcState ac_;
};

// ---------------------------------------------------------------------------
// Reduced network: switching-voltage sources over RL lines to an algebraic
// resistive node, in a frame rotating at the nominal frequency.

class ReducedNetworkEngine : public Engine {
  public:
    using Engine::Engine;

  protected:
    void init_states() override {
        const std::size_t nc = conv_.size();
        const std::size_t nl = topo_.lines.size();
        x_.assign(2 * nc + 2 * nl, 0.0);
        for (std::size_t k = 0; k < nc; ++k) {
            x_[2 * k] = 0.0;
            x_[2 * k + 1] = conv_[k].boost.v_dc;
            state_names_.push_back("c" + std::to_string(k) + ".i_b");
            state_names_.push_back("c" + std::to_string(k) + ".v_dc");
        }
        for (std::size_t j = 0; j < nl; ++j) {
            state_names_.push_back("line" + std::to_string(j) + ".i_d");
            state_names_.push_back("line" + std::to_string(j) + ".i_q");
        }
        sync_from_state();
    }

    void sync_from_state() override {
        const std::size_t nc = conv_.size();
        for (std::size_t k = 0; k < nc; ++k) {
            conv_[k].boost.i_b = x_[2 * k];
            conv_[k].boost.v_dc = conv_[k].cfg.stiff_dc
                                      ? conv_[k].cfg.boost_control.v_dc_star
                                      : x_[2 * k + 1];
            if (!conv_[k].breaker_closed) {
                x_[2 * nc + 2 * line_of_converter(k)] = 0.0;
                x_[2 * nc + 2 * line_of_converter(k) + 1] = 0.0;
            }
        }
    }

    std::size_t line_of_converter(std::size_t k) const {
        for (std::size_t j = 0; j < topo_.lines.size(); ++j) {
            if (topo_.lines[j].from_converter == static_cast<int>(k)) {
                return j;
            }
        }
        throw std::logic_error("no line for converter");
    }

    DqPair source_phasor(const ConverterRuntime& r, double v_dc, double t) const {
        if (!r.modulation_on || !r.droop_active) {
            return {0.0, 0.0};
        }
        // Phase-accumulating modulator: the angle advances at the local clock
        // rate between ticks, so the frame angle drifts only by the local
        // frequency offset.
        const double phi = r.phase_at(t) - frame_omega_ * t;
        const double amp = 0.5 * r.cfg.modulation_amplitude * v_dc;
        return {amp * std::cos(phi), amp * std::sin(phi)};
    }

    void derivatives(double t, const std::vector<double>& x,
                     std::vector<double>& dxdt) override {
        const std::size_t nc = conv_.size();
        const std::size_t nl = topo_.lines.size();
        dxdt.assign(x.size(), 0.0);

        std::vector<double> e_d(nc), e_q(nc);
        for (std::size_t k = 0; k < nc; ++k) {
            const double v_dc =
                conv_[k].cfg.stiff_dc ? conv_[k].cfg.boost_control.v_dc_star : x[2 * k + 1];
            const DqPair e = source_phasor(conv_[k], v_dc, t);
            e_d[k] = e.d;
            e_q[k] = e.q;
        }
        std::vector<double> il_d(nl), il_q(nl);
        for (std::size_t j = 0; j < nl; ++j) {
            const bool open = !conv_[static_cast<std::size_t>(topo_.lines[j].from_converter)]
                                   .breaker_closed;
            il_d[j] = open ? 0.0 : x[2 * nc + 2 * j];
            il_q[j] = open ? 0.0 : x[2 * nc + 2 * j + 1];
        }
        const NetworkFlow fd = network_port_currents(topo_, e_d, il_d);
        const NetworkFlow fq = network_port_currents(topo_, e_q, il_q);

        for (std::size_t j = 0; j < nl; ++j) {
            const std::size_t k = static_cast<std::size_t>(topo_.lines[j].from_converter);
            if (!conv_[k].breaker_closed) {
                continue;
            }
            // Rotating-frame coupling -w J i on top of the per-phase circuit law.
            dxdt[2 * nc + 2 * j] = fd.di_dt[j] + frame_omega_ * il_q[j];
            dxdt[2 * nc + 2 * j + 1] = fq.di_dt[j] - frame_omega_ * il_d[j];
        }
        for (std::size_t k = 0; k < nc; ++k) {
            if (conv_[k].cfg.stiff_dc) {
                continue;
            }
            const BoostState bs{x[2 * k], x[2 * k + 1]};
            const double v_c = (1.0 - conv_[k].duty) * bs.v_dc;
            const BoostState db = boost_derivatives(conv_[k].cfg.boost, bs, v_c);
            const double p_ac = e_d[k] * fd.port_current[k] + e_q[k] * fq.port_current[k];
            const double i_inv = p_ac / std::max(bs.v_dc, conv_[k].cfg.boost.v_min);
            dxdt[2 * k] = db.i_b;
            dxdt[2 * k + 1] = db.v_dc - i_inv / conv_[k].cfg.boost.c_dc;
        }
    }

    void network_snapshot(double t, std::vector<DqPair>& e, std::vector<DqPair>& i_port,
                          DqPair& v0) const {
        const std::size_t nc = conv_.size();
        const std::size_t nl = topo_.lines.size();
        std::vector<double> e_d(nc), e_q(nc), il_d(nl), il_q(nl);
        for (std::size_t k = 0; k < nc; ++k) {
            const DqPair ph = source_phasor(conv_[k], conv_[k].boost.v_dc, t);
            e_d[k] = ph.d;
            e_q[k] = ph.q;
        }
        for (std::size_t j = 0; j < nl; ++j) {
            il_d[j] = x_[2 * nc + 2 * j];
            il_q[j] = x_[2 * nc + 2 * j + 1];
        }
        const NetworkFlow fd = network_port_currents(topo_, e_d, il_d);
        const NetworkFlow fq = network_port_currents(topo_, e_q, il_q);
        e.resize(nc);
        i_port.resize(nc);
        for (std::size_t k = 0; k < nc; ++k) {
            e[k] = {e_d[k], e_q[k]};
            i_port[k] = {fd.port_current[k], fq.port_current[k]};
        }
        v0 = {fd.node_voltage.empty() ? 0.0 : fd.node_voltage[0],
              fq.node_voltage.empty() ? 0.0 : fq.node_voltage[0]};
    }

    void controller_tick(double t) override {
        std::vector<DqPair> e, i_port;
        DqPair v0;
        network_snapshot(t, e, i_port, v0);
        node_v_amp_ = std::hypot(v0.d, v0.q);
        node_angle_ = wrap_angle(std::atan2(v0.q, v0.d) + frame_omega_ * t);
        const Load& load = topo_.loads.at(0);
        node_p_load_ = node_v_amp_ * node_v_amp_ / load.resistance;

        // Lab-side PLL on the node voltage (global clock, no drift).
        const ThreePhase v0_abc =
            inverse_park(wrap_angle(frame_omega_ * t), {v0.d, v0.q});
        pll_ = pll_step(pll_, v0_abc, spec_.controller_ts, spec_.pll, frame_omega_,
                        conv_[0].cfg.indirect.v_star);

        for (std::size_t k = 0; k < conv_.size(); ++k) {
            ConverterRuntime& r = conv_[k];
            const double ts_eff = (1.0 + r.eps) * spec_.controller_ts;
            boost_tick(r, ts_eff);
            r.p_raw = e[k].d * i_port[k].d + e[k].q * i_port[k].q;
            r.q_raw = e[k].q * i_port[k].d - e[k].d * i_port[k].q;
            r.p_filt = r.p_filter.push(r.p_raw);
            droop_tick(r, ts_eff, t);
            if (r.modulation_on) {
                const double diff =
                    std::abs(angle_difference(r.theta_mod, node_angle_));
                if (diff >= 0.5 * kPi && security_violation_time_ < 0.0) {
                    security_violation_time_ = t;
                    trace_.markers.push_back({t, "assumption1-violation"});
                } else if (diff >= 0.5 * kPi) {
                    security_violation_time_ = t;
                }
            }
        }
    }

    void apply_load_step(const Event& e) override {
        if (!(e.new_resistance > 0.0)) {
            throw std::invalid_argument("load step: resistance must be > 0");
        }
        for (Load& ld : topo_.loads) {
            if (ld.node == e.target) {
                ld.resistance = e.new_resistance;
                return;
            }
        }
        throw std::invalid_argument("load step: no load at node " +
                                    std::to_string(e.target));
    }

    double seed_nominal_angle(ConverterRuntime& r, double t) override {
        if (spec_.pll_seed) {
            return pll_.theta_hat;
        }
        return wrap_angle(r.cfg.droop.theta_star_0 +
                          (1.0 + r.eps) * r.cfg.droop.omega_star * t);
    }

    void register_channels() override {
        for (std::size_t k = 0; k < conv_.size(); ++k) {
            add_converter_channels(k);
            ConverterRuntime* r = &conv_[k];
            add_channel("c" + std::to_string(k) + ".e_amp", [r] {
                return r->modulation_on ? 0.5 * r->cfg.modulation_amplitude * r->boost.v_dc
                                        : 0.0;
            });
        }
        const std::size_t nc = conv_.size();
        for (std::size_t j = 0; j < topo_.lines.size(); ++j) {
            const std::string p = "line" + std::to_string(j) + ".";
            add_channel(p + "i_d", [this, nc, j] { return x_[2 * nc + 2 * j]; });
            add_channel(p + "i_q", [this, nc, j] { return x_[2 * nc + 2 * j + 1]; });
        }
        add_channel("node0.v_amp", [this] { return node_v_amp_; });
        add_channel("node0.angle", [this] { return node_angle_; });
        add_channel("node0.p_load", [this] { return node_p_load_; });
        add_channel("pll.theta", [this] { return pll_.theta_hat; });
        add_channel("pll.omega", [this] { return pll_.omega_hat; });
    }

    void fill_network_summary(std::size_t win) override {
        if (!trace_.has("node0.v_amp") || !trace_.has("node0.p_load")) {
            return;
        }
        summary_.node_voltage_amplitude = tail_mean(trace_.channel("node0.v_amp"), win);
        summary_.load_power = tail_mean(trace_.channel("node0.p_load"), win);
        if (conv_.size() != 2 || !conv_[0].modulation_on || !conv_[1].modulation_on) {
            return;
        }
        ReducedTwoSource net;
        net.v1 = summary_.converters[0].source_amplitude;
        net.v2 = summary_.converters[1].source_amplitude;
        if (net.v1 <= 0.0 || net.v2 <= 0.0) {
            return;  // amplitude channels not recorded
        }
        net.v0 = 0.5 * (net.v1 + net.v2);
        net.x10 = frame_omega_ * topo_.lines[line_of_converter(0)].params.l_l;
        net.x20 = frame_omega_ * topo_.lines[line_of_converter(1)].params.l_l;
        net.r_line1 = topo_.lines[line_of_converter(0)].params.r_l;
        net.r_line2 = topo_.lines[line_of_converter(1)].params.r_l;
        net.r_load = topo_.loads.at(0).resistance;
        DroopGains g1 = conv_[0].cfg.droop;
        DroopGains g2 = conv_[1].cfg.droop;
        g1.theta_star_0 = summary_.theta_star_offset_12;
        g2.theta_star_0 = 0.0;
        try {
            summary_.oracle = solve_two_source_steady_state(net, g1, g2);
        } catch (const std::exception&) {
            summary_.oracle = std::nullopt;
        }
    }

  private:
    double node_v_amp_ = 0.0;
    double node_angle_ = 0.0;
    double node_p_load_ = 0.0;
};

}  // namespace

RunResult run_scenario(const ScenarioSpec& spec) {
    if (spec.model == NetworkModel::SingleConverter) {
        SingleConverterEngine engine(spec);
        return engine.run();
    }
    ReducedNetworkEngine engine(spec);
    return engine.run();
}

void apply_parameter(ScenarioSpec& spec, const std::string& parameter, double value) {
    if (parameter == "droop.alpha" || parameter == "alpha") {
        for (ConverterConfig& c : spec.converters) c.droop.alpha = value;
    } else if (parameter == "droop.gamma" || parameter == "gamma") {
        for (ConverterConfig& c : spec.converters) c.droop.gamma = value;
    } else if (parameter == "droop.p_star") {
        for (ConverterConfig& c : spec.converters) c.droop.p_star = value;
    } else if (parameter == "network.r_load") {
        for (Load& l : spec.topology.loads) l.resistance = value;
        for (Event& e : spec.events) {
            if (e.action == EventAction::LoadStep) e.new_resistance = value;
        }
    } else if (parameter == "network.r_line") {
        for (Line& l : spec.topology.lines) l.params.r_l = value;
    } else if (parameter == "clock.delta_epsilon") {
        spec.clock.epsilon.assign(spec.converters.size(), 0.0);
        if (spec.converters.size() >= 2) {
            spec.clock.epsilon[0] = 0.5 * value;
            spec.clock.epsilon[1] = -0.5 * value;
        }
    } else {
        throw std::invalid_argument("sweep: unknown parameter path '" + parameter + "'");
    }
}

std::vector<SummaryReport> sweep(const ScenarioSpec& spec, const std::string& parameter,
                                 const std::vector<double>& values) {
    std::vector<SummaryReport> reports;
    reports.reserve(values.size());
    for (double v : values) {
        ScenarioSpec variant = spec;
        apply_parameter(variant, parameter, v);
        variant.name = spec.name + "[" + parameter + "=" + std::to_string(v) + "]";
        reports.push_back(run_scenario(variant).summary);
    }
    return reports;
}

DriftDemoResult clock_drift_demo(const ScenarioSpec& spec, double delta_epsilon) {
    if (spec.converters.size() != 2) {
        throw std::invalid_argument("clock_drift_demo: two-converter topology required");
    }
    DriftDemoResult out;
    ScenarioSpec s = spec;
    s.clock.epsilon = {0.5 * delta_epsilon, -0.5 * delta_epsilon};
    s.clock.master_clock_enabled = false;
    s.name = spec.name + "[drift]";
    out.drift = run_scenario(s);
    s.clock.master_clock_enabled = true;
    s.name = spec.name + "[master-clock]";
    out.master = run_scenario(s);
    s.clock.epsilon = {0.0, 0.0};
    s.clock.master_clock_enabled = false;
    s.name = spec.name + "[zero-drift]";
    out.zero_drift = run_scenario(s);
    return out;
}

}  // namespace adsim
