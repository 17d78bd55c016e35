#include "adsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace adsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PowerPQ instantaneous_power(const ThreePhase& v, const ThreePhase& i_o, double theta) {
    const DqPair vdq = park(theta, v);
    const DqPair idq = park(theta, i_o);
    return {dot(v, i_o), 1.5 * (vdq.q * idq.d - vdq.d * idq.q)};
}

std::optional<double> detect_steady_state(const std::vector<double>& channel, double dt,
                                          const SteadyStateWindow& w, double floor) {
    if (!(w.window > 0.0) || !(w.tolerance > 0.0)) {
        throw std::invalid_argument("detect_steady_state: window and tolerance must be > 0");
    }
    const std::size_t n = channel.size();
    const std::size_t win = std::max<std::size_t>(1, static_cast<std::size_t>(w.window / dt));
    if (n < win) {
        throw std::invalid_argument("detect_steady_state: trace shorter than the window");
    }
    // Trailing-window means via a prefix sum, then the last in-band suffix.
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + channel[i];
    }
    std::size_t first_ok = n;  // first index from which all samples stay in band
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t lo = (i + 1 >= win) ? i + 1 - win : 0;
        const double mean = (prefix[i + 1] - prefix[lo]) / static_cast<double>(i + 1 - lo);
        const double band = w.tolerance * std::max(std::abs(mean), floor);
        if (std::abs(channel[i] - mean) <= band) {
            first_ok = i;
        } else {
            break;
        }
    }
    if (first_ok == n) {
        return std::nullopt;
    }
    return static_cast<double>(first_ok) * dt;
}

std::vector<double> unwrap_angles(const std::vector<double>& theta) {
    std::vector<double> out(theta.size());
    if (theta.empty()) {
        return out;
    }
    out[0] = theta[0];
    double offset = 0.0;
    for (std::size_t i = 1; i < theta.size(); ++i) {
        double d = theta[i] - theta[i - 1];
        if (d > kPi) {
            offset -= kTwoPi;
        } else if (d < -kPi) {
            offset += kTwoPi;
        }
        out[i] = theta[i] + offset;
    }
    return out;
}

FrequencyTraces frequency_and_rocof(const std::vector<double>& theta_trace, double dt) {
    const std::vector<double> th = unwrap_angles(theta_trace);
    const std::size_t n = th.size();
    FrequencyTraces out;
    out.omega.resize(n);
    out.rocof.resize(n);
    if (n < 2) {
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            out.omega[i] = (th[1] - th[0]) / dt;
        } else if (i + 1 == n) {
            out.omega[i] = (th[n - 1] - th[n - 2]) / dt;
        } else {
            out.omega[i] = (th[i + 1] - th[i - 1]) / (2.0 * dt);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            out.rocof[i] = (out.omega[1] - out.omega[0]) / dt;
        } else if (i + 1 == n) {
            out.rocof[i] = (out.omega[n - 1] - out.omega[n - 2]) / dt;
        } else {
            out.rocof[i] = (out.omega[i + 1] - out.omega[i - 1]) / (2.0 * dt);
        }
    }
    return out;
}

PllState pll_step(const PllState& s, const ThreePhase& v, double ts,
                  const PllGains& gains, double omega_nominal,
                  double nominal_amplitude) {
    PllState next = s;
    const DqPair vdq = park(s.theta_hat, v);
    const double amp = std::hypot(vdq.d, vdq.q);
    if (amp < 0.01 * nominal_amplitude) {
        // Below the lock threshold: coast on the current frequency estimate.
        next.locked_input = false;
        next.theta_hat = wrap_angle(s.theta_hat + ts * s.omega_hat);
        return next;
    }
    next.locked_input = true;
    // theta_hat leading the signal makes q negative; drive q to zero.
    const double err = vdq.q / amp;
    next.integrator = s.integrator + ts * gains.ki * err;
    next.omega_hat = omega_nominal + gains.kp * err + next.integrator;
    next.theta_hat = wrap_angle(s.theta_hat + ts * next.omega_hat);

    // Lock diagnostic: mean |error| over 0.2 s windows must keep decreasing
    // while it is still large, and the frequency estimate must stay sane.
    next.err_accum += std::abs(err);
    next.window_elapsed += ts;
    next.window_count += 1;
    if (next.window_elapsed >= 0.2) {
        const double mean = next.err_accum / static_cast<double>(next.window_count);
        if (next.err_window_mean >= 0.0 && mean > 0.05 &&
            mean >= next.err_window_mean) {
            next.lock_lost = true;
        }
        next.err_window_mean = mean;
        next.err_accum = 0.0;
        next.window_elapsed = 0.0;
        next.window_count = 0;
    }
    if (next.omega_hat < 0.5 * omega_nominal || next.omega_hat > 1.5 * omega_nominal) {
        next.lock_lost = true;
    }
    return next;
}

double droop_law_residual(const DroopGains& g, double theta_s, double theta_star,
                          double p_s) {
    return g.gamma * (theta_s - theta_star) + p_s - g.p_star;
}

RunningCost running_cost(const std::vector<double>& theta_error,
                         const std::vector<double>& power,
                         const std::vector<double>& u, const DroopGains& g, double dt) {
    if (theta_error.size() != power.size() || power.size() != u.size()) {
        throw std::invalid_argument("running_cost: traces must be aligned");
    }
    RunningCost out;
    out.integrand.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double balance = g.gamma * theta_error[i] + power[i] - g.p_star;
        out.integrand[i] = g.alpha * u[i] * u[i] + balance * balance / (4.0 * g.alpha);
    }
    for (std::size_t i = 1; i < out.integrand.size(); ++i) {
        out.total += 0.5 * dt * (out.integrand[i - 1] + out.integrand[i]);
    }
    return out;
}

SharingMetrics sharing_metrics(const std::vector<double>& p1,
                               const std::vector<double>& p2, double dt,
                               double window, double r_expected) {
    if (p1.size() != p2.size() || p1.empty()) {
        throw std::invalid_argument("sharing_metrics: traces must be aligned and non-empty");
    }
    const std::size_t win =
        std::min(p1.size(), std::max<std::size_t>(1, static_cast<std::size_t>(window / dt)));
    const auto mean_tail = [win](const std::vector<double>& x) {
        return std::accumulate(x.end() - static_cast<std::ptrdiff_t>(win), x.end(), 0.0) /
               static_cast<double>(win);
    };
    SharingMetrics m;
    m.p1_mean = mean_tail(p1);
    m.p2_mean = mean_tail(p2);
    if (std::abs(m.p2_mean) < 1.0) {
        throw std::domain_error("sharing_metrics: steady P_2 below 1 W, ratio undefined");
    }
    m.ratio = m.p1_mean / m.p2_mean;
    m.relative_error = std::abs(m.ratio - r_expected) / std::abs(r_expected);
    return m;
}

double spectral_magnitude(const std::vector<double>& x, double dt, double f_hz) {
    const std::size_t n = x.size();
    if (n < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double w = kTwoPi * f_hz * dt;
    std::complex<double> acc(0.0, 0.0);
    double win_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double hann =
            0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1)));
        win_sum += hann;
        acc += hann * (x[i] - mean) *
               std::exp(std::complex<double>(0.0, -w * static_cast<double>(i)));
    }
    return std::abs(acc) / win_sum;
}

SpectralPeak dominant_frequency(const std::vector<double>& x, double dt, double f_min,
                                double f_max, double f_step) {
    SpectralPeak best;
    for (double f = f_min; f <= f_max + 0.5 * f_step; f += f_step) {
        const double m = spectral_magnitude(x, dt, f);
        if (m > best.magnitude) {
            best = {f, m};
        }
    }
    return best;
}

}  // namespace adsim
