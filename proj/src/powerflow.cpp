#include "adsim/powerflow.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace adsim {

double line_power(double v_k, double v_0, double x_k0, double dtheta) {
    if (!(x_k0 > 0.0)) {
        throw std::invalid_argument("line_power: reactance must be > 0");
    }
    return v_k * v_0 / x_k0 * std::sin(dtheta);
}

double interconnection_angle(double p_star, double x_10, double v_0, double v_1,
                             double theta_0) {
    const double arg = p_star * x_10 / (v_0 * v_1);
    if (std::abs(arg) > 1.0) {
        throw std::domain_error(
            "interconnection_angle: transfer exceeds the line limit (|P X/(V0 V1)| = " +
            std::to_string(std::abs(arg)) + " > 1)");
    }
    return theta_0 + std::asin(arg);
}

ReactivePower reactive_power_kron(double v_k, double v_j, double x_kj, double dtheta) {
    if (!(x_kj > 0.0)) {
        throw std::invalid_argument("reactive_power_kron: reactance must be > 0");
    }
    return {v_k / x_kj * (v_k - v_j * std::cos(dtheta)),
            v_k / x_kj * (v_k - v_j)};
}

double droop_steady_angle(const DroopGains& g, double p_s) {
    return g.theta_star_0 + (g.p_star - p_s) / g.gamma;
}

double gamma_bound(double v_k, double v_0, double x_k0) {
    if (!(x_k0 > 0.0)) {
        throw std::invalid_argument("gamma_bound: reactance must be > 0");
    }
    return v_k * v_0 / x_k0;
}

double sharing_ratio(const DroopGains& g1, const DroopGains& g2) {
    const double lhs = g1.p_star * g2.gamma;
    const double rhs = g2.p_star * g1.gamma;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (std::abs(lhs - rhs) > 1e-9 * scale) {
        throw std::invalid_argument(
            "sharing_ratio: inconsistent setpoints; prescribed sharing requires "
            "P*_1/P*_2 = gamma_1/gamma_2 (got P*_1/P*_2 = " +
            std::to_string(g1.p_star / g2.p_star) + ", gamma_1/gamma_2 = " +
            std::to_string(g1.gamma / g2.gamma) + ")");
    }
    return g1.gamma / g2.gamma;
}

namespace {

struct FlowEval {
    std::complex<double> v0;
    std::complex<double> i1, i2;
    double p1, p2, q1, q2;
};

FlowEval eval_flow(const ReducedTwoSource& net, double th1, double th2) {
    using cd = std::complex<double>;
    const cd e1 = std::polar(net.v1, th1);
    const cd e2 = std::polar(net.v2, th2);
    const cd z1(net.r_line1, net.x10);
    const cd z2(net.r_line2, net.x20);
    const cd y1 = 1.0 / z1;
    const cd y2 = 1.0 / z2;
    const cd y_load(1.0 / net.r_load, 0.0);
    FlowEval f;
    f.v0 = (e1 * y1 + e2 * y2) / (y1 + y2 + y_load);
    f.i1 = (e1 - f.v0) * y1;
    f.i2 = (e2 - f.v0) * y2;
    f.p1 = (e1 * std::conj(f.i1)).real();
    f.p2 = (e2 * std::conj(f.i2)).real();
    f.q1 = (e1 * std::conj(f.i1)).imag();
    f.q2 = (e2 * std::conj(f.i2)).imag();
    return f;
}

}  // namespace

TwoSourceSolution solve_two_source_steady_state(const ReducedTwoSource& net,
                                                const DroopGains& gains1,
                                                const DroopGains& gains2) {
    if (!(net.x10 > 0.0) || !(net.x20 > 0.0) || !(net.r_load > 0.0)) {
        throw std::invalid_argument("solve_two_source_steady_state: X > 0, R_load > 0");
    }
    // Damped Newton on the droop-balance residuals
    //   g_k = gamma_k (theta_k - theta*_k) + P_k(theta) - P*_k,
    // with a numerical Jacobian. The plain substitution iteration diverges
    // whenever the power-angle stiffness exceeds gamma, which is exactly the
    // sharing regime, so the damping is applied to the Newton step instead.
    constexpr double kDamping = 0.5;
    constexpr double kTolWatts = 1e-9;
    constexpr int kMaxIter = 10000;
    constexpr double kJacStep = 1e-7;

    double th1 = gains1.theta_star_0;
    double th2 = gains2.theta_star_0;
    FlowEval f = eval_flow(net, th1, th2);
    double residual = 0.0;
    int it = 0;
    const auto balance = [&](const FlowEval& fe, double t1, double t2, double& g1,
                             double& g2) {
        g1 = gains1.gamma * (t1 - gains1.theta_star_0) + fe.p1 - gains1.p_star;
        g2 = gains2.gamma * (t2 - gains2.theta_star_0) + fe.p2 - gains2.p_star;
    };
    for (; it < kMaxIter; ++it) {
        f = eval_flow(net, th1, th2);
        double g1, g2;
        balance(f, th1, th2, g1, g2);
        residual = std::max(std::abs(g1), std::abs(g2));
        if (residual < kTolWatts) {
            break;
        }
        double g1a, g2a, g1b, g2b;
        const FlowEval fa = eval_flow(net, th1 + kJacStep, th2);
        balance(fa, th1 + kJacStep, th2, g1a, g2a);
        const FlowEval fb = eval_flow(net, th1, th2 + kJacStep);
        balance(fb, th1, th2 + kJacStep, g1b, g2b);
        const double j11 = (g1a - g1) / kJacStep;
        const double j21 = (g2a - g2) / kJacStep;
        const double j12 = (g1b - g1) / kJacStep;
        const double j22 = (g2b - g2) / kJacStep;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) {
            break;
        }
        th1 -= kDamping * (j22 * g1 - j12 * g2) / det;
        th2 -= kDamping * (j11 * g2 - j21 * g1) / det;
    }
    if (residual >= kTolWatts) {
        throw std::runtime_error(
            "solve_two_source_steady_state: no convergence after 10000 iterations, "
            "residual = " + std::to_string(residual) + " W");
    }

    TwoSourceSolution sol;
    sol.bus1 = {net.v1, th1};
    sol.bus2 = {net.v2, th2};
    sol.bus0 = {std::abs(f.v0), std::arg(f.v0)};
    sol.p1 = f.p1;
    sol.p2 = f.p2;
    sol.q1 = f.q1;
    sol.q2 = f.q2;
    sol.p_load = std::norm(f.v0) / net.r_load;
    sol.line_loss1 = net.r_line1 * std::norm(f.i1);
    sol.line_loss2 = net.r_line2 * std::norm(f.i2);
    sol.delta_p1 = gains1.p_star - f.p1;
    sol.delta_p2 = gains2.p_star - f.p2;
    sol.iterations = it;
    sol.residual = residual;
    const double half_pi = 0.5 * 3.14159265358979323846;
    sol.security_ok = std::abs(th1 - sol.bus0.theta) < half_pi &&
                      std::abs(th2 - sol.bus0.theta) < half_pi;

    // Linearized companion: dtheta_k0 ~ X_k0 P_k / (V_k V_0) together with the
    // droop balance and the nominal load power.
    const double c1 = 1.0 / gains1.gamma + net.x10 / (net.v1 * net.v0);
    const double c2 = 1.0 / gains2.gamma + net.x20 / (net.v2 * net.v0);
    const double p_load_nom = net.v0 * net.v0 / net.r_load;
    const double a1 = gains1.theta_star_0 + gains1.p_star / gains1.gamma;
    const double a2 = gains2.theta_star_0 + gains2.p_star / gains2.gamma;
    sol.theta0_small = (a1 / c1 + a2 / c2 - p_load_nom) / (1.0 / c1 + 1.0 / c2);
    sol.p1_small = (a1 - sol.theta0_small) / c1;
    sol.p2_small = (a2 - sol.theta0_small) / c2;
    return sol;
}

}  // namespace adsim
