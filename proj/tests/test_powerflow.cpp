#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adsim/powerflow.hpp"
#include "adsim/scenarios.hpp"

using namespace adsim;

TEST_CASE("line power") {
    CHECK(line_power(325.27, 325.27, 0.21991, 0.0) == 0.0);
    CHECK(line_power(325.27, 325.27, 0.21991, 0.005986) ==
          doctest::Approx(2880.0).epsilon(2e-4));
    CHECK(line_power(325.27, 325.27, 0.21991, -0.01) ==
          doctest::Approx(-line_power(325.27, 325.27, 0.21991, 0.01)));
    CHECK_THROWS_AS(line_power(1.0, 1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("interconnection angle") {
    CHECK(interconnection_angle(0.0, 0.21991, 325.27, 325.27, 0.4) == 0.4);
    const double offset =
        interconnection_angle(2880.0, 0.21991, 325.27, 325.27, 0.0);
    CHECK(offset == doctest::Approx(0.006).epsilon(3e-3));
    CHECK(offset == doctest::Approx(0.0059862).epsilon(1e-4));
    // Transfer at the line limit lands on the quarter circle.
    const double v = 100.0;
    const double x = 2.0;
    CHECK(interconnection_angle(v * v / x, x, v, v, 0.0) ==
          doctest::Approx(0.5 * 3.14159265358979323846));
    CHECK_THROWS_AS(interconnection_angle(1e6, 0.21991, 325.27, 325.27, 0.0),
                    std::domain_error);
}

TEST_CASE("reactive power expression") {
    const ReactivePower balanced = reactive_power_kron(325.27, 325.27, 0.21991, 0.0);
    CHECK(balanced.full == 0.0);
    CHECK(balanced.small_signal == 0.0);

    // Taylor check: equal amplitudes at small angle give V^2 dtheta^2 / (2X).
    const double v = 325.27;
    const double x = 0.21991;
    const double d = 0.01;
    const ReactivePower small = reactive_power_kron(v, v, x, d);
    CHECK(small.full ==
          doctest::Approx(v * v * d * d / (2.0 * x)).epsilon(1e-4));
    CHECK(small.full >= 0.0);

    const ReactivePower mismatch = reactive_power_kron(325.27, 324.27, 0.21991, 0.0);
    CHECK(mismatch.full == doctest::Approx(1479.0).epsilon(1e-3));
    CHECK(mismatch.small_signal == mismatch.full);

    // Sign structure at small angles: the higher source sends, the lower
    // one receives.
    const ReactivePower high = reactive_power_kron(325.27, 324.27, 0.21991, 0.004);
    const ReactivePower low = reactive_power_kron(324.27, 325.27, 0.21991, -0.004);
    CHECK(high.full > 0.0);
    CHECK(low.full < 0.0);
}

TEST_CASE("droop steady angle") {
    DroopGains g = default_droop();
    CHECK(droop_steady_angle(g, g.p_star) == g.theta_star_0);
    CHECK(droop_steady_angle(g, 3800.0) ==
          doctest::Approx(g.theta_star_0 - 0.0184));
    DroopGains half = g;
    half.gamma = 0.5 * g.gamma;
    CHECK(droop_steady_angle(half, 3800.0) - half.theta_star_0 ==
          doctest::Approx(2.0 * (droop_steady_angle(g, 3800.0) - g.theta_star_0)));
}

TEST_CASE("gamma bound") {
    const double bound = gamma_bound(325.27, 325.27, 0.21991);
    CHECK(bound == doctest::Approx(4.81e5).epsilon(5e-3));
    CHECK(gamma_bound(325.27, 325.27, 2.0 * 0.21991) == doctest::Approx(0.5 * bound));
    CHECK(500.0 / bound < 1.0 / 100.0);   // comfortably inside the margin
    CHECK(5e4 / bound > 1.0 / 100.0);     // sharing degraded at the hardware gain
}

TEST_CASE("sharing ratio") {
    DroopGains g1 = default_droop();
    DroopGains g2 = default_droop();
    CHECK(sharing_ratio(g1, g2) == 1.0);

    g1.gamma = 1000.0;
    g2.gamma = 500.0;
    g1.p_star = 2.0 * g2.p_star;
    CHECK(sharing_ratio(g1, g2) == doctest::Approx(2.0));

    g1.p_star = g2.p_star;  // gamma ratio 2 but power ratio 1
    CHECK_THROWS_WITH_AS(sharing_ratio(g1, g2),
                         doctest::Contains("gamma_1/gamma_2"), std::invalid_argument);
}

TEST_CASE("two-source solve: symmetric case") {
    ReducedTwoSource net;
    net.r_load = default_reduced_load_resistance();
    DroopGains g = default_droop();
    g.p_star = 1440.0;
    g.theta_star_0 = 0.0;
    const TwoSourceSolution sol = solve_two_source_steady_state(net, g, g);
    CHECK(sol.p1 == doctest::Approx(sol.p2).epsilon(1e-12));
    CHECK(sol.residual < 1e-9);
    CHECK(sol.security_ok);
    CHECK(sol.q1 == doctest::Approx(sol.q2).epsilon(1e-9));
}

TEST_CASE("two-source solve: interconnection study") {
    // Lossless lines, hardware gains, converter II at zero setpoint and the
    // nominal-angle offset from the interconnection formula.
    ReducedTwoSource net;
    net.r_load = default_reduced_load_resistance();
    DroopGains g1 = default_droop();
    DroopGains g2 = default_droop();
    g2.p_star = 0.0;
    g1.theta_star_0 = interconnection_angle(g1.p_star, net.x10, net.v0, net.v1, 0.0);
    const TwoSourceSolution sol = solve_two_source_steady_state(net, g1, g2);
    CHECK(sol.bus1.theta - sol.bus2.theta == doctest::Approx(0.006).epsilon(3e-3));
    CHECK(std::abs(sol.p2) < 1.0);
    // Lossless lines: injected power balances the load exactly.
    CHECK(sol.p1 + sol.p2 == doctest::Approx(sol.p_load).epsilon(1e-9));
}

TEST_CASE("two-source solve: sharing at a gentle gain") {
    ReducedTwoSource net;
    net.r_load = default_reduced_load_resistance();
    DroopGains g = default_droop();
    g.gamma = 500.0;
    g.p_star = 1440.0;
    DroopGains g1 = g;
    g1.theta_star_0 = 0.0059866;  // offset inherited from the interconnection
    const TwoSourceSolution sol = solve_two_source_steady_state(net, g1, g);

    // Independent small-angle route: dtheta = offset/(1 + K/gamma) with
    // K = V1 V0 / X the power-angle stiffness, difference split K*dtheta.
    const double k = net.v1 * net.v0 / net.x10;
    const double dtheta = g1.theta_star_0 / (1.0 + 2.0 * k * (1.0 / g.gamma) / 2.0);
    const double p_diff = k * dtheta;
    CHECK(sol.p1 - sol.p2 == doctest::Approx(p_diff).epsilon(1e-3));
    CHECK(sol.p1 / sol.p2 == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("two-source solve: small-signal companion stays close") {
    ReducedTwoSource net;
    net.r_load = default_reduced_load_resistance();
    DroopGains g1 = default_droop();
    DroopGains g2 = default_droop();
    g2.p_star = 0.0;
    g1.theta_star_0 = 0.0059866;
    const TwoSourceSolution sol = solve_two_source_steady_state(net, g1, g2);
    // All edge angles are far below 0.05 rad here.
    CHECK(std::abs(sol.bus1.theta - sol.bus0.theta) < 0.05);
    CHECK(sol.p1_small ==
          doctest::Approx(sol.p1).epsilon(5e-3));
    CHECK(std::abs(sol.p2_small - sol.p2) < 0.005 * std::abs(sol.p1));
}

TEST_CASE("two-source solve: losses are accounted") {
    ReducedTwoSource net;
    net.r_line1 = net.r_line2 = 0.02;
    net.r_load = default_reduced_load_resistance();
    DroopGains g = default_droop();
    g.p_star = 1440.0;
    const TwoSourceSolution sol = solve_two_source_steady_state(net, g, g);
    CHECK(sol.p1 + sol.p2 ==
          doctest::Approx(sol.p_load + sol.line_loss1 + sol.line_loss2).epsilon(1e-9));
    CHECK(sol.line_loss1 > 0.0);
}

TEST_CASE("two-source solve rejects degenerate networks") {
    ReducedTwoSource net;
    net.x10 = 0.0;
    CHECK_THROWS_AS(solve_two_source_steady_state(net, default_droop(), default_droop()),
                    std::invalid_argument);
}
