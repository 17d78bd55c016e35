#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "adsim/frames.hpp"

using namespace adsim;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("wrap_angle basic values") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kTwoPi + 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(wrap_angle(-0.1) == doctest::Approx(kTwoPi - 0.1).epsilon(1e-15));
    CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(wrap_angle(std::nan("")), std::invalid_argument);
}

TEST_CASE("wrap_angle is idempotent and 2pi-periodic") {
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 5000; ++i) {
        const double x = dist(rng);
        const double w = wrap_angle(x);
        CHECK(w >= 0.0);
        CHECK(w < kTwoPi);
        CHECK(wrap_angle(w) == w);
        // Same residue class: sines agree to the precision of the argument.
        CHECK(std::sin(wrap_angle(x + 6.0 * kTwoPi)) ==
              doctest::Approx(std::sin(w)).epsilon(1e-9));
    }
}

TEST_CASE("three-phase synthesis") {
    const double v = 230.0 * std::sqrt(2.0);
    const ThreePhase at_zero = synth_three_phase(v, 0.0);
    CHECK(at_zero.a == 0.0);
    CHECK(at_zero.b == doctest::Approx(-v * std::sqrt(3.0) / 2.0));
    CHECK(at_zero.c == doctest::Approx(v * std::sqrt(3.0) / 2.0));

    const ThreePhase zero_amp = synth_three_phase(0.0, 1.234);
    CHECK(zero_amp.a == 0.0);
    CHECK(zero_amp.b == 0.0);
    CHECK(zero_amp.c == 0.0);

    const ThreePhase quarter = synth_three_phase(325.27, kPi / 2.0);
    CHECK(quarter.a == doctest::Approx(325.27));
    CHECK(quarter.b == doctest::Approx(-162.635));
    CHECK(quarter.c == doctest::Approx(-162.635));

    // Balanced synthesis sums to zero.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const ThreePhase x = synth_three_phase(325.27, ang(rng));
        CHECK(std::abs(x.a + x.b + x.c) < 1e-12 * 325.27);
    }
}

TEST_CASE("park alignment and rotation") {
    const double v = 100.0;
    const DqPair aligned = park(0.7, synth_three_phase(v, 0.7));
    CHECK(aligned.d == doctest::Approx(v).epsilon(1e-12));
    CHECK(aligned.q == doctest::Approx(0.0).scale(v).epsilon(1e-12));

    const DqPair zero = park(0.0, {0.0, 0.0, 0.0});
    CHECK(zero.d == 0.0);
    CHECK(zero.q == 0.0);

    const double phi = 0.2;
    const DqPair rotated = park(0.7 + phi, synth_three_phase(v, 0.7));
    CHECK(rotated.d == doctest::Approx(v * std::cos(phi)).epsilon(1e-12));
    CHECK(rotated.q == doctest::Approx(-v * std::sin(phi)).epsilon(1e-12));
}

TEST_CASE("inverse park") {
    const ThreePhase zero = inverse_park(1.3, {0.0, 0.0});
    CHECK(zero.a == 0.0);
    CHECK(zero.b == 0.0);
    CHECK(zero.c == 0.0);

    const ThreePhase direct = inverse_park(0.0, {50.0, 0.0});
    const ThreePhase ref = synth_three_phase(50.0, 0.0);
    CHECK(direct.a == doctest::Approx(ref.a));
    CHECK(direct.b == doctest::Approx(ref.b));
    CHECK(direct.c == doctest::Approx(ref.c));
}

TEST_CASE("park round trip on balanced signals") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> amp(0.1, 400.0);
    std::uniform_real_distribution<double> ang(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = amp(rng);
        const double theta = ang(rng);
        const double frame = ang(rng);
        const ThreePhase x = synth_three_phase(v, theta);
        const ThreePhase back = inverse_park(frame, park(frame, x));
        CHECK(std::abs(back.a - x.a) < 1e-9 * v);
        CHECK(std::abs(back.b - x.b) < 1e-9 * v);
        CHECK(std::abs(back.c - x.c) < 1e-9 * v);
    }
    const ThreePhase x = synth_three_phase(325.27, 1.1);
    const ThreePhase back = inverse_park(1.1, park(1.1, x));
    CHECK(std::abs(back.a - x.a) < 1e-9);
    CHECK(std::abs(back.b - x.b) < 1e-9);
    CHECK(std::abs(back.c - x.c) < 1e-9);
}

TEST_CASE("abc and dq powers agree with the 3/2 factor") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> amp(1.0, 300.0);
    std::uniform_real_distribution<double> ang(-7.0, 7.0);
    for (int i = 0; i < 1000; ++i) {
        const double frame = ang(rng);
        const ThreePhase v = synth_three_phase(amp(rng), ang(rng));
        const ThreePhase c = synth_three_phase(amp(rng), ang(rng));
        const DqPair vdq = park(frame, v);
        const DqPair cdq = park(frame, c);
        const double p_abc = dot(v, c);
        const double p_dq = 1.5 * (vdq.d * cdq.d + vdq.q * cdq.q);
        CHECK(p_abc == doctest::Approx(p_dq).epsilon(1e-9));
    }
}
