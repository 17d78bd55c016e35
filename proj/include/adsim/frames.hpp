#pragma once

// Reference-frame math: angle wrapping on [0, 2*pi), balanced three-phase
// synthesis, and the Park transform pair.
//
// Convention: amplitude-invariant, sine-aligned d-axis. A balanced signal
// x_a = V*sin(theta) transformed at the same angle gives (d, q) = (V, 0).
// Instantaneous power therefore carries an explicit 3/2 in the dq frame:
//   v.i (abc) == 1.5 * (v_d*i_d + v_q*i_q).
// Zero-sequence is discarded (balanced-system assumption).

namespace adsim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Instantaneous three-phase quantity (volts or amperes).
struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Two-axis rotating-frame quantity, same units as the source signal.
struct DqPair {
    double d = 0.0;
    double q = 0.0;
};

inline ThreePhase operator+(const ThreePhase& x, const ThreePhase& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c};
}
inline ThreePhase operator-(const ThreePhase& x, const ThreePhase& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c};
}
inline ThreePhase operator*(double s, const ThreePhase& x) {
    return {s * x.a, s * x.b, s * x.c};
}
inline double dot(const ThreePhase& x, const ThreePhase& y) {
    return x.a * y.a + x.b * y.b + x.c * y.c;
}

/// Wrap an angle to [0, 2*pi). Idempotent; throws std::invalid_argument on
/// non-finite input.
double wrap_angle(double theta);

/// Balanced three-phase sine wave of the given amplitude at angle theta:
/// (A sin t, A sin(t - 2pi/3), A sin(t + 2pi/3)).
ThreePhase synth_three_phase(double amplitude, double theta);

/// Park transform at the given angle (amplitude-invariant, sine-aligned).
DqPair park(double theta, const ThreePhase& x);

/// Inverse Park transform; reproduces the balanced component of the source.
ThreePhase inverse_park(double theta, const DqPair& x);

}  // namespace adsim
