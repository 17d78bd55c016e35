#include "adsim/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace adsim {

namespace {
constexpr double kThird = 2.0943951023931954923084289221863;  // 2*pi/3
}

double wrap_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    if (w >= kTwoPi) {  // fmod rounding can land exactly on 2*pi
        w -= kTwoPi;
    }
    return w;
}

ThreePhase synth_three_phase(double amplitude, double theta) {
    return {amplitude * std::sin(theta),
            amplitude * std::sin(theta - kThird),
            amplitude * std::sin(theta + kThird)};
}

DqPair park(double theta, const ThreePhase& x) {
    const double sa = std::sin(theta);
    const double sb = std::sin(theta - kThird);
    const double sc = std::sin(theta + kThird);
    const double ca = std::cos(theta);
    const double cb = std::cos(theta - kThird);
    const double cc = std::cos(theta + kThird);
    return {(2.0 / 3.0) * (sa * x.a + sb * x.b + sc * x.c),
            (2.0 / 3.0) * (ca * x.a + cb * x.b + cc * x.c)};
}

ThreePhase inverse_park(double theta, const DqPair& x) {
    const double sa = std::sin(theta);
    const double sb = std::sin(theta - kThird);
    const double sc = std::sin(theta + kThird);
    const double ca = std::cos(theta);
    const double cb = std::cos(theta - kThird);
    const double cc = std::cos(theta + kThird);
    return {x.d * sa + x.q * ca, x.d * sb + x.q * cb, x.d * sc + x.q * cc};
}

}  // namespace adsim
