#include "qfc/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qfc {

PureState::PureState(Complex excited, Complex ground) {
    const double norm = std::sqrt(std::norm(excited) + std::norm(ground));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("PureState: amplitudes must be finite and not both zero");
    }
    const double mag_e = std::abs(excited);
    if (mag_e > 0.0) {
        const Complex phase = std::conj(excited) / mag_e;
        excited_ = Complex(mag_e / norm, 0.0);
        ground_ = ground * phase / norm;
    } else {
        excited_ = Complex(0.0, 0.0);
        ground_ = Complex(std::abs(ground) / norm, 0.0);
    }
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector normalized(const BlochVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite Bloch vector");
    }
    return {v.x / n, v.y / n, v.z / n};
}

void require_unit(const BlochVector& v, double tol) {
    const double n = v.norm();
    if (!(std::abs(n - 1.0) <= tol)) {
        throw std::invalid_argument("Bloch vector must have unit length (|s| = " + std::to_string(n) +
                                    ")");
    }
}

BlochAngle::BlochAngle(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw std::domain_error("Bloch angle must lie in [0, pi]");
    }
}

BlochVector BlochAngle::vector() const { return {std::sin(theta_), 0.0, std::cos(theta_)}; }

BlochVector bloch_from_state(const PureState& psi) {
    // s_x + i s_y = 2 <psi|E><G|psi>
    const Complex coherence = 2.0 * std::conj(psi.excited()) * psi.ground();
    return {coherence.real(), coherence.imag(), std::norm(psi.excited()) - std::norm(psi.ground())};
}

PureState state_from_bloch(const BlochVector& s) {
    require_unit(s);
    const BlochVector u = normalized(s);
    const double transverse = std::hypot(u.x, u.y);

    // Take the larger of |c_E|, |c_G| from the half-angle formula and derive
    // the other from the transverse component to avoid cancellation near the poles.
    double mag_e = 0.0;
    double mag_g = 0.0;
    if (u.z >= 0.0) {
        mag_e = std::sqrt(0.5 * (1.0 + u.z));
        mag_g = transverse / (2.0 * mag_e);
    } else {
        mag_g = std::sqrt(0.5 * (1.0 - u.z));
        mag_e = transverse / (2.0 * mag_g);
    }
    const Complex phase = transverse > 0.0 ? Complex(u.x, u.y) / transverse : Complex(1.0);
    return PureState(Complex(mag_e), mag_g * phase);
}

BlochAngle angle_of(const BlochVector& s) {
    if (!(std::abs(s.y) <= 1e-9) || !(s.x >= -1e-9)) {
        throw std::domain_error("angle form requires s_y = 0 and s_x >= 0");
    }
    const double theta = std::atan2(s.x, s.z);
    return BlochAngle(std::clamp(theta, 0.0, std::numbers::pi));
}

double fidelity(const BlochVector& a, const BlochVector& b) {
    const BlochVector d = a - b;
    return 1.0 - 0.25 * d.dot(d);
}

}  // namespace qfc
