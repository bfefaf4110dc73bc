#pragma once

#include <array>
#include <complex>

namespace qfc {

using Complex = std::complex<double>;

/// Normalized two-level state (c_E, c_G) in the interaction picture.
///
/// Construction normalizes the amplitudes and fixes the global phase:
/// c_E is made real and non-negative whenever it is nonzero, otherwise
/// c_G is made real and non-negative.
class PureState {
public:
    PureState() : excited_(0.0), ground_(1.0) {}

    /// Throws std::invalid_argument for a zero or non-finite vector.
    PureState(Complex excited, Complex ground);

    static PureState ground_state() { return {}; }
    static PureState excited_state() { return {Complex(1.0), Complex(0.0)}; }

    Complex excited() const { return excited_; }
    Complex ground() const { return ground_; }

    friend bool operator==(const PureState&, const PureState&) = default;

private:
    Complex excited_;
    Complex ground_;
};

/// Bloch vector. s_z is the population inversion, s_x and s_y are the
/// in-phase and out-of-phase dipole components.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = -1.0;

    double norm() const;
    double dot(const BlochVector& other) const { return x * other.x + y * other.y + z * other.z; }
    bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }

    BlochVector operator+(const BlochVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
    BlochVector operator-(const BlochVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
    BlochVector operator*(double k) const { return {x * k, y * k, z * k}; }

    std::array<double, 3> components() const { return {x, y, z}; }

    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Returns v / |v|. Throws std::invalid_argument for the zero vector.
BlochVector normalized(const BlochVector& v);

/// Throws std::invalid_argument unless | |v| - 1 | <= tol.
void require_unit(const BlochVector& v, double tol = 1e-9);

/// Polar angle in the s_x,s_z half plane: cos(theta) = s_z, sin(theta) = s_x.
class BlochAngle {
public:
    /// Throws std::domain_error outside [0, pi].
    explicit BlochAngle(double theta);

    double radians() const { return theta_; }

    /// (sin theta, 0, cos theta).
    BlochVector vector() const;

private:
    double theta_;
};

BlochVector bloch_from_state(const PureState& psi);

/// Inverse of bloch_from_state under the phase convention of PureState.
/// Throws std::invalid_argument when |s| deviates from 1 by more than 1e-9.
PureState state_from_bloch(const BlochVector& s);

/// Throws std::domain_error unless |s_y| <= 1e-9 and s_x >= -1e-9.
BlochAngle angle_of(const BlochVector& s);

/// |<a|b>|^2 for pure states given by unit Bloch vectors, computed as
/// 1 - |a - b|^2 / 4 so that identical vectors give exactly 1.
double fidelity(const BlochVector& a, const BlochVector& b);

}  // namespace qfc
