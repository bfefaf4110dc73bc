#pragma once

#include "qfc/rng.hpp"
#include "qfc/state.hpp"

namespace qfc {

enum class UpdateMode {
    Exact,       // conditioned amplitude update, renormalized
    FirstOrder,  // Bloch-vector diffusion step linear in sqrt(gamma_tau)
};

/// Bounds enforcing the strong local oscillator and short interval regimes.
struct HomodyneLimits {
    double min_alpha2 = 100.0;
    double max_gamma_tau = 0.01;
};

/// One homodyne measurement interval. The local-oscillator amplitude is
/// taken real and positive; its phase defines the measured quadrature and
/// pins the s_x axis.
class HomodyneConfig {
public:
    /// |alpha|^2 = 1e4, gamma*tau = 1e-4, exact updates.
    HomodyneConfig() : HomodyneConfig(100.0, 1e-4) {}

    /// Throws std::invalid_argument when alpha_mag^2 < limits.min_alpha2 or
    /// gamma_tau is outside (0, limits.max_gamma_tau].
    HomodyneConfig(double alpha_mag, double gamma_tau, UpdateMode mode = UpdateMode::Exact,
                   HomodyneLimits limits = {});

    static HomodyneConfig from_alpha2(double alpha2, double gamma_tau,
                                      UpdateMode mode = UpdateMode::Exact,
                                      HomodyneLimits limits = {});

    double alpha() const { return alpha_; }
    double alpha2() const { return alpha_ * alpha_; }
    double gamma_tau() const { return gamma_tau_; }
    double sqrt_gamma_tau() const { return sqrt_gamma_tau_; }
    UpdateMode mode() const { return mode_; }
    const HomodyneLimits& limits() const { return limits_; }

    HomodyneConfig with_mode(UpdateMode mode) const;

    /// kappa = sqrt(gamma_tau) * dn / |alpha|, the dimensionless step size.
    double kappa(double dn) const { return sqrt_gamma_tau_ * (dn / alpha_); }

    /// Rounds an outcome to the dyadic grid of spacing 2^-40 relative to
    /// |alpha|. Sums and differences of grid values below ~4096 |alpha| are
    /// exact, so dn_total - dn_qf == shift holds bit for bit.
    double quantize_outcome(double dn) const;

private:
    double alpha_;
    double gamma_tau_;
    double sqrt_gamma_tau_;
    UpdateMode mode_;
    HomodyneLimits limits_;
    double outcome_quantum_;
};

/// Weak coherent field amplitude per interval.
struct CoherentAmplitude {
    Complex beta;

    bool is_weak() const { return std::norm(beta) <= 0.1; }
};

/// Measured photon-number difference split into its vacuum-fluctuation part
/// and the coherent displacement applied during the interval.
struct MeasurementOutcome {
    double dn_total = 0.0;
    double dn_qf = 0.0;
    double shift = 0.0;

    /// Quantizes both parts on the config's outcome grid and sums them.
    static MeasurementOutcome compose(double dn_qf, double shift, const HomodyneConfig& cfg);
};

/// Vacuum outcome density (2 pi |alpha|^2)^(-1/2) exp(-dn^2 / (2 |alpha|^2)).
double vacuum_outcome_pdf(double dn, const HomodyneConfig& cfg);

/// Outcome density for a weak coherent input: Gaussian with mean
/// 2 |alpha| Re(beta) and variance |alpha|^2. Emits a warning when
/// |beta|^2 > 0.1.
double coherent_outcome_pdf(double dn, CoherentAmplitude beta, const HomodyneConfig& cfg);

/// Density of dn for an atom in `psi`, given by the squared norm of the
/// conditioned (unnormalized) state. Normalized over dn.
double conditioned_outcome_pdf(double dn, const PureState& psi, const HomodyneConfig& cfg);

/// Draws dn_qf from the vacuum law and adds `shift`.
MeasurementOutcome sample_outcome(double shift, const HomodyneConfig& cfg, Rng& rng);

/// Draws dn_qf from conditioned_outcome_pdf (exact rejection sampling) and
/// adds `shift`.
MeasurementOutcome sample_conditioned_outcome(const PureState& psi, double shift,
                                              const HomodyneConfig& cfg, Rng& rng);

/// c_E -> c_E (1 - gamma_tau / 2), c_G -> c_G + c_E sqrt(gamma_tau) dn / alpha,
/// then renormalize. Throws std::logic_error if the result has zero norm.
PureState conditioned_update_exact(const PureState& psi, double dn, const HomodyneConfig& cfg);

/// Rotation about s_y by `angle`, positive angles turning s_z into s_x.
PureState rabi_rotate(const PureState& psi, double angle);

/// Split of the first-order Bloch step into the Rabi rotation about s_y
/// and the measurement back-action.
struct StepDecomposition {
    BlochVector linear;
    BlochVector nonlinear;

    BlochVector total() const { return linear + nonlinear; }
};

/// Per unit kappa: linear = (s_z, 0, -s_x),
/// nonlinear = (s_y^2 + s_z^2, -s_x s_y, -s_x s_z).
/// The s_x component of the nonlinear part uses 1 - s_x^2 = s_y^2 + s_z^2.
StepDecomposition step_directions(const BlochVector& s);

/// Both parts scaled by kappa(dn). Throws std::invalid_argument for non-unit s.
StepDecomposition decompose_step(const BlochVector& s, double dn, const HomodyneConfig& cfg);

/// kappa * (s_z + 1 - s_x^2, -s_x s_y, -s_x - s_x s_z), evaluated as
/// linear + nonlinear. Throws std::invalid_argument for non-unit s.
BlochVector diffusion_step_first_order(const BlochVector& s, double dn, const HomodyneConfig& cfg);

/// kappa * (1 + cos theta): rotation angle of a state in the s_x,s_z plane.
double delta_theta(const BlochAngle& theta, double dn, const HomodyneConfig& cfg);

}  // namespace qfc
