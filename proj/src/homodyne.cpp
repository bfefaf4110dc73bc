#include "qfc/homodyne.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfc/diagnostics.hpp"

namespace qfc {

namespace {

constexpr int kOutcomeGridBits = 40;

double standard_normal_pdf(double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

// Weight of outcome u = dn / alpha relative to the vacuum density:
//   w(u) = |c_E|^2 (1 - gamma_tau/2)^2 + |c_G + c_E sqrt(gamma_tau) u|^2
//        = damped + ground2 + 2 cross u + emitted u^2
struct OutcomeWeight {
    double damped;
    double ground2;
    double cross;
    double emitted;

    OutcomeWeight(const PureState& psi, const HomodyneConfig& cfg) {
        const double keep = 1.0 - 0.5 * cfg.gamma_tau();
        const Complex b = psi.excited() * cfg.sqrt_gamma_tau();
        damped = std::norm(psi.excited()) * keep * keep;
        ground2 = std::norm(psi.ground());
        cross = std::real(std::conj(psi.ground()) * b);
        emitted = std::norm(b);
    }

    double operator()(double u) const { return damped + ground2 + 2.0 * cross * u + emitted * u * u; }
    double total() const { return damped + ground2 + emitted; }
};

}  // namespace

HomodyneConfig::HomodyneConfig(double alpha_mag, double gamma_tau, UpdateMode mode,
                               HomodyneLimits limits)
    : alpha_(alpha_mag),
      gamma_tau_(gamma_tau),
      sqrt_gamma_tau_(std::sqrt(gamma_tau)),
      mode_(mode),
      limits_(limits) {
    if (!(std::isfinite(alpha_mag) && alpha_mag > 0.0)) {
        throw std::invalid_argument("|alpha| must be finite and positive");
    }
    if (!(alpha_mag * alpha_mag >= limits.min_alpha2)) {
        throw std::invalid_argument("|alpha|^2 = " + std::to_string(alpha_mag * alpha_mag) +
                                    " is below the minimum " + std::to_string(limits.min_alpha2) +
                                    " (strong local oscillator required)");
    }
    if (!(std::isfinite(gamma_tau) && gamma_tau > 0.0)) {
        throw std::invalid_argument("gamma_tau must be finite and positive");
    }
    if (!(gamma_tau <= limits.max_gamma_tau)) {
        throw std::invalid_argument("gamma_tau = " + std::to_string(gamma_tau) +
                                    " exceeds the maximum " + std::to_string(limits.max_gamma_tau) +
                                    " (short interval regime required)");
    }
    const int exponent = std::ilogb(alpha_mag) + 1;
    outcome_quantum_ = std::ldexp(1.0, exponent - kOutcomeGridBits);
}

HomodyneConfig HomodyneConfig::from_alpha2(double alpha2, double gamma_tau, UpdateMode mode,
                                           HomodyneLimits limits) {
    if (!(alpha2 > 0.0)) throw std::invalid_argument("|alpha|^2 must be positive");
    return HomodyneConfig(std::sqrt(alpha2), gamma_tau, mode, limits);
}

HomodyneConfig HomodyneConfig::with_mode(UpdateMode mode) const {
    HomodyneConfig copy = *this;
    copy.mode_ = mode;
    return copy;
}

double HomodyneConfig::quantize_outcome(double dn) const {
    return std::nearbyint(dn / outcome_quantum_) * outcome_quantum_;
}

MeasurementOutcome MeasurementOutcome::compose(double dn_qf, double shift, const HomodyneConfig& cfg) {
    MeasurementOutcome out;
    out.dn_qf = cfg.quantize_outcome(dn_qf);
    out.shift = cfg.quantize_outcome(shift);
    out.dn_total = out.dn_qf + out.shift;
    return out;
}

double vacuum_outcome_pdf(double dn, const HomodyneConfig& cfg) {
    return standard_normal_pdf(dn / cfg.alpha()) / cfg.alpha();
}

double coherent_outcome_pdf(double dn, CoherentAmplitude beta, const HomodyneConfig& cfg) {
    if (!beta.is_weak()) {
        warn("coherent amplitude |beta|^2 = " + std::to_string(std::norm(beta.beta)) +
             " is outside the weak-field regime");
    }
    const double mean = 2.0 * cfg.alpha() * beta.beta.real();
    return standard_normal_pdf((dn - mean) / cfg.alpha()) / cfg.alpha();
}

double conditioned_outcome_pdf(double dn, const PureState& psi, const HomodyneConfig& cfg) {
    const OutcomeWeight weight(psi, cfg);
    const double u = dn / cfg.alpha();
    return standard_normal_pdf(u) * weight(u) / (weight.total() * cfg.alpha());
}

MeasurementOutcome sample_outcome(double shift, const HomodyneConfig& cfg, Rng& rng) {
    return MeasurementOutcome::compose(cfg.alpha() * rng.normal(), shift, cfg);
}

MeasurementOutcome sample_conditioned_outcome(const PureState& psi, double shift,
                                              const HomodyneConfig& cfg, Rng& rng) {
    const OutcomeWeight weight(psi, cfg);
    // Envelope: w(u) <= c0 + c2 u^2 because 2|u| <= 1 + u^2. The proposal
    // phi(u) (c0 + c2 u^2) / (c0 + c2) mixes a standard normal with the
    // density u^2 phi(u), i.e. a signed chi variable with 3 degrees of freedom.
    const double c0 = weight.damped + weight.ground2 + std::abs(weight.cross);
    const double c2 = std::abs(weight.cross) + weight.emitted;
    if (c2 == 0.0) {
        return MeasurementOutcome::compose(cfg.alpha() * rng.normal(), shift, cfg);
    }
    const double p_core = c0 / (c0 + c2);
    for (;;) {
        double u = 0.0;
        if (rng.uniform() < p_core) {
            u = rng.normal();
        } else {
            const double a = rng.normal();
            const double b = rng.normal();
            const double c = rng.normal();
            const double magnitude = std::sqrt(a * a + b * b + c * c);
            u = rng.uniform() < 0.5 ? -magnitude : magnitude;
        }
        const double envelope = c0 + c2 * u * u;
        if (rng.uniform() * envelope <= weight(u)) {
            return MeasurementOutcome::compose(cfg.alpha() * u, shift, cfg);
        }
    }
}

PureState conditioned_update_exact(const PureState& psi, double dn, const HomodyneConfig& cfg) {
    const Complex excited = psi.excited() * (1.0 - 0.5 * cfg.gamma_tau());
    const Complex ground = psi.ground() + psi.excited() * cfg.kappa(dn);
    if (excited == 0.0 && ground == 0.0) {
        throw std::logic_error("conditioned update produced a zero state vector");
    }
    return PureState(excited, ground);
}

PureState rabi_rotate(const PureState& psi, double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    return PureState(c * psi.excited() - s * psi.ground(), s * psi.excited() + c * psi.ground());
}

StepDecomposition step_directions(const BlochVector& s) {
    return {
        {s.z, 0.0, -s.x},
        {s.y * s.y + s.z * s.z, -s.x * s.y, -s.x * s.z},
    };
}

StepDecomposition decompose_step(const BlochVector& s, double dn, const HomodyneConfig& cfg) {
    require_unit(s);
    const double k = cfg.kappa(dn);
    const StepDecomposition unit = step_directions(s);
    return {unit.linear * k, unit.nonlinear * k};
}

BlochVector diffusion_step_first_order(const BlochVector& s, double dn, const HomodyneConfig& cfg) {
    return decompose_step(s, dn, cfg).total();
}

double delta_theta(const BlochAngle& theta, double dn, const HomodyneConfig& cfg) {
    return cfg.kappa(dn) * (1.0 + std::cos(theta.radians()));
}

}  // namespace qfc
