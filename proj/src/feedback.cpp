#include "qfc/feedback.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace qfc {

FeedbackLaw::FeedbackLaw(double theta_bar, bool enabled) : theta_bar_(theta_bar), enabled_(enabled) {
    if (!(theta_bar >= 0.0 && theta_bar <= std::numbers::pi)) {
        throw std::domain_error("target angle theta_bar must lie in [0, pi]");
    }
}

double FeedbackLaw::effective_cos() const { return enabled_ ? std::cos(theta_bar_) : -1.0; }

double feedback_amplitude(double dn_qf, const FeedbackLaw& law, const HomodyneConfig& cfg) {
    if (!law.enabled()) return 0.0;
    return -(1.0 + std::cos(law.theta_bar())) * (dn_qf / (2.0 * cfg.alpha()));
}

double residual_rotation(double dn, const FeedbackLaw& law, const HomodyneConfig& cfg) {
    const double half = dn / (2.0 * cfg.alpha());
    const double residual = half + feedback_amplitude(dn, law, cfg);
    const double expected = -law.effective_cos() * half;
    const double tolerance = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(half);
    if (std::abs(residual - expected) > tolerance) {
        throw std::logic_error("residual rotation identity violated");
    }
    return residual;
}

BlochVector combined_diffusion_step(const BlochVector& s, double dn, const FeedbackLaw& law,
                                    const HomodyneConfig& cfg) {
    require_unit(s);
    const double k = cfg.kappa(dn);
    const double c = law.effective_cos();
    const StepDecomposition unit = step_directions(s);
    return unit.linear * -c * k + unit.nonlinear * k;
}

double feedback_shift(double dn_qf, const FeedbackLaw& law, const HomodyneConfig& cfg) {
    return cfg.quantize_outcome(2.0 * cfg.alpha() * feedback_amplitude(dn_qf, law, cfg));
}

FeedbackState::FeedbackState(std::size_t delay) : slots_(delay, 0.0) {
    if (delay < 1) throw std::invalid_argument("feedback delay must be at least one interval");
}

FeedbackState::FeedbackState(std::vector<double> queued) : slots_(std::move(queued)) {
    if (slots_.empty()) throw std::invalid_argument("feedback pipeline must not be empty");
}

void FeedbackState::push(double shift) {
    slots_[head_] = shift;
    head_ = (head_ + 1) % slots_.size();
}

FeedbackState next_shift(double dn_qf, const FeedbackLaw& law, const HomodyneConfig& cfg,
                         FeedbackState current) {
    current.push(feedback_shift(dn_qf, law, cfg));
    return current;
}

}  // namespace qfc
