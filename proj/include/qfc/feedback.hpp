#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "qfc/homodyne.hpp"
#include "qfc/state.hpp"

namespace qfc {

/// Coherent feedback that stabilizes the state at Bloch angle theta_bar in
/// the s_x,s_z plane.
class FeedbackLaw {
public:
    /// Disabled law targeting the ground state.
    FeedbackLaw() = default;

    /// Throws std::domain_error for theta_bar outside [0, pi].
    explicit FeedbackLaw(double theta_bar, bool enabled = true);

    static FeedbackLaw off(double theta_bar = 0.0) { return FeedbackLaw(theta_bar, false); }

    double theta_bar() const { return theta_bar_; }
    bool enabled() const { return enabled_; }

    /// (sin theta_bar, 0, cos theta_bar).
    BlochVector target() const { return BlochAngle(theta_bar_).vector(); }

    /// cos theta_bar of the equivalent enabled law: a disabled law acts like
    /// theta_bar = pi, which applies no feedback.
    double effective_cos() const;

private:
    double theta_bar_ = std::numbers::pi;
    bool enabled_ = false;
};

/// f = -(1 + cos theta_bar) dn_qf / (2 |alpha|); zero for a disabled law.
double feedback_amplitude(double dn_qf, const FeedbackLaw& law, const HomodyneConfig& cfg);

/// dn / (2 |alpha|) + f(dn), the part of the feedback that compensates the
/// weak measurement of s_x. Throws std::logic_error if it differs from
/// -cos theta_bar dn / (2 |alpha|) by more than a few ulps.
double residual_rotation(double dn, const FeedbackLaw& law, const HomodyneConfig& cfg);

/// kappa * (-cos theta_bar s_z + 1 - s_x^2, -s_x s_y, cos theta_bar s_x - s_x s_z).
/// Evaluated as kappa * (-cos theta_bar) * (rotation direction) + kappa *
/// (measurement direction) so that it vanishes exactly at the target state
/// and reduces bit for bit to diffusion_step_first_order for theta_bar = pi.
/// Throws std::invalid_argument for non-unit s.
BlochVector combined_diffusion_step(const BlochVector& s, double dn, const FeedbackLaw& law,
                                    const HomodyneConfig& cfg);

/// Coherent displacement 2 |alpha| f(dn_qf) of a later outcome, on the
/// outcome grid.
double feedback_shift(double dn_qf, const FeedbackLaw& law, const HomodyneConfig& cfg);

/// Shifts scheduled for the next `delay` intervals. The shift computed from
/// interval k is applied during interval k + delay.
class FeedbackState {
public:
    /// Throws std::invalid_argument for delay < 1.
    explicit FeedbackState(std::size_t delay = 1);

    /// Pre-seeded pipeline; queued.front() applies to the next interval.
    /// Throws std::invalid_argument when empty.
    explicit FeedbackState(std::vector<double> queued);

    std::size_t delay() const { return slots_.size(); }
    double pending_shift() const { return slots_[head_]; }

    /// Consumes the pending shift and schedules `shift` `delay` intervals ahead.
    void push(double shift);

private:
    std::vector<double> slots_;
    std::size_t head_ = 0;
};

/// State after recording dn_qf: only the fluctuation part feeds the law.
FeedbackState next_shift(double dn_qf, const FeedbackLaw& law, const HomodyneConfig& cfg,
                         FeedbackState current = FeedbackState{});

}  // namespace qfc
