#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qfc/feedback.hpp"
#include "qfc/homodyne.hpp"
#include "qfc/rng.hpp"
#include "qfc/state.hpp"

namespace qfc {

struct SimConfig {
    HomodyneConfig homodyne;
    FeedbackLaw law;
    BlochVector initial{0.0, 0.0, -1.0};
    std::int64_t steps = 1000;
    std::int64_t trajectories = 100;
    std::uint64_t master_seed = 1;
    std::size_t delay = 1;
    std::int64_t record_stride = 1;
    /// Permit steps * gamma_tau > 1 (a warning is still emitted).
    bool allow_long_run = false;

    /// Throws std::invalid_argument on any violated bound.
    void validate() const;

    /// Total evolution time in units of 1/Gamma.
    double gamma_t(std::int64_t step) const {
        return static_cast<double>(step) * homodyne.gamma_tau();
    }

    /// Step indices that are recorded: 0, stride, 2 stride, ... and the last step.
    std::vector<std::int64_t> recorded_steps() const;
};

/// Atom state carried along a trajectory. Exact mode evolves the amplitudes
/// and derives the Bloch vector; first-order mode evolves the Bloch vector
/// and derives the amplitudes.
struct AtomState {
    PureState psi;
    BlochVector bloch;

    static AtomState from_bloch(const BlochVector& s) { return {state_from_bloch(s), s}; }
};

struct StepResult {
    AtomState atom;
    FeedbackState feedback;
    MeasurementOutcome outcome;
};

/// One measurement interval: draw the outcome with the pending feedback
/// shift, update the atom, then schedule the next shift from dn_qf only.
///
/// Exact mode draws dn_qf from the conditioned outcome law, applies the
/// conditioned amplitude update for dn_qf and then the Rabi rotation
/// sqrt(gamma_tau) * shift / |alpha| produced by the feedback field.
/// First-order mode draws dn_qf from the vacuum law and applies the
/// combined fluctuation plus feedback step to the Bloch vector.
StepResult step_trajectory(const AtomState& atom, FeedbackState feedback, const SimConfig& cfg,
                           Rng& rng);

struct StepRecord {
    std::int64_t step = 0;
    BlochVector bloch;
    double dn_total = 0.0;
    double dn_qf = 0.0;
    double shift = 0.0;
};

struct TrajectoryRecord {
    std::vector<StepRecord> steps;
    PureState final_state;
};

/// Runs cfg.steps intervals with Rng(trajectory_seed(cfg.master_seed, index)).
TrajectoryRecord run_trajectory(const SimConfig& cfg, std::uint64_t index);

struct EnsemblePoint {
    std::int64_t step = 0;
    double gamma_t = 0.0;
    BlochVector mean;
    std::array<double, 3> variance{};
    std::array<double, 3> std_error{};
    /// Variance of atan2(s_x, s_z); NaN unless every trajectory has |s_y| <= 1e-9.
    double angle_variance = 0.0;
    /// Mean fidelity to the law's target state.
    double fidelity = 0.0;
    /// (1 + |<s>|^2) / 2.
    double purity = 0.0;
};

struct EnsembleStats {
    std::size_t trajectories = 0;
    std::vector<EnsemblePoint> points;
};

struct RunOptions {
    /// Worker threads; 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Runs all trajectories and aggregates them in index order, so the result
/// is bitwise independent of the number of threads. Throws
/// std::invalid_argument for fewer than two trajectories.
EnsembleStats run_ensemble(const SimConfig& cfg, RunOptions options = {});

/// Angle variance at recorded step `step`. Throws std::invalid_argument if
/// the step was not recorded and std::domain_error if the ensemble left the
/// s_y = 0 plane.
double angle_variance(const EnsembleStats& stats, std::int64_t step);

/// Bloch representation of a two-level density matrix, |u| <= 1.
class DensityMatrix2 {
public:
    /// Throws std::invalid_argument if |u|^2 > 1 + 1e-12.
    explicit DensityMatrix2(const BlochVector& u);

    const BlochVector& bloch() const { return u_; }
    double purity() const { return 0.5 * (1.0 + u_.dot(u_)); }

private:
    BlochVector u_;
};

/// Closed-form amplitude damping: coherences decay as exp(-Gamma t / 2),
/// the inversion relaxes to -1 as exp(-Gamma t). Throws
/// std::invalid_argument for gamma_t < 0.
DensityMatrix2 master_evolve(const DensityMatrix2& u0, double gamma_t);

}  // namespace qfc
