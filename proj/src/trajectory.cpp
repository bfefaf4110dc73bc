#include "qfc/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "qfc/diagnostics.hpp"

namespace qfc {

namespace {

// Trajectories are simulated in fixed-size blocks and folded into the
// accumulators in index order; the block size bounds memory and does not
// depend on the thread count.
constexpr std::size_t kBlockSize = 1024;
constexpr double kPlaneTolerance = 1e-9;

struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

struct PointAccumulator {
    std::array<Welford, 3> component;
    Welford angle;
    Welford fidelity;
    bool planar = true;

    void add(const BlochVector& s, const BlochVector& target) {
        component[0].add(s.x);
        component[1].add(s.y);
        component[2].add(s.z);
        fidelity.add(qfc::fidelity(s, target));
        if (std::abs(s.y) > kPlaneTolerance) planar = false;
        // + 0.0 maps -0.0 to +0.0 so the ground state does not flip to -pi.
        angle.add(std::atan2(s.x + 0.0, s.z));
    }
};

void run_parallel(std::size_t count, unsigned threads, const auto& task) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    workers.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
        });
    }
}

}  // namespace

void SimConfig::validate() const {
    require_unit(initial);
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (trajectories < 1) throw std::invalid_argument("trajectories must be positive");
    if (delay < 1) throw std::invalid_argument("feedback delay must be at least 1");
    if (record_stride < 1) throw std::invalid_argument("record stride must be positive");
    if (gamma_t(steps) > 1.0 && !allow_long_run) {
        throw std::invalid_argument("steps * gamma_tau = " + std::to_string(gamma_t(steps)) +
                                    " exceeds 1 (short-time regime); override to allow");
    }
}

std::vector<std::int64_t> SimConfig::recorded_steps() const {
    std::vector<std::int64_t> out;
    for (std::int64_t k = 0; k <= steps; k += record_stride) out.push_back(k);
    if (out.back() != steps) out.push_back(steps);
    return out;
}

StepResult step_trajectory(const AtomState& atom, FeedbackState feedback, const SimConfig& cfg,
                           Rng& rng) {
    const HomodyneConfig& hc = cfg.homodyne;
    const double shift = feedback.pending_shift();
    StepResult result{atom, std::move(feedback), {}};

    if (hc.mode() == UpdateMode::Exact) {
        result.outcome = sample_conditioned_outcome(atom.psi, shift, hc, rng);
        PureState psi = conditioned_update_exact(atom.psi, result.outcome.dn_qf, hc);
        if (result.outcome.shift != 0.0) {
            psi = rabi_rotate(psi, hc.sqrt_gamma_tau() * (result.outcome.shift / hc.alpha()));
        }
        result.atom = {psi, bloch_from_state(psi)};
    } else {
        result.outcome = sample_outcome(shift, hc, rng);
        const BlochVector ds = combined_diffusion_step(atom.bloch, result.outcome.dn_qf, cfg.law, hc);
        if (!ds.is_zero()) result.atom = AtomState::from_bloch(normalized(atom.bloch + ds));
    }

    result.feedback.push(feedback_shift(result.outcome.dn_qf, cfg.law, hc));
    return result;
}

TrajectoryRecord run_trajectory(const SimConfig& cfg, std::uint64_t index) {
    cfg.validate();
    Rng rng(trajectory_seed(cfg.master_seed, index));
    AtomState atom = AtomState::from_bloch(cfg.initial);
    FeedbackState feedback(cfg.delay);

    const std::vector<std::int64_t> recorded = cfg.recorded_steps();
    TrajectoryRecord record;
    record.steps.reserve(recorded.size());
    record.steps.push_back({0, atom.bloch, 0.0, 0.0, 0.0});

    auto next_record = recorded.begin() + 1;
    for (std::int64_t k = 1; k <= cfg.steps; ++k) {
        StepResult r = step_trajectory(atom, std::move(feedback), cfg, rng);
        atom = r.atom;
        feedback = std::move(r.feedback);
        if (next_record != recorded.end() && *next_record == k) {
            record.steps.push_back(
                {k, atom.bloch, r.outcome.dn_total, r.outcome.dn_qf, r.outcome.shift});
            ++next_record;
        }
    }
    record.final_state = atom.psi;
    return record;
}

EnsembleStats run_ensemble(const SimConfig& cfg, RunOptions options) {
    cfg.validate();
    if (cfg.trajectories < 2) throw std::invalid_argument("an ensemble needs at least two trajectories");
    if (cfg.gamma_t(cfg.steps) > 1.0) {
        warn("steps * gamma_tau = " + std::to_string(cfg.gamma_t(cfg.steps)) +
             " leaves the short-time regime");
    }
    const unsigned threads =
        options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;

    const std::vector<std::int64_t> recorded = cfg.recorded_steps();
    const BlochVector target = cfg.law.target();
    std::vector<PointAccumulator> acc(recorded.size());

    const auto total = static_cast<std::size_t>(cfg.trajectories);
    std::vector<std::vector<BlochVector>> block(std::min(kBlockSize, total));
    for (std::size_t start = 0; start < total; start += kBlockSize) {
        const std::size_t count = std::min(kBlockSize, total - start);
        run_parallel(count, threads, [&](std::size_t i) {
            const TrajectoryRecord rec = run_trajectory(cfg, start + i);
            std::vector<BlochVector>& out = block[i];
            out.clear();
            for (const StepRecord& s : rec.steps) out.push_back(s.bloch);
        });
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t p = 0; p < recorded.size(); ++p) acc[p].add(block[i][p], target);
        }
    }

    EnsembleStats stats;
    stats.trajectories = total;
    stats.points.reserve(recorded.size());
    const double n = static_cast<double>(total);
    for (std::size_t p = 0; p < recorded.size(); ++p) {
        const PointAccumulator& a = acc[p];
        EnsemblePoint pt;
        pt.step = recorded[p];
        pt.gamma_t = cfg.gamma_t(recorded[p]);
        pt.mean = {a.component[0].mean, a.component[1].mean, a.component[2].mean};
        for (std::size_t c = 0; c < 3; ++c) {
            pt.variance[c] = a.component[c].variance();
            pt.std_error[c] = std::sqrt(pt.variance[c] / n);
        }
        pt.angle_variance = a.planar ? a.angle.variance() : std::numeric_limits<double>::quiet_NaN();
        pt.fidelity = a.fidelity.mean;
        pt.purity = 0.5 * (1.0 + pt.mean.dot(pt.mean));
        stats.points.push_back(pt);
    }
    return stats;
}

double angle_variance(const EnsembleStats& stats, std::int64_t step) {
    const auto it = std::find_if(stats.points.begin(), stats.points.end(),
                                 [step](const EnsemblePoint& p) { return p.step == step; });
    if (it == stats.points.end()) {
        throw std::invalid_argument("step " + std::to_string(step) + " was not recorded");
    }
    if (std::isnan(it->angle_variance)) {
        throw std::domain_error("angle variance requires trajectories confined to s_y = 0");
    }
    return it->angle_variance;
}

DensityMatrix2::DensityMatrix2(const BlochVector& u) : u_(u) {
    if (!(u.dot(u) <= 1.0 + 1e-12)) {
        throw std::invalid_argument("density matrix Bloch vector must have length <= 1");
    }
}

DensityMatrix2 master_evolve(const DensityMatrix2& u0, double gamma_t) {
    if (!(gamma_t >= 0.0)) throw std::invalid_argument("gamma_t must be non-negative");
    const double coherence = std::exp(-0.5 * gamma_t);
    const double population = std::exp(-gamma_t);
    const BlochVector& u = u0.bloch();
    return DensityMatrix2({u.x * coherence, u.y * coherence, -1.0 + (u.z + 1.0) * population});
}

}  // namespace qfc
