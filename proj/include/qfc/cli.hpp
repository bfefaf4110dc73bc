#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qfc/trajectory.hpp"

namespace qfc::cli {

enum class Preset { Fig1Field, Fig2Field, Decay, Stabilize, DelaySweep };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view name);

/// Invalid flags or parameter values; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved invocation. Every field is set, either from the preset
/// defaults or from an explicit flag.
struct CliOptions {
    Preset preset = Preset::Decay;
    double gamma_tau = 1e-4;
    double alpha2 = 1e4;
    double theta_bar = 0.0;
    bool feedback = false;
    UpdateMode mode = UpdateMode::Exact;
    std::int64_t steps = 0;
    std::int64_t trajectories = 0;
    /// Feedback delay; for delay-sweep the largest delay of the sweep 1..delay.
    std::size_t delay = 1;
    std::uint64_t seed = 1;
    BlochVector initial;
    std::int64_t record_stride = 1;
    std::size_t grid_points = 200;
    bool allow_long_run = false;

    OutputFormat format = OutputFormat::Csv;
    std::string out = "-";
    /// Not part of the resolved configuration: results do not depend on it.
    unsigned threads = 0;

    bool is_field_preset() const {
        return preset == Preset::Fig1Field || preset == Preset::Fig2Field;
    }

    /// Simulation configuration for the given feedback delay.
    SimConfig sim_config(std::size_t delay_override = 0) const;
};

/// Parses flags (without the program name). Throws UsageError.
/// Returns std::nullopt when --help was requested; the help text is written
/// to `help_out`.
std::optional<CliOptions> parse_args(std::span<const std::string> args, std::ostream& help_out);

/// Flags that reproduce `opts` exactly (output path and thread count excluded).
std::string canonical_args(const CliOptions& opts);

/// Fibonacci lattice of `n` points on the unit sphere preceded by the six
/// axis poles (+x, -x, +y, -y, +z, -z).
std::vector<BlochVector> sphere_grid(std::size_t n);

struct FieldRow {
    BlochVector point;
    BlochVector step;  // per unit kappa
};

/// fig1-field: full first-order step; fig2-field: its nonlinear part.
std::vector<FieldRow> field_table(Preset preset, std::size_t grid_points);

using DelayedStats = std::vector<std::pair<std::size_t, EnsembleStats>>;
using Results = std::variant<std::vector<FieldRow>, EnsembleStats, DelayedStats>;

Results compute_results(const CliOptions& opts);

/// Renders results with the embedded configuration. Numbers in CSV use 17
/// significant digits.
std::string render_results(const CliOptions& opts, const Results& results);

/// Writes `text` to opts.out ("-" = `stdout_stream`). Returns false on I/O failure.
bool emit_results(const CliOptions& opts, const std::string& text, std::ostream& stdout_stream);

/// Full command: parse, run, emit. Returns the process exit code
/// (0 success, 1 I/O failure, 2 usage or validation failure).
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qfc::cli
