#include "qfc/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace qfc::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kGenerator = "qfc 0.1.0";

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);  // no "-0"
    return buf;
}

double parse_double(std::string_view flag, const std::string& text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw UsageError(std::string(flag) + ": expected a finite number, got '" + text + "'");
    }
    return value;
}

template <typename Int>
Int parse_int(std::string_view flag, const std::string& text, Int min_value) {
    Int value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw UsageError(std::string(flag) + ": expected an integer, got '" + text + "'");
    }
    if (value < min_value) {
        throw UsageError(std::string(flag) + ": must be at least " + std::to_string(min_value));
    }
    return value;
}

BlochVector parse_initial(const std::string& text) {
    std::array<double, 3> v{};
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t comma = text.find(',', pos);
        if ((i < 2) == (comma == std::string::npos)) {
            throw UsageError("--initial: expected three comma-separated numbers \"sx,sy,sz\"");
        }
        v[i] = parse_double("--initial", text.substr(pos, comma - pos));
        pos = comma + 1;
    }
    const BlochVector s{v[0], v[1], v[2]};
    if (std::abs(s.norm() - 1.0) > 1e-9) {
        throw UsageError("--initial: Bloch vector must have unit length within 1e-9 (|s| = " +
                         fmt17(s.norm()) + ")");
    }
    return s;
}

std::string_view to_string(UpdateMode mode) {
    return mode == UpdateMode::Exact ? "exact" : "first-order";
}

std::string initial_string(const BlochVector& s) {
    return fmt17(s.x) + "," + fmt17(s.y) + "," + fmt17(s.z);
}

void apply_preset_defaults(CliOptions& o) {
    o.gamma_tau = 1e-4;
    o.alpha2 = 1e4;
    o.record_stride = 10;
    o.delay = 1;
    o.steps = 1000;
    o.trajectories = 1000;
    o.mode = UpdateMode::Exact;
    o.theta_bar = std::numbers::pi / 2;
    switch (o.preset) {
        case Preset::Fig1Field:
        case Preset::Fig2Field:
        case Preset::Decay:
            o.feedback = false;
            o.initial = {1.0, 0.0, 0.0};
            break;
        case Preset::Stabilize:
            o.feedback = true;
            break;
        case Preset::DelaySweep:
            o.feedback = true;
            o.delay = 8;
            break;
    }
}

Json config_json(const CliOptions& o) {
    Json j;
    j["preset"] = to_string(o.preset);
    j["mode"] = to_string(o.mode);
    j["feedback"] = o.feedback;
    j["theta_bar"] = o.theta_bar;
    j["gamma_tau"] = o.gamma_tau;
    j["alpha2"] = o.alpha2;
    j["steps"] = o.steps;
    j["trajectories"] = o.trajectories;
    j["delay"] = o.delay;
    j["seed"] = o.seed;
    j["initial"] = {o.initial.x, o.initial.y, o.initial.z};
    j["record_stride"] = o.record_stride;
    j["grid_points"] = o.grid_points;
    j["allow_long_run"] = o.allow_long_run;
    return j;
}

const std::vector<std::string> kEnsembleColumns = {
    "step", "gamma_t", "mean_sx", "mean_sy", "mean_sz", "se_sx",
    "se_sy", "se_sz", "angle_var", "fidelity", "purity"};
const std::vector<std::string> kFieldColumns = {"grid_sx", "grid_sy", "grid_sz",
                                                "dsx",     "dsy",     "dsz"};

std::vector<double> ensemble_values(const EnsemblePoint& p) {
    return {static_cast<double>(p.step), p.gamma_t, p.mean.x, p.mean.y, p.mean.z,
            p.std_error[0], p.std_error[1], p.std_error[2], p.angle_variance, p.fidelity, p.purity};
}

std::vector<double> field_values(const FieldRow& r) {
    return {r.point.x, r.point.y, r.point.z, r.step.x, r.step.y, r.step.z};
}

// Columns and numeric rows shared by the CSV and JSON writers; the first
// column of integer-valued rows (step, delay) is printed as an integer.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::size_t integer_columns = 0;
};

Table make_table(const Results& results) {
    Table t;
    if (const auto* field = std::get_if<std::vector<FieldRow>>(&results)) {
        t.columns = kFieldColumns;
        for (const FieldRow& r : *field) t.rows.push_back(field_values(r));
    } else if (const auto* stats = std::get_if<EnsembleStats>(&results)) {
        t.columns = kEnsembleColumns;
        t.integer_columns = 1;
        for (const EnsemblePoint& p : stats->points) t.rows.push_back(ensemble_values(p));
    } else {
        t.columns = kEnsembleColumns;
        t.columns.insert(t.columns.begin(), "delay");
        t.integer_columns = 2;
        for (const auto& [delay, stats] : std::get<DelayedStats>(results)) {
            for (const EnsemblePoint& p : stats.points) {
                std::vector<double> row = ensemble_values(p);
                row.insert(row.begin(), static_cast<double>(delay));
                t.rows.push_back(std::move(row));
            }
        }
    }
    return t;
}

std::string render_csv(const CliOptions& opts, const Table& t) {
    std::ostringstream os;
    os << "# generator: " << kGenerator << '\n';
    os << "# command: " << canonical_args(opts) << '\n';
    os << "# config: " << config_json(opts).dump() << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            if (c < t.integer_columns) {
                os << static_cast<std::int64_t>(row[c]);
            } else {
                os << fmt17(row[c]);
            }
        }
        os << '\n';
    }
    return os.str();
}

std::string render_json(const CliOptions& opts, const Table& t) {
    Json j;
    j["generator"] = kGenerator;
    j["command"] = canonical_args(opts);
    j["seed"] = opts.seed;
    j["config"] = config_json(opts);
    j["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json r;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c < t.integer_columns) {
                r[t.columns[c]] = static_cast<std::int64_t>(row[c]);
            } else if (std::isnan(row[c])) {
                r[t.columns[c]] = nullptr;
            } else {
                r[t.columns[c]] = row[c];
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace

std::string_view to_string(Preset preset) {
    switch (preset) {
        case Preset::Fig1Field: return "fig1-field";
        case Preset::Fig2Field: return "fig2-field";
        case Preset::Decay: return "decay";
        case Preset::Stabilize: return "stabilize";
        case Preset::DelaySweep: return "delay-sweep";
    }
    return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
    for (Preset p : {Preset::Fig1Field, Preset::Fig2Field, Preset::Decay, Preset::Stabilize,
                     Preset::DelaySweep}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

SimConfig CliOptions::sim_config(std::size_t delay_override) const {
    SimConfig cfg;
    cfg.homodyne = HomodyneConfig::from_alpha2(alpha2, gamma_tau, mode);
    cfg.law = FeedbackLaw(theta_bar, feedback);
    cfg.initial = initial;
    cfg.steps = steps;
    cfg.trajectories = trajectories;
    cfg.master_seed = seed;
    cfg.delay = delay_override ? delay_override : delay;
    cfg.record_stride = record_stride;
    cfg.allow_long_run = allow_long_run;
    return cfg;
}

std::optional<CliOptions> parse_args(std::span<const std::string> args, std::ostream& help_out) {
    CLI::App app{"Quantum trajectories of a homodyne-monitored two-level atom with coherent feedback",
                 "qfc"};
    std::string preset = "decay";
    std::optional<std::string> gamma_tau, alpha2, theta_bar, feedback, mode, steps, trajectories,
        delay, seed, initial, stride, grid_points;
    std::string format = "csv";
    std::string out = "-";
    std::string threads = "0";
    bool allow_long_run = false;

    app.add_option("--preset", preset,
                   "fig1-field | fig2-field | decay | stabilize | delay-sweep (default decay)");
    app.add_option("--gamma-tau", gamma_tau, "Gamma * tau per interval (<= 0.01)");
    app.add_option("--alpha2", alpha2, "local-oscillator photons per interval |alpha|^2 (>= 100)");
    app.add_option("--theta-bar", theta_bar, "feedback target angle in [0, pi]");
    app.add_option("--feedback", feedback, "on | off");
    app.add_option("--mode", mode, "exact | first-order");
    app.add_option("--steps", steps, "number of measurement intervals");
    app.add_option("--trajectories", trajectories, "ensemble size");
    app.add_option("--delay", delay, "feedback delay in intervals (delay-sweep: largest delay)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--initial", initial, "initial Bloch vector \"sx,sy,sz\"");
    app.add_option("--record-stride", stride, "record every n-th step");
    app.add_option("--grid-points", grid_points, "Fibonacci lattice size for field presets");
    app.add_option("--out", out, "output path, - for stdout");
    app.add_option("--format", format, "csv | json");
    app.add_option("--threads", threads, "worker threads, 0 = all cores");
    app.add_flag("--allow-long-run", allow_long_run, "permit steps * gamma_tau > 1");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        help_out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CliOptions o;
    const auto p = parse_preset(preset);
    if (!p) throw UsageError("--preset: unknown preset '" + preset + "'");
    o.preset = *p;
    apply_preset_defaults(o);

    if (gamma_tau) o.gamma_tau = parse_double("--gamma-tau", *gamma_tau);
    if (alpha2) o.alpha2 = parse_double("--alpha2", *alpha2);
    if (theta_bar) o.theta_bar = parse_double("--theta-bar", *theta_bar);
    if (feedback) {
        if (*feedback != "on" && *feedback != "off") throw UsageError("--feedback: expected on or off");
        o.feedback = *feedback == "on";
    }
    if (mode) {
        if (*mode == "exact") {
            o.mode = UpdateMode::Exact;
        } else if (*mode == "first-order") {
            o.mode = UpdateMode::FirstOrder;
        } else {
            throw UsageError("--mode: expected exact or first-order");
        }
    }
    if (steps) o.steps = parse_int<std::int64_t>("--steps", *steps, 0);
    if (trajectories) o.trajectories = parse_int<std::int64_t>("--trajectories", *trajectories, 2);
    if (delay) o.delay = parse_int<std::size_t>("--delay", *delay, 1);
    if (seed) o.seed = parse_int<std::uint64_t>("--seed", *seed, 0);
    if (stride) o.record_stride = parse_int<std::int64_t>("--record-stride", *stride, 1);
    if (grid_points) o.grid_points = parse_int<std::size_t>("--grid-points", *grid_points, 1);
    o.threads = parse_int<unsigned>("--threads", threads, 0);
    o.allow_long_run = allow_long_run;
    o.out = out;
    if (format == "csv") {
        o.format = OutputFormat::Csv;
    } else if (format == "json") {
        o.format = OutputFormat::Json;
    } else {
        throw UsageError("--format: expected csv or json");
    }

    if (!(o.theta_bar >= 0.0 && o.theta_bar <= std::numbers::pi)) {
        throw UsageError("--theta-bar: must lie in [0, pi]");
    }
    if (initial) {
        o.initial = parse_initial(*initial);
    } else if (o.preset == Preset::Stabilize || o.preset == Preset::DelaySweep) {
        o.initial = BlochAngle(o.theta_bar).vector();
    }

    try {
        o.sim_config().validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    return o;
}

std::string canonical_args(const CliOptions& o) {
    std::string s;
    s += "--preset " + std::string(to_string(o.preset));
    s += " --gamma-tau " + fmt17(o.gamma_tau);
    s += " --alpha2 " + fmt17(o.alpha2);
    s += " --theta-bar " + fmt17(o.theta_bar);
    s += std::string(" --feedback ") + (o.feedback ? "on" : "off");
    s += " --mode " + std::string(to_string(o.mode));
    s += " --steps " + std::to_string(o.steps);
    s += " --trajectories " + std::to_string(o.trajectories);
    s += " --delay " + std::to_string(o.delay);
    s += " --seed " + std::to_string(o.seed);
    s += " --initial " + initial_string(o.initial);
    s += " --record-stride " + std::to_string(o.record_stride);
    s += " --grid-points " + std::to_string(o.grid_points);
    if (o.allow_long_run) s += " --allow-long-run";
    s += std::string(" --format ") + (o.format == OutputFormat::Csv ? "csv" : "json");
    return s;
}

std::vector<BlochVector> sphere_grid(std::size_t n) {
    std::vector<BlochVector> grid = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                     {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden_angle * static_cast<double>(i);
        grid.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return grid;
}

std::vector<FieldRow> field_table(Preset preset, std::size_t grid_points) {
    std::vector<FieldRow> rows;
    for (const BlochVector& s : sphere_grid(grid_points)) {
        const StepDecomposition d = step_directions(s);
        rows.push_back({s, preset == Preset::Fig2Field ? d.nonlinear : d.total()});
    }
    return rows;
}

Results compute_results(const CliOptions& opts) {
    const RunOptions run{opts.threads};
    switch (opts.preset) {
        case Preset::Fig1Field:
        case Preset::Fig2Field:
            return field_table(opts.preset, opts.grid_points);
        case Preset::Decay:
        case Preset::Stabilize:
            return run_ensemble(opts.sim_config(), run);
        case Preset::DelaySweep: {
            DelayedStats sweep;
            for (std::size_t d = 1; d <= opts.delay; ++d) {
                sweep.emplace_back(d, run_ensemble(opts.sim_config(d), run));
            }
            return sweep;
        }
    }
    return EnsembleStats{};
}

std::string render_results(const CliOptions& opts, const Results& results) {
    const Table t = make_table(results);
    return opts.format == OutputFormat::Csv ? render_csv(opts, t) : render_json(opts, t);
}

bool emit_results(const CliOptions& opts, const std::string& text, std::ostream& stdout_stream) {
    if (opts.out == "-") {
        stdout_stream << text;
        stdout_stream.flush();
        return static_cast<bool>(stdout_stream);
    }
    std::ofstream file(opts.out, std::ios::binary | std::ios::trunc);
    if (!file) return false;
    file << text;
    file.close();
    return static_cast<bool>(file);
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    std::optional<CliOptions> opts;
    try {
        opts = parse_args(args, out);
    } catch (const UsageError& e) {
        err << "qfc: " << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }
    if (!opts) return 0;

    std::string text;
    try {
        text = render_results(*opts, compute_results(*opts));
    } catch (const std::invalid_argument& e) {
        err << "qfc: " << e.what() << '\n';
        return 2;
    }
    if (!emit_results(*opts, text, out)) {
        err << "qfc: cannot write output to '" << opts->out << "'\n";
        return 1;
    }
    return 0;
}

}  // namespace qfc::cli
