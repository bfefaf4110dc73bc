#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qfc/cli.hpp"

using namespace qfc;
using namespace qfc::cli;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

CliOptions parse(const std::vector<std::string>& args) {
    std::ostringstream help;
    auto opts = parse_args(args, help);
    if (!opts) throw std::runtime_error("help requested");
    return *opts;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("qfc_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    bool header = true;
    for (const std::string& line : split(csv, '\n')) {
        if (line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

}  // namespace

TEST(ParseArgs, PresetExpansion) {
    const CliOptions o = parse({"--preset", "decay", "--seed", "7"});
    EXPECT_EQ(o.preset, Preset::Decay);
    EXPECT_EQ(o.seed, 7u);
    EXPECT_EQ(o.gamma_tau, 1e-4);
    EXPECT_EQ(o.alpha2, 1e4);
    EXPECT_FALSE(o.feedback);
    EXPECT_EQ(o.initial, (BlochVector{1, 0, 0}));
    EXPECT_EQ(o.steps, 1000);
    EXPECT_EQ(o.trajectories, 1000);
    EXPECT_EQ(o.record_stride, 10);
}

TEST(ParseArgs, StabilizeStartsAtTarget) {
    const CliOptions o = parse({"--preset", "stabilize", "--theta-bar", "1"});
    EXPECT_TRUE(o.feedback);
    EXPECT_EQ(o.theta_bar, 1.0);
    EXPECT_EQ(o.initial, BlochAngle(1.0).vector());
}

TEST(ParseArgs, ExplicitFlagsOverridePreset) {
    const CliOptions o = parse({"--preset", "decay", "--mode", "first-order", "--initial", "0,0,-1",
                                "--steps", "50", "--format", "json"});
    EXPECT_EQ(o.mode, UpdateMode::FirstOrder);
    EXPECT_EQ(o.initial, (BlochVector{0, 0, -1}));
    EXPECT_EQ(o.steps, 50);
    EXPECT_EQ(o.format, OutputFormat::Json);
}

TEST(ParseArgs, Help) {
    std::ostringstream help;
    EXPECT_FALSE(parse_args(std::vector<std::string>{"--help"}, help).has_value());
    EXPECT_NE(help.str().find("--preset"), std::string::npos);
}

TEST(ParseArgs, Rejections) {
    const std::vector<std::vector<std::string>> bad = {
        {"--gamma-tau", "0.5"},
        {"--gamma-tau", "abc"},
        {"--alpha2", "99"},
        {"--theta-bar", "4"},
        {"--initial", "0,0,2"},
        {"--initial", "1,0"},
        {"--trajectories", "1"},
        {"--steps", "-3"},
        {"--steps", "20000"},
        {"--delay", "0"},
        {"--preset", "nope"},
        {"--mode", "fast"},
        {"--format", "xml"},
        {"--bogus"},
    };
    for (const auto& args : bad) {
        const Invocation r = invoke(args);
        EXPECT_EQ(r.code, 2) << args[0];
        EXPECT_TRUE(r.out.empty()) << args[0];
        EXPECT_FALSE(r.err.empty()) << args[0];
    }
}

TEST(ParseArgs, LongRunNeedsFlag) {
    EXPECT_EQ(invoke({"--steps", "20000", "--trajectories", "2", "--record-stride", "20000"}).code, 2);
    EXPECT_NO_THROW(parse({"--steps", "20000", "--allow-long-run"}));
}

TEST(Run, UnwritablePathIsIoFailure) {
    const Invocation r = invoke({"--preset", "fig1-field", "--grid-points", "3", "--out",
                                 "/nonexistent-dir/qfc/out.csv"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(Run, CsvLayout) {
    const Invocation r = invoke({"--preset", "decay", "--steps", "20", "--trajectories", "4",
                                 "--record-stride", "10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = split(r.out, '\n');
    ASSERT_EQ(lines.size(), 7u);
    EXPECT_EQ(lines[0], "# generator: qfc 0.1.0");
    EXPECT_EQ(lines[1].rfind("# command: --preset decay", 0), 0u);
    EXPECT_EQ(lines[2].rfind("# config: {", 0), 0u);
    EXPECT_EQ(lines[3], "step,gamma_t,mean_sx,mean_sy,mean_sz,se_sx,se_sy,se_sz,angle_var,fidelity,purity");
    EXPECT_EQ(lines[4].rfind("0,0,1,0,0,0,0,0,0,", 0), 0u);
    EXPECT_EQ(lines[6].rfind("20,0.002", 0), 0u);
}

TEST(Run, FieldPresetPoles) {
    const Invocation fig1 = invoke({"--preset", "fig1-field", "--grid-points", "4"});
    const Invocation fig2 = invoke({"--preset", "fig2-field", "--grid-points", "4"});
    ASSERT_EQ(fig1.code, 0);
    ASSERT_EQ(fig2.code, 0);
    const auto rows1 = data_rows(fig1.out);
    const auto rows2 = data_rows(fig2.out);
    ASSERT_EQ(rows1.size(), 10u);
    // +x pole: rotation part (0,0,-1), measurement part vanishes
    EXPECT_EQ(rows1[0], "1,0,0,0,0,-1");
    EXPECT_EQ(rows2[0], "1,0,0,0,0,0");
    // ground pole: measurement part (1,0,0), rotation part (-1,0,0)
    EXPECT_EQ(rows1[5], "0,0,-1,0,0,0");
    EXPECT_EQ(rows2[5], "0,0,-1,1,0,0");
    EXPECT_EQ(fig1.out.find("-0,"), std::string::npos);
}

TEST(Run, RepeatedRunsAreByteIdentical) {
    const std::vector<std::string> args = {"--preset", "stabilize", "--steps", "100",
                                           "--trajectories", "50", "--format", "json"};
    const Invocation a = invoke(args);
    const Invocation b = invoke(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Run, ThreadCountDoesNotChangeOutput) {
    std::vector<std::string> args = {"--preset", "decay", "--steps", "50", "--trajectories", "1100",
                                     "--threads", "1"};
    const Invocation a = invoke(args);
    args.back() = "3";
    const Invocation b = invoke(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Run, EmbeddedCommandReproducesOutput) {
    const auto path = temp_file("roundtrip.csv");
    const Invocation first = invoke({"--preset", "stabilize", "--theta-bar", "0.7", "--steps", "60",
                                     "--trajectories", "8", "--seed", "99", "--out", path.string()});
    ASSERT_EQ(first.code, 0) << first.err;
    ASSERT_TRUE(first.out.empty());
    const std::string text = slurp(path);
    const std::string prefix = "# command: ";
    const auto begin = text.find(prefix) + prefix.size();
    const std::string command = text.substr(begin, text.find('\n', begin) - begin);
    const Invocation second = invoke(split(command, ' '));
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(second.out, text);
    std::filesystem::remove(path);
}

TEST(Run, DelaySweepRows) {
    const Invocation r = invoke({"--preset", "delay-sweep", "--delay", "3", "--steps", "20",
                                 "--trajectories", "4", "--record-stride", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = data_rows(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].rfind("1,0,", 0), 0u);
    EXPECT_EQ(rows[5].rfind("3,20,", 0), 0u);
}

TEST(SphereGrid, PointsAreUnit) {
    const auto grid = sphere_grid(500);
    ASSERT_EQ(grid.size(), 506u);
    for (const BlochVector& s : grid) EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(FieldTable, MatchesDecomposition) {
    for (const FieldRow& r : field_table(Preset::Fig1Field, 100)) {
        EXPECT_EQ(r.step, step_directions(r.point).total());
    }
    for (const FieldRow& r : field_table(Preset::Fig2Field, 100)) {
        EXPECT_EQ(r.step, step_directions(r.point).nonlinear);
    }
}
