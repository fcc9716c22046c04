// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/agents.hpp"
#include "frameguard/probe.hpp"
#include "frameguard/score.hpp"
#include "frameguard/server.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frameguard::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kHandshake = 2,
    kBind = 3,
    kCalibration = 4,
    kMatchAbort = 5,
    kParse = 6,
};

/// How realtime sessions start their agent. With agent_cmd set, the command runs
/// under /bin/sh with the agent runner flags appended; otherwise agent_bin is
/// executed directly.
struct AgentLauncher {
    std::optional<std::string> agent_cmd;
    fs::path agent_bin;
    std::string host = "127.0.0.1";
    std::chrono::milliseconds connect_timeout{10000};
};

/// Path of the frameguard-agent binary installed next to the running executable.
fs::path default_agent_bin();

struct ProbeOptions {
    server::MatchConfig config;
    agents::VariantSpec spec;  // processing_us is ignored by the Sandbox
    fs::path out_dir = ".";
    AgentLauncher launcher;
};

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err);

struct ProbeSummary {
    std::string label;
    double stable_mean_us = 0.0;
    std::int64_t retained_rounds = 0;
};

std::string format_probe_summary(const ProbeSummary& s, const server::MatchConfig& config);
/// Accepts a bare number of microseconds, or a path to a summary file written by
/// cmd_probe. Throws ParseError.
double read_stable_mean(const std::string& number_or_path);

struct CalibrateOptions {
    std::string fast;
    std::string slow;
    std::int64_t granularity_us = probe::kDefaultGranularityUs;
    std::optional<fs::path> record;  // JSON-lines file to append to
};

int cmd_calibrate(const CalibrateOptions& options, std::ostream& out, std::ostream& err);

struct ExperimentPlan {
    server::MatchConfig config;
    std::vector<agents::VariantSpec> variants;
    fs::path output_dir = "results";
    std::optional<std::string> agent_cmd;

    void validate() const;
};

/// Flat `key = value` lines, `#` comments. `variant = label, processing_us,
/// extra_transport_us, delay_us` may repeat. Throws ParseError with the line.
ExperimentPlan parse_plan(std::istream& in, ExperimentPlan base = {});
void write_plan(std::ostream& out, const ExperimentPlan& plan);

/// Eight preset variants: fast transport 500 us and slow
/// 850 us, crossed with the baseline compute (1100 / 1300 us) and 15150, 15500,
/// 15850 us. `fast_delay_us` is injected into every fast variant.
std::vector<agents::VariantSpec> fast_slow_variants(std::int64_t fast_delay_us = 0);

int cmd_run(const ExperimentPlan& plan, const AgentLauncher& launcher, std::ostream& out, std::ostream& err);

struct ScoreOptions {
    std::vector<fs::path> inputs;
    ScoreParams params;
    std::optional<fs::path> out_dir;  // defaults to each input's directory
};

/// Writes `<stem>.scored.csv` for each `<stem>.results.csv` (or `<stem>.csv`).
int cmd_score(const ScoreOptions& options, std::ostream& out, std::ostream& err);

struct ReportOptions {
    std::vector<std::string> inputs;  // `path` or `label=path`
    std::int64_t warmup_rounds = 6;
    std::int64_t rounds_per_game = 3;
    ScoreParams params;
    fs::path out_dir = ".";
};

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

/// Labels name output files: non-empty, at most 64 bytes of [A-Za-z0-9._+-].
/// Throws ValidationError.
void check_label(const std::string& label);

/// Variant label taken from a results/scored file name.
std::string label_from_path(const fs::path& p);

}  // namespace frameguard::cli
