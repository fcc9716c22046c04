// SPDX-License-Identifier: Apache-2.0
// frameguard: probe, calibrate, run, score and report.
#include "cli/commands.hpp"

#include "frameguard/errors.hpp"
#include "frameguard/net.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fg = frameguard;
namespace cli = frameguard::cli;

namespace {

struct MatchFlags {
    std::string config_file;
    std::string clock;
    std::optional<std::int64_t> rounds;
    std::optional<std::int64_t> warmup;
    std::optional<std::int64_t> frames;
    std::optional<std::int64_t> period;
    std::optional<std::uint16_t> port;
    std::optional<std::int64_t> hp_total;
};

void add_match_flags(CLI::App* cmd, MatchFlags& f)
{
    cmd->add_option("--config", f.config_file, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--clock", f.clock, "virtual or realtime");
    cmd->add_option("--rounds", f.rounds, "rounds per match");
    cmd->add_option("--warmup", f.warmup, "leading rounds to discard");
    cmd->add_option("--frames", f.frames, "frames per round");
    cmd->add_option("--frame-period-us", f.period, "frame period in microseconds");
    cmd->add_option("--port", f.port, "listen port (0 = ephemeral; default FRAMEGUARD_PORT or 31415)");
    cmd->add_option("--hp-total", f.hp_total, "starting HP of both players");
}

cli::ExperimentPlan load_plan(const MatchFlags& f, cli::ExperimentPlan base)
{
    base.config.listen_port = fg::net::default_port();
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        try {
            base = cli::parse_plan(in, std::move(base));
        } catch (const fg::ParseError& e) {
            throw fg::ParseError(f.config_file, e);
        }
    }
    auto& c = base.config;
    if (!f.clock.empty())
        c.clock_mode = fg::server::parse_clock_mode(f.clock);
    if (f.rounds)
        c.rounds = *f.rounds;
    if (f.warmup)
        c.warmup_rounds = *f.warmup;
    if (f.frames)
        c.frames_per_round = *f.frames;
    if (f.period)
        c.frame_period_us = *f.period;
    if (f.port)
        c.listen_port = *f.port;
    if (f.hp_total)
        c.duel.hp_total = *f.hp_total;
    return base;
}

struct LauncherFlags {
    std::string agent_cmd;
    std::string agent_bin;
    std::int64_t connect_timeout_ms = 10000;
};

void add_launcher_flags(CLI::App* cmd, LauncherFlags& f)
{
    cmd->add_option("--agent-cmd", f.agent_cmd, "shell command for the agent; runner flags are appended");
    cmd->add_option("--agent-bin", f.agent_bin, "agent executable (default: frameguard-agent beside this binary)");
    cmd->add_option("--connect-timeout-ms", f.connect_timeout_ms, "how long to wait for the agent");
}

cli::AgentLauncher make_launcher(const LauncherFlags& f)
{
    cli::AgentLauncher l;
    if (!f.agent_cmd.empty())
        l.agent_cmd = f.agent_cmd;
    l.agent_bin = f.agent_bin.empty() ? cli::default_agent_bin() : fg::cli::fs::path(f.agent_bin);
    l.connect_timeout = std::chrono::milliseconds(f.connect_timeout_ms);
    return l;
}

/// Config errors surface before any command runs.
template <class F>
int with_config_errors(F&& body)
{
    try {
        return body();
    } catch (const fg::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kParse;
    } catch (const fg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kUsage;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"frameguard: frame-budget fairness experiments"};
    app.require_subcommand(1);
    int code = 0;

    MatchFlags probe_match;
    LauncherFlags probe_launch;
    fg::agents::VariantSpec probe_spec;
    std::string probe_out = ".";
    auto* probe = app.add_subcommand("probe", "measure round-trip overhead with the Sandbox agent");
    add_match_flags(probe, probe_match);
    add_launcher_flags(probe, probe_launch);
    probe->add_option("--extra-transport-us", probe_spec.extra_transport_us, "added client-side transport");
    probe->add_option("--delay-us", probe_spec.injected_delay_us, "injected client delay");
    probe->add_option("--label", probe_spec.label, "output file stem")->default_val("probe");
    probe->add_option("--out", probe_out, "output directory");
    probe->callback([&] {
        code = with_config_errors([&] {
            cli::ExperimentPlan base;
            base.config.clock_mode = fg::server::ClockMode::Realtime;
            cli::ProbeOptions o;
            o.config = load_plan(probe_match, base).config;
            o.spec = probe_spec;
            o.out_dir = probe_out;
            o.launcher = make_launcher(probe_launch);
            return cli::cmd_probe(o, std::cout, std::cerr);
        });
    });

    cli::CalibrateOptions cal;
    std::string cal_record;
    auto* calibrate = app.add_subcommand("calibrate", "delay that closes the gap between two probes");
    calibrate->add_option("--fast", cal.fast, "stable mean (us) or probe summary file")->required();
    calibrate->add_option("--slow", cal.slow, "stable mean (us) or probe summary file")->required();
    calibrate->add_option("--granularity-us", cal.granularity_us, "delay rounding step");
    calibrate->add_option("--record", cal_record, "append the JSON record to this file");
    calibrate->callback([&] {
        if (!cal_record.empty())
            cal.record = cal_record;
        code = cli::cmd_calibrate(cal, std::cout, std::cerr);
    });

    MatchFlags run_match;
    LauncherFlags run_launch;
    std::string preset;
    std::int64_t fast_delay = 0;
    std::string run_out;
    bool print_plan = false;
    auto* run = app.add_subcommand("run", "play every variant of a plan");
    add_match_flags(run, run_match);
    add_launcher_flags(run, run_launch);
    run->add_option("--preset", preset, "built-in variant list")->check(CLI::IsMember({"fast-slow"}));
    run->add_option("--fast-delay-us", fast_delay, "delay injected into the fast variants of the preset");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--print-plan", print_plan, "print the effective plan and exit");
    run->callback([&] {
        code = with_config_errors([&] {
            cli::ExperimentPlan base;
            if (!preset.empty())
                base.variants = cli::fast_slow_variants(fast_delay);
            auto plan = load_plan(run_match, base);
            if (!run_out.empty())
                plan.output_dir = run_out;
            if (print_plan) {
                cli::write_plan(std::cout, plan);
                return static_cast<int>(cli::kOk);
            }
            return cli::cmd_run(plan, make_launcher(run_launch), std::cout, std::cerr);
        });
    });

    std::vector<std::string> score_inputs;
    std::string score_out;
    fg::ScoreParams score_params;
    auto* score = app.add_subcommand("score", "add score columns to results CSVs");
    score->add_option("inputs", score_inputs, "results CSV files")->required()->check(CLI::ExistingFile);
    score->add_option("--out-dir", score_out, "output directory (default: beside each input)");
    score->add_option("--hp-total", score_params.hp_total, "HP normalizer");
    score->add_option("--time-total", score_params.time_total, "frame normalizer");
    score->callback([&] {
        cli::ScoreOptions o;
        o.inputs.assign(score_inputs.begin(), score_inputs.end());
        o.params = score_params;
        if (!score_out.empty())
            o.out_dir = score_out;
        code = cli::cmd_score(o, std::cout, std::cerr);
    });

    cli::ReportOptions rep;
    std::string rep_out = ".";
    auto* report = app.add_subcommand("report", "compare scored variants");
    report->add_option("inputs", rep.inputs, "scored CSVs as PATH or LABEL=PATH")->required();
    report->add_option("--warmup", rep.warmup_rounds, "leading rounds to discard");
    report->add_option("--rounds-per-game", rep.rounds_per_game, "rounds per game");
    report->add_option("--hp-total", rep.params.hp_total, "HP normalizer");
    report->add_option("--time-total", rep.params.time_total, "frame normalizer");
    report->add_option("--out-dir", rep_out, "where plot.csv and summary.csv go");
    report->callback([&] {
        rep.out_dir = rep_out;
        code = cli::cmd_report(rep, std::cout, std::cerr);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    }
    return code;
}
