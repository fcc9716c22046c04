// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "spawn.hpp"

#include "frameguard/errors.hpp"
#include "frameguard/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <system_error>

namespace frameguard::cli {

namespace {

std::vector<std::string> agent_flags(const AgentLauncher& launcher, std::uint16_t port, agents::AgentMode mode,
                                     const agents::VariantSpec& spec)
{
    return {"--host",
            launcher.host,
            "--port",
            std::to_string(port),
            "--mode",
            std::string(agents::mode_name(mode)),
            "--processing-us",
            std::to_string(spec.processing_us),
            "--extra-transport-us",
            std::to_string(spec.extra_transport_us),
            "--delay-us",
            std::to_string(spec.injected_delay_us),
            "--label",
            spec.label.empty() ? std::string(agents::mode_name(mode)) : spec.label};
}

std::vector<std::string> agent_argv(const AgentLauncher& launcher, std::uint16_t port, agents::AgentMode mode,
                                    const agents::VariantSpec& spec)
{
    const auto flags = agent_flags(launcher, port, mode, spec);
    if (launcher.agent_cmd) {
        std::string line = *launcher.agent_cmd;
        for (const auto& f : flags)
            line += " '" + f + "'";
        return {"/bin/sh", "-c", line};
    }
    std::vector<std::string> argv{launcher.agent_bin.string()};
    argv.insert(argv.end(), flags.begin(), flags.end());
    return argv;
}

/// A bound, not yet accepted, server side of one match.
struct Session {
    server::MatchConfig config;
    std::optional<net::Listener> listener;
};

Session open_session(server::MatchConfig config, const AgentLauncher& launcher)
{
    Session s{std::move(config), std::nullopt};
    if (s.config.clock_mode == server::ClockMode::Realtime) {
        s.listener = net::Listener::bind(launcher.host, s.config.listen_port);
    } else if (launcher.agent_cmd) {
        throw UsageError("an external agent_cmd needs clock_mode = realtime");
    }
    return s;
}

server::MatchOutcome play(Session& session, const AgentLauncher& launcher, agents::AgentMode mode,
                          const agents::VariantSpec& spec)
{
    if (!session.listener) {
        agents::BuiltinAgent agent(mode, spec);
        return server::run_match(session.config, agent);
    }

    auto config = session.config;
    config.listen_port = session.listener->port();
    ChildProcess child = ChildProcess::spawn(agent_argv(launcher, config.listen_port, mode, spec));
    auto sock = session.listener->accept(launcher.connect_timeout);
    if (!sock)
        throw HandshakeError("agent did not connect within " + std::to_string(launcher.connect_timeout.count()) +
                             " ms");
    net::Connection conn(std::move(*sock));
    try {
        server::handshake(conn, config);
    } catch (const ProtocolError& e) {
        throw HandshakeError(std::string("bad handshake: ") + e.what());
    } catch (const ConnectionError& e) {
        throw HandshakeError(std::string("agent left during handshake: ") + e.what());
    }
    auto outcome = server::run_match(config, conn);
    conn.close();
    child.wait(std::chrono::milliseconds(5000));
    return outcome;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + path.string());
    body(f);
    if (!f)
        throw Error("write failed: " + path.string());
}

std::string strip_suffix(std::string name)
{
    for (std::string_view suffix : {".scored.csv", ".results.csv", ".csv"}) {
        if (name.size() > suffix.size() && name.ends_with(suffix))
            return name.substr(0, name.size() - suffix.size());
    }
    return name;
}

/// Runs `body`, mapping library errors to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body)
{
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParse;
    } catch (const BindError& e) {
        err << "error: " << e.what() << '\n';
        return kBind;
    } catch (const HandshakeError& e) {
        err << "error: handshake failed: " << e.what() << '\n';
        return kHandshake;
    } catch (const SwappedInputsError& e) {
        err << "error: " << e.what() << '\n';
        return kCalibration;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::system_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace

fs::path default_agent_bin()
{
    std::error_code ec;
    auto self = fs::read_symlink("/proc/self/exe", ec);
    if (ec)
        return "frameguard-agent";
    return self.parent_path() / "frameguard-agent";
}

std::string label_from_path(const fs::path& p) { return strip_suffix(p.filename().string()); }

std::string format_probe_summary(const ProbeSummary& s, const server::MatchConfig& config)
{
    std::ostringstream line;
    line << "probe label=" << s.label << " clock=" << server::clock_mode_name(config.clock_mode)
         << " rounds=" << config.rounds << " warmup=" << config.warmup_rounds << " retained=" << s.retained_rounds
         << " games=" << records::format_double(static_cast<double>(config.rounds) / config.rounds_per_game)
         << " stable_mean_us=" << records::format_double(s.stable_mean_us);
    return line.str();
}

double read_stable_mean(const std::string& number_or_path)
{
    const fs::path path(number_or_path);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec))
        return records::parse_double(number_or_path, 0);

    std::ifstream in(path);
    std::string raw;
    std::size_t number = 0;
    constexpr std::string_view key = "stable_mean_us=";
    while (std::getline(in, raw)) {
        ++number;
        const auto at = raw.find(key);
        if (at == std::string::npos)
            continue;
        std::string_view value(raw);
        value.remove_prefix(at + key.size());
        value = value.substr(0, value.find_first_of(" \t\r"));
        return records::parse_double(value, number);
    }
    throw ParseError(number, path.string() + " has no stable_mean_us field");
}

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        options.config.validate();
        options.spec.validate();
        auto spec = options.spec;
        if (spec.label.empty())
            spec.label = "probe";
        check_label(spec.label);

        auto session = open_session(options.config, options.launcher);
        const auto outcome = play(session, options.launcher, agents::AgentMode::Sandbox, spec);

        fs::create_directories(options.out_dir);
        const auto latencies = probe::round_latencies(outcome.samples);
        write_file(options.out_dir / (spec.label + ".samples.csv"),
                   [&](std::ostream& f) { records::write_samples(f, outcome.samples); });
        write_file(options.out_dir / (spec.label + ".latency.csv"),
                   [&](std::ostream& f) { records::write_latency(f, latencies); });

        if (outcome.aborted) {
            err << "error: match aborted: " << outcome.abort_reason << '\n';
            return static_cast<int>(kMatchAbort);
        }

        ProbeSummary summary{spec.label, 0.0, 0};
        for (const auto& r : latencies)
            summary.retained_rounds += r.round_id > options.config.warmup_rounds ? 1 : 0;
        summary.stable_mean_us = probe::stable_mean(latencies, options.config.warmup_rounds);
        const auto line = format_probe_summary(summary, options.config);
        write_file(options.out_dir / (spec.label + ".summary.txt"), [&](std::ostream& f) { f << line << '\n'; });
        out << line << '\n';
        if (auto warning = probe::spread_warning(latencies, options.config.warmup_rounds))
            err << "warning: " << *warning << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_calibrate(const CalibrateOptions& options, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const double fast = read_stable_mean(options.fast);
        const double slow = read_stable_mean(options.slow);
        const auto result = probe::calibrate_delay(fast, slow, options.granularity_us);

        nlohmann::ordered_json record;
        record["mean_fast_us"] = result.mean_fast_us;
        record["mean_slow_us"] = result.mean_slow_us;
        record["gap_us"] = result.gap_us;
        record["granularity_us"] = result.granularity_us;
        record["delay_us"] = result.delay_us;
        const auto json_line = record.dump();

        out << "gap_us=" << records::format_double(result.gap_us) << " delay_us=" << result.delay_us << '\n';
        out << json_line << '\n';
        if (options.record) {
            std::ofstream f(*options.record, std::ios::app);
            if (!f)
                throw Error("cannot append to " + options.record->string());
            f << json_line << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_run(const ExperimentPlan& plan, const AgentLauncher& launcher, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        plan.validate();
        auto effective = launcher;
        if (plan.agent_cmd)
            effective.agent_cmd = plan.agent_cmd;
        if (plan.config.clock_mode == server::ClockMode::Virtual && effective.agent_cmd)
            throw UsageError("an external agent_cmd needs clock_mode = realtime");

        bool created = false;
        int code = kOk;
        for (const auto& variant : plan.variants) {
            auto session = open_session(plan.config, effective);
            if (!created) {
                fs::create_directories(plan.output_dir);
                created = true;
            }
            const auto outcome = play(session, effective, agents::AgentMode::FixedLoad, variant);
            const auto results_path = plan.output_dir / (variant.label + ".results.csv");
            write_file(results_path, [&](std::ostream& f) { records::write_results(f, outcome.rounds); });
            write_file(plan.output_dir / (variant.label + ".samples.csv"),
                       [&](std::ostream& f) { records::write_samples(f, outcome.samples); });
            out << variant.label << ": " << outcome.rounds.size() << " rounds -> " << results_path.string() << '\n';
            if (outcome.aborted) {
                err << "error: " << variant.label << ": match aborted: " << outcome.abort_reason << '\n';
                code = kMatchAbort;
            }
        }
        return code;
    });
}

int cmd_score(const ScoreOptions& options, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        options.params.validate();
        if (options.inputs.empty())
            throw UsageError("no input files");
        for (const auto& input : options.inputs) {
            std::ifstream in(input);
            if (!in)
                throw UsageError("cannot read " + input.string());
            std::vector<records::ScoredRound> rows;
            try {
                for (const auto& r : records::read_results(in))
                    rows.push_back({r, score_round(r, options.params)});
            } catch (const ParseError& e) {
                throw ParseError(input.string(), e);
            } catch (const ValidationError& e) {
                throw ParseError(input.string(), ParseError(rows.size() + 2, e.what()));
            }
            const auto dir = options.out_dir.value_or(input.parent_path());
            if (!dir.empty())
                fs::create_directories(dir);
            const auto target = dir / (label_from_path(input) + ".scored.csv");
            write_file(target, [&](std::ostream& f) { records::write_scored(f, rows); });
            out << input.string() << " -> " << target.string() << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        options.params.validate();
        if (options.inputs.empty())
            throw UsageError("no input files");
        if (options.warmup_rounds < 0 || options.rounds_per_game < 1)
            throw UsageError("warmup must be >= 0 and rounds-per-game >= 1");

        struct Row {
            std::string label;
            ScoreSummary summary;
        };
        std::vector<Row> rows;
        std::ostringstream plot;
        plot << records::kPlotHeader << '\n';
        for (const auto& spec : options.inputs) {
            const auto eq = spec.find('=');
            const fs::path path = eq == std::string::npos ? spec : spec.substr(eq + 1);
            const std::string label = eq == std::string::npos ? label_from_path(path) : spec.substr(0, eq);

            std::ifstream in(path);
            if (!in)
                throw UsageError("cannot read " + path.string());
            std::vector<records::ScoredRound> scored;
            try {
                scored = records::read_scored(in);
            } catch (const ParseError& e) {
                throw ParseError(path.string(), e);
            }
            std::vector<RoundResult> results;
            for (const auto& s : scored) {
                results.push_back(s.result);
                if (s.result.round_id > options.warmup_rounds)
                    plot << label << ',' << s.result.round_id << ',' << records::format_double(s.score.score)
                         << '\n';
            }
            rows.push_back({label, aggregate_scores(results, options.params, options.warmup_rounds)});
        }

        std::ostringstream summary;
        summary << records::kSummaryHeader << '\n';
        for (const auto& r : rows)
            summary << r.label << ',' << records::format_double(r.summary.mean) << ','
                    << records::format_double(r.summary.stddev) << ',' << r.summary.n << '\n';

        fs::create_directories(options.out_dir);
        write_file(options.out_dir / "plot.csv", [&](std::ostream& f) { f << plot.str(); });
        write_file(options.out_dir / "summary.csv", [&](std::ostream& f) { f << summary.str(); });

        std::size_t width = 7;
        for (const auto& r : rows)
            width = std::max(width, r.label.size());
        out << std::left << std::setw(static_cast<int>(width)) << "variant" << "  " << std::right << std::setw(10)
            << "mean" << "  " << std::setw(10) << "stddev" << "  " << std::setw(5) << "n" << "  " << std::setw(6)
            << "games" << '\n';
        for (const auto& r : rows) {
            out << std::left << std::setw(static_cast<int>(width)) << r.label << "  " << std::right << std::fixed
                << std::setprecision(6) << std::setw(10) << r.summary.mean << "  " << std::setw(10)
                << r.summary.stddev << "  " << std::setw(5) << r.summary.n << "  " << std::setprecision(1)
                << std::setw(6) << static_cast<double>(r.summary.n) / options.rounds_per_game << '\n';
        }
        out.unsetf(std::ios::floatfield);
        out << "rounds after warmup " << options.warmup_rounds << "; stddev is the population deviation\n";
        return static_cast<int>(kOk);
    });
}

}  // namespace frameguard::cli
