// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "frameguard/errors.hpp"
#include "frameguard/records.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace frameguard::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool label_char(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
           c == '-' || c == '+';
}

agents::VariantSpec parse_variant(std::string_view value, std::size_t line)
{
    auto fields = records::split_fields(value);
    if (fields.size() != 4)
        throw ParseError(line, "variant needs 'label, processing_us, extra_transport_us, delay_us'");
    agents::VariantSpec v;
    v.label = std::string(trim(fields[0]));
    v.processing_us = records::parse_int(trim(fields[1]), line);
    v.extra_transport_us = records::parse_int(trim(fields[2]), line);
    v.injected_delay_us = records::parse_int(trim(fields[3]), line);
    return v;
}

}  // namespace

void check_label(const std::string& label)
{
    if (label.empty() || label.size() > 64 || !std::all_of(label.begin(), label.end(), label_char))
        throw ValidationError("label '" + label + "' must be 1-64 characters of [A-Za-z0-9._+-]");
}

void ExperimentPlan::validate() const
{
    config.validate();
    if (variants.empty())
        throw ValidationError("plan has no variants");
    std::set<std::string> labels;
    for (const auto& v : variants) {
        v.validate();
        check_label(v.label);
        if (!labels.insert(v.label).second)
            throw ValidationError("duplicate variant label '" + v.label + "'");
    }
}

ExperimentPlan parse_plan(std::istream& in, ExperimentPlan plan)
{
    std::string raw;
    std::size_t number = 0;
    bool variants_reset = false;
    while (std::getline(in, raw)) {
        ++number;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(number, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        auto& c = plan.config;
        auto as_int = [&] { return records::parse_int(value, number); };
        if (key == "clock_mode") {
            try {
                c.clock_mode = server::parse_clock_mode(value);
            } catch (const ValidationError& e) {
                throw ParseError(number, e.what());
            }
        } else if (key == "frame_period_us") {
            c.frame_period_us = as_int();
        } else if (key == "frames_per_round") {
            c.frames_per_round = as_int();
        } else if (key == "rounds") {
            c.rounds = as_int();
        } else if (key == "rounds_per_game") {
            c.rounds_per_game = as_int();
        } else if (key == "warmup_rounds") {
            c.warmup_rounds = as_int();
        } else if (key == "listen_port") {
            const auto port = as_int();
            if (port < 0 || port > 65535)
                throw ParseError(number, "listen_port out of range");
            c.listen_port = static_cast<std::uint16_t>(port);
        } else if (key == "hp_total") {
            c.duel.hp_total = as_int();
        } else if (key == "agent_hit_period") {
            c.duel.agent_hit_period = as_int();
        } else if (key == "agent_hit_damage") {
            c.duel.agent_hit_damage = as_int();
        } else if (key == "opp_hit_period") {
            c.duel.opp_hit_period = as_int();
        } else if (key == "opp_hit_damage") {
            c.duel.opp_hit_damage = as_int();
        } else if (key == "output_dir") {
            plan.output_dir = std::string(value);
        } else if (key == "agent_cmd") {
            plan.agent_cmd = std::string(value);
        } else if (key == "variant") {
            // Variants in a file replace any inherited list rather than extending it.
            if (!variants_reset) {
                plan.variants.clear();
                variants_reset = true;
            }
            plan.variants.push_back(parse_variant(value, number));
        } else {
            throw ParseError(number, "unknown key '" + std::string(key) + "'");
        }
    }
    return plan;
}

void write_plan(std::ostream& out, const ExperimentPlan& plan)
{
    const auto& c = plan.config;
    out << "clock_mode = " << server::clock_mode_name(c.clock_mode) << '\n'
        << "frame_period_us = " << c.frame_period_us << '\n'
        << "frames_per_round = " << c.frames_per_round << '\n'
        << "rounds = " << c.rounds << '\n'
        << "rounds_per_game = " << c.rounds_per_game << '\n'
        << "warmup_rounds = " << c.warmup_rounds << '\n'
        << "listen_port = " << c.listen_port << '\n'
        << "hp_total = " << c.duel.hp_total << '\n'
        << "agent_hit_period = " << c.duel.agent_hit_period << '\n'
        << "agent_hit_damage = " << c.duel.agent_hit_damage << '\n'
        << "opp_hit_period = " << c.duel.opp_hit_period << '\n'
        << "opp_hit_damage = " << c.duel.opp_hit_damage << '\n'
        << "output_dir = " << plan.output_dir.string() << '\n';
    if (plan.agent_cmd)
        out << "agent_cmd = " << *plan.agent_cmd << '\n';
    out << "# variant = label, processing_us, extra_transport_us, delay_us\n";
    for (const auto& v : plan.variants)
        out << "variant = " << v.label << ", " << v.processing_us << ", " << v.extra_transport_us << ", "
            << v.injected_delay_us << '\n';
}

std::vector<agents::VariantSpec> fast_slow_variants(std::int64_t fast_delay_us)
{
    struct Row {
        std::int64_t fast_processing;
        std::int64_t slow_processing;
    };
    constexpr Row rows[] = {{1100, 1300}, {15150, 15150}, {15500, 15500}, {15850, 15850}};
    constexpr std::int64_t fast_transport = 500;
    constexpr std::int64_t slow_transport = 850;

    const std::string suffix = fast_delay_us > 0 ? "+d" + std::to_string(fast_delay_us) : "";
    std::vector<agents::VariantSpec> out;
    for (const auto& row : rows) {
        out.push_back({row.fast_processing, fast_transport, fast_delay_us,
                       "fast-" + std::to_string(row.fast_processing) + suffix});
        out.push_back({row.slow_processing, slow_transport, 0, "slow-" + std::to_string(row.slow_processing)});
    }
    return out;
}

}  // namespace frameguard::cli
