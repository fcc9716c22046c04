// SPDX-License-Identifier: Apache-2.0
#include "frameguard/records.hpp"

#include "frameguard/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace frameguard::records {

namespace {

// Yields data lines (header checked, blank lines skipped) with their 1-based numbers.
template <class Fn>
void for_each_row(std::istream& in, std::string_view header, std::size_t columns, Fn&& fn)
{
    std::string line;
    std::size_t number = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!saw_header) {
            if (line != header)
                throw ParseError(number, "expected header '" + std::string(header) + "'");
            saw_header = true;
            continue;
        }
        if (line.empty())
            continue;
        auto fields = split_fields(line);
        if (fields.size() != columns)
            throw ParseError(number, "expected " + std::to_string(columns) + " fields, found " +
                                         std::to_string(fields.size()));
        fn(fields, number);
    }
    if (!saw_header)
        throw ParseError(1, "missing header '" + std::string(header) + "'");
}

void write_result_fields(std::ostream& out, const RoundResult& r)
{
    out << r.round_id << ',' << r.hp_self << ',' << r.hp_opp << ',' << r.elapsed_frames << ',' << r.frames_sent
        << ',' << r.frames_processed << ',' << r.frames_skipped << ',';
    if (r.mean_overhead_us)
        out << format_double(*r.mean_overhead_us);
}

RoundResult parse_result_fields(const std::vector<std::string_view>& f, std::size_t line)
{
    RoundResult r;
    r.round_id = parse_int(f[0], line);
    r.hp_self = parse_int(f[1], line);
    r.hp_opp = parse_int(f[2], line);
    r.elapsed_frames = parse_int(f[3], line);
    r.frames_sent = parse_int(f[4], line);
    r.frames_processed = parse_int(f[5], line);
    r.frames_skipped = parse_int(f[6], line);
    if (!f[7].empty())
        r.mean_overhead_us = parse_double(f[7], line);
    return r;
}

}  // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(std::string_view text, std::size_t line)
{
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty() || !std::isfinite(v))
        throw ParseError(line, "not a number: '" + std::string(text) + "'");
    return v;
}

std::int64_t parse_int(std::string_view text, std::size_t line)
{
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
        throw ParseError(line, "not an integer: '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

void write_results(std::ostream& out, std::span<const RoundResult> rows)
{
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        write_result_fields(out, r);
        out << '\n';
    }
}

std::vector<RoundResult> read_results(std::istream& in)
{
    std::vector<RoundResult> rows;
    for_each_row(in, kResultsHeader, 8, [&](const auto& f, std::size_t line) {
        rows.push_back(parse_result_fields(f, line));
    });
    return rows;
}

void write_samples(std::ostream& out, std::span<const server::FrameSample> rows)
{
    out << kSamplesHeader << '\n';
    for (const auto& s : rows)
        out << s.round_id << ',' << s.frame_id << ',' << s.rtt_us << ',' << s.reported_processing_us << ','
            << s.overhead_us << '\n';
}

std::vector<server::FrameSample> read_samples(std::istream& in)
{
    std::vector<server::FrameSample> rows;
    for_each_row(in, kSamplesHeader, 5, [&](const auto& f, std::size_t line) {
        server::FrameSample s;
        s.round_id = parse_int(f[0], line);
        s.frame_id = parse_int(f[1], line);
        s.rtt_us = parse_int(f[2], line);
        s.reported_processing_us = parse_int(f[3], line);
        s.overhead_us = parse_int(f[4], line);
        rows.push_back(s);
    });
    return rows;
}

void write_latency(std::ostream& out, std::span<const probe::RoundLatency> rows)
{
    out << kLatencyHeader << '\n';
    for (const auto& r : rows)
        out << r.round_id << ',' << r.n << ',' << format_double(r.mean_overhead_us) << ',' << r.p50_us << ','
            << r.p99_us << '\n';
}

std::vector<probe::RoundLatency> read_latency(std::istream& in)
{
    std::vector<probe::RoundLatency> rows;
    for_each_row(in, kLatencyHeader, 5, [&](const auto& f, std::size_t line) {
        probe::RoundLatency r;
        r.round_id = parse_int(f[0], line);
        r.n = parse_int(f[1], line);
        r.mean_overhead_us = parse_double(f[2], line);
        r.p50_us = parse_int(f[3], line);
        r.p99_us = parse_int(f[4], line);
        rows.push_back(r);
    });
    return rows;
}

void write_scored(std::ostream& out, std::span<const ScoredRound> rows)
{
    out << kScoredHeader << '\n';
    for (const auto& row : rows) {
        write_result_fields(out, row.result);
        const auto& s = row.score;
        out << ',' << format_double(s.hp1) << ',' << format_double(s.hp2) << ',' << format_double(s.w) << ','
            << format_double(s.t) << ',' << format_double(s.score) << '\n';
    }
}

std::vector<ScoredRound> read_scored(std::istream& in)
{
    std::vector<ScoredRound> rows;
    for_each_row(in, kScoredHeader, 13, [&](const auto& f, std::size_t line) {
        ScoredRound row;
        row.result = parse_result_fields(f, line);
        row.score.hp1 = parse_double(f[8], line);
        row.score.hp2 = parse_double(f[9], line);
        row.score.w = parse_double(f[10], line);
        row.score.t = parse_double(f[11], line);
        row.score.score = parse_double(f[12], line);
        rows.push_back(row);
    });
    return rows;
}

}  // namespace frameguard::records
