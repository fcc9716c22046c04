// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "frameguard/probe.hpp"
#include "frameguard/score.hpp"
#include "frameguard/server.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// CSV files exchanged between the server and the CLI. UTF-8, one header row, no
// quoting (no field can contain a comma). Doubles are written in shortest
// round-trip form so re-reading a file reproduces the values exactly.
namespace frameguard::records {

inline constexpr std::string_view kResultsHeader =
    "round_id,hp_self,hp_opp,elapsed_frames,frames_sent,frames_processed,frames_skipped,mean_overhead_us";
inline constexpr std::string_view kSamplesHeader = "round_id,frame_id,rtt_us,reported_processing_us,overhead_us";
inline constexpr std::string_view kLatencyHeader = "round_id,n,mean_overhead_us,p50_us,p99_us";
inline constexpr std::string_view kScoredHeader =
    "round_id,hp_self,hp_opp,elapsed_frames,frames_sent,frames_processed,frames_skipped,mean_overhead_us,"
    "hp1,hp2,w,t,score";
inline constexpr std::string_view kPlotHeader = "variant,round_id,score";
inline constexpr std::string_view kSummaryHeader = "variant,mean,stddev,n";

std::string format_double(double v);
double parse_double(std::string_view text, std::size_t line);
std::int64_t parse_int(std::string_view text, std::size_t line);
std::vector<std::string_view> split_fields(std::string_view line);

void write_results(std::ostream& out, std::span<const RoundResult> rows);
std::vector<RoundResult> read_results(std::istream& in);

void write_samples(std::ostream& out, std::span<const server::FrameSample> rows);
std::vector<server::FrameSample> read_samples(std::istream& in);

void write_latency(std::ostream& out, std::span<const probe::RoundLatency> rows);
std::vector<probe::RoundLatency> read_latency(std::istream& in);

struct ScoredRound {
    RoundResult result;
    ScoreBreakdown score;
};

void write_scored(std::ostream& out, std::span<const ScoredRound> rows);
std::vector<ScoredRound> read_scored(std::istream& in);

}  // namespace frameguard::records
