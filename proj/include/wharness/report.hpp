/*
 *    Copyright 2026 The wharness Authors
 *
 *    SPDX-License-Identifier: Apache-2.0
 *
 *    Licensed under the Apache License, Version 2.0 (the "License");
 *    you may not use this file except in compliance with the License.
 *    You may obtain a copy of the License at
 *
 *        http://www.apache.org/licenses/LICENSE-2.0
 *
 *    Unless required by applicable law or agreed to in writing, software
 *    distributed under the License is distributed on an "AS IS" BASIS,
 *    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *    See the License for the specific language governing permissions and
 *    limitations under the License.
 */

#pragma once

#include "wharness/clock.hpp"
#include "wharness/pubsub.hpp"
#include "wharness/stats.hpp"
#include "wharness/traffic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wharness::bench {

inline constexpr Micros kWarmupUs = 500 * kMicrosPerMilli;

/// Arrivals seen by one consumer of one stream.
struct StreamReport {
  std::string label; ///< stream URI, with "@node" appended when a stream has several consumers
  Micros period_us = 0;
  std::vector<traffic::ArrivalRecord> arrivals;
};

struct CounterRow {
  std::string node;
  std::string counter;
  double value = 0;

  friend bool operator==(const CounterRow&, const CounterRow&) = default;
};

struct MetricsReport {
  std::string arm;
  pubsub::PayloadMode serialization = pubsub::PayloadMode::bytes;
  double duration_s = 0;
  Micros run_start_us = 0;
  Micros warmup_us = kWarmupUs;
  std::vector<StreamReport> streams;
  std::vector<CounterRow> counters;
  std::vector<std::string> warnings;
};

/// One line of an arrivals CSV.
struct ArrivalRow {
  std::string stream;
  std::uint64_t seq = 0;
  std::optional<Micros> send_ts_us;
  Micros recv_ts_us = 0;
  std::optional<Micros> inter_arrival_us; ///< empty for the first arrival
  std::size_t size_bytes = 0;             ///< whole packet or datagram as received

  friend bool operator==(const ArrivalRow&, const ArrivalRow&) = default;
};

struct StreamSummary {
  std::string stream;
  std::string arm;
  pubsub::PayloadMode serialization = pubsub::PayloadMode::bytes;
  std::uint64_t count = 0;
  std::uint64_t expected_count = 0;
  double delivery_ratio = 0;
  Distribution inter_arrival;
  Distribution latency; ///< count 0 when no send timestamps are carried
  double wire_bytes_mean = 0;
  Micros run_start_us = 0;
  Micros warmup_us = 0;
  double duration_s = 0;
};

std::vector<ArrivalRow> to_rows(const std::string& label, const std::vector<traffic::ArrivalRecord>& arrivals);

/// expected_count = floor(duration / period). Distributions use rows received at or after
/// run_start + warmup; count and delivery ratio use every row.
StreamSummary summarize_rows(const std::vector<ArrivalRow>& rows, std::uint64_t expected_count,
                             Micros run_start_us, Micros warmup_us);

std::vector<StreamSummary> summarize_report(const MetricsReport& report);

/// "arrivals_trailer_lidar.csv" for /trailer/lidar.
std::string arrivals_file_name(const std::string& label);

/// Writes one arrivals file per stream, summary.csv and counters.csv. Throws Error(io_error).
void write_csv(const MetricsReport& report, const std::filesystem::path& dir);

/// Throws Error(io_error) or Error(parse_error) with the file and line.
std::vector<ArrivalRow> read_arrivals_csv(const std::filesystem::path& file);
std::vector<StreamSummary> read_summary_csv(const std::filesystem::path& file);

struct ComparisonRow {
  std::string stream;
  std::string arm;
  pubsub::PayloadMode serialization = pubsub::PayloadMode::bytes;
  double ia_mean_us = 0;
  double ia_median_us = 0;
  double ia_p99_us = 0;
  double delivery_ratio = 0;
};

/// Recomputes every stream of every run directory from its arrival CSVs.
/// Throws Error(usage_error) for an empty list, Error(io_error) / Error(validation_error)
/// naming the missing or inconsistent input.
std::vector<ComparisonRow> summarize(const std::vector<std::filesystem::path>& dirs);

std::string format_table(const std::vector<ComparisonRow>& rows);
std::string format_csv(const std::vector<ComparisonRow>& rows);

} // namespace wharness::bench
