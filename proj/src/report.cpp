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

#include "wharness/report.hpp"

#include "wharness/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wharness::bench {

namespace fs = std::filesystem;

namespace {

const char* const kArrivalsHeader = "stream,seq,send_ts_us,recv_ts_us,inter_arrival_us,size_bytes";

const std::vector<std::string> kSummaryColumns = {
  "stream", "arm", "serialization", "count", "expected_count", "delivery_ratio",
  "ia_count", "ia_mean_us", "ia_median_us", "ia_p95_us", "ia_p99_us", "ia_stddev_us",
  "lat_count", "lat_mean_us", "lat_median_us", "lat_p99_us",
  "wire_bytes_mean", "run_start_us", "warmup_us", "duration_s",
};

std::string csv_field(const std::string& text)
{
  if (text.find_first_of(",\"\n") == std::string::npos)
    return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      }
      else if (c == '"') {
        quoted = false;
      }
      else {
        cur += c;
      }
    }
    else if (c == '"') {
      quoted = true;
    }
    else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    }
    else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string fixed(double v, int digits = 3)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where)
{
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(Errc::parse_error, where + ": bad number '" + text + "'");
  return value;
}

std::vector<std::string> read_lines(const fs::path& file)
{
  std::ifstream in(file);
  if (!in)
    throw Error(Errc::io_error, "cannot read " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::ofstream open_out(const fs::path& file)
{
  std::ofstream out(file);
  if (!out)
    throw Error(Errc::io_error, "cannot write " + file.string());
  return out;
}

void check_written(std::ofstream& out, const fs::path& file)
{
  out.flush();
  if (!out)
    throw Error(Errc::io_error, "write failed for " + file.string());
}

} // namespace

std::vector<ArrivalRow> to_rows(const std::string& label, const std::vector<traffic::ArrivalRecord>& arrivals)
{
  std::vector<ArrivalRow> rows;
  rows.reserve(arrivals.size());
  std::optional<Micros> prev;
  for (const auto& a : arrivals) {
    ArrivalRow r{label, a.seq, a.send_ts_us, a.recv_ts_us, std::nullopt, a.wire_size};
    if (prev)
      r.inter_arrival_us = a.recv_ts_us - *prev;
    prev = a.recv_ts_us;
    rows.push_back(std::move(r));
  }
  return rows;
}

StreamSummary summarize_rows(const std::vector<ArrivalRow>& rows, std::uint64_t expected_count,
                             Micros run_start_us, Micros warmup_us)
{
  StreamSummary s;
  s.count = rows.size();
  s.expected_count = expected_count;
  if (expected_count > 0)
    s.delivery_ratio = std::min(1.0, static_cast<double>(s.count) / static_cast<double>(expected_count));
  s.run_start_us = run_start_us;
  s.warmup_us = warmup_us;

  std::vector<double> ia, lat, size;
  for (const auto& r : rows) {
    if (r.recv_ts_us < run_start_us + warmup_us)
      continue;
    if (r.inter_arrival_us)
      ia.push_back(static_cast<double>(*r.inter_arrival_us));
    if (r.send_ts_us)
      lat.push_back(static_cast<double>(r.recv_ts_us - *r.send_ts_us));
    size.push_back(static_cast<double>(r.size_bytes));
  }
  s.inter_arrival = describe(ia);
  s.latency = describe(lat);
  s.wire_bytes_mean = mean(size);
  return s;
}

std::vector<StreamSummary> summarize_report(const MetricsReport& report)
{
  std::vector<StreamSummary> out;
  auto duration_us = static_cast<Micros>(report.duration_s * static_cast<double>(kMicrosPerSecond) + 0.5);
  for (const auto& st : report.streams) {
    std::uint64_t expected = st.period_us > 0 ? static_cast<std::uint64_t>(duration_us / st.period_us) : 0;
    auto s = summarize_rows(to_rows(st.label, st.arrivals), expected, report.run_start_us, report.warmup_us);
    s.stream = st.label;
    s.arm = report.arm;
    s.serialization = report.serialization;
    s.duration_s = report.duration_s;
    out.push_back(std::move(s));
  }
  return out;
}

std::string arrivals_file_name(const std::string& label)
{
  std::string out;
  for (char c : label) {
    bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
    char mapped = keep ? c : '_';
    if (out.empty() && mapped == '_')
      continue;
    out += mapped;
  }
  return "arrivals_" + out + ".csv";
}

void write_csv(const MetricsReport& report, const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());

  std::set<std::string> files;
  for (const auto& st : report.streams) {
    auto name = arrivals_file_name(st.label);
    if (!files.insert(name).second)
      throw Error(Errc::io_error, "two streams map to " + name);
    auto path = dir / name;
    auto out = open_out(path);
    out << kArrivalsHeader << "\n";
    for (const auto& r : to_rows(st.label, st.arrivals)) {
      out << csv_field(r.stream) << ',' << r.seq << ',';
      if (r.send_ts_us)
        out << *r.send_ts_us;
      out << ',' << r.recv_ts_us << ',';
      if (r.inter_arrival_us)
        out << *r.inter_arrival_us;
      out << ',' << r.size_bytes << "\n";
    }
    check_written(out, path);
  }

  auto summary_path = dir / "summary.csv";
  auto out = open_out(summary_path);
  for (std::size_t i = 0; i < kSummaryColumns.size(); ++i)
    out << (i ? "," : "") << kSummaryColumns[i];
  out << "\n";
  for (const auto& s : summarize_report(report)) {
    bool lat = s.latency.count > 0;
    out << csv_field(s.stream) << ',' << s.arm << ',' << pubsub::to_string(s.serialization) << ','
        << s.count << ',' << s.expected_count << ',' << fixed(s.delivery_ratio, 6) << ','
        << s.inter_arrival.count << ',' << fixed(s.inter_arrival.mean) << ',' << fixed(s.inter_arrival.median) << ','
        << fixed(s.inter_arrival.p95) << ',' << fixed(s.inter_arrival.p99) << ',' << fixed(s.inter_arrival.stddev) << ','
        << s.latency.count << ',' << (lat ? fixed(s.latency.mean) : "") << ','
        << (lat ? fixed(s.latency.median) : "") << ',' << (lat ? fixed(s.latency.p99) : "") << ','
        << fixed(s.wire_bytes_mean) << ',' << s.run_start_us << ',' << s.warmup_us << ','
        << fixed(s.duration_s) << "\n";
  }
  check_written(out, summary_path);

  auto counters_path = dir / "counters.csv";
  auto cout_ = open_out(counters_path);
  cout_ << "node,counter,value\n";
  for (const auto& c : report.counters)
    cout_ << csv_field(c.node) << ',' << c.counter << ',' << fixed(c.value) << "\n";
  check_written(cout_, counters_path);
}

std::vector<ArrivalRow> read_arrivals_csv(const fs::path& file)
{
  auto lines = read_lines(file);
  if (lines.empty() || lines[0] != kArrivalsHeader)
    throw Error(Errc::parse_error, file.string() + ":1: unexpected header");
  std::vector<ArrivalRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    auto where = file.string() + ":" + std::to_string(i + 1);
    auto f = split_csv(lines[i]);
    if (f.size() != 6)
      throw Error(Errc::parse_error, where + ": expected 6 fields");
    ArrivalRow r;
    r.stream = f[0];
    r.seq = parse_number<std::uint64_t>(f[1], where);
    if (!f[2].empty())
      r.send_ts_us = parse_number<Micros>(f[2], where);
    r.recv_ts_us = parse_number<Micros>(f[3], where);
    if (!f[4].empty())
      r.inter_arrival_us = parse_number<Micros>(f[4], where);
    r.size_bytes = parse_number<std::size_t>(f[5], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<StreamSummary> read_summary_csv(const fs::path& file)
{
  auto lines = read_lines(file);
  if (lines.empty())
    throw Error(Errc::parse_error, file.string() + ":1: empty file");
  auto header = split_csv(lines[0]);
  if (header != kSummaryColumns)
    throw Error(Errc::parse_error, file.string() + ":1: unexpected header");

  std::vector<StreamSummary> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty())
      continue;
    auto where = file.string() + ":" + std::to_string(i + 1);
    auto f = split_csv(lines[i]);
    if (f.size() != kSummaryColumns.size())
      throw Error(Errc::parse_error, where + ": expected " + std::to_string(kSummaryColumns.size()) + " fields");
    std::map<std::string, std::string> col;
    for (std::size_t k = 0; k < f.size(); ++k)
      col[kSummaryColumns[k]] = f[k];
    auto num = [&](const char* key) { return parse_number<double>(col[key], where + " " + key); };
    auto opt = [&](const char* key) { return col[key].empty() ? 0.0 : num(key); };

    StreamSummary s;
    s.stream = col["stream"];
    s.arm = col["arm"];
    try {
      s.serialization = pubsub::parse_payload_mode(col["serialization"]);
    }
    catch (const Error&) {
      throw Error(Errc::parse_error, where + ": bad serialization '" + col["serialization"] + "'");
    }
    s.count = parse_number<std::uint64_t>(col["count"], where);
    s.expected_count = parse_number<std::uint64_t>(col["expected_count"], where);
    s.delivery_ratio = num("delivery_ratio");
    s.inter_arrival.count = parse_number<std::size_t>(col["ia_count"], where);
    s.inter_arrival.mean = num("ia_mean_us");
    s.inter_arrival.median = num("ia_median_us");
    s.inter_arrival.p95 = num("ia_p95_us");
    s.inter_arrival.p99 = num("ia_p99_us");
    s.inter_arrival.stddev = num("ia_stddev_us");
    s.latency.count = parse_number<std::size_t>(col["lat_count"], where);
    s.latency.mean = opt("lat_mean_us");
    s.latency.median = opt("lat_median_us");
    s.latency.p99 = opt("lat_p99_us");
    s.wire_bytes_mean = num("wire_bytes_mean");
    s.run_start_us = parse_number<Micros>(col["run_start_us"], where);
    s.warmup_us = parse_number<Micros>(col["warmup_us"], where);
    s.duration_s = num("duration_s");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ComparisonRow> summarize(const std::vector<fs::path>& dirs)
{
  if (dirs.empty())
    throw Error(Errc::usage_error, "summarize needs at least one input directory");

  std::map<std::tuple<std::string, std::string, std::string>, fs::path> seen;
  std::vector<ComparisonRow> rows;
  for (const auto& dir : dirs) {
    if (!fs::is_directory(dir))
      throw Error(Errc::io_error, "input directory " + dir.string() + " does not exist");
    auto summary_path = dir / "summary.csv";
    if (!fs::exists(summary_path))
      throw Error(Errc::io_error, "missing " + summary_path.string());
    for (const auto& s : read_summary_csv(summary_path)) {
      auto key = std::make_tuple(s.stream, s.arm, std::string(pubsub::to_string(s.serialization)));
      auto [it, fresh] = seen.emplace(key, dir);
      if (!fresh)
        throw Error(Errc::validation_error, "stream " + s.stream + " (" + s.arm + ", " +
                                              std::get<2>(key) + ") appears in both " + it->second.string() +
                                              " and " + dir.string());
      auto arrivals_path = dir / arrivals_file_name(s.stream);
      if (!fs::exists(arrivals_path))
        throw Error(Errc::io_error, "missing " + arrivals_path.string() + " for stream " + s.stream);
      auto arrivals = read_arrivals_csv(arrivals_path);
      for (const auto& r : arrivals)
        if (r.stream != s.stream)
          throw Error(Errc::validation_error, arrivals_path.string() + " carries foreign stream " + r.stream);
      auto re = summarize_rows(arrivals, s.expected_count, s.run_start_us, s.warmup_us);
      if (re.count != s.count)
        throw Error(Errc::validation_error, arrivals_path.string() + " has " + std::to_string(re.count) +
                                              " rows but summary.csv says " + std::to_string(s.count));
      rows.push_back(ComparisonRow{s.stream, s.arm, s.serialization, re.inter_arrival.mean,
                                   re.inter_arrival.median, re.inter_arrival.p99, re.delivery_ratio});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    return std::tie(a.stream, a.arm, a.serialization) < std::tie(b.stream, b.arm, b.serialization);
  });
  return rows;
}

std::string format_table(const std::vector<ComparisonRow>& rows)
{
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"stream", "arm", "serialization", "ia_mean_us", "ia_median_us", "ia_p99_us", "delivery_ratio"});
  for (const auto& r : rows)
    cells.push_back({r.stream, r.arm, std::string(pubsub::to_string(r.serialization)), fixed(r.ia_mean_us),
                     fixed(r.ia_median_us), fixed(r.ia_p99_us), fixed(r.delivery_ratio, 4)});

  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());

  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      const auto& c = cells[r][i];
      bool left = i < 3;
      if (i)
        out << "  ";
      if (left)
        out << c << std::string(width[i] - c.size(), ' ');
      else
        out << std::string(width[i] - c.size(), ' ') << c;
    }
    out << "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width)
        total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
    }
  }
  return out.str();
}

std::string format_csv(const std::vector<ComparisonRow>& rows)
{
  std::ostringstream out;
  out << "stream,arm,serialization,ia_mean_us,ia_median_us,ia_p99_us,delivery_ratio\n";
  for (const auto& r : rows)
    out << csv_field(r.stream) << ',' << r.arm << ',' << pubsub::to_string(r.serialization) << ','
        << fixed(r.ia_mean_us) << ',' << fixed(r.ia_median_us) << ',' << fixed(r.ia_p99_us) << ','
        << fixed(r.delivery_ratio, 6) << "\n";
  return out.str();
}

} // namespace wharness::bench
