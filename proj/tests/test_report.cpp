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

#include "support.hpp"

#include "wharness/report.hpp"
#include "wharness/stats.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace wharness;
using namespace wharness::bench;
using test::error_code_of;

namespace {

std::vector<std::string> lines_of(const std::filesystem::path& p)
{
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    out.push_back(line);
  return out;
}

/// Periodic arrivals from `start` with a fixed step; sizes and send stamps optional.
std::vector<traffic::ArrivalRecord> periodic(const std::string& label, std::size_t n, Micros start, Micros step,
                                             std::size_t size, bool stamped)
{
  std::vector<traffic::ArrivalRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    Micros recv = start + static_cast<Micros>(i) * step;
    out.push_back({label, i, stamped ? std::optional<Micros>(recv - 700) : std::nullopt, recv, size, size + 30});
  }
  return out;
}

MetricsReport sample_report(const std::string& arm, bool stamped)
{
  MetricsReport r;
  r.arm = arm;
  r.duration_s = 2.0;
  r.run_start_us = 1000000;
  r.streams.push_back({"/trailer/lidar", 5000, periodic("/trailer/lidar", 400, 1002500, 5000, 1600, stamped)});
  r.streams.push_back({"/trailer/can", 8000, periodic("/trailer/can", 240, 1004000, 8000, 160, stamped)});
  r.streams.push_back({"/trailer/cam", 20000, periodic("/trailer/cam", 90, 1010000, 20000, 4000, stamped)});
  r.counters.push_back({"pc", "data_out", 730});
  r.counters.push_back({"rpi1", "cpu_percent_mean", 3.25});
  return r;
}

} // namespace

TEST_CASE("descriptive statistics on fixed samples")
{
  std::vector<double> ten{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  auto d = describe(ten);
  CHECK(d.count == 10);
  CHECK(d.mean == doctest::Approx(5.5));
  CHECK(d.median == doctest::Approx(5.5));
  CHECK(d.p95 == 10);
  CHECK(d.p99 == 10);
  CHECK(d.min == 1);
  CHECK(d.max == 10);
  CHECK(d.stddev == doctest::Approx(std::sqrt(8.25)));
  CHECK(percentile(ten, 50) == 5);
  CHECK(percentile(ten, 10) == 1);
  CHECK(percentile(ten, 11) == 2);
  CHECK(percentile(ten, 100) == 10);
  CHECK(median({3, 1, 2}) == 2);

  auto one = describe({42});
  CHECK(one.mean == 42);
  CHECK(one.median == 42);
  CHECK(one.p99 == 42);
  CHECK(one.stddev == 0);

  auto none = describe({});
  CHECK(none.count == 0);
  CHECK(none.mean == 0);
  CHECK(none.p99 == 0);
  CHECK(mean({}) == 0);
}

TEST_CASE("nearest-rank percentile agrees with a counting oracle")
{
  std::mt19937_64 rng(81);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(test::uniform(rng, 1, 60));
    for (auto& x : v)
      x = static_cast<double>(test::uniform(rng, 0, 20));
    double p = static_cast<double>(test::uniform(rng, 1, 1000)) / 10.0;
    auto q = percentile(v, p);
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
    auto at_most = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double x) { return x <= q; }));
    auto below = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double x) { return x < q; }));
    CHECK(at_most >= rank);
    CHECK(below < rank);

    double sum = 0;
    for (auto x : v)
      sum += x;
    double m = sum / static_cast<double>(v.size());
    double ss = 0;
    for (auto x : v)
      ss += (x - m) * (x - m);
    CHECK(stddev(v) == doctest::Approx(std::sqrt(ss / static_cast<double>(v.size()))));
  }
}

TEST_CASE("rows carry wire size and gaps")
{
  auto rows = to_rows("/s", periodic("/s", 3, 100, 7, 10, false));
  REQUIRE(rows.size() == 3);
  CHECK_FALSE(rows[0].inter_arrival_us.has_value());
  CHECK(rows[1].inter_arrival_us == 7);
  CHECK(rows[2].inter_arrival_us == 7);
  CHECK(rows[0].size_bytes == 40);
  CHECK(rows[0].stream == "/s");
  CHECK(arrivals_file_name("/trailer/lidar") == "arrivals_trailer_lidar.csv");
  CHECK(arrivals_file_name("/trailer/lidar@rpi1") == "arrivals_trailer_lidar_rpi1.csv");
}

TEST_CASE("summaries exclude warm-up from distributions only")
{
  std::vector<ArrivalRow> rows;
  // Two arrivals inside warm-up with a huge gap, then steady 10 us gaps.
  rows.push_back({"/s", 0, std::nullopt, 0, std::nullopt, 5});
  rows.push_back({"/s", 1, std::nullopt, 400, 400, 5});
  for (std::uint64_t i = 2; i < 12; ++i)
    rows.push_back({"/s", i, Micros(1000), Micros(1000 + 10 * (i - 1)), Micros(10), 7});
  auto s = summarize_rows(rows, 10, 0, 500);
  CHECK(s.count == 12);
  CHECK(s.delivery_ratio == 1.0);
  CHECK(s.inter_arrival.count == 10);
  CHECK(s.inter_arrival.mean == 10);
  CHECK(s.inter_arrival.p99 == 10);
  CHECK(s.latency.count == 10);
  CHECK(s.latency.mean == doctest::Approx(55));
  CHECK(s.wire_bytes_mean == 7);
  CHECK(summarize_rows(rows, 24, 0, 500).delivery_ratio == 0.5);
  CHECK(summarize_rows({}, 0, 0, 500).delivery_ratio == 0);
}

TEST_CASE("csv output layout")
{
  auto dir = test::temp_dir("report_layout");
  auto report = sample_report("ndn-udp", false);
  write_csv(report, dir);

  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  CHECK(files == std::vector<std::string>{"arrivals_trailer_cam.csv", "arrivals_trailer_can.csv",
                                          "arrivals_trailer_lidar.csv", "counters.csv", "summary.csv"});

  auto lidar = lines_of(dir / "arrivals_trailer_lidar.csv");
  REQUIRE(lidar.size() == 401);
  CHECK(lidar[0] == "stream,seq,send_ts_us,recv_ts_us,inter_arrival_us,size_bytes");
  CHECK(lidar[1] == "/trailer/lidar,0,,1002500,,1630");
  CHECK(lidar[2] == "/trailer/lidar,1,,1007500,5000,1630");

  auto summary = lines_of(dir / "summary.csv");
  REQUIRE(summary.size() == 4);
  CHECK(summary[0] == "stream,arm,serialization,count,expected_count,delivery_ratio,ia_count,ia_mean_us,"
                      "ia_median_us,ia_p95_us,ia_p99_us,ia_stddev_us,lat_count,lat_mean_us,lat_median_us,"
                      "lat_p99_us,wire_bytes_mean,run_start_us,warmup_us,duration_s");
  CHECK(summary[1] == "/trailer/lidar,ndn-udp,bytes,400,400,1.000000,300,5000.000,5000.000,5000.000,5000.000,"
                      "0.000,0,,,,1630.000,1000000,500000,2.000");

  auto counters = lines_of(dir / "counters.csv");
  CHECK(counters == std::vector<std::string>{"node,counter,value", "pc,data_out,730.000",
                                             "rpi1,cpu_percent_mean,3.250"});
}

TEST_CASE("csv read-back matches what was written")
{
  auto dir = test::temp_dir("report_readback");
  auto report = sample_report("pubsub", true);
  report.serialization = pubsub::PayloadMode::string;
  write_csv(report, dir);
  for (const auto& st : report.streams)
    CHECK(read_arrivals_csv(dir / arrivals_file_name(st.label)) == to_rows(st.label, st.arrivals));

  auto expected = summarize_report(report);
  auto got = read_summary_csv(dir / "summary.csv");
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].stream == expected[i].stream);
    CHECK(got[i].arm == "pubsub");
    CHECK(got[i].serialization == pubsub::PayloadMode::string);
    CHECK(got[i].count == expected[i].count);
    CHECK(got[i].expected_count == expected[i].expected_count);
    CHECK(got[i].inter_arrival.mean == doctest::Approx(expected[i].inter_arrival.mean).epsilon(1e-6));
    CHECK(got[i].latency.count == expected[i].latency.count);
    CHECK(got[i].latency.mean == doctest::Approx(700));
    CHECK(got[i].run_start_us == report.run_start_us);
  }
}

TEST_CASE("malformed csv input")
{
  auto dir = test::temp_dir("report_bad");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  auto header = std::string("stream,seq,send_ts_us,recv_ts_us,inter_arrival_us,size_bytes\n");
  CHECK(error_code_of([&] { read_arrivals_csv(write("a.csv", "stream,seq\n")); }) == Errc::parse_error);
  CHECK(error_code_of([&] { read_arrivals_csv(write("b.csv", header + "/s,x,,1,,2\n")); }) == Errc::parse_error);
  CHECK(error_code_of([&] { read_arrivals_csv(write("c.csv", header + "/s,1,,1\n")); }) == Errc::parse_error);
  CHECK(error_code_of([&] { read_arrivals_csv(dir / "none.csv"); }) == Errc::io_error);
  CHECK(error_code_of([&] { read_summary_csv(write("d.csv", "stream\n")); }) == Errc::parse_error);
  CHECK(read_arrivals_csv(write("e.csv", header)).empty());
}

TEST_CASE("summarize recomputes across run directories")
{
  auto udp = test::temp_dir("report_udp");
  auto ps = test::temp_dir("report_ps");
  write_csv(sample_report("ndn-udp", false), udp);
  write_csv(sample_report("pubsub", true), ps);

  auto rows = summarize({ps, udp});
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].stream == "/trailer/cam");
  CHECK(rows[0].arm == "ndn-udp");
  CHECK(rows[1].arm == "pubsub");
  CHECK(rows[4].stream == "/trailer/lidar");
  CHECK(rows[4].ia_mean_us == 5000);
  CHECK(rows[4].delivery_ratio == 1.0);
  CHECK(rows[2].ia_mean_us == 8000);
  CHECK(rows[0].delivery_ratio == doctest::Approx(0.9));

  auto table = format_table(rows);
  CHECK(table.find("/trailer/lidar") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 8);
  auto csv = format_csv(rows);
  CHECK(csv.rfind("stream,arm,serialization,ia_mean_us,ia_median_us,ia_p99_us,delivery_ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  // Recomputation uses the arrivals, not the stored summary values.
  {
    auto lines = lines_of(udp / "arrivals_trailer_lidar.csv");
    std::ofstream out(udp / "arrivals_trailer_lidar.csv");
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto line = lines[i];
      if (i >= 2) {
        // every gap becomes 6000 us
        auto ts = 1002500 + static_cast<Micros>(i - 1) * 6000;
        line = "/trailer/lidar," + std::to_string(i - 1) + ",," + std::to_string(ts) + ",6000,1630";
      }
      out << line << "\n";
    }
  }
  auto again = summarize({udp});
  CHECK(again[2].stream == "/trailer/lidar");
  CHECK(again[2].ia_mean_us == 6000);
}

TEST_CASE("summarize input errors")
{
  auto a = test::temp_dir("report_err_a");
  auto b = test::temp_dir("report_err_b");
  write_csv(sample_report("ndn-udp", false), a);
  write_csv(sample_report("ndn-udp", false), b);
  CHECK(error_code_of([] { summarize({}); }) == Errc::usage_error);
  CHECK(error_code_of([&] { summarize({a / "nope"}); }) == Errc::io_error);
  CHECK(error_code_of([&] { summarize({a, b}); }) == Errc::validation_error);

  std::filesystem::remove(b / "arrivals_trailer_can.csv");
  CHECK(error_code_of([&] { summarize({b}); }) == Errc::io_error);
  std::filesystem::remove(b / "summary.csv");
  CHECK(error_code_of([&] { summarize({b}); }) == Errc::io_error);

  auto lines = lines_of(a / "arrivals_trailer_cam.csv");
  lines.pop_back();
  std::ofstream out(a / "arrivals_trailer_cam.csv");
  for (const auto& l : lines)
    out << l << "\n";
  out.close();
  CHECK(error_code_of([&] { summarize({a}); }) == Errc::validation_error);
}
