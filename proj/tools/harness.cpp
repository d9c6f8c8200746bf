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

#include "wharness/config.hpp"
#include "wharness/error.hpp"
#include "wharness/experiment.hpp"
#include "wharness/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace wharness;
using namespace wharness::bench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

TopologyConfig load_or_usage(const std::string& path)
{
  try {
    return load_config(path);
  }
  catch (const Error& e) {
    if (e.code() == Errc::io_error)
      throw Error(Errc::usage_error, e.detail());
    throw;
  }
}

int exit_code_for(Errc code)
{
  switch (code) {
  case Errc::parse_error:
  case Errc::validation_error:
  case Errc::usage_error:
    return kExitConfig;
  default:
    return kExitRuntime;
  }
}

void print_run_summary(const MetricsReport& report)
{
  std::printf("%-24s %8s %8s %10s %12s %12s\n", "stream", "count", "expected", "delivery", "ia_mean_us", "ia_p99_us");
  for (const auto& s : summarize_report(report))
    std::printf("%-24s %8llu %8llu %10.4f %12.1f %12.1f\n", s.stream.c_str(),
                static_cast<unsigned long long>(s.count), static_cast<unsigned long long>(s.expected_count),
                s.delivery_ratio, s.inter_arrival.mean, s.inter_arrival.p99);
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Named-data vs pub-sub wireless harness benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string arm_text = "ndn-udp";
  std::string serialization_text = "bytes";
  double duration = 10;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool sim = false;
  bool processes = false;

  auto* run = app.add_subcommand("run", "Run one arm of the experiment and write CSVs");
  run->add_option("--config", config_path, "Topology file")->required();
  run->add_option("--arm", arm_text, "ndn-udp, ndn-tcp or pubsub");
  run->add_option("--serialization", serialization_text, "bytes or string");
  run->add_option("--duration", duration, "Seconds of traffic");
  run->add_option("--seed", seed, "Payload and link seed");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--sim", sim, "Simulated links on a virtual clock");
  run->add_flag("--processes", processes, "One process per node");

  std::vector<std::string> inputs;
  std::string csv_path;
  auto* summarize_cmd = app.add_subcommand("summarize", "Compare runs");
  summarize_cmd->add_option("--in", inputs, "Run directories");
  summarize_cmd->add_option("--csv", csv_path, "Also write the table as CSV");

  auto* validate = app.add_subcommand("validate", "Check a topology file");
  validate->add_option("--config", config_path, "Topology file")->required();

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      RunOptions opt;
      opt.arm = parse_arm(arm_text);
      try {
        opt.serialization = pubsub::parse_payload_mode(serialization_text);
      }
      catch (const Error& e) {
        throw Error(Errc::usage_error, e.detail());
      }
      opt.duration_s = duration;
      opt.seed = seed;
      opt.simulated = sim;
      opt.processes = processes;
      auto cfg = load_or_usage(config_path);
      auto report = run_experiment(cfg, opt);
      for (const auto& w : report.warnings)
        std::cerr << "warning: " << w << "\n";
      write_csv(report, out_dir);
      print_run_summary(report);
    }
    else if (*summarize_cmd) {
      std::vector<std::filesystem::path> dirs(inputs.begin(), inputs.end());
      std::vector<ComparisonRow> rows;
      try {
        rows = summarize(dirs);
      }
      catch (const Error& e) {
        if (e.code() == Errc::io_error)
          throw Error(Errc::usage_error, e.detail());
        throw;
      }
      std::cout << format_table(rows);
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out)
          throw Error(Errc::io_error, "cannot write " + csv_path);
        out << format_csv(rows);
      }
    }
    else if (*validate) {
      auto cfg = load_or_usage(config_path);
      std::cout << config_path << ": ok (" << cfg.nodes.size() << " nodes, " << cfg.faces.size() << " faces, "
                << cfg.routes.size() << " routes, " << cfg.streams.size() << " streams)\n";
    }
  }
  catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
