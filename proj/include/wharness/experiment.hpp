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

#include "wharness/config.hpp"
#include "wharness/pubsub.hpp"
#include "wharness/report.hpp"

#include <cstdint>
#include <string_view>

namespace wharness::bench {

enum class Arm { ndn_udp, ndn_tcp, pubsub };

std::string_view to_string(Arm arm) noexcept;
/// "ndn-udp", "ndn-tcp" or "pubsub". Throws Error(usage_error).
Arm parse_arm(std::string_view text);

struct RunOptions {
  Arm arm = Arm::ndn_udp;
  pubsub::PayloadMode serialization = pubsub::PayloadMode::bytes;
  double duration_s = 10;
  std::uint64_t seed = 1;
  /// Simulated links on one virtual-clock loop; reproducible byte for byte.
  bool simulated = false;
  /// One forked process per node instead of one thread per node.
  bool processes = false;
};

/**
 * Builds every node of `config`, runs the workload for `duration_s`, drains in-flight
 * traffic for at most one interest lifetime and returns the collected arrivals.
 *
 * Throws Error(validation_error) for an unusable config or option combination and the
 * transport's error (bind_failure, connect_failure, timeout) naming the node and face.
 */
MetricsReport run_experiment(const TopologyConfig& config, const RunOptions& options);

} // namespace wharness::bench
