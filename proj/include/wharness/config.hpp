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

#include "wharness/endpoint.hpp"
#include "wharness/name.hpp"
#include "wharness/traffic.hpp"
#include "wharness/transport.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wharness::bench {

struct NodeConfig {
  std::string name;
  std::optional<Endpoint> pubsub; ///< datagram endpoint used by the pub-sub arm
  std::size_t cs_capacity = ContentStore::kDefaultCapacity;

  friend bool operator==(const NodeConfig&, const NodeConfig&) = default;
};

struct FaceConfig {
  std::string id;
  std::string node;
  Endpoint local;
  Endpoint remote;
  std::string link; ///< link profile used when simulated; empty = "default"

  friend bool operator==(const FaceConfig&, const FaceConfig&) = default;
};

struct RouteConfig {
  std::string id;
  std::string node;
  Name prefix;
  std::string face;

  friend bool operator==(const RouteConfig&, const RouteConfig&) = default;
};

struct StreamConfig {
  std::string id;
  traffic::StreamSpec spec;
  std::string producer;
  std::vector<std::string> consumers;

  friend bool operator==(const StreamConfig&, const StreamConfig&) = default;
};

struct LinkConfig {
  std::string name;
  LinkProfile profile;

  friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

/**
 * Experiment topology, read from INI-style text:
 *
 *   [node:pc]      pubsub, cs_capacity
 *   [face:<id>]    node, local, remote, link
 *   [route:<id>]   node, prefix, face
 *   [stream:<id>]  name, payload_bytes, period_us, producer, consumers,
 *                  serialization, freshness_ms, interest_lifetime_ms, sequenced_names
 *   [link:<name>]  latency_mean_us, jitter_stddev_us, loss_probability, seed
 *
 * Every key is explicit; unknown sections or keys are rejected.
 */
struct TopologyConfig {
  std::vector<NodeConfig> nodes;
  std::vector<FaceConfig> faces;
  std::vector<RouteConfig> routes;
  std::vector<StreamConfig> streams;
  std::vector<LinkConfig> links;

  /// Throws Error(validation_error) naming the offending entry.
  void validate() const;

  const NodeConfig* node(const std::string& name) const;
  const FaceConfig* face(const std::string& id) const;
  /// Named profile, "default" if the name is empty; a perfect link when "default" is not defined.
  LinkProfile link_profile(const std::string& name) const;

  friend bool operator==(const TopologyConfig&, const TopologyConfig&) = default;
};

/// Throws Error(parse_error) with a line number, or Error(validation_error).
TopologyConfig parse_config(const std::string& text);
TopologyConfig load_config(const std::filesystem::path& path);

std::string save_config(const TopologyConfig& config);
/// Throws Error(io_error).
void save_config(const TopologyConfig& config, const std::filesystem::path& path);

/// One producer node (pc) with a face per receiver and three receivers (rpi1..3),
/// each with a single face back to pc and one route, on loopback addresses.
TopologyConfig default_config();

} // namespace wharness::bench
