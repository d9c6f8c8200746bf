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
#include "wharness/content_store.hpp"
#include "wharness/face.hpp"
#include "wharness/name.hpp"
#include "wharness/packet.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace wharness {

/// Virtual face behind which local producer handlers live. Never a downstream.
inline constexpr FaceId kLocalFace = 0;

/// Local producer: answers an interest synchronously, or declines with std::nullopt.
using ProducerHandler = std::function<std::optional<Data>(const Interest&, Micros now)>;

struct FibEntry {
  Name prefix;
  std::vector<FaceId> next_hops;
};

/// Result of a longest-prefix lookup. `local` is set when a producer handler won.
struct FibMatch {
  Name prefix;
  std::vector<FaceId> next_hops;
  bool local = false;
};

struct PitEntry {
  Name name;
  std::vector<std::pair<FaceId, std::uint32_t>> downstream; ///< (face, nonce), no duplicates
  Micros expiry;
  bool must_be_fresh;
};

struct ForwarderCounters {
  std::uint64_t interests_in = 0;
  std::uint64_t interests_out = 0;
  std::uint64_t data_in = 0;
  std::uint64_t data_out = 0;
  std::uint64_t cs_hits = 0;
  std::uint64_t no_route = 0;
  std::uint64_t unsolicited = 0;
  std::uint64_t loop_drops = 0;
  std::uint64_t send_failures = 0;
  std::uint64_t decode_errors = 0;

  /// (name, value) pairs in a fixed order, for reporting.
  std::vector<std::pair<std::string, std::uint64_t>> items() const;
};

struct ForwarderOptions {
  std::size_t cs_capacity = ContentStore::kDefaultCapacity;
};

/**
 * Named-data forwarding pipeline for one node.
 *
 * Interests go CS -> PIT -> FIB; data goes PIT -> CS -> every downstream face.
 * Not thread-safe: all calls must come from the node's event loop. counters()
 * may be called from any thread.
 */
class Forwarder {
public:
  explicit Forwarder(ForwarderOptions options = {});

  FaceId add_face(std::shared_ptr<Face> face);
  std::shared_ptr<Face> face(FaceId id) const;
  std::vector<FaceId> face_ids() const;

  /// Throws Error(unknown_face). Re-adding a route appends the face only if absent.
  void add_route(const Name& prefix, FaceId face);
  /// Throws Error(duplicate_registration) for an already registered identical prefix.
  void register_prefix(const Name& prefix, ProducerHandler handler);

  /// Entry with the most matching leading components. On a tie between a handler
  /// and a route for the same prefix, the handler wins.
  std::optional<FibMatch> fib_longest_prefix(const Name& name) const;
  const std::map<Name, FibEntry>& fib() const noexcept { return m_fib; }

  void on_interest(FaceId in_face, const Interest& interest, Micros now);
  void on_data(FaceId in_face, const Data& data, Micros now);
  /// Decodes one wire packet and dispatches it; undecodable input bumps decode_errors.
  void on_packet(FaceId in_face, BytesView wire, Micros now);

  /// Drops PIT entries whose expiry is at or before `now`.
  void expire(Micros now);

  ContentStore& content_store() noexcept { return m_cs; }
  const std::map<Name, PitEntry>& pit() const noexcept { return m_pit; }

  ForwarderCounters counters() const;

private:
  struct AtomicCounters {
    std::atomic<std::uint64_t> interests_in{0}, interests_out{0}, data_in{0}, data_out{0}, cs_hits{0},
      no_route{0}, unsolicited{0}, loop_drops{0}, send_failures{0}, decode_errors{0};
  };

  void send_on(FaceId id, BytesView wire);

  ContentStore m_cs;
  std::map<Name, FibEntry> m_fib;
  std::map<Name, ProducerHandler> m_handlers;
  std::map<Name, PitEntry> m_pit;
  std::map<FaceId, std::shared_ptr<Face>> m_faces;
  FaceId m_next_face = 1;
  AtomicCounters m_counters;
};

} // namespace wharness
