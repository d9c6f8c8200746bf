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
#include "wharness/event_loop.hpp"
#include "wharness/forwarder.hpp"
#include "wharness/name.hpp"
#include "wharness/pubsub.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace wharness::traffic {

using pubsub::PayloadMode;

/// One periodic workload.
struct StreamSpec {
  Name name;
  std::size_t payload_bytes = 1;
  Micros period_us = 1000;
  PayloadMode serialization = PayloadMode::bytes;
  std::uint32_t freshness_ms = 1;
  std::uint32_t interest_lifetime_ms = kDefaultLifetimeMs;
  /// Consumers ask for /name/<seq> instead of the plain name.
  bool sequenced_names = false;

  /// Freshness defaults to the period rounded up to whole milliseconds.
  static StreamSpec make(Name name, std::size_t payload_bytes, Micros period_us,
                         PayloadMode serialization = PayloadMode::bytes);

  /// Throws Error(validation_error).
  void validate() const;

  /// Topic / file label: "trailer/lidar" for /trailer/lidar.
  std::string topic() const;
  /// Filesystem-safe label: "trailer_lidar".
  std::string label() const;

  friend bool operator==(const StreamSpec&, const StreamSpec&) = default;
};

/// The lidar (1600 B / 5 ms), CAN (160 B / 8 ms) and camera (4000 B / 20 ms) workloads.
std::vector<StreamSpec> builtin_streams();

/// Deterministic pseudo-random logical payload keyed by (seed, stream name, seq).
Bytes gen_payload(const StreamSpec& spec, std::uint64_t seq, std::uint64_t seed);

/// gen_payload rendered per spec.serialization (hex text doubles the size).
Bytes gen_wire_payload(const StreamSpec& spec, std::uint64_t seq, std::uint64_t seed);

struct ArrivalRecord {
  std::string stream;
  std::uint64_t seq = 0;
  std::optional<Micros> send_ts_us;
  Micros recv_ts_us = 0;
  std::size_t payload_size = 0; ///< application payload as carried (hex text in string mode)
  std::size_t wire_size = 0;    ///< full packet or datagram

  friend bool operator==(const ArrivalRecord&, const ArrivalRecord&) = default;
};

/// Append-only, one writer.
class ArrivalLog {
public:
  void append(ArrivalRecord record) { m_records.push_back(std::move(record)); }
  const std::vector<ArrivalRecord>& records() const noexcept { return m_records; }

private:
  std::vector<ArrivalRecord> m_records;
};

/// Pull-model producer behind a registered prefix. The payload is regenerated every
/// period; interests are answered with whatever payload is current.
class Producer {
public:
  Producer(StreamSpec spec, EventLoop& loop, Forwarder& forwarder, std::uint64_t seed);

  /// Registers the prefix and starts the refresh timer at `start`; refreshing stops at `stop`.
  /// Throws Error(duplicate_registration).
  void start(Micros start, Micros stop);

  std::uint64_t payloads_generated() const noexcept { return m_generated; }
  std::uint64_t requests_served() const noexcept { return m_served; }

private:
  std::optional<Data> answer(const Interest& interest, Micros now);
  void refresh(Micros when);

  StreamSpec m_spec;
  EventLoop& m_loop;
  Forwarder& m_forwarder;
  std::uint64_t m_seed;
  Micros m_stop = 0;
  Micros m_next_refresh = 0;
  std::uint64_t m_seq = 0;
  Bytes m_payload;
  bool m_started = false;
  std::uint64_t m_generated = 0;
  std::uint64_t m_served = 0;
};

/// Sends one must-be-fresh interest per period through a local app face and logs each data arrival.
class Consumer {
public:
  using Observer = std::function<void(const Data&, Micros recv_ts)>;

  Consumer(StreamSpec spec, EventLoop& loop, Forwarder& forwarder, ArrivalLog& log, std::uint64_t seed,
           std::string label = {});

  /// First interest at `start`, then every period while before `stop`.
  void start(Micros start, Micros stop);
  void set_observer(Observer observer) { m_observer = std::move(observer); }

  std::uint64_t interests_sent() const noexcept { return m_sent; }
  std::uint64_t timeouts() const noexcept { return m_timeouts; }
  /// Interests neither satisfied nor timed out yet. Readable from other threads.
  int outstanding() const noexcept { return m_outstanding.load(); }
  /// Counts remaining outstanding interests whose lifetime ended by `now` as timeouts.
  void finalize(Micros now);

private:
  void emit(Micros when);
  void on_wire(BytesView wire);
  void reap(Micros now);

  StreamSpec m_spec;
  EventLoop& m_loop;
  Forwarder& m_forwarder;
  ArrivalLog& m_log;
  std::string m_label;
  std::mt19937 m_nonce_rng;
  FaceId m_app_face = 0;
  Micros m_start = 0;
  Micros m_stop = 0;
  std::uint64_t m_sent = 0;
  std::uint64_t m_timeouts = 0;
  std::vector<std::pair<std::uint64_t, Micros>> m_pending; ///< (seq, deadline)
  std::atomic<int> m_outstanding{0};
  Observer m_observer;
};

/// Publishes the stream at its period on a pub-sub publisher.
class PubSubProducer {
public:
  PubSubProducer(StreamSpec spec, EventLoop& loop, pubsub::Publisher& publisher, std::uint64_t seed);
  void start(Micros start, Micros stop);
  std::uint64_t published() const noexcept { return m_published; }

private:
  void tick(Micros when);

  StreamSpec m_spec;
  EventLoop& m_loop;
  pubsub::Publisher& m_publisher;
  std::uint64_t m_seed;
  Micros m_stop = 0;
  std::uint64_t m_seq = 0;
  std::uint64_t m_published = 0;
};

/// Subscribes once and logs every message for its topic.
class PubSubConsumer {
public:
  PubSubConsumer(StreamSpec spec, EventLoop& loop, pubsub::Subscriber& subscriber, ArrivalLog& log,
                 std::string label = {});
  void start(Micros start);
  bool failed() const noexcept { return m_failed; }

private:
  StreamSpec m_spec;
  EventLoop& m_loop;
  pubsub::Subscriber& m_subscriber;
  ArrivalLog& m_log;
  std::string m_label;
  bool m_failed = false;
};

} // namespace wharness::traffic
