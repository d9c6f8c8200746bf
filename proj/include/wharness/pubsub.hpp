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

#include "wharness/bytes.hpp"
#include "wharness/clock.hpp"
#include "wharness/datagram.hpp"
#include "wharness/endpoint.hpp"
#include "wharness/event_loop.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

namespace wharness::pubsub {

enum class PayloadMode : std::uint8_t { bytes = 0, string = 1 };

std::string_view to_string(PayloadMode mode) noexcept;
/// Throws Error(parse_error).
PayloadMode parse_payload_mode(std::string_view text);

struct Topic {
  std::string name; ///< e.g. "trailer/cam"
  PayloadMode mode = PayloadMode::string;
};

/// One published sample as seen on the wire. `payload` is the wire payload:
/// in string mode it is the hex text of the logical bytes.
struct Message {
  std::string topic;
  std::uint64_t seq = 0;
  Micros send_ts_us = 0;
  PayloadMode mode = PayloadMode::bytes;
  Bytes payload;

  friend bool operator==(const Message&, const Message&) = default;
};

inline constexpr std::uint8_t kSubscribeMarker = 0xFF;
inline constexpr std::uint8_t kAckMarker = 0xFE;
/// Topic names must stay below 0xFE00 bytes so a data header never starts with a control marker.
inline constexpr std::size_t kMaxTopicName = 1024;

// Data: [name_len:2][name][seq:8][send_ts_us:8][mode:1][payload]
Bytes encode_message(const Message& message);
// SUB:  [0xFF][name_len:2][name][reply_port:2]
Bytes encode_subscribe(std::string_view topic, std::uint16_t reply_port);
// ACK:  [0xFE][name_len:2][name]
Bytes encode_ack(std::string_view topic);

enum class Kind { message, subscribe, ack };
Kind classify(BytesView datagram);

/// Throws truncated_input / length_mismatch / invalid_field.
Message decode_message(BytesView datagram);
std::pair<std::string, std::uint16_t> decode_subscribe(BytesView datagram);
std::string decode_ack(BytesView datagram);

/// Renders the logical payload for the wire: unchanged for bytes, hex text for string.
Bytes render_payload(BytesView logical, PayloadMode mode);

/// Broker-less publisher: unicast fan-out to every endpoint subscribed to a topic.
class Publisher {
public:
  Publisher(EventLoop& loop, std::shared_ptr<DatagramSocket> socket);
  ~Publisher();

  /// One datagram per current subscriber of topic.name. Sequence numbers must
  /// strictly increase per topic (Error(invalid_field) otherwise).
  void publish(const Topic& topic, BytesView logical_payload, std::uint64_t seq);

  std::set<Endpoint> subscribers(const std::string& topic) const;
  std::uint64_t datagrams_sent() const noexcept { return m_sent; }

private:
  void on_datagram(const Endpoint& from, Bytes datagram);

  EventLoop& m_loop;
  std::shared_ptr<DatagramSocket> m_socket;
  std::map<std::string, std::set<Endpoint>> m_subscribers;
  std::map<std::string, std::uint64_t> m_last_seq;
  std::uint64_t m_sent = 0;
};

struct SubscribeOptions {
  int max_attempts = 5;
  Micros retry_interval_us = 200 * kMicrosPerMilli;
};

/// Receives messages for the topics it has subscribed to; everything else is dropped.
class Subscriber {
public:
  using OnMessage = std::function<void(const Message&, std::size_t wire_size, Micros recv_ts)>;
  using OnFailure = std::function<void(const std::string& topic)>;

  Subscriber(EventLoop& loop, std::shared_ptr<DatagramSocket> socket, Endpoint publisher,
             SubscribeOptions options = {});
  ~Subscriber();

  /// Sends SUB and retries every retry_interval until acknowledged; after
  /// max_attempts unanswered attempts calls on_failure. Must run on the loop thread.
  void subscribe(const Topic& topic, OnMessage on_message, OnFailure on_failure = {});

  bool acknowledged(const std::string& topic) const;
  std::uint64_t foreign_drops() const noexcept { return m_foreign; }

private:
  struct Subscription {
    Topic topic;
    OnMessage on_message;
    OnFailure on_failure;
    int attempts = 0;
    bool acked = false;
    std::optional<EventLoop::TimerId> retry;
  };

  void attempt(const std::string& topic);
  void on_datagram(const Endpoint& from, Bytes datagram, Micros recv_ts);

  EventLoop& m_loop;
  std::shared_ptr<DatagramSocket> m_socket;
  Endpoint m_publisher;
  SubscribeOptions m_options;
  std::map<std::string, Subscription> m_subscriptions;
  std::uint64_t m_foreign = 0;
};

} // namespace wharness::pubsub
