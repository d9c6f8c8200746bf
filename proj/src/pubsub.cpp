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

#include "wharness/pubsub.hpp"

#include "wharness/error.hpp"

namespace wharness::pubsub {

std::string_view to_string(PayloadMode mode) noexcept
{
  return mode == PayloadMode::bytes ? "bytes" : "string";
}

PayloadMode parse_payload_mode(std::string_view text)
{
  if (text == "bytes")
    return PayloadMode::bytes;
  if (text == "string")
    return PayloadMode::string;
  throw Error(Errc::parse_error, "serialization must be bytes or string, got '" + std::string(text) + "'");
}

namespace {

void put_name(Bytes& out, std::string_view name)
{
  if (name.empty() || name.size() > kMaxTopicName)
    throw Error(Errc::invalid_field, "topic name length must be 1..1024");
  put_u16(out, static_cast<std::uint16_t>(name.size()));
  out.insert(out.end(), name.begin(), name.end());
}

/// Reads [len:2][name] at `pos`, advancing it.
std::string get_name(BytesView in, std::size_t& pos)
{
  if (in.size() - pos < 2)
    throw Error(Errc::truncated_input, "topic name length");
  std::size_t len = get_u16(in.data() + pos);
  pos += 2;
  if (len == 0 || len > kMaxTopicName)
    throw Error(Errc::invalid_field, "topic name length " + std::to_string(len));
  if (in.size() - pos < len)
    throw Error(Errc::length_mismatch, "topic name overruns datagram");
  std::string name(reinterpret_cast<const char*>(in.data() + pos), len);
  pos += len;
  return name;
}

} // namespace

Bytes encode_message(const Message& message)
{
  Bytes out;
  out.reserve(2 + message.topic.size() + 17 + message.payload.size());
  put_name(out, message.topic);
  put_u64(out, message.seq);
  put_u64(out, static_cast<std::uint64_t>(message.send_ts_us));
  out.push_back(static_cast<std::uint8_t>(message.mode));
  out.insert(out.end(), message.payload.begin(), message.payload.end());
  return out;
}

Bytes encode_subscribe(std::string_view topic, std::uint16_t reply_port)
{
  Bytes out{kSubscribeMarker};
  put_name(out, topic);
  put_u16(out, reply_port);
  return out;
}

Bytes encode_ack(std::string_view topic)
{
  Bytes out{kAckMarker};
  put_name(out, topic);
  return out;
}

Kind classify(BytesView datagram)
{
  if (datagram.empty())
    throw Error(Errc::truncated_input, "empty datagram");
  if (datagram[0] == kSubscribeMarker)
    return Kind::subscribe;
  if (datagram[0] == kAckMarker)
    return Kind::ack;
  return Kind::message;
}

Message decode_message(BytesView in)
{
  std::size_t pos = 0;
  Message m;
  m.topic = get_name(in, pos);
  if (in.size() - pos < 17)
    throw Error(Errc::truncated_input, "message header");
  m.seq = get_u64(in.data() + pos);
  m.send_ts_us = static_cast<Micros>(get_u64(in.data() + pos + 8));
  auto mode = in[pos + 16];
  if (mode > 1)
    throw Error(Errc::invalid_field, "mode flag " + std::to_string(mode));
  m.mode = static_cast<PayloadMode>(mode);
  pos += 17;
  m.payload.assign(in.begin() + static_cast<std::ptrdiff_t>(pos), in.end());
  return m;
}

std::pair<std::string, std::uint16_t> decode_subscribe(BytesView in)
{
  if (in.empty() || in[0] != kSubscribeMarker)
    throw Error(Errc::invalid_field, "not a SUB message");
  std::size_t pos = 1;
  auto name = get_name(in, pos);
  if (in.size() - pos != 2)
    throw Error(Errc::length_mismatch, "SUB reply port");
  return {name, get_u16(in.data() + pos)};
}

std::string decode_ack(BytesView in)
{
  if (in.empty() || in[0] != kAckMarker)
    throw Error(Errc::invalid_field, "not an ACK message");
  std::size_t pos = 1;
  auto name = get_name(in, pos);
  if (pos != in.size())
    throw Error(Errc::length_mismatch, "trailing bytes after ACK");
  return name;
}

Bytes render_payload(BytesView logical, PayloadMode mode)
{
  if (mode == PayloadMode::bytes)
    return Bytes(logical.begin(), logical.end());
  auto text = to_hex(logical);
  return Bytes(text.begin(), text.end());
}

// --- Publisher ---------------------------------------------------------------

Publisher::Publisher(EventLoop& loop, std::shared_ptr<DatagramSocket> socket)
  : m_loop(loop)
  , m_socket(std::move(socket))
{
  m_socket->set_receiver([this](const Endpoint& from, Bytes datagram) {
    m_loop.post([this, from, d = std::move(datagram)]() mutable { on_datagram(from, std::move(d)); });
  });
}

Publisher::~Publisher()
{
  m_socket->set_receiver({});
}

void Publisher::on_datagram(const Endpoint& from, Bytes datagram)
{
  try {
    if (classify(datagram) != Kind::subscribe)
      return;
    auto [topic, reply_port] = decode_subscribe(datagram);
    Endpoint subscriber{from.scheme, from.host, reply_port};
    m_subscribers[topic].insert(subscriber);
    m_socket->send_to(subscriber, encode_ack(topic));
  }
  catch (const Error&) {
    // malformed control traffic is ignored
  }
}

void Publisher::publish(const Topic& topic, BytesView logical_payload, std::uint64_t seq)
{
  if (auto it = m_last_seq.find(topic.name); it != m_last_seq.end() && seq <= it->second)
    throw Error(Errc::invalid_field, "sequence numbers must strictly increase on " + topic.name);
  m_last_seq[topic.name] = seq;

  auto it = m_subscribers.find(topic.name);
  if (it == m_subscribers.end() || it->second.empty())
    return;
  Message m{topic.name, seq, m_loop.now(), topic.mode, render_payload(logical_payload, topic.mode)};
  auto wire = encode_message(m);
  for (const auto& sub : it->second) {
    try {
      m_socket->send_to(sub, wire);
      ++m_sent;
    }
    catch (const Error&) {
    }
  }
}

std::set<Endpoint> Publisher::subscribers(const std::string& topic) const
{
  auto it = m_subscribers.find(topic);
  return it == m_subscribers.end() ? std::set<Endpoint>{} : it->second;
}

// --- Subscriber --------------------------------------------------------------

Subscriber::Subscriber(EventLoop& loop, std::shared_ptr<DatagramSocket> socket, Endpoint publisher,
                       SubscribeOptions options)
  : m_loop(loop)
  , m_socket(std::move(socket))
  , m_publisher(std::move(publisher))
  , m_options(options)
{
  m_socket->set_receiver([this](const Endpoint& from, Bytes datagram) {
    auto recv_ts = m_loop.now();
    m_loop.post([this, from, recv_ts, d = std::move(datagram)]() mutable { on_datagram(from, std::move(d), recv_ts); });
  });
}

Subscriber::~Subscriber()
{
  m_socket->set_receiver({});
  for (auto& [name, sub] : m_subscriptions) {
    if (sub.retry)
      m_loop.cancel(*sub.retry);
  }
}

void Subscriber::subscribe(const Topic& topic, OnMessage on_message, OnFailure on_failure)
{
  auto [it, inserted] = m_subscriptions.try_emplace(topic.name);
  it->second.topic = topic;
  it->second.on_message = std::move(on_message);
  it->second.on_failure = std::move(on_failure);
  if (inserted || !it->second.acked) {
    it->second.attempts = 0;
    attempt(topic.name);
  }
}

void Subscriber::attempt(const std::string& topic)
{
  auto it = m_subscriptions.find(topic);
  if (it == m_subscriptions.end() || it->second.acked)
    return;
  auto& sub = it->second;
  if (sub.attempts >= m_options.max_attempts) {
    sub.retry.reset();
    if (sub.on_failure)
      sub.on_failure(topic);
    return;
  }
  ++sub.attempts;
  try {
    m_socket->send_to(m_publisher, encode_subscribe(topic, m_socket->local_endpoint().port));
  }
  catch (const Error&) {
  }
  sub.retry = m_loop.schedule_after(m_options.retry_interval_us, [this, topic] { attempt(topic); });
}

bool Subscriber::acknowledged(const std::string& topic) const
{
  auto it = m_subscriptions.find(topic);
  return it != m_subscriptions.end() && it->second.acked;
}

void Subscriber::on_datagram(const Endpoint&, Bytes datagram, Micros recv_ts)
{
  try {
    switch (classify(datagram)) {
    case Kind::ack: {
      auto topic = decode_ack(datagram);
      if (auto it = m_subscriptions.find(topic); it != m_subscriptions.end() && !it->second.acked) {
        it->second.acked = true;
        if (it->second.retry)
          m_loop.cancel(*it->second.retry);
        it->second.retry.reset();
      }
      break;
    }
    case Kind::message: {
      auto message = decode_message(datagram);
      auto it = m_subscriptions.find(message.topic);
      if (it == m_subscriptions.end()) {
        ++m_foreign;
        return;
      }
      // A message proves the registration even if the ACK was lost.
      it->second.acked = true;
      if (it->second.retry) {
        m_loop.cancel(*it->second.retry);
        it->second.retry.reset();
      }
      it->second.on_message(message, datagram.size(), recv_ts);
      break;
    }
    case Kind::subscribe:
      break;
    }
  }
  catch (const Error&) {
  }
}

} // namespace wharness::pubsub
