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

#include "wharness/traffic.hpp"

#include "wharness/error.hpp"
#include "wharness/mux.hpp"
#include "wharness/tlv.hpp"

#include <algorithm>
#include <charconv>

namespace wharness::traffic {

StreamSpec StreamSpec::make(Name name, std::size_t payload_bytes, Micros period_us, PayloadMode serialization)
{
  StreamSpec spec{std::move(name), payload_bytes, period_us, serialization};
  spec.freshness_ms = static_cast<std::uint32_t>((period_us + kMicrosPerMilli - 1) / kMicrosPerMilli);
  return spec;
}

void StreamSpec::validate() const
{
  auto where = name.to_uri();
  if (payload_bytes < 1)
    throw Error(Errc::validation_error, where + ": payload_bytes must be >= 1");
  if (period_us < 100)
    throw Error(Errc::validation_error, where + ": period_us must be >= 100");
  if (interest_lifetime_ms == 0)
    throw Error(Errc::validation_error, where + ": interest_lifetime_ms must be > 0");
  if (name.value_size() > mux::kMaxStreamNameValue)
    throw Error(Errc::validation_error, where + ": stream name longer than 32 encoded bytes");
  std::size_t wire = serialization == PayloadMode::string ? 2 * payload_bytes : payload_bytes;
  // leave room for a sequence component when sequenced names are used
  std::size_t name_room = sequenced_names ? 24 : 0;
  if (tlv::data_encoded_size(name, wire, 0) + name_room > kMaxPacketSize)
    throw Error(Errc::validation_error, where + ": payload does not fit an 8800-byte data packet");
}

std::string StreamSpec::topic() const
{
  return name.to_uri().substr(1);
}

std::string StreamSpec::label() const
{
  auto t = topic();
  std::replace(t.begin(), t.end(), '/', '_');
  return t;
}

std::vector<StreamSpec> builtin_streams()
{
  return {
    StreamSpec::make(parse_name("/trailer/lidar"), 1600, 5000),
    StreamSpec::make(parse_name("/trailer/can"), 160, 8000),
    StreamSpec::make(parse_name("/trailer/cam"), 4000, 20000),
  };
}

Bytes gen_payload(const StreamSpec& spec, std::uint64_t seq, std::uint64_t seed)
{
  // FNV-1a of the canonical name keys the stream.
  std::uint64_t stream_key = 1469598103934665603ULL;
  for (char c : spec.name.to_uri()) {
    stream_key ^= static_cast<std::uint8_t>(c);
    stream_key *= 1099511628211ULL;
  }
  std::seed_seq sseq{static_cast<std::uint32_t>(seed),       static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream_key), static_cast<std::uint32_t>(stream_key >> 32),
                     static_cast<std::uint32_t>(seq),        static_cast<std::uint32_t>(seq >> 32)};
  std::mt19937_64 rng(sseq);
  Bytes out(spec.payload_bytes);
  std::size_t i = 0;
  while (i < out.size()) {
    auto word = rng();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i)
      out[i] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  return out;
}

Bytes gen_wire_payload(const StreamSpec& spec, std::uint64_t seq, std::uint64_t seed)
{
  return pubsub::render_payload(gen_payload(spec, seq, seed), spec.serialization);
}

// --- Producer ------------------------------------------------------------------

Producer::Producer(StreamSpec spec, EventLoop& loop, Forwarder& forwarder, std::uint64_t seed)
  : m_spec(std::move(spec))
  , m_loop(loop)
  , m_forwarder(forwarder)
  , m_seed(seed)
{}

void Producer::start(Micros start, Micros stop)
{
  m_stop = stop;
  m_forwarder.register_prefix(m_spec.name,
                              [this](const Interest& i, Micros now) { return answer(i, now); });
  m_loop.schedule_at(start, [this, start] { refresh(start); });
}

void Producer::refresh(Micros when)
{
  m_payload = gen_wire_payload(m_spec, m_seq++, m_seed);
  m_started = true;
  ++m_generated;
  m_next_refresh = when + m_spec.period_us;
  if (m_next_refresh < m_stop) {
    auto next = m_next_refresh;
    m_loop.schedule_at(next, [this, next] { refresh(next); });
  }
}

std::optional<Data> Producer::answer(const Interest& interest, Micros now)
{
  if (!m_started)
    return std::nullopt;
  ++m_served;
  // A cached copy must not outlive the payload it carries.
  Micros remaining = std::max<Micros>(0, m_next_refresh - now);
  auto freshness = std::min<std::uint32_t>(m_spec.freshness_ms, static_cast<std::uint32_t>(remaining / kMicrosPerMilli));
  return Data(interest.name(), m_payload, freshness);
}

// --- Consumer ------------------------------------------------------------------

Consumer::Consumer(StreamSpec spec, EventLoop& loop, Forwarder& forwarder, ArrivalLog& log, std::uint64_t seed,
                   std::string label)
  : m_spec(std::move(spec))
  , m_loop(loop)
  , m_forwarder(forwarder)
  , m_log(log)
  , m_label(label.empty() ? m_spec.name.to_uri() : std::move(label))
  , m_nonce_rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)))
{
  auto face = std::make_shared<AppFace>([this](BytesView wire) { on_wire(wire); });
  m_app_face = m_forwarder.add_face(std::move(face));
}

void Consumer::start(Micros start, Micros stop)
{
  m_start = start;
  m_stop = stop;
  if (start < stop)
    m_loop.schedule_at(start, [this, start] { emit(start); });
}

void Consumer::reap(Micros now)
{
  auto before = m_pending.size();
  std::erase_if(m_pending, [now](const auto& p) { return p.second <= now; });
  auto expired = before - m_pending.size();
  m_timeouts += expired;
  m_outstanding -= static_cast<int>(expired);
}

void Consumer::emit(Micros when)
{
  reap(when);
  auto seq = m_sent++;
  auto seq_text = std::to_string(seq);
  Name name = m_spec.sequenced_names ? m_spec.name.append(Bytes(seq_text.begin(), seq_text.end())) : m_spec.name;
  Interest interest(std::move(name), static_cast<std::uint32_t>(m_nonce_rng()), m_spec.interest_lifetime_ms, true);
  m_pending.emplace_back(seq, when + static_cast<Micros>(m_spec.interest_lifetime_ms) * kMicrosPerMilli);
  ++m_outstanding;
  m_forwarder.on_interest(m_app_face, interest, m_loop.now());

  auto next = when + m_spec.period_us;
  if (next < m_stop)
    m_loop.schedule_at(next, [this, next] { emit(next); });
}

void Consumer::on_wire(BytesView wire)
{
  auto now = m_loop.now();
  Data data = tlv::decode_data(wire);

  std::uint64_t seq = m_sent == 0 ? 0 : m_sent - 1;
  if (m_spec.sequenced_names) {
    const auto& last = data.name()[data.name().size() - 1];
    std::from_chars(reinterpret_cast<const char*>(last.data()), reinterpret_cast<const char*>(last.data() + last.size()), seq);
    auto before = m_pending.size();
    std::erase_if(m_pending, [seq](const auto& p) { return p.first == seq; });
    m_outstanding -= static_cast<int>(before - m_pending.size());
  }
  else {
    if (!m_pending.empty())
      seq = m_pending.back().first;
    m_outstanding -= static_cast<int>(m_pending.size());
    m_pending.clear();
  }

  m_log.append(ArrivalRecord{m_label, seq, std::nullopt, now, data.content().size(), wire.size()});
  if (m_observer)
    m_observer(data, now);
}

void Consumer::finalize(Micros now)
{
  reap(now);
}

// --- pub-sub -------------------------------------------------------------------

PubSubProducer::PubSubProducer(StreamSpec spec, EventLoop& loop, pubsub::Publisher& publisher, std::uint64_t seed)
  : m_spec(std::move(spec))
  , m_loop(loop)
  , m_publisher(publisher)
  , m_seed(seed)
{}

void PubSubProducer::start(Micros start, Micros stop)
{
  m_stop = stop;
  if (start < stop)
    m_loop.schedule_at(start, [this, start] { tick(start); });
}

void PubSubProducer::tick(Micros when)
{
  auto seq = m_seq++;
  m_publisher.publish({m_spec.topic(), m_spec.serialization}, gen_payload(m_spec, seq, m_seed), seq);
  ++m_published;
  auto next = when + m_spec.period_us;
  if (next < m_stop)
    m_loop.schedule_at(next, [this, next] { tick(next); });
}

PubSubConsumer::PubSubConsumer(StreamSpec spec, EventLoop& loop, pubsub::Subscriber& subscriber, ArrivalLog& log,
                               std::string label)
  : m_spec(std::move(spec))
  , m_loop(loop)
  , m_subscriber(subscriber)
  , m_log(log)
  , m_label(label.empty() ? m_spec.name.to_uri() : std::move(label))
{}

void PubSubConsumer::start(Micros start)
{
  m_loop.schedule_at(start, [this] {
    m_subscriber.subscribe(
      {m_spec.topic(), m_spec.serialization},
      [this](const pubsub::Message& m, std::size_t wire_size, Micros recv_ts) {
        m_log.append(ArrivalRecord{m_label, m.seq, m.send_ts_us, recv_ts, m.payload.size(), wire_size});
      },
      [this](const std::string&) { m_failed = true; });
  });
}

} // namespace wharness::traffic
