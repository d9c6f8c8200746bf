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

#include "wharness/forwarder.hpp"

#include "wharness/error.hpp"
#include "wharness/tlv.hpp"

#include <algorithm>

namespace wharness {

std::vector<std::pair<std::string, std::uint64_t>> ForwarderCounters::items() const
{
  return {
    {"interests_in", interests_in}, {"interests_out", interests_out}, {"data_in", data_in},
    {"data_out", data_out},         {"cs_hits", cs_hits},             {"no_route", no_route},
    {"unsolicited", unsolicited},   {"loop_drops", loop_drops},       {"send_failures", send_failures},
    {"decode_errors", decode_errors},
  };
}

Forwarder::Forwarder(ForwarderOptions options)
  : m_cs(options.cs_capacity)
{}

FaceId Forwarder::add_face(std::shared_ptr<Face> face)
{
  auto id = m_next_face++;
  m_faces.emplace(id, std::move(face));
  return id;
}

std::shared_ptr<Face> Forwarder::face(FaceId id) const
{
  auto it = m_faces.find(id);
  return it == m_faces.end() ? nullptr : it->second;
}

std::vector<FaceId> Forwarder::face_ids() const
{
  std::vector<FaceId> ids;
  for (const auto& [id, f] : m_faces)
    ids.push_back(id);
  return ids;
}

void Forwarder::add_route(const Name& prefix, FaceId face)
{
  if (!m_faces.contains(face))
    throw Error(Errc::unknown_face, "face " + std::to_string(face) + " for route " + prefix.to_uri());
  auto& entry = m_fib.try_emplace(prefix, FibEntry{prefix, {}}).first->second;
  if (std::find(entry.next_hops.begin(), entry.next_hops.end(), face) == entry.next_hops.end())
    entry.next_hops.push_back(face);
}

void Forwarder::register_prefix(const Name& prefix, ProducerHandler handler)
{
  if (!m_handlers.try_emplace(prefix, std::move(handler)).second)
    throw Error(Errc::duplicate_registration, prefix.to_uri());
}

std::optional<FibMatch> Forwarder::fib_longest_prefix(const Name& name) const
{
  for (std::size_t len = name.size(); len >= 1; --len) {
    Name prefix = name.prefix(len);
    if (m_handlers.contains(prefix))
      return FibMatch{prefix, {}, true};
    if (auto it = m_fib.find(prefix); it != m_fib.end())
      return FibMatch{prefix, it->second.next_hops, false};
  }
  return std::nullopt;
}

void Forwarder::send_on(FaceId id, BytesView wire)
{
  auto it = m_faces.find(id);
  if (it == m_faces.end()) {
    ++m_counters.send_failures;
    return;
  }
  try {
    it->second->send(wire);
  }
  catch (const Error&) {
    ++m_counters.send_failures;
  }
}

void Forwarder::on_interest(FaceId in_face, const Interest& interest, Micros now)
{
  ++m_counters.interests_in;
  const auto& name = interest.name();

  // 1. Content store
  if (auto hit = m_cs.lookup(name, interest.must_be_fresh(), now)) {
    ++m_counters.cs_hits;
    ++m_counters.data_out;
    send_on(in_face, tlv::encode_data(*hit));
    return;
  }

  // 2. Pending interest table
  auto lifetime = static_cast<Micros>(interest.lifetime_ms()) * kMicrosPerMilli;
  if (auto it = m_pit.find(name); it != m_pit.end() && it->second.expiry > now) {
    auto& entry = it->second;
    auto key = std::make_pair(in_face, interest.nonce());
    if (std::find(entry.downstream.begin(), entry.downstream.end(), key) != entry.downstream.end()) {
      ++m_counters.loop_drops;
      return;
    }
    entry.downstream.push_back(key);
    entry.expiry = std::max(entry.expiry, now + lifetime);
    entry.must_be_fresh = entry.must_be_fresh || interest.must_be_fresh();
    return;
  }

  // 3. Forwarding information base
  m_pit.insert_or_assign(name, PitEntry{name, {{in_face, interest.nonce()}}, now + lifetime, interest.must_be_fresh()});

  auto match = fib_longest_prefix(name);
  if (match && match->local) {
    const auto& handler = m_handlers.at(match->prefix);
    if (auto data = handler(interest, now))
      on_data(kLocalFace, *data, now);
    return;
  }
  if (match) {
    for (auto hop : match->next_hops) {
      if (hop == in_face)
        continue;
      ++m_counters.interests_out;
      send_on(hop, tlv::encode_interest(interest));
      return;
    }
  }
  ++m_counters.no_route;
  m_pit.erase(name);
}

void Forwarder::on_data(FaceId in_face, const Data& data, Micros now)
{
  ++m_counters.data_in;
  auto it = m_pit.find(data.name());
  if (it == m_pit.end() || it->second.expiry <= now) {
    ++m_counters.unsolicited;
    return;
  }

  m_cs.insert(data, now);

  auto wire = tlv::encode_data(data);
  std::vector<FaceId> sent;
  for (const auto& [face, nonce] : it->second.downstream) {
    if (face == in_face || std::find(sent.begin(), sent.end(), face) != sent.end())
      continue;
    sent.push_back(face);
    ++m_counters.data_out;
    send_on(face, wire);
  }
  m_pit.erase(it);
}

void Forwarder::on_packet(FaceId in_face, BytesView wire, Micros now)
{
  if (wire.empty()) {
    ++m_counters.decode_errors;
    return;
  }
  try {
    if (wire[0] == tlv::INTEREST)
      on_interest(in_face, tlv::decode_interest(wire), now);
    else if (wire[0] == tlv::DATA)
      on_data(in_face, tlv::decode_data(wire), now);
    else
      ++m_counters.decode_errors;
  }
  catch (const Error&) {
    ++m_counters.decode_errors;
  }
}

void Forwarder::expire(Micros now)
{
  std::erase_if(m_pit, [now](const auto& kv) { return kv.second.expiry <= now; });
}

ForwarderCounters Forwarder::counters() const
{
  ForwarderCounters c;
  c.interests_in = m_counters.interests_in.load();
  c.interests_out = m_counters.interests_out.load();
  c.data_in = m_counters.data_in.load();
  c.data_out = m_counters.data_out.load();
  c.cs_hits = m_counters.cs_hits.load();
  c.no_route = m_counters.no_route.load();
  c.unsolicited = m_counters.unsolicited.load();
  c.loop_drops = m_counters.loop_drops.load();
  c.send_failures = m_counters.send_failures.load();
  c.decode_errors = m_counters.decode_errors.load();
  return c;
}

} // namespace wharness
