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

#include "wharness/forwarder.hpp"
#include "wharness/tlv.hpp"
#include "wharness/traffic.hpp"
#include "wharness/transport.hpp"

#include <set>

using namespace wharness;
using namespace wharness::traffic;
using test::error_code_of;

namespace {

constexpr Micros kMs = kMicrosPerMilli;

StreamSpec stream(const std::string& uri)
{
  for (auto& s : builtin_streams())
    if (s.name == parse_name(uri))
      return s;
  throw std::runtime_error("no stream " + uri);
}

/// Producer node and consumer node joined by one simulated link on a shared virtual loop.
struct PullRig {
  VirtualClock clock;
  EventLoop loop{clock};
  Forwarder producer_node;
  Forwarder consumer_node;
  ArrivalLog log;

  explicit PullRig(const std::vector<StreamSpec>& specs, LinkProfile link = LinkProfile{1000, 0, 0, 3})
  {
    auto [p_face, c_face] = open_sim_link(link, loop, loop);
    auto p_id = producer_node.add_face(p_face);
    auto c_id = consumer_node.add_face(c_face);
    p_face->set_receiver([this, p_id](Bytes b) { producer_node.on_packet(p_id, b, loop.now()); });
    c_face->set_receiver([this, c_id](Bytes b) { consumer_node.on_packet(c_id, b, loop.now()); });
    for (const auto& s : specs)
      consumer_node.add_route(s.name, c_id);
  }
};

} // namespace

TEST_CASE("built-in workloads")
{
  auto streams = builtin_streams();
  REQUIRE(streams.size() == 3);
  CHECK(streams[0].name.to_uri() == "/trailer/lidar");
  CHECK(streams[0].payload_bytes == 1600);
  CHECK(streams[0].period_us == 5000);
  CHECK(streams[0].freshness_ms == 5);
  CHECK(streams[1].name.to_uri() == "/trailer/can");
  CHECK(streams[1].payload_bytes == 160);
  CHECK(streams[1].period_us == 8000);
  CHECK(streams[1].freshness_ms == 8);
  CHECK(streams[2].name.to_uri() == "/trailer/cam");
  CHECK(streams[2].payload_bytes == 4000);
  CHECK(streams[2].period_us == 20000);
  CHECK(streams[2].freshness_ms == 20);
  for (const auto& s : streams) {
    CHECK_NOTHROW(s.validate());
    CHECK(s.serialization == PayloadMode::bytes);
  }
  CHECK(streams[0].topic() == "trailer/lidar");
  CHECK(streams[0].label() == "trailer_lidar");
  CHECK(StreamSpec::make(parse_name("/x"), 1, 1500).freshness_ms == 2);
}

TEST_CASE("stream validation")
{
  auto base = stream("/trailer/lidar");
  auto with = [&](auto edit) {
    auto s = base;
    edit(s);
    return error_code_of([&] { s.validate(); });
  };
  CHECK(with([](StreamSpec& s) { s.payload_bytes = 0; }) == Errc::validation_error);
  CHECK(with([](StreamSpec& s) { s.period_us = 99; }) == Errc::validation_error);
  CHECK(with([](StreamSpec& s) { s.interest_lifetime_ms = 0; }) == Errc::validation_error);
  CHECK(with([](StreamSpec& s) { s.name = parse_name("/" + std::string(40, 'n')); }) == Errc::validation_error);

  auto fits = base;
  fits.payload_bytes = 8766;
  CHECK_NOTHROW(fits.validate());
  fits.payload_bytes = 8767;
  CHECK(error_code_of([&] { fits.validate(); }) == Errc::validation_error);
  fits.payload_bytes = 4383;
  fits.serialization = PayloadMode::string;
  CHECK_NOTHROW(fits.validate());
  fits.payload_bytes = 4384;
  CHECK(error_code_of([&] { fits.validate(); }) == Errc::validation_error);
}

TEST_CASE("payload generation is deterministic and varied")
{
  auto can = stream("/trailer/can");
  CHECK(gen_payload(can, 7, 1) == gen_payload(can, 7, 1));
  CHECK(gen_payload(can, 7, 1) != gen_payload(can, 7, 2));
  CHECK(gen_payload(can, 7, 1) != gen_payload(stream("/trailer/lidar"), 7, 1));
  std::set<Bytes> seen;
  for (std::uint64_t seq = 0; seq < 1000; ++seq) {
    auto p = gen_payload(can, seq, 42);
    CHECK(p.size() == 160);
    seen.insert(std::move(p));
  }
  CHECK(seen.size() == 1000);

  CHECK(gen_wire_payload(can, 0, 1).size() == 160);
  can.serialization = PayloadMode::string;
  auto text = gen_wire_payload(can, 0, 1);
  CHECK(text.size() == 320);
  CHECK(from_hex(std::string(text.begin(), text.end())) == gen_payload(can, 0, 1));
}

TEST_CASE("producer answers from the current payload and the store absorbs repeats")
{
  VirtualClock clock;
  EventLoop loop(clock);
  Forwarder fwd;
  auto face = std::make_shared<test::RecordingFace>();
  auto id = fwd.add_face(face);
  auto can = stream("/trailer/can");
  Producer producer(can, loop, fwd, 9);

  // Nothing is served before the first payload exists.
  fwd.on_interest(id, Interest(can.name, 1, 4, true), 0);
  CHECK(face->sent.empty());

  producer.start(10 * kMs, 100 * kMs);
  loop.run_until(11 * kMs);
  fwd.on_interest(id, Interest(can.name, 2, 200, true), loop.now());
  REQUIRE(face->sent.size() == 1);
  auto d = tlv::decode_data(face->sent[0]);
  CHECK(d.name() == can.name);
  CHECK(d.content() == gen_payload(can, 0, 9));
  CHECK(d.freshness_ms() == 7);
  CHECK(producer.requests_served() == 1);

  loop.run_until(12 * kMs);
  fwd.on_interest(id, Interest(can.name, 3, 200, true), loop.now());
  REQUIRE(face->sent.size() == 2);
  CHECK(face->sent[1] == face->sent[0]);
  CHECK(producer.requests_served() == 1);
  CHECK(fwd.counters().cs_hits == 1);

  // After the refresh the cached copy is stale and the handler runs again.
  loop.run_until(18 * kMs);
  fwd.on_interest(id, Interest(can.name, 4, 200, true), loop.now());
  REQUIRE(face->sent.size() == 3);
  CHECK(tlv::decode_data(face->sent[2]).content() == gen_payload(can, 1, 9));
  CHECK(producer.requests_served() == 2);

  loop.run_all();
  CHECK(producer.payloads_generated() == 12);
  CHECK(error_code_of([&] { Producer(can, loop, fwd, 1).start(0, 1); }) == Errc::duplicate_registration);
}

TEST_CASE("a producer without consumers emits nothing")
{
  PullRig rig({});
  auto lidar = stream("/trailer/lidar");
  Producer producer(lidar, rig.loop, rig.producer_node, 1);
  producer.start(0, kMicrosPerSecond);
  rig.loop.run_until(2 * kMicrosPerSecond);
  CHECK(producer.payloads_generated() == 200);
  CHECK(producer.requests_served() == 0);
  auto c = rig.producer_node.counters();
  CHECK(c.data_out == 0);
  CHECK(c.interests_in == 0);
  CHECK(rig.consumer_node.counters().data_in == 0);
}

TEST_CASE("periodic pull over a perfect link")
{
  auto lidar = stream("/trailer/lidar");
  PullRig rig({lidar});
  Producer producer(lidar, rig.loop, rig.producer_node, 5);
  Consumer consumer(lidar, rig.loop, rig.consumer_node, rig.log, 5);
  std::vector<Bytes> contents;
  consumer.set_observer([&](const Data& d, Micros) { contents.push_back(d.content()); });

  Micros t0 = 100 * kMs;
  Micros stop = t0 + 10 * kMicrosPerSecond;
  producer.start(t0, stop);
  consumer.start(t0 + lidar.period_us / 2, stop);
  rig.loop.run_until(stop + kMicrosPerSecond);
  consumer.finalize(rig.loop.now());

  const auto& rec = rig.log.records();
  CHECK(consumer.interests_sent() == 2000);
  CHECK(consumer.timeouts() == 0);
  CHECK(consumer.outstanding() == 0);
  REQUIRE(rec.size() == 2000);
  REQUIRE(contents.size() == 2000);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i].seq == i);
    CHECK(rec[i].stream == "/trailer/lidar");
    CHECK(rec[i].payload_size == 1600);
    CHECK(rec[i].wire_size == tlv::data_encoded_size(lidar.name, 1600, 0));
    CHECK_FALSE(rec[i].send_ts_us.has_value());
    CHECK(rec[i].recv_ts_us == t0 + 2500 + static_cast<Micros>(i) * 5000 + 2000);
    CHECK(contents[i] == gen_payload(lidar, i, 5));
    if (i > 0)
      CHECK(contents[i] != contents[i - 1]);
  }
  CHECK(producer.requests_served() == 2000);
}

TEST_CASE("consecutive arrivals carry distinct payloads under jitter")
{
  for (auto spec : builtin_streams()) {
    PullRig rig({spec}, LinkProfile{800, 200, 0.0, 11});
    Producer producer(spec, rig.loop, rig.producer_node, 2);
    Consumer consumer(spec, rig.loop, rig.consumer_node, rig.log, 2);
    std::vector<Bytes> contents;
    consumer.set_observer([&](const Data& d, Micros) { contents.push_back(d.content()); });
    producer.start(0, 5 * kMicrosPerSecond);
    consumer.start(spec.period_us / 2, 5 * kMicrosPerSecond);
    rig.loop.run_until(6 * kMicrosPerSecond);
    REQUIRE(contents.size() > 0);
    CHECK(contents.size() >= static_cast<std::size_t>(0.95 * static_cast<double>(5 * kMicrosPerSecond / spec.period_us)));
    for (std::size_t i = 1; i < contents.size(); ++i)
      CHECK_MESSAGE(contents[i] != contents[i - 1], spec.name.to_uri() << " arrival " << i);
    const auto& rec = rig.log.records();
    for (std::size_t i = 1; i < rec.size(); ++i)
      CHECK(rec[i].recv_ts_us >= rec[i - 1].recv_ts_us);
  }
}

TEST_CASE("every interest is either answered or timed out")
{
  auto can = stream("/trailer/can");
  can.interest_lifetime_ms = 20;
  PullRig rig({can}, LinkProfile{1000, 300, 0.2, 17});
  Producer producer(can, rig.loop, rig.producer_node, 1);
  Consumer consumer(can, rig.loop, rig.consumer_node, rig.log, 1);
  producer.start(0, 4 * kMicrosPerSecond);
  consumer.start(4 * kMs, 4 * kMicrosPerSecond);
  rig.loop.run_until(5 * kMicrosPerSecond);
  consumer.finalize(rig.loop.now());
  CHECK(consumer.interests_sent() == 500);
  CHECK(consumer.outstanding() == 0);
  CHECK(consumer.timeouts() > 0);
  CHECK(rig.log.records().size() + consumer.timeouts() == consumer.interests_sent());
}

TEST_CASE("sequenced names tag each arrival with its request")
{
  auto cam = stream("/trailer/cam");
  cam.sequenced_names = true;
  PullRig rig({cam}, LinkProfile{500, 0, 0, 1});
  Producer producer(cam, rig.loop, rig.producer_node, 1);
  Consumer consumer(cam, rig.loop, rig.consumer_node, rig.log, 1, "cam@rpi3");
  producer.start(0, kMicrosPerSecond);
  consumer.start(10 * kMs, kMicrosPerSecond);
  rig.loop.run_until(2 * kMicrosPerSecond);
  const auto& rec = rig.log.records();
  REQUIRE(rec.size() == 50);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i].seq == i);
    CHECK(rec[i].stream == "cam@rpi3");
  }
}

TEST_CASE("string serialization doubles content on the pull path")
{
  auto can = stream("/trailer/can");
  can.serialization = PayloadMode::string;
  PullRig rig({can});
  Producer producer(can, rig.loop, rig.producer_node, 1);
  Consumer consumer(can, rig.loop, rig.consumer_node, rig.log, 1);
  producer.start(0, 100 * kMs);
  consumer.start(4 * kMs, 100 * kMs);
  rig.loop.run_until(kMicrosPerSecond);
  REQUIRE_FALSE(rig.log.records().empty());
  for (const auto& r : rig.log.records()) {
    CHECK(r.payload_size == 320);
    CHECK(r.wire_size == tlv::data_encoded_size(can.name, 320, 0));
  }
}

TEST_CASE("pub-sub producer and consumer")
{
  VirtualClock clock;
  EventLoop loop(clock);
  SimNetwork net(LinkProfile{1000, 0, 0, 1});
  auto pub_ep = parse_endpoint("udp://10.0.0.33:47400");
  pubsub::Publisher publisher(loop, net.bind(pub_ep, loop));
  pubsub::Subscriber subscriber(loop, net.bind(parse_endpoint("udp://10.0.0.11:47401"), loop), pub_ep);
  ArrivalLog log;
  auto lidar = stream("/trailer/lidar");
  lidar.serialization = PayloadMode::string;
  PubSubProducer producer(lidar, loop, publisher, 3);
  PubSubConsumer consumer(lidar, loop, subscriber, log);
  consumer.start(0);
  producer.start(100 * kMs, 1100 * kMs);
  loop.run_until(2 * kMicrosPerSecond);
  CHECK_FALSE(consumer.failed());
  CHECK(producer.published() == 200);
  const auto& rec = log.records();
  REQUIRE(rec.size() == 200);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i].seq == i);
    REQUIRE(rec[i].send_ts_us.has_value());
    CHECK(*rec[i].send_ts_us == 100 * kMs + static_cast<Micros>(i) * 5000);
    CHECK(rec[i].recv_ts_us == *rec[i].send_ts_us + 1000);
    CHECK(rec[i].payload_size == 3200);
    CHECK(rec[i].wire_size == 2 + 13 + 17 + 3200);
  }
}

TEST_CASE("pub-sub consumer reports a missing publisher")
{
  VirtualClock clock;
  EventLoop loop(clock);
  SimNetwork net(LinkProfile{});
  pubsub::Subscriber subscriber(loop, net.bind(parse_endpoint("udp://10.0.0.11:47401"), loop),
                                parse_endpoint("udp://10.0.0.33:47400"));
  ArrivalLog log;
  PubSubConsumer consumer(stream("/trailer/can"), loop, subscriber, log);
  consumer.start(0);
  loop.run_until(2 * kMicrosPerSecond);
  CHECK(consumer.failed());
  CHECK(log.records().empty());
}
