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

#include "wharness/pubsub.hpp"

using namespace wharness;
using namespace wharness::pubsub;
using test::error_code_of;

namespace {

Endpoint ep(const std::string& text)
{
  return parse_endpoint(text);
}

/// Publisher plus subscribers on one simulated network and one virtual clock.
struct SimBus {
  VirtualClock clock;
  EventLoop loop{clock};
  SimNetwork net{LinkProfile{1000, 0, 0, 1}};
  Endpoint pub_ep = ep("udp://10.0.0.33:47400");
  Publisher pub{loop, net.bind(pub_ep, loop)};

  std::unique_ptr<Subscriber> subscriber(const std::string& host, std::uint16_t port)
  {
    return std::make_unique<Subscriber>(loop, net.bind(ep("udp://" + host + ":" + std::to_string(port)), loop),
                                        pub_ep);
  }
};

struct Received {
  Message message;
  std::size_t wire_size;
  Micros recv_ts;
};

} // namespace

TEST_CASE("control message layout")
{
  CHECK(to_hex(encode_subscribe("trailer/can", 0x1234)) == "ff000b747261696c65722f63616e1234");
  CHECK(to_hex(encode_ack("trailer/can")) == "fe000b747261696c65722f63616e");
  CHECK(decode_subscribe(from_hex("ff000b747261696c65722f63616e1234")) ==
        std::pair<std::string, std::uint16_t>{"trailer/can", 0x1234});
  CHECK(decode_ack(from_hex("fe000b747261696c65722f63616e")) == "trailer/can");
  CHECK(classify(from_hex("ff")) == Kind::subscribe);
  CHECK(classify(from_hex("fe")) == Kind::ack);
  CHECK(classify(from_hex("0001")) == Kind::message);
  CHECK(error_code_of([] { classify({}); }) == Errc::truncated_input);
  CHECK(error_code_of([] { decode_subscribe(from_hex("ff000161")); }) == Errc::length_mismatch);
  CHECK(error_code_of([] { decode_ack(from_hex("fe00016100")); }) == Errc::length_mismatch);
  CHECK(error_code_of([] { decode_ack(from_hex("ff000161")); }) == Errc::invalid_field);
  CHECK(error_code_of([] { encode_ack(""); }) == Errc::invalid_field);
  CHECK(error_code_of([] { encode_ack(std::string(kMaxTopicName + 1, 'x')); }) == Errc::invalid_field);
}

TEST_CASE("data message layout")
{
  Message m{"a/b", 7, 0x0102, PayloadMode::bytes, Bytes{0xde, 0xad}};
  CHECK(to_hex(encode_message(m)) == "0003612f62" "0000000000000007" "0000000000000102" "00" "dead");
  CHECK(decode_message(encode_message(m)) == m);
  CHECK(error_code_of([] { decode_message(from_hex("0003612f62")); }) == Errc::truncated_input);
  CHECK(error_code_of([] { decode_message(from_hex("0005612f62")); }) == Errc::length_mismatch);
  CHECK(error_code_of([] { decode_message(from_hex("0000")); }) == Errc::invalid_field);
  CHECK(error_code_of([] {
    decode_message(from_hex("0001610000000000000001000000000000000102"));
  }) == Errc::invalid_field);

  std::mt19937_64 rng(61);
  for (int i = 0; i < 1000; ++i) {
    Message r{std::string(static_cast<std::size_t>(test::uniform(rng, 1, 40)), 'k'), rng(),
              static_cast<Micros>(rng() >> 1), i % 2 ? PayloadMode::string : PayloadMode::bytes,
              test::random_bytes(rng, test::uniform(rng, 0, 300))};
    CHECK(decode_message(encode_message(r)) == r);
  }
}

TEST_CASE("string rendering doubles the payload")
{
  std::mt19937_64 rng(62);
  for (std::size_t n : {0, 1, 8, 160, 1600, 4000}) {
    auto logical = test::random_bytes(rng, n);
    CHECK(render_payload(logical, PayloadMode::bytes) == logical);
    auto text = render_payload(logical, PayloadMode::string);
    CHECK(text.size() == 2 * n);
    CHECK(from_hex(std::string(text.begin(), text.end())) == logical);
  }
  CHECK(parse_payload_mode("bytes") == PayloadMode::bytes);
  CHECK(parse_payload_mode("string") == PayloadMode::string);
  CHECK(error_code_of([] { parse_payload_mode("json"); }) == Errc::parse_error);
}

TEST_CASE("subscribe then publish")
{
  SimBus bus;
  auto sub = bus.subscriber("10.0.0.11", 47401);
  std::vector<Received> got;
  Topic topic{"trailer/can", PayloadMode::string};
  sub->subscribe(topic, [&](const Message& m, std::size_t size, Micros ts) { got.push_back({m, size, ts}); });
  bus.loop.run_until(5000);
  CHECK(sub->acknowledged("trailer/can"));
  CHECK(bus.pub.subscribers("trailer/can") == std::set<Endpoint>{ep("udp://10.0.0.11:47401")});

  Bytes logical{1, 2, 3, 4, 5, 6, 7, 8};
  bus.loop.schedule_at(10000, [&] { bus.pub.publish(topic, logical, 1); });
  bus.loop.run_until(20000);
  REQUIRE(got.size() == 1);
  CHECK(got[0].message.seq == 1);
  CHECK(got[0].message.send_ts_us == 10000);
  CHECK(got[0].recv_ts == 11000);
  CHECK(got[0].message.payload == render_payload(logical, PayloadMode::string));
  CHECK(got[0].wire_size == 2 + topic.name.size() + 17 + 16);
  CHECK(bus.pub.datagrams_sent() == 1);
}

TEST_CASE("repeated subscribe registers once")
{
  SimBus bus;
  auto sub = bus.subscriber("10.0.0.11", 47401);
  int got = 0;
  Topic topic{"t", PayloadMode::bytes};
  for (int i = 0; i < 3; ++i)
    sub->subscribe(topic, [&](const Message&, std::size_t, Micros) { ++got; });
  bus.loop.run_until(5000);
  sub->subscribe(topic, [&](const Message&, std::size_t, Micros) { ++got; });
  bus.loop.run_until(10000);
  CHECK(bus.pub.subscribers("t").size() == 1);
  bus.pub.publish(topic, Bytes{1}, 1);
  bus.loop.run_until(20000);
  CHECK(got == 1);
  CHECK(bus.pub.datagrams_sent() == 1);
}

TEST_CASE("topics are isolated and fan-out reaches each subscriber")
{
  SimBus bus;
  auto s1 = bus.subscriber("10.0.0.11", 47401);
  auto s2 = bus.subscriber("10.0.0.12", 47402);
  auto s3 = bus.subscriber("10.0.0.13", 47403);
  std::map<std::string, int> got;
  auto count = [&](const std::string& who) {
    return [&, who](const Message&, std::size_t, Micros) { ++got[who]; };
  };
  Topic lidar{"trailer/lidar", PayloadMode::bytes};
  Topic can{"trailer/can", PayloadMode::bytes};
  s1->subscribe(lidar, count("s1"));
  s2->subscribe(can, count("s2"));
  s3->subscribe(lidar, count("s3"));
  bus.loop.run_until(5000);
  for (std::uint64_t seq = 1; seq <= 10; ++seq) {
    bus.pub.publish(lidar, Bytes{1}, seq);
    bus.pub.publish(can, Bytes{2}, seq);
  }
  bus.pub.publish(Topic{"trailer/cam", PayloadMode::bytes}, Bytes{3}, 1);
  bus.loop.run_until(20000);
  CHECK(got["s1"] == 10);
  CHECK(got["s2"] == 10);
  CHECK(got["s3"] == 10);
  CHECK(bus.pub.datagrams_sent() == 30);
  CHECK(s1->foreign_drops() == 0);
}

TEST_CASE("late subscribers see only later messages")
{
  SimBus bus;
  Topic topic{"t", PayloadMode::bytes};
  for (std::uint64_t seq = 1; seq <= 5; ++seq)
    bus.loop.schedule_at(static_cast<Micros>(seq) * 10000, [&, seq] { bus.pub.publish(topic, Bytes{1}, seq); });
  auto sub = bus.subscriber("10.0.0.11", 47401);
  std::vector<std::uint64_t> seqs;
  bus.loop.schedule_at(25000, [&] {
    sub->subscribe(topic, [&](const Message& m, std::size_t, Micros) { seqs.push_back(m.seq); });
  });
  bus.loop.run_until(100000);
  CHECK(seqs == std::vector<std::uint64_t>{3, 4, 5});
}

TEST_CASE("subscription fails after five unanswered attempts")
{
  VirtualClock clock;
  EventLoop loop(clock);
  SimNetwork net(LinkProfile{1000, 0, 0, 1});
  auto silent = net.bind(ep("udp://10.0.0.33:47400"), loop);
  std::vector<Micros> sub_times;
  silent->set_receiver([&](const Endpoint&, Bytes d) {
    if (classify(d) == Kind::subscribe)
      sub_times.push_back(clock.now());
  });
  Subscriber sub(loop, net.bind(ep("udp://10.0.0.11:47401"), loop), ep("udp://10.0.0.33:47400"));
  std::vector<std::pair<std::string, Micros>> failures;
  sub.subscribe(Topic{"t", PayloadMode::bytes}, [](const Message&, std::size_t, Micros) {},
                [&](const std::string& topic) { failures.emplace_back(topic, clock.now()); });
  loop.run_until(10 * kMicrosPerSecond);
  CHECK(sub_times == std::vector<Micros>{1000, 201000, 401000, 601000, 801000});
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].first == "t");
  CHECK(failures[0].second == 1000000);
  CHECK_FALSE(sub.acknowledged("t"));
}

TEST_CASE("a lost ack is repaired by retry")
{
  VirtualClock clock;
  EventLoop loop(clock);
  SimNetwork net(LinkProfile{1000, 0, 0, 1});
  auto pub_socket = net.bind(ep("udp://10.0.0.33:47400"), loop);
  Publisher pub(loop, pub_socket);
  Subscriber sub(loop, net.bind(ep("udp://10.0.0.11:47401"), loop), ep("udp://10.0.0.33:47400"));
  bool failed = false;
  sub.subscribe(Topic{"t", PayloadMode::bytes}, [](const Message&, std::size_t, Micros) {},
                [&](const std::string&) { failed = true; });
  loop.run_until(2 * kMicrosPerSecond);
  CHECK(sub.acknowledged("t"));
  CHECK_FALSE(failed);
}

TEST_CASE("sequence numbers must increase")
{
  SimBus bus;
  Topic topic{"t", PayloadMode::bytes};
  bus.pub.publish(topic, Bytes{1}, 5);
  CHECK(error_code_of([&] { bus.pub.publish(topic, Bytes{1}, 5); }) == Errc::invalid_field);
  CHECK(error_code_of([&] { bus.pub.publish(topic, Bytes{1}, 4); }) == Errc::invalid_field);
  CHECK_NOTHROW(bus.pub.publish(topic, Bytes{1}, 6));
  CHECK_NOTHROW(bus.pub.publish(Topic{"u", PayloadMode::bytes}, Bytes{1}, 1));
}

TEST_CASE("messages for unknown topics count as foreign")
{
  VirtualClock clock;
  EventLoop loop(clock);
  SimNetwork net(LinkProfile{0, 0, 0, 1});
  auto rogue = net.bind(ep("udp://10.0.0.33:47400"), loop);
  Subscriber sub(loop, net.bind(ep("udp://10.0.0.11:47401"), loop), ep("udp://10.0.0.33:47400"));
  int got = 0;
  sub.subscribe(Topic{"mine", PayloadMode::bytes}, [&](const Message&, std::size_t, Micros) { ++got; });
  rogue->send_to(ep("udp://10.0.0.11:47401"), encode_message(Message{"other", 1, 0, PayloadMode::bytes, {}}));
  rogue->send_to(ep("udp://10.0.0.11:47401"), encode_message(Message{"mine", 1, 0, PayloadMode::bytes, {}}));
  rogue->send_to(ep("udp://10.0.0.11:47401"), Bytes{0x00});
  loop.run_until(1000);
  CHECK(got == 1);
  CHECK(sub.foreign_drops() == 1);
  CHECK(sub.acknowledged("mine"));
}
