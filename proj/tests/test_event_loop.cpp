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

#include "wharness/clock.hpp"
#include "wharness/event_loop.hpp"

#include <thread>

using namespace wharness;

TEST_CASE("virtual clock advances exactly")
{
  VirtualClock c(100);
  CHECK(c.now() == 100);
  c.advance(5 * kMicrosPerMilli);
  CHECK(c.now() == 5100);
  c.advance_to(4000);
  CHECK(c.now() == 5100);
  c.advance_to(9000);
  CHECK(c.now() == 9000);
}

TEST_CASE("steady clock is monotonic")
{
  SteadyClock c;
  auto prev = c.now();
  for (int i = 0; i < 1000000; ++i) {
    auto t = c.now();
    REQUIRE(t >= prev);
    prev = t;
  }
}

TEST_CASE("tasks run in time order, ties in submission order")
{
  VirtualClock c;
  EventLoop loop(c);
  std::vector<std::pair<int, Micros>> trace;
  loop.schedule_at(30, [&] { trace.push_back({3, c.now()}); });
  loop.schedule_at(10, [&] { trace.push_back({1, c.now()}); });
  loop.schedule_at(10, [&] { trace.push_back({2, c.now()}); });
  loop.post([&] { trace.push_back({0, c.now()}); });
  loop.run_until(100);
  CHECK(trace == std::vector<std::pair<int, Micros>>{{0, 0}, {1, 10}, {2, 10}, {3, 30}});
  CHECK(c.now() == 100);
  CHECK(loop.pending() == 0);
}

TEST_CASE("run_until leaves later tasks queued")
{
  VirtualClock c;
  EventLoop loop(c);
  int ran = 0;
  loop.schedule_at(50, [&] { ++ran; });
  loop.schedule_at(51, [&] { ++ran; });
  loop.run_until(50);
  CHECK(ran == 1);
  CHECK(loop.pending() == 1);
  loop.run_all();
  CHECK(ran == 2);
  CHECK(c.now() == 51);
}

TEST_CASE("tasks scheduled by tasks are honoured")
{
  VirtualClock c;
  EventLoop loop(c);
  std::vector<Micros> times;
  std::function<void()> tick = [&] {
    times.push_back(c.now());
    if (times.size() < 5)
      loop.schedule_after(1000, tick);
  };
  loop.post(tick);
  loop.run_until(10000);
  CHECK(times == std::vector<Micros>{0, 1000, 2000, 3000, 4000});
}

TEST_CASE("cancel removes a pending task")
{
  VirtualClock c;
  EventLoop loop(c);
  bool ran = false;
  auto id = loop.schedule_at(10, [&] { ran = true; });
  loop.cancel(id);
  loop.cancel(id);
  loop.run_until(20);
  CHECK_FALSE(ran);
}

TEST_CASE("stop returns early")
{
  VirtualClock c;
  EventLoop loop(c);
  int ran = 0;
  loop.schedule_at(10, [&] {
    ++ran;
    loop.stop();
  });
  loop.schedule_at(20, [&] { ++ran; });
  loop.run_until(100);
  CHECK(ran == 1);
  loop.run_until(100);
  CHECK(ran == 2);
}

TEST_CASE("real-time loop accepts posts from other threads")
{
  SteadyClock c;
  EventLoop loop(c);
  std::atomic<int> ran{0};
  std::thread producer([&] {
    for (int i = 0; i < 100; ++i)
      loop.post([&] { ++ran; });
  });
  auto start = c.now();
  loop.schedule_at(start + 20 * kMicrosPerMilli, [&] { loop.stop(); });
  loop.run_until(start + 2 * kMicrosPerSecond);
  producer.join();
  loop.run_until(c.now());
  CHECK(ran == 100);
  CHECK_FALSE(loop.is_virtual());
}

TEST_CASE("real-time loop waits for due time")
{
  SteadyClock c;
  EventLoop loop(c);
  auto start = c.now();
  Micros fired = 0;
  loop.schedule_at(start + 30 * kMicrosPerMilli, [&] { fired = c.now(); });
  loop.run_until(start + 60 * kMicrosPerMilli);
  CHECK(fired >= start + 30 * kMicrosPerMilli);
  CHECK(c.now() >= start + 60 * kMicrosPerMilli);
}
