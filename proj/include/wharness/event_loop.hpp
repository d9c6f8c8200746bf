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

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <utility>

namespace wharness {

/**
 * Serialized task queue ordered by (due time, submission order).
 *
 * post() and schedule_at() are safe from any thread; tasks run only on the thread
 * inside run_until(). With a VirtualClock the loop advances the clock to each
 * task's due time instead of sleeping, which makes whole simulations deterministic.
 */
class EventLoop {
public:
  using Task = std::function<void()>;
  using TimerId = std::uint64_t;

  explicit EventLoop(Clock& clock);

  EventLoop(const EventLoop&) = delete;
  EventLoop& operator=(const EventLoop&) = delete;

  Clock& clock() noexcept { return m_clock; }
  Micros now() const { return m_clock.now(); }
  bool is_virtual() const noexcept { return m_virtual != nullptr; }

  TimerId post(Task task);
  TimerId schedule_at(Micros when, Task task);
  TimerId schedule_after(Micros delay, Task task) { return schedule_at(now() + delay, std::move(task)); }
  void cancel(TimerId id);

  /// Runs tasks due at or before `deadline`, then returns. A stop() request returns early.
  void run_until(Micros deadline);
  /// Runs every queued task regardless of due time, advancing a virtual clock as it goes.
  void run_all();
  void stop();

  std::size_t pending() const;

private:
  using Key = std::pair<Micros, std::uint64_t>;

  bool pop_due(Micros limit, Task& out);

  Clock& m_clock;
  VirtualClock* m_virtual;
  mutable std::mutex m_mutex;
  std::condition_variable m_cv;
  std::map<Key, Task> m_queue;
  std::map<TimerId, Micros> m_index;
  std::uint64_t m_next_seq = 0;
  bool m_stop = false;
};

} // namespace wharness
