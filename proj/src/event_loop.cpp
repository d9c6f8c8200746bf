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

#include "wharness/event_loop.hpp"

#include <chrono>
#include <limits>

namespace wharness {

EventLoop::EventLoop(Clock& clock)
  : m_clock(clock)
  , m_virtual(dynamic_cast<VirtualClock*>(&clock))
{}

EventLoop::TimerId EventLoop::post(Task task)
{
  return schedule_at(m_clock.now(), std::move(task));
}

EventLoop::TimerId EventLoop::schedule_at(Micros when, Task task)
{
  TimerId id;
  {
    std::lock_guard lock(m_mutex);
    id = m_next_seq++;
    m_queue.emplace(Key{when, id}, std::move(task));
    m_index.emplace(id, when);
  }
  m_cv.notify_one();
  return id;
}

void EventLoop::cancel(TimerId id)
{
  std::lock_guard lock(m_mutex);
  auto it = m_index.find(id);
  if (it == m_index.end())
    return;
  m_queue.erase(Key{it->second, id});
  m_index.erase(it);
}

std::size_t EventLoop::pending() const
{
  std::lock_guard lock(m_mutex);
  return m_queue.size();
}

void EventLoop::stop()
{
  {
    std::lock_guard lock(m_mutex);
    m_stop = true;
  }
  m_cv.notify_all();
}

bool EventLoop::pop_due(Micros limit, Task& out)
{
  // Caller holds m_mutex.
  if (m_queue.empty())
    return false;
  auto it = m_queue.begin();
  if (it->first.first > limit)
    return false;
  if (m_virtual)
    m_virtual->advance_to(it->first.first);
  out = std::move(it->second);
  m_index.erase(it->first.second);
  m_queue.erase(it);
  return true;
}

void EventLoop::run_until(Micros deadline)
{
  std::unique_lock lock(m_mutex);
  m_stop = false;
  while (!m_stop) {
    Task task;
    Micros limit = m_virtual ? deadline : std::min(deadline, m_clock.now());
    if (pop_due(limit, task)) {
      lock.unlock();
      task();
      lock.lock();
      continue;
    }
    if (m_virtual) {
      m_virtual->advance_to(deadline);
      break;
    }
    Micros now = m_clock.now();
    if (now >= deadline)
      break;
    Micros wake = deadline;
    if (!m_queue.empty())
      wake = std::min(wake, m_queue.begin()->first.first);
    m_cv.wait_for(lock, std::chrono::microseconds(std::max<Micros>(wake - now, 1)));
  }
}

void EventLoop::run_all()
{
  std::unique_lock lock(m_mutex);
  m_stop = false;
  Task task;
  while (!m_stop && pop_due(std::numeric_limits<Micros>::max(), task)) {
    lock.unlock();
    task();
    task = nullptr;
    lock.lock();
  }
}

} // namespace wharness
