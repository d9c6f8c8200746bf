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

#include "wharness/clock.hpp"

#include <chrono>

namespace wharness {

Micros SteadyClock::now() const
{
  using namespace std::chrono;
  return duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
}

void VirtualClock::advance(Micros delta)
{
  if (delta > 0)
    m_now.fetch_add(delta, std::memory_order_acq_rel);
}

void VirtualClock::advance_to(Micros t)
{
  auto cur = m_now.load(std::memory_order_acquire);
  while (t > cur && !m_now.compare_exchange_weak(cur, t, std::memory_order_acq_rel)) {
  }
}

} // namespace wharness
