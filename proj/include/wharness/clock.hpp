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

#include <atomic>
#include <cstdint>

namespace wharness {

/// Microseconds on a monotonic time base.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerMilli = 1000;
inline constexpr Micros kMicrosPerSecond = 1000000;

class Clock {
public:
  virtual ~Clock() = default;
  virtual Micros now() const = 0;
};

/// std::chrono::steady_clock in microseconds; shared by all threads and, on Linux, all processes.
class SteadyClock final : public Clock {
public:
  Micros now() const override;
};

/// Manually advanced clock for deterministic tests and simulation.
class VirtualClock final : public Clock {
public:
  explicit VirtualClock(Micros start = 0) : m_now(start) {}

  Micros now() const override { return m_now.load(std::memory_order_acquire); }

  void advance(Micros delta);
  /// Moves forward to `t`; earlier times are ignored so the clock never runs backwards.
  void advance_to(Micros t);

private:
  std::atomic<Micros> m_now;
};

} // namespace wharness
