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
#include "wharness/name.hpp"
#include "wharness/packet.hpp"

#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

namespace wharness {

struct CsEntry {
  Data data;
  Micros arrival;
  Micros last_use;
};

/// Exact-name data cache with least-recently-used eviction. Entries are never
/// removed on a timer; staleness is judged at lookup time.
class ContentStore {
public:
  static constexpr std::size_t kDefaultCapacity = 1024;

  explicit ContentStore(std::size_t capacity = kDefaultCapacity) : m_capacity(capacity) {}

  /// Replace-or-insert. Returns the name evicted to make room, if any.
  std::optional<Name> insert(Data data, Micros now);

  /// A hit refreshes last_use. With must_be_fresh, an entry counts only while
  /// now - arrival < freshness, so freshness 0 never satisfies it.
  std::optional<Data> lookup(const Name& name, bool must_be_fresh, Micros now);

  static bool is_fresh(const CsEntry& entry, Micros now) noexcept;

  const CsEntry* find(const Name& name) const;
  bool contains(const Name& name) const { return find(name) != nullptr; }
  std::size_t size() const noexcept { return m_index.size(); }
  std::size_t capacity() const noexcept { return m_capacity; }

  /// Names from most to least recently used.
  std::vector<Name> recency_order() const;

private:
  using List = std::list<CsEntry>;

  std::size_t m_capacity;
  List m_entries; // front = most recently used
  std::unordered_map<Name, List::iterator, NameHash> m_index;
};

} // namespace wharness
