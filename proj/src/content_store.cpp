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

#include "wharness/content_store.hpp"

namespace wharness {

std::optional<Name> ContentStore::insert(Data data, Micros now)
{
  if (m_capacity == 0)
    return std::nullopt;

  if (auto it = m_index.find(data.name()); it != m_index.end()) {
    it->second->data = std::move(data);
    it->second->arrival = now;
    it->second->last_use = now;
    m_entries.splice(m_entries.begin(), m_entries, it->second);
    return std::nullopt;
  }

  Name name = data.name();
  m_entries.push_front(CsEntry{std::move(data), now, now});
  m_index.emplace(std::move(name), m_entries.begin());

  if (m_index.size() > m_capacity) {
    Name victim = m_entries.back().data.name();
    m_index.erase(victim);
    m_entries.pop_back();
    return victim;
  }
  return std::nullopt;
}

bool ContentStore::is_fresh(const CsEntry& entry, Micros now) noexcept
{
  return now - entry.arrival < static_cast<Micros>(entry.data.freshness_ms()) * kMicrosPerMilli;
}

std::optional<Data> ContentStore::lookup(const Name& name, bool must_be_fresh, Micros now)
{
  auto it = m_index.find(name);
  if (it == m_index.end())
    return std::nullopt;
  if (must_be_fresh && !is_fresh(*it->second, now))
    return std::nullopt;
  it->second->last_use = now;
  m_entries.splice(m_entries.begin(), m_entries, it->second);
  return it->second->data;
}

const CsEntry* ContentStore::find(const Name& name) const
{
  auto it = m_index.find(name);
  return it == m_index.end() ? nullptr : &*it->second;
}

std::vector<Name> ContentStore::recency_order() const
{
  std::vector<Name> out;
  out.reserve(m_entries.size());
  for (const auto& e : m_entries)
    out.push_back(e.data.name());
  return out;
}

} // namespace wharness
