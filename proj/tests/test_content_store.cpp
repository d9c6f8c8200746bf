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

#include "wharness/content_store.hpp"

#include <algorithm>

using namespace wharness;

namespace {

Data make(const std::string& uri, std::uint8_t tag = 0, std::uint32_t freshness = 10)
{
  return Data(parse_name(uri), Bytes{tag}, freshness);
}

/// Brute-force LRU: a vector ordered most recent first, scanned linearly.
struct ReferenceStore {
  struct Entry {
    Data data;
    Micros arrival;
  };
  std::size_t capacity;
  std::vector<Entry> entries;

  std::optional<Name> insert(Data d, Micros now)
  {
    if (capacity == 0)
      return std::nullopt;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].data.name() == d.name()) {
        entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    entries.insert(entries.begin(), Entry{std::move(d), now});
    if (entries.size() > capacity) {
      auto victim = entries.back().data.name();
      entries.pop_back();
      return victim;
    }
    return std::nullopt;
  }

  std::optional<Data> lookup(const Name& n, bool fresh, Micros now)
  {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].data.name() != n)
        continue;
      auto age = now - entries[i].arrival;
      if (fresh && !(age < static_cast<Micros>(entries[i].data.freshness_ms()) * 1000))
        return std::nullopt;
      auto e = entries[i];
      entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(i));
      entries.insert(entries.begin(), e);
      return e.data;
    }
    return std::nullopt;
  }

  std::vector<Name> order() const
  {
    std::vector<Name> out;
    for (const auto& e : entries)
      out.push_back(e.data.name());
    return out;
  }
};

} // namespace

TEST_CASE("capacity two evicts the oldest")
{
  ContentStore cs(2);
  CHECK_FALSE(cs.insert(make("/a"), 0).has_value());
  CHECK_FALSE(cs.insert(make("/b"), 1).has_value());
  auto evicted = cs.insert(make("/c"), 2);
  REQUIRE(evicted.has_value());
  CHECK(*evicted == parse_name("/a"));
  CHECK(cs.size() == 2);
  CHECK_FALSE(cs.contains(parse_name("/a")));
}

TEST_CASE("lookup refreshes recency")
{
  ContentStore cs(2);
  cs.insert(make("/a"), 0);
  cs.insert(make("/b"), 1);
  CHECK(cs.lookup(parse_name("/a"), false, 2).has_value());
  CHECK(cs.recency_order() == std::vector{parse_name("/a"), parse_name("/b")});
  CHECK(*cs.insert(make("/c"), 3) == parse_name("/b"));
  CHECK(cs.find(parse_name("/a"))->last_use == 2);
}

TEST_CASE("insert of an existing name replaces it")
{
  ContentStore cs(4);
  cs.insert(make("/a", 1), 0);
  cs.insert(make("/a", 2), 5);
  CHECK(cs.size() == 1);
  auto d = cs.lookup(parse_name("/a"), false, 6);
  REQUIRE(d.has_value());
  CHECK(d->content() == Bytes{2});
  CHECK(cs.find(parse_name("/a"))->arrival == 5);
}

TEST_CASE("freshness is judged at lookup time")
{
  ContentStore cs(4);
  cs.insert(make("/a", 0, 10), 1000);
  CHECK(cs.lookup(parse_name("/a"), true, 1000 + 9999).has_value());
  CHECK_FALSE(cs.lookup(parse_name("/a"), true, 1000 + 10000).has_value());
  // A stale entry still answers when freshness is not required.
  CHECK(cs.lookup(parse_name("/a"), false, 1000000).has_value());

  cs.insert(make("/z", 0, 0), 0);
  CHECK_FALSE(cs.lookup(parse_name("/z"), true, 0).has_value());
  CHECK(cs.lookup(parse_name("/z"), false, 0).has_value());
}

TEST_CASE("capacity zero stores nothing")
{
  ContentStore cs(0);
  CHECK_FALSE(cs.insert(make("/a"), 0).has_value());
  CHECK(cs.size() == 0);
  CHECK_FALSE(cs.lookup(parse_name("/a"), false, 0).has_value());
}

TEST_CASE("random traces match the reference model")
{
  std::mt19937_64 rng(31);
  for (int trace = 0; trace < 1000; ++trace) {
    std::size_t capacity = test::uniform(rng, 0, 8);
    ContentStore cs(capacity);
    ReferenceStore ref{capacity, {}};
    std::vector<Name> evictions, ref_evictions;
    Micros now = 0;
    for (int op = 0; op < 1000; ++op) {
      now += static_cast<Micros>(test::uniform(rng, 0, 3000));
      auto uri = "/n/" + std::to_string(test::uniform(rng, 0, 11));
      if (rng() % 2) {
        auto d = make(uri, static_cast<std::uint8_t>(rng()), static_cast<std::uint32_t>(test::uniform(rng, 0, 5)));
        if (auto e = cs.insert(d, now))
          evictions.push_back(*e);
        if (auto e = ref.insert(d, now))
          ref_evictions.push_back(*e);
      }
      else {
        bool fresh = rng() % 2;
        auto got = cs.lookup(parse_name(uri), fresh, now);
        auto want = ref.lookup(parse_name(uri), fresh, now);
        REQUIRE(got == want);
      }
      REQUIRE(cs.size() <= capacity);
    }
    REQUIRE(evictions == ref_evictions);
    REQUIRE(cs.recency_order() == ref.order());
  }
}
