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

#include "wharness/bytes.hpp"
#include "wharness/name.hpp"

#include <cstdint>
#include <optional>

namespace wharness {

/// Hard cap on a fully encoded data packet.
inline constexpr std::size_t kMaxPacketSize = 8800;
inline constexpr std::uint32_t kDefaultLifetimeMs = 4000;

/// Request for named data. Immutable after construction.
class Interest {
public:
  /// Throws Error(invalid_field) when lifetime_ms is zero.
  explicit Interest(Name name, std::uint32_t nonce = 0, std::uint32_t lifetime_ms = kDefaultLifetimeMs,
                    bool must_be_fresh = false, std::optional<Bytes> signature = std::nullopt);

  const Name& name() const noexcept { return m_name; }
  std::uint32_t nonce() const noexcept { return m_nonce; }
  std::uint32_t lifetime_ms() const noexcept { return m_lifetime_ms; }
  bool must_be_fresh() const noexcept { return m_must_be_fresh; }
  const std::optional<Bytes>& signature() const noexcept { return m_signature; }

  /// Same interest re-emitted under a new nonce.
  Interest with_nonce(std::uint32_t nonce) const;

  friend bool operator==(const Interest&, const Interest&) = default;

private:
  Name m_name;
  std::uint32_t m_nonce;
  std::uint32_t m_lifetime_ms;
  bool m_must_be_fresh;
  std::optional<Bytes> m_signature;
};

/// Named content. The full encoding never exceeds kMaxPacketSize; construction of an
/// oversize packet throws Error(oversize_packet) rather than truncating.
class Data {
public:
  Data(Name name, Bytes content, std::uint32_t freshness_ms = 0, Bytes signature = {});

  const Name& name() const noexcept { return m_name; }
  const Bytes& content() const noexcept { return m_content; }
  /// 0 means the packet never satisfies a must-be-fresh interest from cache.
  std::uint32_t freshness_ms() const noexcept { return m_freshness_ms; }
  const Bytes& signature() const noexcept { return m_signature; }

  std::size_t encoded_size() const noexcept;

  friend bool operator==(const Data&, const Data&) = default;

private:
  Name m_name;
  Bytes m_content;
  std::uint32_t m_freshness_ms;
  Bytes m_signature;
};

} // namespace wharness
