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

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wharness {

/**
 * Hierarchical data name, e.g. /trailer/lidar.
 *
 * Components are opaque byte strings of 1..255 bytes; a name has at least one
 * component and its NAME element encodes to at most kMaxEncodedSize bytes.
 * Comparison is component-wise, so /trailer/ca is not a prefix of /trailer/can.
 */
class Name {
public:
  using Component = Bytes;

  static constexpr std::size_t kMaxComponentSize = 255;
  static constexpr std::size_t kMaxEncodedSize = 1024;

  /// Throws Error(malformed_name) when an invariant does not hold.
  explicit Name(std::vector<Component> components);

  const std::vector<Component>& components() const noexcept { return m_components; }
  std::size_t size() const noexcept { return m_components.size(); }
  const Component& operator[](std::size_t i) const { return m_components[i]; }

  /// First n components; n must be in [1, size()].
  Name prefix(std::size_t n) const;
  Name append(Component component) const;

  bool is_prefix_of(const Name& other) const noexcept;

  /// Sum of the encoded NAME_COMPONENT elements (the NAME element's value length).
  std::size_t value_size() const noexcept;
  /// Size of the full NAME element on the wire.
  std::size_t encoded_size() const noexcept;

  std::string to_uri() const;

  friend bool operator==(const Name&, const Name&) = default;
  friend std::strong_ordering operator<=>(const Name& a, const Name& b);

private:
  std::vector<Component> m_components;
};

/// Parses `/a/b/c`. Accepts printable ASCII; `%XX` escapes an arbitrary byte.
/// Throws Error(malformed_uri) on empty input, a missing leading '/', or an empty segment.
Name parse_name(std::string_view uri);

/// Canonical text form; bytes outside printable ASCII (and '%', '/') are percent-escaped,
/// so parse_name(name_to_uri(n)) == n for every valid name.
std::string name_to_uri(const Name& name);

bool is_prefix_of(const Name& prefix, const Name& name) noexcept;

struct NameHash {
  std::size_t operator()(const Name& name) const noexcept;
};

} // namespace wharness
