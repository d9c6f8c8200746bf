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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wharness {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

/// Lowercase hexadecimal rendering, two characters per byte.
std::string to_hex(BytesView bytes);

/// Inverse of to_hex; accepts either case. Throws Error(invalid_field) on odd length or bad digit.
Bytes from_hex(std::string_view text);

inline BytesView as_bytes(std::string_view s) noexcept
{
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline void put_u16(Bytes& out, std::uint16_t v)
{
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(Bytes& out, std::uint32_t v)
{
  for (int shift = 24; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline void put_u64(Bytes& out, std::uint64_t v)
{
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

// Big-endian readers; the caller guarantees the span is long enough.
inline std::uint16_t get_u16(const std::uint8_t* p) noexcept
{
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

inline std::uint32_t get_u32(const std::uint8_t* p) noexcept
{
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

inline std::uint64_t get_u64(const std::uint8_t* p) noexcept
{
  return (std::uint64_t{get_u32(p)} << 32) | get_u32(p + 4);
}

} // namespace wharness
