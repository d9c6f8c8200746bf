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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace wharness::mux {

/// Registered values of a frame's protocol field.
enum class Protocol : std::uint8_t {
  raw_sensor = 0,
  j1939 = 1,
  can_fd = 2,
  ethernet = 3,
  lidar = 4,
  camera = 5,
};

bool is_registered(std::uint8_t protocol) noexcept;

/// One row of the frame matrix. Length on the wire is derived from payload.size().
struct Frame {
  std::uint8_t priority = 0; ///< 0 is the highest
  std::uint64_t timestamp_us = 0;
  std::uint8_t protocol = 0;
  Bytes payload;

  std::uint16_t length() const noexcept { return static_cast<std::uint16_t>(payload.size()); }

  friend bool operator==(const Frame&, const Frame&) = default;
};

using Tag = std::array<std::uint8_t, 32>;
using KeyView = BytesView;

/// Decoded multiplexed payload.
struct Construct {
  std::uint32_t total_size = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<Frame> frames;
  std::optional<Tag> auth_tag;
};

// Byte layout, big-endian:
//   [c:4][s:8][flags:1][count:2] frames... [tag:32 if flags bit0]
//   frame = [r:1][t:8][p:1][l:2][f:l]
inline constexpr std::size_t kHeaderSize = 4 + 8 + 1 + 2;
inline constexpr std::size_t kFrameHeaderSize = 1 + 8 + 1 + 2;
inline constexpr std::size_t kTagSize = 32;
inline constexpr std::size_t kKeySize = 32;
inline constexpr std::uint8_t kFlagTagPresent = 0x01;

/// Longest stream name the budget accounts for: the NAME element value is at most this many bytes.
inline constexpr std::size_t kMaxStreamNameValue = 32;

/// Largest construct that still fits a data packet's content for any stream name
/// within kMaxStreamNameValue and an empty signature.
std::size_t content_budget() noexcept;

/// Encoded size of a construct built from `frames`.
std::size_t encoded_size(const std::vector<Frame>& frames, bool with_tag) noexcept;

/// Orders frames by priority, then timestamp, then original position.
void sort_frames(std::vector<Frame>& frames);

/// HMAC-SHA-256 over c || s || A exactly as they appear in the encoding.
/// Throws Error(bad_key_length) unless key is 32 bytes.
Tag compute_tag(std::uint32_t total_size, std::uint64_t timestamp_us, BytesView encoded_frames, KeyView key);

/// Throws empty_frame_list, unknown_protocol, oversize_construct, bad_key_length.
Bytes pack(std::vector<Frame> frames, std::uint64_t now_us, std::optional<KeyView> key = std::nullopt);

/// Verifies c against the input length and, when both a key and a tag are present, the tag.
/// Throws truncated_input, size_mismatch, unknown_protocol, tag_mismatch, invalid_field.
Construct unpack(BytesView bytes, std::optional<KeyView> key = std::nullopt);

} // namespace wharness::mux
