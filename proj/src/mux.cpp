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

#include "wharness/mux.hpp"

#include "wharness/error.hpp"
#include "wharness/name.hpp"
#include "wharness/packet.hpp"
#include "wharness/tlv.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>

namespace wharness::mux {

bool is_registered(std::uint8_t protocol) noexcept
{
  return protocol <= static_cast<std::uint8_t>(Protocol::camera);
}

std::size_t content_budget() noexcept
{
  // Worst case header: the longest name, and a content length needing the 3-byte var-number.
  std::size_t name_element = tlv::element_size(kMaxStreamNameValue);
  std::size_t content_header = 1 + tlv::var_number_size(kMaxPacketSize);
  std::size_t inner_fixed = name_element + tlv::element_size(tlv::kFixedIntSize) + content_header +
                            tlv::element_size(0);
  std::size_t outer_header = 1 + tlv::var_number_size(kMaxPacketSize);
  return kMaxPacketSize - outer_header - inner_fixed;
}

std::size_t encoded_size(const std::vector<Frame>& frames, bool with_tag) noexcept
{
  std::size_t total = kHeaderSize + (with_tag ? kTagSize : 0);
  for (const auto& f : frames)
    total += kFrameHeaderSize + f.payload.size();
  return total;
}

void sort_frames(std::vector<Frame>& frames)
{
  std::stable_sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) {
    if (a.priority != b.priority)
      return a.priority < b.priority;
    return a.timestamp_us < b.timestamp_us;
  });
}

Tag compute_tag(std::uint32_t total_size, std::uint64_t timestamp_us, BytesView encoded_frames, KeyView key)
{
  if (key.size() != kKeySize)
    throw Error(Errc::bad_key_length, "key must be 32 bytes, got " + std::to_string(key.size()));

  Bytes message;
  message.reserve(12 + encoded_frames.size());
  put_u32(message, total_size);
  put_u64(message, timestamp_us);
  message.insert(message.end(), encoded_frames.begin(), encoded_frames.end());

  Tag tag{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(), tag.data(), &len);
  return tag;
}

Bytes pack(std::vector<Frame> frames, std::uint64_t now_us, std::optional<KeyView> key)
{
  if (frames.empty())
    throw Error(Errc::empty_frame_list, "a construct needs at least one frame");
  if (frames.size() > 0xFFFF)
    throw Error(Errc::oversize_construct, "too many frames");
  for (const auto& f : frames) {
    if (!is_registered(f.protocol))
      throw Error(Errc::unknown_protocol, "protocol id " + std::to_string(f.protocol));
    if (f.payload.size() > 0xFFFF)
      throw Error(Errc::oversize_construct, "frame payload exceeds 65535 bytes");
  }
  if (key && key->size() != kKeySize)
    throw Error(Errc::bad_key_length, "key must be 32 bytes, got " + std::to_string(key->size()));

  auto total = encoded_size(frames, key.has_value());
  if (total > content_budget())
    throw Error(Errc::oversize_construct, std::to_string(total) + " bytes exceeds the content budget of " +
                                            std::to_string(content_budget()));

  sort_frames(frames);

  Bytes out;
  out.reserve(total);
  put_u32(out, static_cast<std::uint32_t>(total));
  put_u64(out, now_us);
  out.push_back(key ? kFlagTagPresent : 0);
  std::size_t frames_begin = out.size();
  put_u16(out, static_cast<std::uint16_t>(frames.size()));
  for (const auto& f : frames) {
    out.push_back(f.priority);
    put_u64(out, f.timestamp_us);
    out.push_back(f.protocol);
    put_u16(out, f.length());
    out.insert(out.end(), f.payload.begin(), f.payload.end());
  }
  if (key) {
    auto tag = compute_tag(static_cast<std::uint32_t>(total), now_us,
                           BytesView(out).subspan(frames_begin), *key);
    out.insert(out.end(), tag.begin(), tag.end());
  }
  return out;
}

Construct unpack(BytesView bytes, std::optional<KeyView> key)
{
  if (bytes.size() < kHeaderSize)
    throw Error(Errc::truncated_input, "construct header needs 15 bytes");

  Construct result;
  result.total_size = get_u32(bytes.data());
  if (result.total_size != bytes.size())
    throw Error(Errc::size_mismatch, "c = " + std::to_string(result.total_size) + ", actual " +
                                       std::to_string(bytes.size()));
  result.timestamp_us = get_u64(bytes.data() + 4);
  auto flags = bytes[12];
  if ((flags & ~kFlagTagPresent) != 0)
    throw Error(Errc::invalid_field, "reserved flag bits set");
  bool has_tag = (flags & kFlagTagPresent) != 0;

  std::size_t body_end = bytes.size();
  if (has_tag) {
    if (bytes.size() < kHeaderSize + kTagSize)
      throw Error(Errc::truncated_input, "tag flag set but no room for a tag");
    body_end -= kTagSize;
  }

  std::size_t frames_begin = 13;
  std::size_t count = get_u16(bytes.data() + frames_begin);
  if (count == 0)
    throw Error(Errc::empty_frame_list, "construct declares zero frames");
  std::size_t pos = kHeaderSize;
  result.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (body_end - pos < kFrameHeaderSize)
      throw Error(Errc::truncated_input, "frame " + std::to_string(i) + " header truncated");
    Frame f;
    f.priority = bytes[pos];
    f.timestamp_us = get_u64(bytes.data() + pos + 1);
    f.protocol = bytes[pos + 9];
    std::size_t len = get_u16(bytes.data() + pos + 10);
    pos += kFrameHeaderSize;
    if (!is_registered(f.protocol))
      throw Error(Errc::unknown_protocol, "protocol id " + std::to_string(f.protocol));
    if (body_end - pos < len)
      throw Error(Errc::truncated_input, "frame " + std::to_string(i) + " payload truncated");
    f.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    result.frames.push_back(std::move(f));
  }
  if (pos != body_end)
    throw Error(Errc::size_mismatch, "trailing bytes after the last frame");

  if (has_tag) {
    Tag stored{};
    std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(body_end), bytes.end(), stored.begin());
    if (key) {
      auto expected = compute_tag(result.total_size, result.timestamp_us,
                                  bytes.subspan(frames_begin, body_end - frames_begin), *key);
      if (CRYPTO_memcmp(expected.data(), stored.data(), kTagSize) != 0)
        throw Error(Errc::tag_mismatch, "authentication tag does not verify");
    }
    result.auth_tag = stored;
  }
  return result;
}

} // namespace wharness::mux
