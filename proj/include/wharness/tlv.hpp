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
#include "wharness/packet.hpp"

#include <cstdint>

namespace wharness::tlv {

// Closed type-code registry. Every code fits in a single var-number byte.
enum Type : std::uint8_t {
  INTEREST = 0x05,
  DATA = 0x06,
  NAME = 0x07,
  NAME_COMPONENT = 0x08,
  NONCE = 0x0A,
  LIFETIME = 0x0C,
  CONTENT = 0x15,
  SIGNATURE = 0x17,
  MUST_BE_FRESH = 0x12,
  FRESHNESS = 0x19,
};

/// Width of fixed-size integer fields (NONCE, LIFETIME, FRESHNESS).
inline constexpr std::size_t kFixedIntSize = 4;

struct VarNumber {
  std::uint32_t value;
  std::size_t consumed;
};

constexpr std::size_t var_number_size(std::uint64_t n) noexcept
{
  return n < 253 ? 1 : (n < 0x10000 ? 3 : 5);
}

/// 1 byte below 253; 0xFD + u16 below 2^16; 0xFE + u32 otherwise. Big-endian.
Bytes write_var_number(std::uint32_t n);
void append_var_number(Bytes& out, std::uint32_t n);

/// Strict inverse of write_var_number.
/// Throws truncated_input, non_minimal_encoding, or invalid_field (0xFF marker).
VarNumber read_var_number(BytesView in);

struct TlvElement {
  std::uint32_t type_code = 0;
  Bytes value;

  friend bool operator==(const TlvElement&, const TlvElement&) = default;
};

/// Non-owning view of one element inside a buffer.
struct ElementView {
  std::uint32_t type_code = 0;
  BytesView value;
  std::size_t total_size = 0; ///< header + value
};

constexpr std::size_t element_size(std::size_t value_size) noexcept
{
  return 1 + var_number_size(value_size) + value_size;
}

void append_element(Bytes& out, std::uint8_t type, BytesView value);
Bytes encode_element(const TlvElement& element);

/// Reads exactly one element occupying the whole input. A declared length that
/// disagrees with the available bytes is length_mismatch; an incomplete header is truncated_input.
ElementView read_outer(BytesView in);

/// Reads the next element from a parent's value; any overrun of the parent is length_mismatch.
ElementView read_nested(BytesView in);

TlvElement decode_element(BytesView in);

std::size_t interest_encoded_size(const Interest& interest) noexcept;
std::size_t data_encoded_size(const Name& name, std::size_t content_size, std::size_t signature_size) noexcept;

/// Header overhead of a data packet (encoded size minus content size).
std::size_t data_overhead(const Name& name, std::size_t content_size, std::size_t signature_size) noexcept;

Bytes encode_interest(const Interest& interest);
Interest decode_interest(BytesView in);

/// Throws oversize_packet if the result would exceed kMaxPacketSize.
Bytes encode_data(const Data& data);
Data decode_data(BytesView in);

} // namespace wharness::tlv
