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

#include "wharness/tlv.hpp"

#include "wharness/error.hpp"

namespace wharness::tlv {

Bytes write_var_number(std::uint32_t n)
{
  Bytes out;
  append_var_number(out, n);
  return out;
}

void append_var_number(Bytes& out, std::uint32_t n)
{
  if (n < 253) {
    out.push_back(static_cast<std::uint8_t>(n));
  }
  else if (n < 0x10000) {
    out.push_back(253);
    put_u16(out, static_cast<std::uint16_t>(n));
  }
  else {
    out.push_back(254);
    put_u32(out, n);
  }
}

VarNumber read_var_number(BytesView in)
{
  if (in.empty())
    throw Error(Errc::truncated_input, "var-number needs at least one byte");
  auto first = in[0];
  if (first < 253)
    return {first, 1};
  if (first == 253) {
    if (in.size() < 3)
      throw Error(Errc::truncated_input, "var-number 0xFD needs 2 more bytes");
    std::uint32_t v = get_u16(in.data() + 1);
    if (v < 253)
      throw Error(Errc::non_minimal_encoding, std::to_string(v) + " must use 1 byte");
    return {v, 3};
  }
  if (first == 254) {
    if (in.size() < 5)
      throw Error(Errc::truncated_input, "var-number 0xFE needs 4 more bytes");
    std::uint32_t v = get_u32(in.data() + 1);
    if (v < 0x10000)
      throw Error(Errc::non_minimal_encoding, std::to_string(v) + " must use at most 3 bytes");
    return {v, 5};
  }
  throw Error(Errc::invalid_field, "64-bit var-numbers are not supported");
}

void append_element(Bytes& out, std::uint8_t type, BytesView value)
{
  out.push_back(type);
  append_var_number(out, static_cast<std::uint32_t>(value.size()));
  out.insert(out.end(), value.begin(), value.end());
}

Bytes encode_element(const TlvElement& element)
{
  Bytes out;
  append_var_number(out, element.type_code);
  append_var_number(out, static_cast<std::uint32_t>(element.value.size()));
  out.insert(out.end(), element.value.begin(), element.value.end());
  return out;
}

ElementView read_outer(BytesView in)
{
  auto type = read_var_number(in);
  auto length = read_var_number(in.subspan(type.consumed));
  auto header = type.consumed + length.consumed;
  if (in.size() - header != length.value)
    throw Error(Errc::length_mismatch, "declared length " + std::to_string(length.value) + ", available " +
                                         std::to_string(in.size() - header));
  return {type.value, in.subspan(header, length.value), header + length.value};
}

ElementView read_nested(BytesView in)
{
  VarNumber type{};
  VarNumber length{};
  try {
    type = read_var_number(in);
    length = read_var_number(in.subspan(type.consumed));
  }
  catch (const Error& e) {
    if (e.code() == Errc::truncated_input)
      throw Error(Errc::length_mismatch, "element header overruns its parent");
    throw;
  }
  auto header = type.consumed + length.consumed;
  if (in.size() - header < length.value)
    throw Error(Errc::length_mismatch, "element value overruns its parent");
  return {type.value, in.subspan(header, length.value), header + length.value};
}

TlvElement decode_element(BytesView in)
{
  auto v = read_outer(in);
  return {v.type_code, Bytes(v.value.begin(), v.value.end())};
}

namespace {

void append_name(Bytes& out, const Name& name)
{
  out.push_back(NAME);
  append_var_number(out, static_cast<std::uint32_t>(name.value_size()));
  for (const auto& c : name.components())
    append_element(out, NAME_COMPONENT, c);
}

void append_fixed(Bytes& out, std::uint8_t type, std::uint32_t value)
{
  out.push_back(type);
  out.push_back(kFixedIntSize);
  put_u32(out, value);
}

Name decode_name(BytesView value)
{
  std::vector<Name::Component> comps;
  while (!value.empty()) {
    auto e = read_nested(value);
    if (e.type_code != NAME_COMPONENT)
      throw Error(Errc::unknown_type, "unexpected type " + std::to_string(e.type_code) + " inside NAME");
    comps.emplace_back(e.value.begin(), e.value.end());
    value = value.subspan(e.total_size);
  }
  return Name(std::move(comps));
}

std::uint32_t decode_fixed(const ElementView& e, const char* field)
{
  if (e.value.size() != kFixedIntSize)
    throw Error(Errc::length_mismatch, std::string(field) + " must be 4 bytes");
  return get_u32(e.value.data());
}

/// Walks the children of a packet enforcing the fixed field order.
/// `order` lists the allowed type codes in their canonical order.
template <std::size_t N, typename OnField>
void walk_fields(BytesView value, const std::uint8_t (&order)[N], OnField&& on_field)
{
  int last_rank = -1;
  while (!value.empty()) {
    auto e = read_nested(value);
    int rank = -1;
    for (std::size_t i = 0; i < N; ++i) {
      if (order[i] == e.type_code)
        rank = static_cast<int>(i);
    }
    if (rank < 0)
      throw Error(Errc::unknown_type, "type " + std::to_string(e.type_code) + " is not in the registry here");
    if (rank == last_rank)
      throw Error(Errc::duplicate_field, "type " + std::to_string(e.type_code) + " appears twice");
    if (rank < last_rank)
      throw Error(Errc::misordered_field, "type " + std::to_string(e.type_code) + " out of order");
    last_rank = rank;
    on_field(e);
    value = value.subspan(e.total_size);
  }
}

} // namespace

namespace {

std::size_t interest_inner_size(const Interest& interest) noexcept
{
  std::size_t inner = interest.name().encoded_size() + 2 * element_size(kFixedIntSize);
  if (interest.must_be_fresh())
    inner += element_size(0);
  if (interest.signature())
    inner += element_size(interest.signature()->size());
  return inner;
}

std::size_t data_inner_size(const Name& name, std::size_t content_size, std::size_t signature_size) noexcept
{
  return name.encoded_size() + element_size(kFixedIntSize) + element_size(content_size) +
         element_size(signature_size);
}

} // namespace

std::size_t interest_encoded_size(const Interest& interest) noexcept
{
  return element_size(interest_inner_size(interest));
}

std::size_t data_encoded_size(const Name& name, std::size_t content_size, std::size_t signature_size) noexcept
{
  return element_size(data_inner_size(name, content_size, signature_size));
}

std::size_t data_overhead(const Name& name, std::size_t content_size, std::size_t signature_size) noexcept
{
  return data_encoded_size(name, content_size, signature_size) - content_size;
}

Bytes encode_interest(const Interest& interest)
{
  auto inner = interest_inner_size(interest);
  Bytes out;
  out.reserve(element_size(inner));
  out.push_back(INTEREST);
  append_var_number(out, static_cast<std::uint32_t>(inner));
  append_name(out, interest.name());
  append_fixed(out, NONCE, interest.nonce());
  append_fixed(out, LIFETIME, interest.lifetime_ms());
  if (interest.must_be_fresh())
    append_element(out, MUST_BE_FRESH, {});
  if (interest.signature())
    append_element(out, SIGNATURE, *interest.signature());
  return out;
}

Interest decode_interest(BytesView in)
{
  auto outer = read_outer(in);
  if (outer.type_code != INTEREST)
    throw Error(Errc::unknown_type, "expected INTEREST, got type " + std::to_string(outer.type_code));

  static constexpr std::uint8_t order[] = {NAME, NONCE, LIFETIME, MUST_BE_FRESH, SIGNATURE};
  std::optional<Name> name;
  std::optional<std::uint32_t> nonce;
  std::optional<std::uint32_t> lifetime;
  bool fresh = false;
  std::optional<Bytes> signature;

  walk_fields(outer.value, order, [&](const ElementView& e) {
    switch (e.type_code) {
    case NAME:
      name = decode_name(e.value);
      break;
    case NONCE:
      nonce = decode_fixed(e, "NONCE");
      break;
    case LIFETIME:
      lifetime = decode_fixed(e, "LIFETIME");
      break;
    case MUST_BE_FRESH:
      if (!e.value.empty())
        throw Error(Errc::length_mismatch, "MUST_BE_FRESH must be empty");
      fresh = true;
      break;
    case SIGNATURE:
      signature = Bytes(e.value.begin(), e.value.end());
      break;
    }
  });

  if (!name || !nonce || !lifetime)
    throw Error(Errc::missing_field, "INTEREST requires NAME, NONCE and LIFETIME");
  return Interest(std::move(*name), *nonce, *lifetime, fresh, std::move(signature));
}

Bytes encode_data(const Data& data)
{
  auto inner = data_inner_size(data.name(), data.content().size(), data.signature().size());
  if (element_size(inner) > kMaxPacketSize)
    throw Error(Errc::oversize_packet, "data packet exceeds 8800 bytes");
  Bytes out;
  out.reserve(element_size(inner));
  out.push_back(DATA);
  append_var_number(out, static_cast<std::uint32_t>(inner));
  append_name(out, data.name());
  append_fixed(out, FRESHNESS, data.freshness_ms());
  append_element(out, CONTENT, data.content());
  append_element(out, SIGNATURE, data.signature());
  return out;
}

Data decode_data(BytesView in)
{
  if (in.size() > kMaxPacketSize)
    throw Error(Errc::oversize_packet, std::to_string(in.size()) + "-byte input exceeds the 8800-byte cap");
  auto outer = read_outer(in);
  if (outer.type_code != DATA)
    throw Error(Errc::unknown_type, "expected DATA, got type " + std::to_string(outer.type_code));

  static constexpr std::uint8_t order[] = {NAME, FRESHNESS, CONTENT, SIGNATURE};
  std::optional<Name> name;
  std::optional<std::uint32_t> freshness;
  std::optional<Bytes> content;
  std::optional<Bytes> signature;

  walk_fields(outer.value, order, [&](const ElementView& e) {
    switch (e.type_code) {
    case NAME:
      name = decode_name(e.value);
      break;
    case FRESHNESS:
      freshness = decode_fixed(e, "FRESHNESS");
      break;
    case CONTENT:
      content = Bytes(e.value.begin(), e.value.end());
      break;
    case SIGNATURE:
      signature = Bytes(e.value.begin(), e.value.end());
      break;
    }
  });

  if (!name || !freshness || !content || !signature)
    throw Error(Errc::missing_field, "DATA requires NAME, FRESHNESS, CONTENT and SIGNATURE");
  return Data(std::move(*name), std::move(*content), *freshness, std::move(*signature));
}

} // namespace wharness::tlv
