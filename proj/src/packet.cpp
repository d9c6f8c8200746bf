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

#include "wharness/packet.hpp"

#include "wharness/error.hpp"
#include "wharness/tlv.hpp"

namespace wharness {

Interest::Interest(Name name, std::uint32_t nonce, std::uint32_t lifetime_ms, bool must_be_fresh,
                   std::optional<Bytes> signature)
  : m_name(std::move(name))
  , m_nonce(nonce)
  , m_lifetime_ms(lifetime_ms)
  , m_must_be_fresh(must_be_fresh)
  , m_signature(std::move(signature))
{
  if (m_lifetime_ms == 0)
    throw Error(Errc::invalid_field, "interest lifetime must be positive");
}

Interest Interest::with_nonce(std::uint32_t nonce) const
{
  Interest copy = *this;
  copy.m_nonce = nonce;
  return copy;
}

Data::Data(Name name, Bytes content, std::uint32_t freshness_ms, Bytes signature)
  : m_name(std::move(name))
  , m_content(std::move(content))
  , m_freshness_ms(freshness_ms)
  , m_signature(std::move(signature))
{
  auto size = encoded_size();
  if (size > kMaxPacketSize)
    throw Error(Errc::oversize_packet,
                "data packet would encode to " + std::to_string(size) + " bytes (cap 8800)");
}

std::size_t Data::encoded_size() const noexcept
{
  return tlv::data_encoded_size(m_name, m_content.size(), m_signature.size());
}

} // namespace wharness
