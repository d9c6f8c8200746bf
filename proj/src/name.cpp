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

#include "wharness/name.hpp"

#include "wharness/error.hpp"
#include "wharness/tlv.hpp"

#include <algorithm>

namespace wharness {

namespace {

std::size_t component_element_size(const Name::Component& c) noexcept
{
  return 1 + tlv::var_number_size(c.size()) + c.size();
}

bool is_plain_char(std::uint8_t b) noexcept
{
  return b > 0x20 && b <= 0x7E && b != '/' && b != '%';
}

int hex_digit(char c) noexcept
{
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

} // namespace

Name::Name(std::vector<Component> components)
  : m_components(std::move(components))
{
  if (m_components.empty())
    throw Error(Errc::malformed_name, "name needs at least one component");
  for (const auto& c : m_components) {
    if (c.empty() || c.size() > kMaxComponentSize)
      throw Error(Errc::malformed_name, "component length must be 1..255 bytes");
  }
  if (encoded_size() > kMaxEncodedSize)
    throw Error(Errc::malformed_name, "encoded name exceeds 1024 bytes");
}

Name Name::prefix(std::size_t n) const
{
  if (n == 0 || n > m_components.size())
    throw Error(Errc::malformed_name, "prefix length out of range");
  return Name({m_components.begin(), m_components.begin() + static_cast<std::ptrdiff_t>(n)});
}

Name Name::append(Component component) const
{
  auto comps = m_components;
  comps.push_back(std::move(component));
  return Name(std::move(comps));
}

bool Name::is_prefix_of(const Name& other) const noexcept
{
  if (m_components.size() > other.m_components.size())
    return false;
  return std::equal(m_components.begin(), m_components.end(), other.m_components.begin());
}

std::size_t Name::value_size() const noexcept
{
  std::size_t total = 0;
  for (const auto& c : m_components)
    total += component_element_size(c);
  return total;
}

std::size_t Name::encoded_size() const noexcept
{
  auto v = value_size();
  return 1 + tlv::var_number_size(v) + v;
}

std::string Name::to_uri() const
{
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string out;
  for (const auto& c : m_components) {
    out.push_back('/');
    for (auto b : c) {
      if (is_plain_char(b)) {
        out.push_back(static_cast<char>(b));
      }
      else {
        out.push_back('%');
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
      }
    }
  }
  return out;
}

std::strong_ordering operator<=>(const Name& a, const Name& b)
{
  return std::lexicographical_compare_three_way(
    a.m_components.begin(), a.m_components.end(), b.m_components.begin(), b.m_components.end(),
    [](const Name::Component& x, const Name::Component& y) {
      return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
    });
}

Name parse_name(std::string_view uri)
{
  if (uri.empty())
    throw Error(Errc::malformed_uri, "empty uri");
  if (uri.front() != '/')
    throw Error(Errc::malformed_uri, "uri must start with '/'");

  std::vector<Name::Component> comps;
  std::size_t pos = 1;
  while (true) {
    auto slash = uri.find('/', pos);
    auto seg = uri.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
    if (seg.empty())
      throw Error(Errc::malformed_uri, "empty segment in '" + std::string(uri) + "'");

    Name::Component comp;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      auto ch = static_cast<std::uint8_t>(seg[i]);
      if (ch < 0x20 || ch > 0x7E)
        throw Error(Errc::malformed_uri, "non-printable character");
      if (ch == '%') {
        if (i + 2 >= seg.size())
          throw Error(Errc::malformed_uri, "truncated percent escape");
        int hi = hex_digit(seg[i + 1]);
        int lo = hex_digit(seg[i + 2]);
        if (hi < 0 || lo < 0)
          throw Error(Errc::malformed_uri, "bad percent escape");
        comp.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
        i += 2;
      }
      else {
        comp.push_back(ch);
      }
    }
    comps.push_back(std::move(comp));

    if (slash == std::string_view::npos)
      break;
    pos = slash + 1;
  }

  try {
    return Name(std::move(comps));
  }
  catch (const Error& e) {
    throw Error(Errc::malformed_uri, e.what());
  }
}

std::string name_to_uri(const Name& name)
{
  return name.to_uri();
}

bool is_prefix_of(const Name& prefix, const Name& name) noexcept
{
  return prefix.is_prefix_of(name);
}

std::size_t NameHash::operator()(const Name& name) const noexcept
{
  // FNV-1a over components with a separator
  std::size_t h = 1469598103934665603ULL;
  for (const auto& c : name.components()) {
    for (auto b : c) {
      h ^= b;
      h *= 1099511628211ULL;
    }
    h ^= 0xFF;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace wharness
