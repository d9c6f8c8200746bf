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

#include "wharness/endpoint.hpp"

#include "wharness/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace wharness {

std::string_view to_string(Scheme scheme) noexcept
{
  switch (scheme) {
  case Scheme::udp: return "udp";
  case Scheme::tcp: return "tcp";
  case Scheme::sim: return "sim";
  }
  return "?";
}

std::string Endpoint::to_string() const
{
  std::string out(wharness::to_string(scheme));
  out += "://";
  out += host;
  if (scheme != Scheme::sim) {
    out += ':';
    out += std::to_string(port);
  }
  return out;
}

Endpoint parse_endpoint(std::string_view text)
{
  auto sep = text.find("://");
  if (sep == std::string_view::npos)
    throw Error(Errc::parse_error, "endpoint '" + std::string(text) + "' lacks scheme://");
  std::string scheme(text.substr(0, sep));
  std::transform(scheme.begin(), scheme.end(), scheme.begin(), [](unsigned char c) { return std::tolower(c); });
  auto rest = text.substr(sep + 3);

  Endpoint ep;
  if (scheme == "sim") {
    if (rest.empty())
      throw Error(Errc::parse_error, "sim endpoint needs a link name");
    ep.scheme = Scheme::sim;
    ep.host = std::string(rest);
    return ep;
  }
  if (scheme == "udp")
    ep.scheme = Scheme::udp;
  else if (scheme == "tcp")
    ep.scheme = Scheme::tcp;
  else
    throw Error(Errc::parse_error, "unknown scheme '" + scheme + "'");

  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    throw Error(Errc::parse_error, "endpoint '" + std::string(text) + "' needs host:port");
  ep.host = std::string(rest.substr(0, colon));
  auto port_text = rest.substr(colon + 1);
  long port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size())
    throw Error(Errc::parse_error, "bad port in '" + std::string(text) + "'");
  if (port < 1 || port > 65535)
    throw Error(Errc::validation_error, "port out of range in '" + std::string(text) + "'");
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

} // namespace wharness
