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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace wharness {

enum class Scheme { udp, tcp, sim };

/// `udp://host:port`, `tcp://host:port`, or `sim://<link-name>` (port unused).
struct Endpoint {
  Scheme scheme = Scheme::udp;
  std::string host;
  std::uint16_t port = 0;

  std::string to_string() const;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

/// Scheme matching is case-insensitive. Throws Error(parse_error) on bad text and
/// Error(validation_error) when a udp/tcp port is outside [1, 65535].
Endpoint parse_endpoint(std::string_view text);

std::string_view to_string(Scheme scheme) noexcept;

} // namespace wharness
