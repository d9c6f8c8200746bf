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

#include <stdexcept>
#include <string>
#include <string_view>

namespace wharness {

enum class Errc {
  malformed_uri,
  malformed_name,
  truncated_input,
  non_minimal_encoding,
  unknown_type,
  length_mismatch,
  duplicate_field,
  misordered_field,
  missing_field,
  invalid_field,
  oversize_packet,
  oversize_construct,
  empty_frame_list,
  unknown_protocol,
  size_mismatch,
  tag_mismatch,
  bad_key_length,
  unknown_face,
  duplicate_registration,
  bind_failure,
  connect_failure,
  face_closed,
  timeout,
  parse_error,
  validation_error,
  io_error,
  usage_error,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure in the library surfaces as this exception; callers switch on code().
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what)
    , m_code(code)
    , m_detail(what)
  {}

  Errc code() const noexcept { return m_code; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return m_detail; }

private:
  Errc m_code;
  std::string m_detail;
};

} // namespace wharness
