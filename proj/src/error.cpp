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

#include "wharness/error.hpp"

namespace wharness {

std::string_view to_string(Errc code) noexcept
{
  switch (code) {
  case Errc::malformed_uri: return "malformed-uri";
  case Errc::malformed_name: return "malformed-name";
  case Errc::truncated_input: return "truncated-input";
  case Errc::non_minimal_encoding: return "non-minimal-encoding";
  case Errc::unknown_type: return "unknown-type";
  case Errc::length_mismatch: return "length-mismatch";
  case Errc::duplicate_field: return "duplicate-field";
  case Errc::misordered_field: return "misordered-field";
  case Errc::missing_field: return "missing-field";
  case Errc::invalid_field: return "invalid-field";
  case Errc::oversize_packet: return "oversize-packet";
  case Errc::oversize_construct: return "oversize-construct";
  case Errc::empty_frame_list: return "empty-frame-list";
  case Errc::unknown_protocol: return "unknown-protocol";
  case Errc::size_mismatch: return "size-mismatch";
  case Errc::tag_mismatch: return "tag-mismatch";
  case Errc::bad_key_length: return "bad-key-length";
  case Errc::unknown_face: return "unknown-face";
  case Errc::duplicate_registration: return "duplicate-registration";
  case Errc::bind_failure: return "bind-failure";
  case Errc::connect_failure: return "connect-failure";
  case Errc::face_closed: return "face-closed";
  case Errc::timeout: return "timeout";
  case Errc::parse_error: return "parse-error";
  case Errc::validation_error: return "validation-error";
  case Errc::io_error: return "io-error";
  case Errc::usage_error: return "usage-error";
  }
  return "unknown";
}

} // namespace wharness
