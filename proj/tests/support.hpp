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
#include "wharness/error.hpp"
#include "wharness/face.hpp"
#include "wharness/name.hpp"

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace test {

using namespace wharness;

/// Face that records every packet sent on it.
class RecordingFace final : public Face {
public:
  void send(BytesView packet) override
  {
    if (!m_open)
      throw Error(Errc::face_closed, "recording face");
    sent.emplace_back(packet.begin(), packet.end());
  }
  void close() override { m_open = false; }
  bool is_open() const override { return m_open; }
  std::string describe() const override { return "test://recording"; }

  std::vector<Bytes> sent;

private:
  bool m_open = true;
};

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n)
{
  Bytes out(n);
  for (auto& b : out)
    b = static_cast<std::uint8_t>(rng());
  return out;
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random valid name with up to max_components arbitrary-byte components.
inline Name random_name(std::mt19937_64& rng, std::size_t max_components = 4, std::size_t max_component = 12)
{
  std::vector<Name::Component> comps(uniform(rng, 1, max_components));
  for (auto& c : comps)
    c = random_bytes(rng, uniform(rng, 1, max_component));
  return Name(comps);
}

/// Fresh empty directory under the build tree's temp area.
inline std::filesystem::path temp_dir(const std::string& tag)
{
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("wharness-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename F>
Errc error_code_of(F&& f)
{
  try {
    f();
  }
  catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io_error;
}

} // namespace test
