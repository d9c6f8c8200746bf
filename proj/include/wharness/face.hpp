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

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>

namespace wharness {

using FaceId = std::uint64_t;

/// Point-to-point packet channel. Each send() carries one whole packet; each
/// delivery to the receiver is one whole packet.
class Face {
public:
  using Receiver = std::function<void(Bytes)>;

  virtual ~Face() = default;

  /// Throws Error(face_closed) after close(). Datagram faces may drop silently.
  virtual void send(BytesView packet) = 0;
  virtual void close() = 0;
  virtual bool is_open() const = 0;
  virtual std::string describe() const = 0;

  /// Called from the face's I/O context (a background thread for sockets).
  void set_receiver(Receiver receiver);

protected:
  void deliver(Bytes packet);

private:
  std::mutex m_receiver_mutex;
  Receiver m_receiver;
};

/// In-process face to a local application: packets "sent" on it are handed to a callback.
class AppFace final : public Face {
public:
  using Sink = std::function<void(BytesView)>;

  explicit AppFace(Sink sink) : m_sink(std::move(sink)) {}

  void send(BytesView packet) override;
  void close() override { m_open = false; }
  bool is_open() const override { return m_open; }
  std::string describe() const override { return "app://local"; }

private:
  Sink m_sink;
  bool m_open = true;
};

} // namespace wharness
