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
#include "wharness/endpoint.hpp"
#include "wharness/event_loop.hpp"
#include "wharness/transport.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace wharness {

/// Unconnected datagram socket: one send_to per datagram, one delivery per datagram.
class DatagramSocket {
public:
  using Receiver = std::function<void(const Endpoint& from, Bytes datagram)>;

  virtual ~DatagramSocket() = default;
  virtual void send_to(const Endpoint& to, BytesView datagram) = 0;
  virtual Endpoint local_endpoint() const = 0;
  virtual void close() = 0;

  void set_receiver(Receiver receiver);

protected:
  void deliver(const Endpoint& from, Bytes datagram);

private:
  std::mutex m_mutex;
  Receiver m_receiver;
};

class UdpSocket final : public DatagramSocket {
public:
  /// Throws Error(bind_failure).
  static std::shared_ptr<UdpSocket> open(const Endpoint& local);
  ~UdpSocket() override;

  void send_to(const Endpoint& to, BytesView datagram) override;
  Endpoint local_endpoint() const override { return m_local; }
  void close() override;

private:
  UdpSocket(int fd, Endpoint local);
  void receive_loop();

  int m_fd;
  Endpoint m_local;
  std::atomic<bool> m_open{true};
  std::thread m_thread;
};

/// In-process datagram network: every (source, destination) pair gets its own
/// seeded LinkModel, created in first-use order, so runs under a virtual clock are reproducible.
class SimNetwork {
public:
  explicit SimNetwork(LinkProfile profile);

  /// Throws Error(bind_failure) if the endpoint is taken.
  std::shared_ptr<DatagramSocket> bind(const Endpoint& local, EventLoop& loop);

private:
  class Socket;
  friend class Socket;

  void route(const Endpoint& from, const Endpoint& to, BytesView datagram, EventLoop& sender_loop);

  LinkProfile m_profile;
  std::mutex m_mutex;
  std::map<Endpoint, std::weak_ptr<Socket>> m_sockets;
  std::map<std::pair<Endpoint, Endpoint>, LinkModel> m_links;
};

} // namespace wharness
