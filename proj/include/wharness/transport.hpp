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

#include "wharness/clock.hpp"
#include "wharness/endpoint.hpp"
#include "wharness/event_loop.hpp"
#include "wharness/face.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <random>
#include <thread>
#include <utility>

namespace wharness {

/// Socket buffer and datagram allowance; large enough for an 8800-byte packet plus framing.
inline constexpr std::size_t kMaxDatagram = 65507;

/// Parameters of a simulated wireless hop.
struct LinkProfile {
  Micros latency_mean_us = 0;
  Micros jitter_stddev_us = 0;
  double loss_probability = 0.0;
  std::uint64_t seed = 1;

  /// Throws Error(validation_error).
  void validate() const;

  friend bool operator==(const LinkProfile&, const LinkProfile&) = default;
};

/// Draws per-packet fate (drop or delay) for one direction of a simulated link.
class LinkModel {
public:
  explicit LinkModel(const LinkProfile& profile, std::uint64_t stream = 0);

  /// std::nullopt means the packet is lost; otherwise the one-way delay.
  std::optional<Micros> next_delay();

private:
  LinkProfile m_profile;
  std::mt19937_64 m_rng;
};

/// UDP face on a connected datagram socket; a background thread receives.
class UdpFace final : public Face {
public:
  /// Throws bind_failure or connect_failure.
  static std::shared_ptr<UdpFace> open(const Endpoint& local, const Endpoint& remote);
  ~UdpFace() override;

  void send(BytesView packet) override;
  void close() override;
  bool is_open() const override { return m_open.load(); }
  std::string describe() const override;

private:
  UdpFace(int fd, Endpoint local, Endpoint remote);
  void receive_loop();

  int m_fd;
  Endpoint m_local;
  Endpoint m_remote;
  std::atomic<bool> m_open{true};
  std::thread m_thread;
};

/// TCP face carrying one packet per 4-byte big-endian length prefix. Of the two
/// endpoints, the one that orders lower listens and the other connects.
class TcpFace final : public Face {
public:
  /// Blocks until connected or `timeout` elapses. Throws bind_failure, connect_failure, timeout.
  static std::shared_ptr<TcpFace> open(const Endpoint& local, const Endpoint& remote,
                                       Micros timeout = 10 * kMicrosPerSecond);
  ~TcpFace() override;

  void send(BytesView packet) override;
  void close() override;
  bool is_open() const override { return m_open.load(); }
  std::string describe() const override;

private:
  TcpFace(int fd, Endpoint local, Endpoint remote);
  void receive_loop();

  int m_fd;
  Endpoint m_local;
  Endpoint m_remote;
  std::mutex m_send_mutex;
  std::atomic<bool> m_open{true};
  std::thread m_thread;
};

/// Dispatches on local.scheme (udp or tcp).
std::shared_ptr<Face> open_face(const Endpoint& local, const Endpoint& remote);

/// Face on one side of a simulated link; deliveries are scheduled on the peer's loop.
class SimFace final : public Face, public std::enable_shared_from_this<SimFace> {
public:
  SimFace(std::string name, EventLoop& own_loop, LinkModel model);

  void send(BytesView packet) override;
  void close() override { m_open = false; }
  bool is_open() const override { return m_open; }
  std::string describe() const override { return "sim://" + m_name; }

private:
  friend std::pair<std::shared_ptr<Face>, std::shared_ptr<Face>>
  open_sim_link(const LinkProfile&, EventLoop&, EventLoop&, const std::string&);

  std::string m_name;
  EventLoop& m_loop;
  LinkModel m_model;
  std::weak_ptr<SimFace> m_peer;
  std::atomic<bool> m_open{true};
};

/// Two connected faces. `a_loop` and `b_loop` are the loops that own each face's receiver.
/// Identical seeds under a virtual clock give identical delivery traces.
std::pair<std::shared_ptr<Face>, std::shared_ptr<Face>>
open_sim_link(const LinkProfile& profile, EventLoop& a_loop, EventLoop& b_loop, const std::string& name = "link");

} // namespace wharness
