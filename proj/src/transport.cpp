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

#include "wharness/transport.hpp"

#include "wharness/error.hpp"
#include "socket_util.hpp"

#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

namespace wharness {

void LinkProfile::validate() const
{
  if (latency_mean_us < 0)
    throw Error(Errc::validation_error, "latency_mean_us must be >= 0");
  if (jitter_stddev_us < 0)
    throw Error(Errc::validation_error, "jitter_stddev_us must be >= 0");
  if (!(loss_probability >= 0.0 && loss_probability <= 1.0))
    throw Error(Errc::validation_error, "loss_probability must be in [0, 1]");
}

LinkModel::LinkModel(const LinkProfile& profile, std::uint64_t stream)
  : m_profile(profile)
{
  profile.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(profile.seed), static_cast<std::uint32_t>(profile.seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  m_rng.seed(seq);
}

std::optional<Micros> LinkModel::next_delay()
{
  if (m_profile.loss_probability > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(m_rng) < m_profile.loss_probability)
      return std::nullopt;
  }
  double delay = static_cast<double>(m_profile.latency_mean_us);
  if (m_profile.jitter_stddev_us > 0) {
    std::normal_distribution<double> jitter(0.0, static_cast<double>(m_profile.jitter_stddev_us));
    delay += jitter(m_rng);
  }
  return static_cast<Micros>(std::llround(std::max(0.0, delay)));
}

// --- UDP ---------------------------------------------------------------------

UdpFace::UdpFace(int fd, Endpoint local, Endpoint remote)
  : m_fd(fd)
  , m_local(std::move(local))
  , m_remote(std::move(remote))
{
  m_thread = std::thread([this] { receive_loop(); });
}

UdpFace::~UdpFace()
{
  close();
}

std::shared_ptr<UdpFace> UdpFace::open(const Endpoint& local, const Endpoint& remote)
{
  auto local_addr = net::resolve(local);
  auto remote_addr = net::resolve(remote);

  int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0)
    throw Error(Errc::bind_failure, std::string("socket: ") + std::strerror(errno));
  net::set_buffers(fd, 4 * kMaxDatagram);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&local_addr), sizeof(local_addr)) != 0) {
    int err = errno;
    ::close(fd);
    throw Error(Errc::bind_failure, local.to_string() + ": " + std::strerror(err));
  }
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&remote_addr), sizeof(remote_addr)) != 0) {
    int err = errno;
    ::close(fd);
    throw Error(Errc::connect_failure, remote.to_string() + ": " + std::strerror(err));
  }
  return std::shared_ptr<UdpFace>(new UdpFace(fd, local, remote));
}

void UdpFace::send(BytesView packet)
{
  if (!m_open)
    throw Error(Errc::face_closed, describe());
  // Errors such as ECONNREFUSED from a peer that is not up yet count as loss.
  [[maybe_unused]] auto n = ::send(m_fd, packet.data(), packet.size(), MSG_NOSIGNAL);
}

void UdpFace::close()
{
  if (m_open.exchange(false)) {
    if (m_thread.joinable() && m_thread.get_id() != std::this_thread::get_id())
      m_thread.join();
    ::close(m_fd);
  }
}

std::string UdpFace::describe() const
{
  return m_local.to_string() + " -> " + m_remote.to_string();
}

void UdpFace::receive_loop()
{
  Bytes buffer(kMaxDatagram);
  while (m_open) {
    pollfd pfd{m_fd, POLLIN, 0};
    int ready = ::poll(&pfd, 1, 50);
    if (ready <= 0)
      continue;
    auto n = ::recv(m_fd, buffer.data(), buffer.size(), 0);
    if (n <= 0)
      continue;
    deliver(Bytes(buffer.begin(), buffer.begin() + n));
  }
}

// --- TCP ---------------------------------------------------------------------

TcpFace::TcpFace(int fd, Endpoint local, Endpoint remote)
  : m_fd(fd)
  , m_local(std::move(local))
  , m_remote(std::move(remote))
{
  int one = 1;
  ::setsockopt(m_fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  m_thread = std::thread([this] { receive_loop(); });
}

TcpFace::~TcpFace()
{
  close();
}

std::shared_ptr<TcpFace> TcpFace::open(const Endpoint& local, const Endpoint& remote, Micros timeout)
{
  auto local_addr = net::resolve(local);
  auto remote_addr = net::resolve(remote);
  SteadyClock clock;
  auto deadline = clock.now() + timeout;

  bool listener = std::tie(local.host, local.port) < std::tie(remote.host, remote.port);
  if (listener) {
    int lfd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (lfd < 0)
      throw Error(Errc::bind_failure, std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(lfd, reinterpret_cast<const sockaddr*>(&local_addr), sizeof(local_addr)) != 0 ||
        ::listen(lfd, 1) != 0) {
      int err = errno;
      ::close(lfd);
      throw Error(Errc::bind_failure, local.to_string() + ": " + std::strerror(err));
    }
    while (true) {
      auto left = deadline - clock.now();
      if (left <= 0) {
        ::close(lfd);
        throw Error(Errc::timeout, "no connection on " + local.to_string());
      }
      pollfd pfd{lfd, POLLIN, 0};
      if (::poll(&pfd, 1, static_cast<int>(std::min<Micros>(left / 1000 + 1, 100))) <= 0)
        continue;
      int fd = ::accept4(lfd, nullptr, nullptr, SOCK_CLOEXEC);
      if (fd < 0)
        continue;
      ::close(lfd);
      net::set_buffers(fd, 4 * kMaxDatagram);
      return std::shared_ptr<TcpFace>(new TcpFace(fd, local, remote));
    }
  }

  while (true) {
    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0)
      throw Error(Errc::connect_failure, std::string("socket: ") + std::strerror(errno));
    net::set_buffers(fd, 4 * kMaxDatagram);
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&remote_addr), sizeof(remote_addr)) == 0)
      return std::shared_ptr<TcpFace>(new TcpFace(fd, local, remote));
    int err = errno;
    ::close(fd);
    if (clock.now() >= deadline)
      throw Error(Errc::connect_failure, remote.to_string() + ": " + std::strerror(err));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void TcpFace::send(BytesView packet)
{
  if (!m_open)
    throw Error(Errc::face_closed, describe());
  Bytes frame;
  frame.reserve(4 + packet.size());
  put_u32(frame, static_cast<std::uint32_t>(packet.size()));
  frame.insert(frame.end(), packet.begin(), packet.end());

  std::lock_guard lock(m_send_mutex);
  std::size_t sent = 0;
  while (sent < frame.size()) {
    auto n = ::send(m_fd, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      m_open = false;
      throw Error(Errc::face_closed, describe() + ": " + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void TcpFace::close()
{
  bool was_open = m_open.exchange(false);
  if (m_thread.joinable() && m_thread.get_id() != std::this_thread::get_id()) {
    ::shutdown(m_fd, SHUT_RDWR);
    m_thread.join();
    ::close(m_fd);
  }
  (void)was_open;
}

std::string TcpFace::describe() const
{
  return m_local.to_string() + " -> " + m_remote.to_string();
}

void TcpFace::receive_loop()
{
  auto read_exact = [this](std::uint8_t* dst, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
      pollfd pfd{m_fd, POLLIN, 0};
      int ready = ::poll(&pfd, 1, 50);
      if (!m_open)
        return false;
      if (ready <= 0)
        continue;
      auto n = ::recv(m_fd, dst + got, len - got, 0);
      if (n == 0)
        return false;
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN)
          continue;
        return false;
      }
      got += static_cast<std::size_t>(n);
    }
    return true;
  };

  std::uint8_t header[4];
  while (m_open) {
    if (!read_exact(header, 4))
      break;
    auto len = get_u32(header);
    if (len > kMaxDatagram)
      break;
    Bytes packet(len);
    if (!read_exact(packet.data(), len))
      break;
    deliver(std::move(packet));
  }
  m_open = false;
}

std::shared_ptr<Face> open_face(const Endpoint& local, const Endpoint& remote)
{
  switch (local.scheme) {
  case Scheme::udp:
    return UdpFace::open(local, remote);
  case Scheme::tcp:
    return TcpFace::open(local, remote);
  case Scheme::sim:
    break;
  }
  throw Error(Errc::validation_error, "open_face needs a udp or tcp endpoint; use open_sim_link for sim");
}

// --- simulated link -------------------------------------------------------------

SimFace::SimFace(std::string name, EventLoop& own_loop, LinkModel model)
  : m_name(std::move(name))
  , m_loop(own_loop)
  , m_model(std::move(model))
{}

void SimFace::send(BytesView packet)
{
  if (!m_open)
    throw Error(Errc::face_closed, describe());
  auto peer = m_peer.lock();
  if (!peer)
    return;
  auto delay = m_model.next_delay();
  if (!delay)
    return;
  std::weak_ptr<SimFace> target = peer;
  peer->m_loop.schedule_at(m_loop.now() + *delay, [target, bytes = Bytes(packet.begin(), packet.end())]() mutable {
    if (auto p = target.lock(); p && p->is_open())
      p->deliver(std::move(bytes));
  });
}

std::pair<std::shared_ptr<Face>, std::shared_ptr<Face>>
open_sim_link(const LinkProfile& profile, EventLoop& a_loop, EventLoop& b_loop, const std::string& name)
{
  auto a = std::make_shared<SimFace>(name + "/a", a_loop, LinkModel(profile, 0));
  auto b = std::make_shared<SimFace>(name + "/b", b_loop, LinkModel(profile, 1));
  a->m_peer = b;
  b->m_peer = a;
  return {a, b};
}

} // namespace wharness
