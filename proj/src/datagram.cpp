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

#include "wharness/datagram.hpp"

#include "socket_util.hpp"

#include <poll.h>
#include <unistd.h>

#include <cerrno>

namespace wharness {

void DatagramSocket::set_receiver(Receiver receiver)
{
  std::lock_guard lock(m_mutex);
  m_receiver = std::move(receiver);
}

void DatagramSocket::deliver(const Endpoint& from, Bytes datagram)
{
  Receiver r;
  {
    std::lock_guard lock(m_mutex);
    r = m_receiver;
  }
  if (r)
    r(from, std::move(datagram));
}

// --- UDP ---------------------------------------------------------------------

std::shared_ptr<UdpSocket> UdpSocket::open(const Endpoint& local)
{
  auto addr = net::resolve(local);
  int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0)
    throw Error(Errc::bind_failure, std::string("socket: ") + std::strerror(errno));
  net::set_buffers(fd, static_cast<int>(4 * kMaxDatagram));
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(fd);
    throw Error(Errc::bind_failure, local.to_string() + ": " + std::strerror(err));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  return std::shared_ptr<UdpSocket>(new UdpSocket(fd, net::to_endpoint(bound, Scheme::udp)));
}

UdpSocket::UdpSocket(int fd, Endpoint local)
  : m_fd(fd)
  , m_local(std::move(local))
{
  m_thread = std::thread([this] { receive_loop(); });
}

UdpSocket::~UdpSocket()
{
  close();
}

void UdpSocket::send_to(const Endpoint& to, BytesView datagram)
{
  if (!m_open)
    throw Error(Errc::face_closed, m_local.to_string());
  auto addr = net::resolve(to);
  [[maybe_unused]] auto n = ::sendto(m_fd, datagram.data(), datagram.size(), MSG_NOSIGNAL,
                                     reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
}

void UdpSocket::close()
{
  if (m_open.exchange(false)) {
    if (m_thread.joinable())
      m_thread.join();
    ::close(m_fd);
  }
}

void UdpSocket::receive_loop()
{
  Bytes buffer(kMaxDatagram);
  while (m_open) {
    pollfd pfd{m_fd, POLLIN, 0};
    if (::poll(&pfd, 1, 50) <= 0)
      continue;
    sockaddr_in from{};
    socklen_t len = sizeof(from);
    auto n = ::recvfrom(m_fd, buffer.data(), buffer.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
    if (n < 0)
      continue;
    deliver(net::to_endpoint(from, Scheme::udp), Bytes(buffer.begin(), buffer.begin() + n));
  }
}

// --- simulated network -----------------------------------------------------------

class SimNetwork::Socket final : public DatagramSocket {
public:
  Socket(SimNetwork& net, Endpoint local, EventLoop& loop)
    : m_net(net)
    , m_local(std::move(local))
    , m_loop(loop)
  {}

  void send_to(const Endpoint& to, BytesView datagram) override
  {
    if (!m_open)
      throw Error(Errc::face_closed, m_local.to_string());
    m_net.route(m_local, to, datagram, m_loop);
  }
  Endpoint local_endpoint() const override { return m_local; }
  void close() override { m_open = false; }

  bool is_open() const { return m_open; }
  EventLoop& loop() { return m_loop; }
  void receive(const Endpoint& from, Bytes datagram) { deliver(from, std::move(datagram)); }

private:
  SimNetwork& m_net;
  Endpoint m_local;
  EventLoop& m_loop;
  std::atomic<bool> m_open{true};
};

SimNetwork::SimNetwork(LinkProfile profile)
  : m_profile(profile)
{
  m_profile.validate();
}

std::shared_ptr<DatagramSocket> SimNetwork::bind(const Endpoint& local, EventLoop& loop)
{
  std::lock_guard lock(m_mutex);
  if (auto it = m_sockets.find(local); it != m_sockets.end() && !it->second.expired())
    throw Error(Errc::bind_failure, local.to_string() + " already bound");
  auto socket = std::make_shared<Socket>(*this, local, loop);
  m_sockets[local] = socket;
  return socket;
}

void SimNetwork::route(const Endpoint& from, const Endpoint& to, BytesView datagram, EventLoop& sender_loop)
{
  std::shared_ptr<Socket> target;
  std::optional<Micros> delay;
  {
    std::lock_guard lock(m_mutex);
    auto it = m_sockets.find(to);
    if (it == m_sockets.end())
      return;
    target = it->second.lock();
    if (!target)
      return;
    auto key = std::make_pair(from, to);
    auto link = m_links.find(key);
    if (link == m_links.end())
      link = m_links.emplace(key, LinkModel(m_profile, m_links.size())).first;
    delay = link->second.next_delay();
  }
  if (!delay)
    return;
  std::weak_ptr<Socket> weak = target;
  target->loop().schedule_at(sender_loop.now() + *delay,
                             [weak, from, bytes = Bytes(datagram.begin(), datagram.end())]() mutable {
                               if (auto s = weak.lock(); s && s->is_open())
                                 s->receive(from, std::move(bytes));
                             });
}

} // namespace wharness
