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

#include "wharness/face.hpp"

#include "wharness/error.hpp"

namespace wharness {

void Face::set_receiver(Receiver receiver)
{
  std::lock_guard lock(m_receiver_mutex);
  m_receiver = std::move(receiver);
}

void Face::deliver(Bytes packet)
{
  Receiver r;
  {
    std::lock_guard lock(m_receiver_mutex);
    r = m_receiver;
  }
  if (r)
    r(std::move(packet));
}

void AppFace::send(BytesView packet)
{
  if (!m_open)
    throw Error(Errc::face_closed, "app face closed");
  m_sink(packet);
}

} // namespace wharness
