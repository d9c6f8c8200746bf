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

#include "wharness/experiment.hpp"

#include "wharness/datagram.hpp"
#include "wharness/error.hpp"
#include "wharness/forwarder.hpp"
#include "wharness/transport.hpp"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <ctime>
#include <deque>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <thread>

namespace wharness::bench {

namespace fs = std::filesystem;

std::string_view to_string(Arm arm) noexcept
{
  switch (arm) {
  case Arm::ndn_udp:
    return "ndn-udp";
  case Arm::ndn_tcp:
    return "ndn-tcp";
  case Arm::pubsub:
    return "pubsub";
  }
  return "?";
}

Arm parse_arm(std::string_view text)
{
  for (auto arm : {Arm::ndn_udp, Arm::ndn_tcp, Arm::pubsub})
    if (text == to_string(arm))
      return arm;
  throw Error(Errc::usage_error, "unknown arm '" + std::string(text) + "' (expected ndn-udp, ndn-tcp or pubsub)");
}

namespace {

constexpr Micros kLeadTime = 300 * kMicrosPerMilli;
constexpr Micros kProcessLeadTime = 2 * kMicrosPerSecond;
constexpr Micros kSubscribeLead = 200 * kMicrosPerMilli;
constexpr Micros kPubSubDrain = 200 * kMicrosPerMilli;
constexpr Micros kExpireInterval = 50 * kMicrosPerMilli;

/// One half of a shared datagram socket; the owning node routes each datagram to one view.
class SocketView final : public DatagramSocket {
public:
  explicit SocketView(std::shared_ptr<DatagramSocket> inner)
    : m_inner(std::move(inner))
  {}

  void send_to(const Endpoint& to, BytesView datagram) override { m_inner->send_to(to, datagram); }
  Endpoint local_endpoint() const override { return m_inner->local_endpoint(); }
  void close() override {}
  void push(const Endpoint& from, Bytes datagram) { deliver(from, std::move(datagram)); }

private:
  std::shared_ptr<DatagramSocket> m_inner;
};

struct ConsumerSlot {
  std::string label;
  Micros period_us = 0;
  traffic::ArrivalLog log;
  std::unique_ptr<traffic::Consumer> ndn;
  std::unique_ptr<traffic::PubSubConsumer> ps;
};

Micros cpu_time(clockid_t id)
{
  timespec ts{};
  ::clock_gettime(id, &ts);
  return static_cast<Micros>(ts.tv_sec) * kMicrosPerSecond + ts.tv_nsec / 1000;
}

struct Node {
  const NodeConfig* config = nullptr;
  EventLoop* loop = nullptr;
  std::unique_ptr<EventLoop> own_loop;
  std::unique_ptr<Forwarder> fwd;
  std::map<std::string, FaceId> face_ids;
  std::vector<std::shared_ptr<Face>> faces;
  std::vector<std::unique_ptr<traffic::Producer>> producers;
  std::deque<ConsumerSlot> consumers;

  std::shared_ptr<DatagramSocket> ps_socket;
  std::shared_ptr<SocketView> pub_view;
  std::map<Endpoint, std::shared_ptr<SocketView>> sub_views;
  std::unique_ptr<pubsub::Publisher> publisher;
  std::map<Endpoint, std::unique_ptr<pubsub::Subscriber>> subscribers;
  std::vector<std::unique_ptr<traffic::PubSubProducer>> ps_producers;

  Micros cpu_last_wall = -1;
  Micros cpu_last = 0;
  std::vector<double> cpu_samples;

  void shutdown()
  {
    for (auto& f : faces)
      f->close();
    if (ps_socket)
      ps_socket->close();
  }
};

struct PlannedConsumer {
  std::size_t stream;
  std::string node;
  std::string label;
};

struct Plan {
  TopologyConfig cfg;
  std::vector<PlannedConsumer> consumers;
  Micros drain = 0;
};

bool is_ndn(Arm arm) { return arm != Arm::pubsub; }

Plan make_plan(const TopologyConfig& config, const RunOptions& opt)
{
  if (!std::isfinite(opt.duration_s) || opt.duration_s < 0)
    throw Error(Errc::validation_error, "duration must be a non-negative number of seconds");
  if (opt.simulated && opt.processes)
    throw Error(Errc::validation_error, "--sim and --processes cannot be combined");

  Plan plan{config, {}, 0};
  config.validate();
  for (auto& s : plan.cfg.streams) {
    s.spec.serialization = opt.serialization;
    plan.drain = std::max<Micros>(plan.drain, static_cast<Micros>(s.spec.interest_lifetime_ms) * kMicrosPerMilli);
    for (const auto& c : s.consumers) {
      auto label = s.spec.name.to_uri();
      if (s.consumers.size() > 1)
        label += "@" + c;
      plan.consumers.push_back({static_cast<std::size_t>(&s - plan.cfg.streams.data()), c, label});
    }
  }
  if (!is_ndn(opt.arm))
    plan.drain = kPubSubDrain;

  if (is_ndn(opt.arm)) {
    for (auto& f : plan.cfg.faces) {
      if (!opt.simulated && f.local.scheme == Scheme::sim)
        throw Error(Errc::validation_error, "[face:" + f.id + "]: sim:// faces need --sim");
      if (opt.arm == Arm::ndn_tcp && f.local.scheme == Scheme::udp) {
        f.local.scheme = Scheme::tcp;
        f.remote.scheme = Scheme::tcp;
      }
    }
  }
  else {
    std::set<std::string> involved;
    for (const auto& s : plan.cfg.streams) {
      involved.insert(s.producer);
      involved.insert(s.consumers.begin(), s.consumers.end());
    }
    for (const auto& n : involved)
      if (!plan.cfg.node(n)->pubsub)
        throw Error(Errc::validation_error, "[node:" + n + "]: the pubsub arm needs a pubsub endpoint");
  }
  return plan;
}

/// Runs fn(t) at first, first + period, ... while t < until.
void every(EventLoop& loop, Micros first, Micros period, Micros until, std::function<void(Micros)> fn)
{
  if (first >= until)
    return;
  loop.schedule_at(first, [&loop, first, period, until, fn = std::move(fn)]() mutable {
    fn(first);
    every(loop, first + period, period, until, std::move(fn));
  });
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t label_hash(const std::string& s)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Harness {
public:
  /// `members` lists the nodes hosted here; empty means all.
  Harness(const Plan& plan, const RunOptions& opt, Clock& clock, std::set<std::string> members)
    : m_plan(plan)
    , m_opt(opt)
    , m_clock(clock)
  {
    if (opt.simulated)
      m_shared_loop = std::make_unique<EventLoop>(clock);
    for (const auto& nc : plan.cfg.nodes) {
      if (!members.empty() && !members.contains(nc.name))
        continue;
      auto& n = m_nodes.emplace_back();
      n.config = &nc;
      if (m_shared_loop) {
        n.loop = m_shared_loop.get();
      }
      else {
        n.own_loop = std::make_unique<EventLoop>(clock);
        n.loop = n.own_loop.get();
      }
      n.fwd = std::make_unique<Forwarder>(ForwarderOptions{nc.cs_capacity});
      m_by_name[nc.name] = &n;
    }
  }

  Harness(const Harness&) = delete;
  Harness& operator=(const Harness&) = delete;

  ~Harness()
  {
    for (auto& n : m_nodes)
      n.shutdown();
  }

  void build()
  {
    if (is_ndn(m_opt.arm))
      build_faces();
    else
      build_pubsub();
    build_workload();
  }

  /// Schedules the workload; returns the hard end of the run.
  Micros start(Micros t0)
  {
    auto duration = static_cast<Micros>(std::llround(m_opt.duration_s * static_cast<double>(kMicrosPerSecond)));
    m_stop = t0 + duration;
    m_hard_end = m_stop + m_plan.drain;

    for (auto& n : m_nodes) {
      for (auto& p : n.producers)
        p->start(t0, m_stop);
      for (auto& p : n.ps_producers)
        p->start(t0, m_stop);
      for (auto& c : n.consumers) {
        if (c.ndn)
          c.ndn->start(t0 + c.period_us / 2, m_stop);
        else
          c.ps->start(std::max(m_clock.now(), t0 - kSubscribeLead));
      }
      if (is_ndn(m_opt.arm)) {
        auto* fwd = n.fwd.get();
        every(*n.loop, t0, kExpireInterval, m_hard_end, [fwd](Micros now) { fwd->expire(now); });
      }
      if (!m_opt.simulated) {
        auto id = m_opt.processes ? CLOCK_PROCESS_CPUTIME_ID : CLOCK_THREAD_CPUTIME_ID;
        auto* node = &n;
        auto* clock = &m_clock;
        every(*n.loop, t0, kMicrosPerSecond, m_hard_end, [node, clock, id](Micros) {
          auto wall = clock->now();
          auto cpu = cpu_time(id);
          if (node->cpu_last_wall >= 0 && wall > node->cpu_last_wall)
            node->cpu_samples.push_back(100.0 * static_cast<double>(cpu - node->cpu_last) /
                                        static_cast<double>(wall - node->cpu_last_wall));
          node->cpu_last_wall = wall;
          node->cpu_last = cpu;
        });
      }
    }
    return m_hard_end;
  }

  void run()
  {
    if (m_shared_loop) {
      m_shared_loop->run_until(m_hard_end);
    }
    else {
      std::vector<std::thread> threads;
      for (auto& n : m_nodes)
        threads.emplace_back([loop = n.loop, end = m_hard_end] { loop->run_until(end); });

      while (m_clock.now() < m_stop)
        std::this_thread::sleep_for(std::chrono::microseconds(std::min<Micros>(m_stop - m_clock.now(), 20000)));
      while (m_clock.now() < m_hard_end && is_ndn(m_opt.arm) && outstanding() > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      for (auto& n : m_nodes)
        n.loop->stop();
      for (auto& t : threads)
        t.join();
    }
    for (auto& n : m_nodes)
      n.shutdown();
    auto end = m_clock.now();
    for (auto& n : m_nodes)
      for (auto& c : n.consumers)
        if (c.ndn)
          c.ndn->finalize(end);
  }

  /// Appends this harness's consumers (keyed by label) and counters.
  void collect(std::map<std::string, StreamReport>& streams, std::vector<CounterRow>& counters) const
  {
    for (const auto& n : m_nodes) {
      const auto& name = n.config->name;
      if (is_ndn(m_opt.arm))
        for (const auto& [k, v] : n.fwd->counters().items())
          counters.push_back({name, k, static_cast<double>(v)});
      for (std::size_t i = 0; i < n.producers.size(); ++i) {
        auto uri = m_producer_names.at(&n)[i];
        counters.push_back({name, "payloads_generated:" + uri, static_cast<double>(n.producers[i]->payloads_generated())});
        counters.push_back({name, "requests_served:" + uri, static_cast<double>(n.producers[i]->requests_served())});
      }
      for (std::size_t i = 0; i < n.ps_producers.size(); ++i) {
        auto uri = m_producer_names.at(&n)[i];
        counters.push_back({name, "published:" + uri, static_cast<double>(n.ps_producers[i]->published())});
      }
      if (n.publisher)
        counters.push_back({name, "datagrams_sent", static_cast<double>(n.publisher->datagrams_sent())});
      for (const auto& [ep, sub] : n.subscribers)
        counters.push_back({name, "foreign_drops:" + ep.to_string(), static_cast<double>(sub->foreign_drops())});
      for (const auto& c : n.consumers) {
        if (c.ndn) {
          counters.push_back({name, "interests_sent:" + c.label, static_cast<double>(c.ndn->interests_sent())});
          counters.push_back({name, "timeouts:" + c.label, static_cast<double>(c.ndn->timeouts())});
        }
        else {
          counters.push_back({name, "subscribe_failed:" + c.label, c.ps->failed() ? 1.0 : 0.0});
        }
        streams[c.label] = StreamReport{c.label, c.period_us, c.log.records()};
      }
      if (!n.cpu_samples.empty()) {
        double sum = 0;
        for (double v : n.cpu_samples)
          sum += v;
        counters.push_back({name, "cpu_percent_mean", sum / static_cast<double>(n.cpu_samples.size())});
      }
    }
  }

private:
  int outstanding() const
  {
    int total = 0;
    for (const auto& n : m_nodes)
      for (const auto& c : n.consumers)
        if (c.ndn)
          total += c.ndn->outstanding();
    return total;
  }

  static std::string where(const FaceConfig& f) { return "node '" + f.node + "' face '" + f.id + "': "; }

  void attach(Node& n, const FaceConfig& f, std::shared_ptr<Face> face)
  {
    auto id = n.fwd->add_face(face);
    n.face_ids[f.id] = id;
    n.faces.push_back(face);
    auto* loop = n.loop;
    auto* fwd = n.fwd.get();
    face->set_receiver([loop, fwd, id](Bytes packet) {
      loop->post([loop, fwd, id, packet = std::move(packet)] { fwd->on_packet(id, packet, loop->now()); });
    });
  }

  void build_faces()
  {
    const auto& cfg = m_plan.cfg;
    if (m_opt.simulated) {
      std::set<std::string> done;
      for (const auto& a : cfg.faces) {
        if (done.contains(a.id))
          continue;
        const FaceConfig* b = nullptr;
        for (const auto& other : cfg.faces)
          if (&other != &a && !done.contains(other.id) && other.local == a.remote && other.remote == a.local)
            b = &other;
        if (!b)
          throw Error(Errc::validation_error, "[face:" + a.id + "]: no peer face for a simulated link");
        done.insert(a.id);
        done.insert(b->id);
        auto profile = cfg.link_profile(a.link.empty() ? b->link : a.link);
        profile.seed = mix_seed(profile.seed, m_opt.seed);
        auto& na = *m_by_name.at(a.node);
        auto& nb = *m_by_name.at(b->node);
        auto [fa, fb] = open_sim_link(profile, *na.loop, *nb.loop, a.id + "|" + b->id);
        attach(na, a, fa);
        attach(nb, *b, fb);
      }
    }
    else {
      std::vector<std::pair<const FaceConfig*, std::future<std::shared_ptr<Face>>>> pending;
      for (const auto& f : cfg.faces) {
        if (!m_by_name.contains(f.node))
          continue;
        auto policy = f.local.scheme == Scheme::tcp ? std::launch::async : std::launch::deferred;
        pending.emplace_back(&f, std::async(policy, [&f] { return open_face(f.local, f.remote); }));
      }
      std::optional<Error> failure;
      for (auto& [f, fut] : pending) {
        try {
          attach(*m_by_name.at(f->node), *f, fut.get());
        }
        catch (const Error& e) {
          if (!failure)
            failure = Error(e.code(), where(*f) + e.detail());
        }
      }
      if (failure)
        throw *failure;
    }
    for (const auto& r : cfg.routes) {
      auto it = m_by_name.find(r.node);
      if (it == m_by_name.end())
        continue;
      it->second->fwd->add_route(r.prefix, it->second->face_ids.at(r.face));
    }
  }

  void build_pubsub()
  {
    const auto& cfg = m_plan.cfg;
    if (m_opt.simulated) {
      auto profile = cfg.link_profile("default");
      profile.seed = mix_seed(profile.seed, m_opt.seed);
      m_simnet = std::make_unique<SimNetwork>(profile);
    }
    for (auto& n : m_nodes) {
      std::set<Endpoint> publishers;
      bool publishes = false;
      for (const auto& s : cfg.streams) {
        if (s.producer == n.config->name)
          publishes = true;
        for (const auto& c : s.consumers)
          if (c == n.config->name)
            publishers.insert(*cfg.node(s.producer)->pubsub);
      }
      if (!publishes && publishers.empty())
        continue;
      const auto& ep = *n.config->pubsub;
      try {
        if (m_simnet)
          n.ps_socket = m_simnet->bind(ep, *n.loop);
        else
          n.ps_socket = UdpSocket::open(ep);
      }
      catch (const Error& e) {
        throw Error(e.code(), "node '" + n.config->name + "' pubsub socket: " + e.detail());
      }
      n.pub_view = std::make_shared<SocketView>(n.ps_socket);
      for (const auto& p : publishers)
        n.sub_views[p] = std::make_shared<SocketView>(n.ps_socket);
      n.ps_socket->set_receiver([pub = n.pub_view, subs = n.sub_views](const Endpoint& from, Bytes d) {
        if (d.empty())
          return;
        if (d[0] == pubsub::kSubscribeMarker) {
          pub->push(from, std::move(d));
          return;
        }
        auto it = subs.find(from);
        if (it == subs.end() && subs.size() == 1)
          it = subs.begin();
        if (it != subs.end())
          it->second->push(from, std::move(d));
      });
      if (publishes)
        n.publisher = std::make_unique<pubsub::Publisher>(*n.loop, n.pub_view);
      for (const auto& [p, view] : n.sub_views)
        n.subscribers[p] = std::make_unique<pubsub::Subscriber>(*n.loop, view, p);
    }
  }

  void build_workload()
  {
    const auto& cfg = m_plan.cfg;
    for (const auto& s : cfg.streams) {
      auto it = m_by_name.find(s.producer);
      if (it == m_by_name.end())
        continue;
      auto& n = *it->second;
      if (is_ndn(m_opt.arm))
        n.producers.push_back(std::make_unique<traffic::Producer>(s.spec, *n.loop, *n.fwd, m_opt.seed));
      else
        n.ps_producers.push_back(std::make_unique<traffic::PubSubProducer>(s.spec, *n.loop, *n.publisher, m_opt.seed));
      m_producer_names[&n].push_back(s.spec.name.to_uri());
    }
    for (const auto& pc : m_plan.consumers) {
      auto it = m_by_name.find(pc.node);
      if (it == m_by_name.end())
        continue;
      auto& n = *it->second;
      const auto& s = cfg.streams[pc.stream];
      auto& slot = n.consumers.emplace_back();
      slot.label = pc.label;
      slot.period_us = s.spec.period_us;
      if (is_ndn(m_opt.arm)) {
        slot.ndn = std::make_unique<traffic::Consumer>(s.spec, *n.loop, *n.fwd, slot.log,
                                                       mix_seed(m_opt.seed, label_hash(pc.label)), pc.label);
      }
      else {
        auto& sub = *n.subscribers.at(*cfg.node(s.producer)->pubsub);
        slot.ps = std::make_unique<traffic::PubSubConsumer>(s.spec, *n.loop, sub, slot.log, pc.label);
      }
    }
  }

  const Plan& m_plan;
  const RunOptions& m_opt;
  Clock& m_clock;
  std::unique_ptr<EventLoop> m_shared_loop;
  std::unique_ptr<SimNetwork> m_simnet;
  std::deque<Node> m_nodes;
  std::map<std::string, Node*> m_by_name;
  std::map<const Node*, std::vector<std::string>> m_producer_names;
  Micros m_stop = 0;
  Micros m_hard_end = 0;
};

MetricsReport assemble(const Plan& plan, const RunOptions& opt, Micros t0,
                       std::map<std::string, StreamReport> streams, std::vector<CounterRow> counters)
{
  MetricsReport report;
  report.arm = std::string(to_string(opt.arm));
  report.serialization = opt.serialization;
  report.duration_s = opt.duration_s;
  report.run_start_us = t0;
  report.warmup_us = kWarmupUs;
  for (const auto& pc : plan.consumers) {
    auto it = streams.find(pc.label);
    if (it == streams.end())
      report.streams.push_back(StreamReport{pc.label, plan.cfg.streams[pc.stream].spec.period_us, {}});
    else
      report.streams.push_back(std::move(it->second));
  }
  report.counters = std::move(counters);
  if (opt.arm == Arm::pubsub && opt.serialization == pubsub::PayloadMode::bytes)
    report.warnings.push_back("pubsub with bytes serialization is not a reference configuration");
  return report;
}

MetricsReport run_in_process(const Plan& plan, const RunOptions& opt)
{
  std::unique_ptr<Clock> clock;
  if (opt.simulated)
    clock = std::make_unique<VirtualClock>();
  else
    clock = std::make_unique<SteadyClock>();
  Harness h(plan, opt, *clock, {});
  h.build();
  auto t0 = clock->now() + kLeadTime;
  h.start(t0);
  h.run();
  std::map<std::string, StreamReport> streams;
  std::vector<CounterRow> counters;
  h.collect(streams, counters);
  return assemble(plan, opt, t0, std::move(streams), std::move(counters));
}

using nlohmann::json;

json to_json(const std::map<std::string, StreamReport>& streams, const std::vector<CounterRow>& counters)
{
  json out;
  out["streams"] = json::array();
  for (const auto& [label, st] : streams) {
    json rows = json::array();
    for (const auto& a : st.arrivals)
      rows.push_back({a.seq, a.send_ts_us ? json(*a.send_ts_us) : json(nullptr), a.recv_ts_us, a.payload_size,
                      a.wire_size});
    out["streams"].push_back({{"label", label}, {"period_us", st.period_us}, {"arrivals", rows}});
  }
  out["counters"] = json::array();
  for (const auto& c : counters)
    out["counters"].push_back({c.node, c.counter, c.value});
  return out;
}

void from_json(const json& in, std::map<std::string, StreamReport>& streams, std::vector<CounterRow>& counters)
{
  for (const auto& s : in.at("streams")) {
    StreamReport st{s.at("label").get<std::string>(), s.at("period_us").get<Micros>(), {}};
    for (const auto& r : s.at("arrivals")) {
      traffic::ArrivalRecord a;
      a.stream = st.label;
      a.seq = r.at(0).get<std::uint64_t>();
      if (!r.at(1).is_null())
        a.send_ts_us = r.at(1).get<Micros>();
      a.recv_ts_us = r.at(2).get<Micros>();
      a.payload_size = r.at(3).get<std::size_t>();
      a.wire_size = r.at(4).get<std::size_t>();
      st.arrivals.push_back(std::move(a));
    }
    streams[st.label] = std::move(st);
  }
  for (const auto& c : in.at("counters"))
    counters.push_back({c.at(0).get<std::string>(), c.at(1).get<std::string>(), c.at(2).get<double>()});
}

[[noreturn]] void child_main(const Plan& plan, const RunOptions& opt, const std::string& node, Micros t0,
                             const fs::path& out_file)
{
  json out;
  int code = 0;
  try {
    SteadyClock clock;
    std::map<std::string, StreamReport> streams;
    std::vector<CounterRow> counters;
    {
      Harness h(plan, opt, clock, {node});
      h.build();
      h.start(t0);
      h.run();
      h.collect(streams, counters);
    }
    out = to_json(streams, counters);
  }
  catch (const Error& e) {
    out = {{"error", e.detail()}, {"code", static_cast<int>(e.code())}};
    code = 1;
  }
  catch (const std::exception& e) {
    out = {{"error", e.what()}, {"code", static_cast<int>(Errc::io_error)}};
    code = 1;
  }
  {
    std::ofstream f(out_file);
    f << out.dump();
  }
  std::_Exit(code);
}

MetricsReport run_processes(const Plan& plan, const RunOptions& opt)
{
  static std::atomic<int> counter{0};
  auto dir = fs::temp_directory_path() /
             ("wharness-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);

  SteadyClock clock;
  auto t0 = clock.now() + kProcessLeadTime;
  std::vector<std::pair<std::string, pid_t>> children;
  for (const auto& n : plan.cfg.nodes) {
    auto file = dir / (".node_" + n.name + ".json");
    pid_t pid = ::fork();
    if (pid < 0) {
      for (auto& [_, p] : children)
        ::waitpid(p, nullptr, 0);
      throw Error(Errc::io_error, "fork failed");
    }
    if (pid == 0)
      child_main(plan, opt, n.name, t0, file);
    children.emplace_back(n.name, pid);
  }

  std::optional<Error> failure;
  std::map<std::string, StreamReport> streams;
  std::vector<CounterRow> counters;
  for (auto& [name, pid] : children) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    auto file = dir / (".node_" + name + ".json");
    std::ifstream in(file);
    json j;
    try {
      j = json::parse(in);
    }
    catch (const std::exception&) {
      if (!failure)
        failure = Error(Errc::io_error, "node '" + name + "' exited without a report");
      continue;
    }
    if (j.contains("error")) {
      if (!failure)
        failure = Error(static_cast<Errc>(j.at("code").get<int>()), "node '" + name + "': " + j.at("error").get<std::string>());
      continue;
    }
    from_json(j, streams, counters);
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (failure)
    throw *failure;
  return assemble(plan, opt, t0, std::move(streams), std::move(counters));
}

} // namespace

MetricsReport run_experiment(const TopologyConfig& config, const RunOptions& options)
{
  auto plan = make_plan(config, options);
  if (options.processes)
    return run_processes(plan, options);
  return run_in_process(plan, options);
}

} // namespace wharness::bench
