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

#include "wharness/config.hpp"

#include "wharness/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace wharness::bench {

namespace pt = boost::property_tree;

namespace {

/// Key access for one section that remembers which keys were consumed.
class Section {
public:
  Section(std::string title, const pt::ptree& tree)
    : m_title(std::move(title))
    , m_tree(tree)
  {}

  std::optional<std::string> optional(const std::string& key)
  {
    m_used.insert(key);
    auto child = m_tree.get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child)
      return std::nullopt;
    return child->data();
  }

  std::string required(const std::string& key)
  {
    auto v = optional(key);
    if (!v)
      throw Error(Errc::validation_error, "[" + m_title + "]: missing key '" + key + "'");
    return *v;
  }

  template <typename T>
  T number(const std::string& key, std::optional<T> fallback = std::nullopt)
  {
    auto text = fallback ? optional(key) : std::optional<std::string>(required(key));
    if (!text)
      return *fallback;
    T value{};
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (ec != std::errc{} || ptr != text->data() + text->size())
      throw Error(Errc::validation_error, "[" + m_title + "]: '" + key + "' is not a valid number: '" + *text + "'");
    return value;
  }

  bool boolean(const std::string& key, bool fallback)
  {
    auto text = optional(key);
    if (!text)
      return fallback;
    if (*text == "true")
      return true;
    if (*text == "false")
      return false;
    throw Error(Errc::validation_error, "[" + m_title + "]: '" + key + "' must be true or false");
  }

  Endpoint endpoint(const std::string& key)
  {
    auto text = required(key);
    try {
      return parse_endpoint(text);
    }
    catch (const Error& e) {
      throw Error(Errc::validation_error, "[" + m_title + "]: " + key + ": " + e.detail());
    }
  }

  Name name(const std::string& key)
  {
    auto text = required(key);
    try {
      return parse_name(text);
    }
    catch (const Error& e) {
      throw Error(Errc::validation_error, "[" + m_title + "]: " + key + ": " + e.detail());
    }
  }

  void finish() const
  {
    for (const auto& [key, child] : m_tree) {
      if (!m_used.contains(key))
        throw Error(Errc::validation_error, "[" + m_title + "]: unknown key '" + key + "'");
    }
  }

  const std::string& title() const { return m_title; }

private:
  std::string m_title;
  const pt::ptree& m_tree;
  std::set<std::string> m_used;
};

std::vector<std::string> split_list(const std::string& text)
{
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos)
      out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string format_double(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

} // namespace

const NodeConfig* TopologyConfig::node(const std::string& name) const
{
  for (const auto& n : nodes)
    if (n.name == name)
      return &n;
  return nullptr;
}

const FaceConfig* TopologyConfig::face(const std::string& id) const
{
  for (const auto& f : faces)
    if (f.id == id)
      return &f;
  return nullptr;
}

LinkProfile TopologyConfig::link_profile(const std::string& name) const
{
  auto wanted = name.empty() ? std::string("default") : name;
  for (const auto& l : links)
    if (l.name == wanted)
      return l.profile;
  if (wanted == "default")
    return LinkProfile{};
  throw Error(Errc::validation_error, "unknown link '" + wanted + "'");
}

void TopologyConfig::validate() const
{
  std::set<std::string> seen;
  for (const auto& n : nodes) {
    if (!seen.insert("node:" + n.name).second)
      throw Error(Errc::validation_error, "[node:" + n.name + "]: duplicate node");
    if (n.pubsub && n.pubsub->scheme != Scheme::udp)
      throw Error(Errc::validation_error, "[node:" + n.name + "]: pubsub endpoint must be udp://");
  }
  for (const auto& l : links) {
    if (!seen.insert("link:" + l.name).second)
      throw Error(Errc::validation_error, "[link:" + l.name + "]: duplicate link");
    try {
      l.profile.validate();
    }
    catch (const Error& e) {
      throw Error(Errc::validation_error, "[link:" + l.name + "]: " + e.detail());
    }
  }
  for (const auto& f : faces) {
    auto where = "[face:" + f.id + "]: ";
    if (!seen.insert("face:" + f.id).second)
      throw Error(Errc::validation_error, where + "duplicate face");
    if (!node(f.node))
      throw Error(Errc::validation_error, where + "undefined node '" + f.node + "'");
    if (f.local.scheme != f.remote.scheme)
      throw Error(Errc::validation_error, where + "local and remote schemes differ");
    if (f.local == f.remote && f.local.scheme != Scheme::sim)
      throw Error(Errc::validation_error, where + "local and remote are the same endpoint");
    if (!f.link.empty()) {
      try {
        link_profile(f.link);
      }
      catch (const Error&) {
        throw Error(Errc::validation_error, where + "undefined link '" + f.link + "'");
      }
    }
  }
  for (const auto& r : routes) {
    auto where = "[route:" + r.id + "]: ";
    if (!seen.insert("route:" + r.id).second)
      throw Error(Errc::validation_error, where + "duplicate route");
    if (!node(r.node))
      throw Error(Errc::validation_error, where + "undefined node '" + r.node + "'");
    auto* f = face(r.face);
    if (!f)
      throw Error(Errc::validation_error, where + "undefined face '" + r.face + "'");
    if (f->node != r.node)
      throw Error(Errc::validation_error, where + "face '" + r.face + "' belongs to node '" + f->node + "'");
  }
  std::set<Name> stream_names;
  for (const auto& s : streams) {
    auto where = "[stream:" + s.id + "]: ";
    if (!seen.insert("stream:" + s.id).second)
      throw Error(Errc::validation_error, where + "duplicate stream");
    if (!stream_names.insert(s.spec.name).second)
      throw Error(Errc::validation_error, where + "stream name " + s.spec.name.to_uri() + " used twice");
    if (!node(s.producer))
      throw Error(Errc::validation_error, where + "undefined producer node '" + s.producer + "'");
    if (s.consumers.empty())
      throw Error(Errc::validation_error, where + "needs at least one consumer");
    for (const auto& c : s.consumers)
      if (!node(c))
        throw Error(Errc::validation_error, where + "undefined consumer node '" + c + "'");
    try {
      s.spec.validate();
    }
    catch (const Error& e) {
      throw Error(Errc::validation_error, where + e.detail());
    }
  }
}

TopologyConfig parse_config(const std::string& text)
{
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  }
  catch (const pt::ini_parser_error& e) {
    throw Error(Errc::parse_error, "line " + std::to_string(e.line()) + ": " + e.message());
  }

  // read_ini drops sections without keys, so the headers are collected here.
  std::vector<std::string> titles;
  {
    std::set<std::string> seen;
    std::istringstream lines(text);
    std::string line;
    for (int number = 1; std::getline(lines, line); ++number) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] != '[')
        continue;
      auto e = line.find(']', b);
      auto title = line.substr(b + 1, e - b - 1);
      auto tb = title.find_first_not_of(" \t");
      title = tb == std::string::npos ? "" : title.substr(tb, title.find_last_not_of(" \t") - tb + 1);
      if (!seen.insert(title).second)
        throw Error(Errc::parse_error, "line " + std::to_string(number) + ": duplicate section [" + title + "]");
      titles.push_back(title);
    }
    for (const auto& [key, child] : tree)
      if (!seen.contains(key))
        throw Error(Errc::validation_error, "key '" + key + "' outside of a section");
  }

  TopologyConfig cfg;
  const pt::ptree empty;
  for (const auto& title : titles) {
    auto found = tree.get_child_optional(pt::ptree::path_type(title, '\0'));
    const pt::ptree& body = found ? *found : empty;
    auto colon = title.find(':');
    if (colon == std::string::npos || colon + 1 == title.size())
      throw Error(Errc::validation_error, "[" + title + "]: section must be kind:id");
    auto kind = title.substr(0, colon);
    auto id = title.substr(colon + 1);
    Section sec(title, body);

    if (kind == "node") {
      NodeConfig n;
      n.name = id;
      if (auto ep = sec.optional("pubsub")) {
        try {
          n.pubsub = parse_endpoint(*ep);
        }
        catch (const Error& e) {
          throw Error(Errc::validation_error, "[" + title + "]: pubsub: " + e.detail());
        }
      }
      n.cs_capacity = sec.number<std::size_t>("cs_capacity", ContentStore::kDefaultCapacity);
      cfg.nodes.push_back(std::move(n));
    }
    else if (kind == "face") {
      FaceConfig f{id, sec.required("node"), sec.endpoint("local"), sec.endpoint("remote"),
                   sec.optional("link").value_or("")};
      cfg.faces.push_back(std::move(f));
    }
    else if (kind == "route") {
      auto node = sec.required("node");
      auto prefix = sec.name("prefix");
      cfg.routes.push_back(RouteConfig{id, std::move(node), std::move(prefix), sec.required("face")});
    }
    else if (kind == "stream") {
      auto name = sec.name("name");
      auto payload = sec.number<std::size_t>("payload_bytes");
      auto period = sec.number<Micros>("period_us");
      auto spec = traffic::StreamSpec::make(std::move(name), payload, period);
      if (auto mode = sec.optional("serialization")) {
        try {
          spec.serialization = pubsub::parse_payload_mode(*mode);
        }
        catch (const Error& e) {
          throw Error(Errc::validation_error, "[" + title + "]: " + e.detail());
        }
      }
      spec.freshness_ms = sec.number<std::uint32_t>("freshness_ms", spec.freshness_ms);
      spec.interest_lifetime_ms = sec.number<std::uint32_t>("interest_lifetime_ms", kDefaultLifetimeMs);
      spec.sequenced_names = sec.boolean("sequenced_names", false);
      auto producer = sec.required("producer");
      auto consumers = split_list(sec.required("consumers"));
      cfg.streams.push_back(StreamConfig{id, std::move(spec), std::move(producer), std::move(consumers)});
    }
    else if (kind == "link") {
      LinkProfile p;
      p.latency_mean_us = sec.number<Micros>("latency_mean_us", 0);
      p.jitter_stddev_us = sec.number<Micros>("jitter_stddev_us", 0);
      p.loss_probability = sec.number<double>("loss_probability", 0.0);
      p.seed = sec.number<std::uint64_t>("seed", 1);
      cfg.links.push_back(LinkConfig{id, p});
    }
    else {
      throw Error(Errc::validation_error, "[" + title + "]: unknown section kind '" + kind + "'");
    }
    sec.finish();
  }
  cfg.validate();
  return cfg;
}

TopologyConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::io_error, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const TopologyConfig& config)
{
  std::ostringstream out;
  for (const auto& n : config.nodes) {
    out << "[node:" << n.name << "]\n";
    if (n.pubsub)
      out << "pubsub = " << n.pubsub->to_string() << "\n";
    out << "cs_capacity = " << n.cs_capacity << "\n\n";
  }
  for (const auto& l : config.links) {
    out << "[link:" << l.name << "]\n"
        << "latency_mean_us = " << l.profile.latency_mean_us << "\n"
        << "jitter_stddev_us = " << l.profile.jitter_stddev_us << "\n"
        << "loss_probability = " << format_double(l.profile.loss_probability) << "\n"
        << "seed = " << l.profile.seed << "\n\n";
  }
  for (const auto& f : config.faces) {
    out << "[face:" << f.id << "]\n"
        << "node = " << f.node << "\n"
        << "local = " << f.local.to_string() << "\n"
        << "remote = " << f.remote.to_string() << "\n";
    if (!f.link.empty())
      out << "link = " << f.link << "\n";
    out << "\n";
  }
  for (const auto& r : config.routes) {
    out << "[route:" << r.id << "]\n"
        << "node = " << r.node << "\n"
        << "prefix = " << r.prefix.to_uri() << "\n"
        << "face = " << r.face << "\n\n";
  }
  for (const auto& s : config.streams) {
    out << "[stream:" << s.id << "]\n"
        << "name = " << s.spec.name.to_uri() << "\n"
        << "payload_bytes = " << s.spec.payload_bytes << "\n"
        << "period_us = " << s.spec.period_us << "\n"
        << "serialization = " << pubsub::to_string(s.spec.serialization) << "\n"
        << "freshness_ms = " << s.spec.freshness_ms << "\n"
        << "interest_lifetime_ms = " << s.spec.interest_lifetime_ms << "\n"
        << "sequenced_names = " << (s.spec.sequenced_names ? "true" : "false") << "\n"
        << "producer = " << s.producer << "\n"
        << "consumers = ";
    for (std::size_t i = 0; i < s.consumers.size(); ++i)
      out << (i ? ", " : "") << s.consumers[i];
    out << "\n\n";
  }
  return out.str();
}

void save_config(const TopologyConfig& config, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw Error(Errc::io_error, "cannot write " + path.string());
  out << save_config(config);
  if (!out)
    throw Error(Errc::io_error, "write failed for " + path.string());
}

TopologyConfig default_config()
{
  TopologyConfig cfg;
  const std::string pc_host = "127.0.0.33";
  cfg.nodes.push_back({"pc", Endpoint{Scheme::udp, pc_host, 47400}});

  struct Receiver {
    std::string node;
    std::string host;
    const char* prefix;
    std::string stream;
  };
  const Receiver receivers[] = {
    {"rpi1", "127.0.0.11", "/trailer/lidar", "lidar"},
    {"rpi2", "127.0.0.12", "/trailer/can", "can"},
    {"rpi3", "127.0.0.13", "/trailer/cam", "cam"},
  };

  cfg.links.push_back({"default", LinkProfile{800, 200, 0.0, 7}});

  std::uint16_t port = 46361;
  std::uint16_t pubsub_port = 47401;
  for (const auto& r : receivers) {
    cfg.nodes.push_back({r.node, Endpoint{Scheme::udp, r.host, pubsub_port++}});
    Endpoint pc_side{Scheme::udp, pc_host, port++};
    Endpoint rpi_side{Scheme::udp, r.host, 46360};
    cfg.faces.push_back({"pc_" + r.node, "pc", pc_side, rpi_side, ""});
    cfg.faces.push_back({r.node + "_pc", r.node, rpi_side, pc_side, ""});
  }
  for (const auto& r : receivers)
    cfg.routes.push_back({"pc_" + r.stream, "pc", parse_name(r.prefix), "pc_" + r.node});
  for (const auto& r : receivers)
    cfg.routes.push_back({r.node + "_" + r.stream, r.node, parse_name(r.prefix), r.node + "_pc"});

  auto specs = traffic::builtin_streams();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto spec = specs[i];
    spec.interest_lifetime_ms = 200;
    cfg.streams.push_back({receivers[i].stream, spec, "pc", {receivers[i].node}});
  }
  cfg.validate();
  return cfg;
}

} // namespace wharness::bench
