#include "farmledger/daemon.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "farmledger/crypto.hpp"
#include "farmledger/encoding.hpp"
#include "farmledger/http.hpp"
#include "farmledger/node.hpp"
#include "farmledger/pinning.hpp"
#include "farmledger/simnet.hpp"

namespace farmledger {

namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_int(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad integer for " + std::string(key) + ": " + std::string(value));
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !(out > 0)) {
    throw Error(ErrorCode::InvalidArgument, "bad positive number for " + std::string(key) + ": " + std::string(value));
  }
  return out;
}

/// The daemon's identity survives restarts when a repo is configured.
IdentitySeed daemon_identity(const DaemonConfig& config) {
  if (!config.repo) {
    auto seed = simulation_identity_seed(config.seed, static_cast<std::size_t>(-1));
    return seed;
  }
  const auto path = *config.repo / "identity";
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::string hex;
    in >> hex;
    const auto bytes = hex_decode(hex);
    if (bytes.size() == IdentitySeed{}.size()) {
      IdentitySeed seed{};
      std::copy(bytes.begin(), bytes.end(), seed.begin());
      return seed;
    }
  }
  IdentitySeed seed{};
  const auto fresh = random_bytes(seed.size());
  std::copy(fresh.begin(), fresh.end(), seed.begin());
  fs::create_directories(*config.repo);
  std::ofstream(path) << hex_encode(seed) << '\n';
  return seed;
}

std::uint16_t bind(httplib::Server& server, const std::string& host, std::uint16_t port) {
  if (port == 0) {
    const int bound = server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::InvalidArgument, "cannot bind " + host);
    return static_cast<std::uint16_t>(bound);
  }
  if (!server.bind_to_port(host, port)) {
    throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

}  // namespace

std::pair<Ipv4, std::uint16_t> parse_listen_addr(std::string_view text) {
  auto fail = [&]() -> std::pair<Ipv4, std::uint16_t> {
    throw Error(ErrorCode::MalformedMultiaddr, "expected /ip4/<addr>/tcp/<port>, got " + std::string(text));
  };
  constexpr std::string_view kIp = "/ip4/";
  if (text.substr(0, kIp.size()) != kIp) return fail();
  auto rest = text.substr(kIp.size());
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos) return fail();
  std::optional<Ipv4> ip;
  try {
    ip = parse_ipv4(rest.substr(0, slash));
  } catch (const Error&) {
    return fail();
  }
  rest = rest.substr(slash);
  constexpr std::string_view kTcp = "/tcp/";
  if (rest.substr(0, kTcp.size()) != kTcp) return fail();
  rest = rest.substr(kTcp.size());
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), port);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || port > 65535 || rest.empty() ||
      (rest.size() > 1 && rest[0] == '0')) {
    return fail();
  }
  return {*ip, static_cast<std::uint16_t>(port)};
}

void set_daemon_option(DaemonConfig& config, std::string_view key, std::string_view value) {
  if (key == "listen") {
    std::tie(config.api_ip, config.api_port) = parse_listen_addr(value);
  } else if (key == "gateway_port") {
    config.gateway_port = parse_int<std::uint16_t>(key, value);
  } else if (key == "pinsvc_port") {
    config.pinsvc_port = parse_int<std::uint16_t>(key, value);
  } else if (key == "gc_ttl_hours") {
    config.gc_ttl_hours = parse_double(key, value);
  } else if (key == "visualizer_base") {
    config.visualizer_base = std::string(value);
  } else if (key == "seed") {
    config.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "sim_peers") {
    config.sim_peers = parse_int<std::size_t>(key, value);
  } else if (key == "repo") {
    config.repo = fs::path(std::string(value));
  } else if (key == "resolve_timeout_ms") {
    config.resolve_timeout = std::chrono::milliseconds(parse_int<std::int64_t>(key, value));
    if (config.resolve_timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "resolve_timeout_ms must be positive");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown config key " + std::string(key));
  }
}

DaemonConfig parse_daemon_config(std::string_view text, DaemonConfig config) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(number) + ": expected key = value");
    }
    auto key = trim(view.substr(0, eq));
    auto value = trim(view.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    set_daemon_option(config, key, value);
  }
  return config;
}

DaemonConfig load_daemon_config(const fs::path& path, DaemonConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_daemon_config(buf.str(), std::move(base));
}

Daemon::Daemon(DaemonConfig config) : config_(std::move(config)) {
  const auto gc_ttl = std::chrono::duration_cast<SimDuration>(std::chrono::duration<double, std::ratio<3600>>(config_.gc_ttl_hours));
  SimConfig sc;
  sc.node_count = config_.sim_peers;
  sc.seed = config_.seed;
  sc.gc_ttl = gc_ttl;
  sim_ = std::make_unique<Simulation>(sc);

  auto bootstrap_of = [&] {
    std::vector<Multiaddress> out;
    for (std::size_t i = 0; i < std::min<std::size_t>(sim_->size(), sc.bootstrap_fanout); ++i) {
      out.push_back(sim_->node(i).addr());
    }
    return out;
  };

  NodeConfig nc;
  nc.seed = daemon_identity(config_);
  nc.listen_ip = config_.api_ip;
  nc.listen_port = config_.api_port;
  nc.gc_ttl = gc_ttl;
  nc.repo = config_.repo;
  nc.bootstrap = bootstrap_of();
  node_ = &sim_->add_node(nc);

  if (config_.pinsvc_port != 0) {
    NodeConfig pc;
    pc.seed = simulation_identity_seed(config_.seed, static_cast<std::size_t>(-2));
    pc.listen_ip = config_.api_ip;
    pc.listen_port = config_.pinsvc_port;
    pc.gc_ttl = gc_ttl;
    pc.bootstrap = bootstrap_of();
    pc.bootstrap.push_back(node_->addr());
    pin_node_ = &sim_->add_node(pc);
    pinsvc_ = std::make_unique<pinning::PinningService>(*pin_node_, guard_);
  }
  sim_->advance(std::chrono::seconds(1));

  GatewayConfig gc;
  gc.resolve_timeout = config_.resolve_timeout;
  gateway_ = std::make_unique<Gateway>(*node_, guard_, gc);
}

Daemon::~Daemon() { stop(); }

void Daemon::start() {
  const auto host = render_ipv4(config_.api_ip);

  api_server_ = std::make_unique<httplib::Server>();
  enable_cors(*api_server_);
  mount_rpc(*api_server_, RpcContext{*node_, guard_, config_.visualizer_base});
  api_port_ = bind(*api_server_, host, config_.api_port);

  gateway_server_ = std::make_unique<httplib::Server>();
  enable_cors(*gateway_server_);
  mount_gateway(*gateway_server_, *gateway_);
  gateway_port_ = bind(*gateway_server_, host, config_.gateway_port);

  if (pinsvc_) {
    pinsvc_server_ = std::make_unique<httplib::Server>();
    mount_pinning(*pinsvc_server_, *pinsvc_);
    pinsvc_port_ = bind(*pinsvc_server_, host, config_.pinsvc_port);
  }

  running_ = true;
  started_ = std::chrono::steady_clock::now();
  for (auto* server : {api_server_.get(), gateway_server_.get(), pinsvc_server_.get()}) {
    if (server) threads_.emplace_back([server] { server->listen_after_bind(); });
  }
  threads_.emplace_back([this] { tick(); });
}

void Daemon::tick() {
  const auto base = guard_.with([&] { return sim_->now(); });
  while (running_) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    const auto elapsed = std::chrono::duration_cast<SimDuration>(std::chrono::steady_clock::now() - started_);
    guard_.with([&] {
      const auto target = base + elapsed;
      if (target > sim_->now()) sim_->advance_to(target);
    });
  }
}

void Daemon::stop() {
  if (!running_.exchange(false)) return;
  for (auto* server : {api_server_.get(), gateway_server_.get(), pinsvc_server_.get()}) {
    if (server) server->stop();
  }
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

void Daemon::wait() {
  while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

}  // namespace farmledger
