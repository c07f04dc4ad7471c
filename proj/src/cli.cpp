#include "farmledger/cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "farmledger/daemon.hpp"
#include "farmledger/encoding.hpp"
#include "farmledger/farm.hpp"
#include "farmledger/http.hpp"
#include "farmledger/node.hpp"
#include "farmledger/pinning.hpp"
#include "farmledger/report.hpp"
#include "farmledger/scenario.hpp"
#include "farmledger/simnet.hpp"
#include "farmledger/svg.hpp"

namespace farmledger::cli {

namespace {

using nlohmann::json;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void wait_for_signal() {
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

/// A failure with a structured body for the error stream.
struct Failure {
  json body;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{{{"error", "NotFound"}, {"message", "cannot read " + path}}};
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{{{"error", "IoError"}, {"message", "cannot write " + path}}};
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

class Api {
 public:
  explicit Api(const std::string& url) : url_(url), client_(url) {
    client_.set_connection_timeout(std::chrono::seconds(5));
    client_.set_read_timeout(std::chrono::seconds(120));
  }

  void bearer(const std::string& token) { client_.set_bearer_token_auth(token); }

  std::string get(const std::string& path, const httplib::Params& params = {}) {
    return check(client_.Get(path, params, httplib::Headers{}));
  }

  std::string post(const std::string& path, const httplib::Params& params, const std::string& body,
                   const std::string& type) {
    const auto target = params.empty() ? path : path + "?" + httplib::detail::params_to_query_str(params);
    return check(client_.Post(target, body, type));
  }

 private:
  std::string check(const httplib::Result& r) {
    if (!r) {
      throw Failure{{{"error", "Unreachable"}, {"message", "cannot reach " + url_ + ": " + httplib::to_string(r.error())}}};
    }
    if (r->status >= 400) {
      json body;
      try {
        body = json::parse(r->body);
      } catch (const json::exception&) {
        body = {{"error", "HttpError"}, {"message", r->body}};
      }
      if (!body.is_object()) body = {{"error", "HttpError"}, {"message", r->body}};
      body["status"] = r->status;
      throw Failure{body};
    }
    return r->body;
  }

  std::string url_;
  httplib::Client client_;
};

json parse_json(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception&) {
    throw Failure{{{"error", "BadResponse"}, {"message", "server returned non-JSON"}}};
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"farmledger: content-addressed farm data ledger", "farmledger"};
  app.require_subcommand(1);
  std::string api = "http://127.0.0.1:5001";
  app.add_option("--api", api, "RPC endpoint of a running daemon")->capture_default_str();

  std::function<void()> action;

  // daemon
  auto* daemon = app.add_subcommand("daemon", "Start node, RPC API and gateway");
  std::string config_path, listen, visualizer_base_flag, repo;
  std::optional<std::uint16_t> gateway_port, pinsvc_port;
  std::optional<double> gc_ttl_hours;
  std::optional<std::uint64_t> daemon_seed;
  std::optional<std::size_t> sim_peers;
  std::optional<std::int64_t> resolve_timeout_ms;
  daemon->add_option("--config", config_path, "key=value config file");
  daemon->add_option("--listen", listen, "RPC listen address, /ip4/<addr>/tcp/<port>");
  daemon->add_option("--gateway-port", gateway_port);
  daemon->add_option("--pinsvc-port", pinsvc_port, "0 disables the pinning service");
  daemon->add_option("--gc-ttl-hours", gc_ttl_hours);
  daemon->add_option("--visualizer-base", visualizer_base_flag);
  daemon->add_option("--repo", repo, "directory for persistent pins");
  daemon->add_option("--seed", daemon_seed, "seed for the emulated peers");
  daemon->add_option("--sim-peers", sim_peers, "number of emulated peers");
  daemon->add_option("--resolve-timeout-ms", resolve_timeout_ms, "gateway resolve budget");
  daemon->callback([&] {
    action = [&] {
      DaemonConfig config;
      if (!config_path.empty()) config = load_daemon_config(config_path);
      if (!listen.empty()) set_daemon_option(config, "listen", listen);
      if (gateway_port) config.gateway_port = *gateway_port;
      if (pinsvc_port) config.pinsvc_port = *pinsvc_port;
      if (gc_ttl_hours) set_daemon_option(config, "gc_ttl_hours", std::to_string(*gc_ttl_hours));
      if (!visualizer_base_flag.empty()) config.visualizer_base = visualizer_base_flag;
      if (!repo.empty()) config.repo = repo;
      if (daemon_seed) config.seed = *daemon_seed;
      if (sim_peers) config.sim_peers = *sim_peers;
      if (resolve_timeout_ms) set_daemon_option(config, "resolve_timeout_ms", std::to_string(*resolve_timeout_ms));

      Daemon d(config);
      d.start();
      const auto host = "http://" + render_ipv4(config.api_ip) + ":";
      json ready = {{"id", d.node().id().text()},
                    {"api", host + std::to_string(d.api_port())},
                    {"gateway", host + std::to_string(d.gateway_port())}};
      if (d.pinsvc_port()) ready["pinsvc"] = host + std::to_string(d.pinsvc_port());
      out << ready.dump() << std::endl;
      wait_for_signal();
      d.stop();
    };
  });

  // add / cat / id
  auto* add = app.add_subcommand("add", "Add a file; prints its cid");
  std::string add_file;
  add->add_option("file", add_file)->required();
  add->callback([&] {
    action = [&] {
      const auto bytes = read_file(add_file);
      out << parse_json(Api(api).post("/api/v0/add", {}, to_string(bytes), "application/octet-stream"))["cid"]
                 .get<std::string>()
          << '\n';
    };
  });

  auto* cat = app.add_subcommand("cat", "Write content to stdout");
  std::string cat_cid;
  cat->add_option("cid", cat_cid)->required();
  cat->callback([&] {
    action = [&] {
      parse_cid(cat_cid);
      out << Api(api).get("/api/v0/cat", {{"arg", cat_cid}});
      out.flush();
    };
  });

  auto* id = app.add_subcommand("id", "Show the daemon's identity");
  id->callback([&] { action = [&] { out << parse_json(Api(api).get("/api/v0/id")).dump() << '\n'; }; });

  // pin
  auto* pin = app.add_subcommand("pin", "Manage pins");
  pin->require_subcommand(1);
  std::string pin_cid, jwt, pinsvc_url = "http://127.0.0.1:5002";
  auto* pin_add = pin->add_subcommand("add", "Pin content on the daemon");
  pin_add->add_option("cid", pin_cid)->required();
  pin_add->callback([&] {
    action = [&] { out << parse_json(Api(api).post("/api/v0/pin/add", {{"arg", pin_cid}}, "", "text/plain")).dump() << '\n'; };
  });
  auto* pin_rm = pin->add_subcommand("rm", "Release a pin on the daemon");
  pin_rm->add_option("cid", pin_cid)->required();
  pin_rm->callback([&] {
    action = [&] { out << parse_json(Api(api).post("/api/v0/pin/rm", {{"arg", pin_cid}}, "", "text/plain")).dump() << '\n'; };
  });
  auto* pin_ls = pin->add_subcommand("ls", "List pinned roots");
  pin_ls->callback([&] { action = [&] { out << parse_json(Api(api).get("/api/v0/pin/ls")).dump() << '\n'; }; });
  auto* pin_remote = pin->add_subcommand("remote", "Pin through a remote pinning service");
  pin_remote->add_option("cid", pin_cid)->required();
  pin_remote->add_option("--jwt", jwt)->required();
  pin_remote->add_option("--pinsvc", pinsvc_url)->capture_default_str();
  pin_remote->callback([&] {
    action = [&] {
      parse_cid(pin_cid);
      Api svc(pinsvc_url);
      svc.bearer(jwt);
      out << parse_json(svc.post("/pinning/pinByHash", {}, json{{"hashToPin", pin_cid}}.dump(), "application/json")).dump()
          << '\n';
    };
  });

  // farm
  auto* farm_cmd = app.add_subcommand("farm", "Farm datasets");
  farm_cmd->require_subcommand(1);
  auto* upload = farm_cmd->add_subcommand("upload", "Upload a CSV dataset; prints the receipt");
  std::string csv_path, upload_base, qr_out;
  upload->add_option("csv", csv_path)->required();
  upload->add_option("--visualizer-base", upload_base);
  upload->add_option("--qr-out", qr_out, "write the QR PNG here instead of inlining base64");
  upload->callback([&] {
    action = [&] {
      const auto csv = read_file(csv_path);
      httplib::Params params;
      if (!upload_base.empty()) params.emplace("visualizer_base", upload_base);
      auto receipt = parse_json(Api(api).post("/api/v0/farm/upload", params, to_string(csv), "text/csv"));
      if (!qr_out.empty()) {
        write_file(qr_out, to_string(base64_decode(receipt["qr_png"].get<std::string>())));
        receipt["qr_png"] = qr_out;
      }
      out << receipt.dump() << '\n';
    };
  });

  auto* validate = farm_cmd->add_subcommand("validate", "Check a CSV offline; prints its cid");
  validate->add_option("csv", csv_path)->required();
  validate->callback([&] {
    action = [&] {
      const auto ds = farm::parse_csv(to_string(read_file(csv_path)));
      out << json{{"cid", cid_from_bytes(farm::canonicalize(ds)).text()}, {"records", ds.records.size()}}.dump() << '\n';
    };
  });

  auto* analyze = farm_cmd->add_subcommand("analyze", "Chart data for a dataset");
  std::string analyze_cid, svg_path;
  std::map<std::string, std::string> analyze_opts;
  analyze->add_option("cid", analyze_cid)->required();
  for (const auto* key : {"chart", "bucket", "resource", "group_by", "product_type", "location", "farm_type", "from", "to"}) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    analyze->add_option_function<std::string>(flag, [&analyze_opts, key](const std::string& v) { analyze_opts[key] = v; });
  }
  analyze->add_option("--svg", svg_path, "also render the chart as SVG");
  analyze->callback([&] {
    action = [&] {
      parse_cid(analyze_cid);
      analytics::parse_analyze_params(analyze_opts);
      httplib::Params params{{"cid", analyze_cid}};
      for (const auto& [k, v] : analyze_opts) params.emplace(k, v);
      const auto chart = parse_json(Api(api).get("/api/v0/farm/analyze", params));
      if (!svg_path.empty()) write_file(svg_path, analytics::render_svg(chart));
      out << chart.dump() << '\n';
    };
  });

  // pinsvc
  auto* pinsvc = app.add_subcommand("pinsvc", "Remote pinning service");
  pinsvc->require_subcommand(1);
  auto* serve = pinsvc->add_subcommand("serve", "Run a standalone pinning service");
  std::uint16_t serve_port = 5002;
  std::string serve_host = "127.0.0.1", upstream = "http://127.0.0.1:5001";
  serve->add_option("--port", serve_port)->capture_default_str();
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--upstream", upstream, "RPC API content is pulled from")->capture_default_str();
  serve->callback([&] {
    action = [&] {
      SimConfig sc;
      sc.seed = std::hash<std::string>{}(serve_host + std::to_string(serve_port));
      Simulation sim(sc);
      SimGuard guard;
      auto fetch = [upstream](Node& node, const Cid& cid) {
        Bytes bytes;
        try {
          bytes = to_bytes(Api(upstream).get("/api/v0/cat", {{"arg", cid.text()}}));
        } catch (const Failure& f) {
          throw Error(ErrorCode::NotFoundAnywhere, f.body.value("message", "upstream fetch failed"));
        }
        if (node.add(bytes) != cid) {
          node.unpin(cid_from_bytes(bytes));
          throw Error(ErrorCode::IntegrityError, "upstream content does not hash to " + cid.text());
        }
      };
      pinning::PinningService service(sim.node(0), guard, fetch);
      httplib::Server server;
      mount_pinning(server, service);
      if (!server.bind_to_port(serve_host, serve_port)) {
        throw Failure{{{"error", "BindFailed"}, {"message", "cannot bind " + serve_host + ":" + std::to_string(serve_port)}}};
      }
      std::thread t([&] { server.listen_after_bind(); });
      out << json{{"pinsvc", "http://" + serve_host + ":" + std::to_string(serve_port)}, {"id", sim.node(0).id().text()}}.dump()
          << std::endl;
      wait_for_signal();
      server.stop();
      t.join();
    };
  });
  auto* keygen = pinsvc->add_subcommand("keygen", "Issue API credentials (local only)");
  keygen->add_option("--pinsvc", pinsvc_url)->capture_default_str();
  keygen->callback([&] { action = [&] { out << parse_json(Api(pinsvc_url).post("/keys", {}, "", "text/plain")).dump() << '\n'; }; });

  // sim
  auto* sim = app.add_subcommand("sim", "Deterministic network simulation");
  sim->require_subcommand(1);
  auto* sim_run = sim->add_subcommand("run", "Publish, retrieve and age content; prints a summary");
  SimRunOptions sim_opts;
  std::string bandwidth_csv_path;
  sim_run->add_option("--nodes", sim_opts.nodes)->capture_default_str()->check(CLI::Range(2, 100000));
  sim_run->add_option("--seed", sim_opts.seed)->capture_default_str();
  sim_run->add_option("--duration", sim_opts.duration_hours, "simulated hours")->capture_default_str()->check(CLI::NonNegativeNumber);
  sim_run->add_option("--payload-bytes", sim_opts.payload_bytes)->capture_default_str();
  sim_run->add_option("--retrievers", sim_opts.retrievers)->capture_default_str();
  sim_run->add_option("--bandwidth-csv", bandwidth_csv_path);
  sim_run->callback([&] {
    action = [&] {
      const auto result = run_sim_scenario(sim_opts);
      if (!bandwidth_csv_path.empty()) write_file(bandwidth_csv_path, result.bandwidth_csv);
      out << result.summary.dump() << '\n';
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Failure& f) {
    err << f.body.dump() << '\n';
  } catch (const Error& e) {
    err << error_json(e).dump() << '\n';
  } catch (const std::exception& e) {
    err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
  }
  return kExitRuntime;
}

}  // namespace farmledger::cli
