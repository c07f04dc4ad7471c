#include "farmledger/http.hpp"

#include <httplib.h>

#include "farmledger/encoding.hpp"
#include "farmledger/farm.hpp"
#include "farmledger/gateway.hpp"
#include "farmledger/node.hpp"
#include "farmledger/pinning.hpp"
#include "farmledger/report.hpp"

namespace farmledger {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCharacter:
    case ErrorCode::InvalidLength:
    case ErrorCode::InvalidPrefix:
    case ErrorCode::Malformed:
    case ErrorCode::MalformedMultiaddr:
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::MalformedToken:
    case ErrorCode::UnknownKey:
    case ErrorCode::BadSignature:
    case ErrorCode::AuthError:
      return 401;
    case ErrorCode::NotOwner:
      return 403;
    case ErrorCode::NotFound:
    case ErrorCode::MissingBlock:
    case ErrorCode::NotFoundAnywhere:
      return 404;
    case ErrorCode::TooLarge:
      return 413;
    case ErrorCode::HeaderMismatch:
    case ErrorCode::RowError:
    case ErrorCode::NotADataset:
      return 422;
    case ErrorCode::IntegrityError:
      return 502;
    case ErrorCode::NoServersReachable:
      return 503;
  }
  return 500;
}

json error_json(const Error& e) {
  json out = {{"error", e.code_name()}, {"message", e.what()}};
  if (const auto* row = dynamic_cast<const farm::RowError*>(&e)) {
    out["line"] = row->line();
    out["field"] = row->field();
    out["reason"] = row->reason();
  }
  return out;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, http_status(e.code()), error_json(e)); }

/// Runs a handler, turning library errors into JSON error responses.
template <class F>
auto guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  };
}

std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) throw Error(ErrorCode::InvalidArgument, std::string("missing parameter ") + name);
  return req.get_param_value(name);
}

/// Raw request body, or the first uploaded file of a multipart form.
std::string upload_body(const httplib::Request& req) {
  if (req.is_multipart_form_data()) {
    if (req.files.empty()) throw Error(ErrorCode::InvalidArgument, "multipart body carries no file");
    return req.files.begin()->second.content;
  }
  return req.body;
}

bool is_loopback(const std::string& addr) {
  return addr == "127.0.0.1" || addr == "::1" || addr == "::ffff:127.0.0.1";
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view kScheme = "Bearer ";
  if (header.compare(0, kScheme.size(), kScheme) != 0) throw Error(ErrorCode::AuthError, "missing bearer token");
  return header.substr(kScheme.size());
}

json pin_json(const pinning::PinEntry& e) {
  return {{"cid", e.cid.text()},
          {"owner", e.owner},
          {"status", pinning::pin_status_name(e.status)},
          {"pinned_at_ms", e.pinned_at.count()}};
}

}  // namespace

void enable_cors(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

void mount_rpc(httplib::Server& server, RpcContext ctx) {
  auto add = guarded([ctx](const httplib::Request& req, httplib::Response& res) {
    const auto body = upload_body(req);
    const auto cid = ctx.guard.with([&] { return ctx.node.add(as_bytes(body)); });
    send_json(res, 200, {{"cid", cid.text()}, {"size", body.size()}});
  });
  server.Post("/api/v0/add", add);

  auto cat = guarded([ctx](const httplib::Request& req, httplib::Response& res) {
    const auto cid = parse_cid(required_param(req, "arg"));
    const auto bytes = ctx.guard.with([&] { return ctx.node.cat(cid); });
    res.set_header("X-Content-Cid", cid.text());
    res.set_content(to_string(bytes), "application/octet-stream");
  });
  server.Get("/api/v0/cat", cat);
  server.Post("/api/v0/cat", cat);

  auto id = guarded([ctx](const httplib::Request&, httplib::Response& res) {
    json out = ctx.guard.with([&] {
      json peers = json::array();
      for (const auto& p : ctx.node.connections()) peers.push_back(p.text());
      return json{{"peer_id", ctx.node.id().text()},
                  {"multiaddr", render_multiaddr(ctx.node.addr())},
                  {"role", ctx.node.role().is_server() ? "server" : "client"},
                  {"connections", peers}};
    });
    send_json(res, 200, out);
  });
  server.Get("/api/v0/id", id);
  server.Post("/api/v0/id", id);

  server.Post("/api/v0/pin/add", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                const auto cid = parse_cid(required_param(req, "arg"));
                ctx.guard.with([&] { ctx.node.pin(cid); });
                send_json(res, 200, {{"pinned", {cid.text()}}});
              }));
  server.Post("/api/v0/pin/rm", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                const auto cid = parse_cid(required_param(req, "arg"));
                ctx.guard.with([&] { ctx.node.unpin(cid); });
                send_json(res, 200, {{"unpinned", {cid.text()}}});
              }));
  auto pin_ls = guarded([ctx](const httplib::Request&, httplib::Response& res) {
    json pins = json::array();
    ctx.guard.with([&] {
      for (const auto& c : ctx.node.pins().roots()) pins.push_back(c.text());
    });
    send_json(res, 200, {{"pins", pins}});
  });
  server.Get("/api/v0/pin/ls", pin_ls);
  server.Post("/api/v0/pin/ls", pin_ls);

  server.Post("/api/v0/farm/upload", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                const auto dataset = farm::parse_csv(upload_body(req));
                const auto base = req.has_param("visualizer_base") ? req.get_param_value("visualizer_base")
                                                                   : ctx.visualizer_base;
                const auto receipt = ctx.guard.with([&] { return farm::upload_dataset(dataset, ctx.node, base); });
                send_json(res, 200,
                          {{"cid", receipt.cid.text()},
                           {"visualizer_link", receipt.visualizer_link},
                           {"qr_png", base64_encode(receipt.qr_png)},
                           {"records", dataset.records.size()}});
              }));

  server.Get("/api/v0/farm/analyze", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const auto cid = parse_cid(required_param(req, "cid"));
               std::map<std::string, std::string> params;
               for (const auto& [k, v] : req.params) params[k] = v;
               const auto request = analytics::parse_analyze_params(params);
               const auto bytes = ctx.guard.with([&] { return ctx.node.cat(cid); });
               const auto dataset = farm::parse_canonical(bytes);
               auto out = analytics::analyze_json(dataset, request);
               out["cid"] = cid.text();
               send_json(res, 200, out);
             }));

  server.Get("/api/v0/stats/bw", guarded([ctx](const httplib::Request&, httplib::Response& res) {
               json out = ctx.guard.with([&] {
                 return json{{"total_in", ctx.node.ledger().total_received()},
                             {"total_out", ctx.node.ledger().total_sent()}};
               });
               send_json(res, 200, out);
             }));
}

void mount_gateway(httplib::Server& server, Gateway& gateway) {
  server.Get(R"(/ipfs/.*)", guarded([&gateway](const httplib::Request& req, httplib::Response& res) {
               const auto r = gateway.resolve(req.path);
               res.status = r.status;
               if (r.status == 200) res.set_header("X-Content-Cid", r.cid);
               res.set_content(r.body, r.media_type);
             }));
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
}

void mount_pinning(httplib::Server& server, pinning::PinningService& service) {
  server.Post("/keys", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                if (!is_loopback(req.remote_addr)) {
                  send_json(res, 403, {{"error", "Forbidden"}, {"message", "key issuance is local only"}});
                  return;
                }
                const auto creds = service.issue_credentials();
                send_json(res, 201,
                          {{"api_key", creds.api_key},
                           {"api_secret", creds.api_secret},
                           {"jwt", service.issue_jwt(creds)}});
              }));

  server.Post("/pinning/pinByHash", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto token = bearer_token(req);
                service.verify_jwt(token);
                json body;
                try {
                  body = json::parse(req.body);
                } catch (const json::exception&) {
                  throw Error(ErrorCode::InvalidArgument, "body must be JSON");
                }
                if (!body.is_object() || !body.contains("hashToPin") || !body["hashToPin"].is_string()) {
                  throw Error(ErrorCode::InvalidArgument, "body must carry hashToPin");
                }
                const auto cid = parse_cid(body["hashToPin"].get<std::string>());
                const auto entry = service.pin_by_hash(token, cid);
                send_json(res, 200, {{"cid", entry.cid.text()}, {"status", pinning::pin_status_name(entry.status)}});
              }));

  server.Delete(R"(/pinning/unpin/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                  const auto token = bearer_token(req);
                  service.verify_jwt(token);
                  const auto cid = parse_cid(req.matches[1].str());
                  service.unpin(token, cid);
                  send_json(res, 200, {{"cid", cid.text()}, {"status", "unpinned"}});
                }));

  server.Get("/pinning/pinList", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               json rows = json::array();
               for (const auto& e : service.list_pins(bearer_token(req))) rows.push_back(pin_json(e));
               send_json(res, 200, {{"count", rows.size()}, {"rows", rows}});
             }));
}

}  // namespace farmledger
