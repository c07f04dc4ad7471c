#pragma once

#include <string>

#include <json.hpp>

#include "farmledger/errors.hpp"
#include "farmledger/guard.hpp"

namespace httplib {
class Server;
}

namespace farmledger {

class Node;
class Gateway;
namespace pinning {
class PinningService;
}

int http_status(ErrorCode code);
/// {"error": code name, "message": ...}; row errors add line and field.
nlohmann::json error_json(const Error& e);

struct RpcContext {
  Node& node;
  SimGuard& guard;
  std::string visualizer_base;
};

/// /api/v0/{add,cat,id,pin/add,pin/rm,pin/ls,farm/upload,farm/analyze,stats/bw}
void mount_rpc(httplib::Server& server, RpcContext context);
/// /ipfs/<cid> and /healthz
void mount_gateway(httplib::Server& server, Gateway& gateway);
/// /keys and /pinning/*
void mount_pinning(httplib::Server& server, pinning::PinningService& service);

/// Permissive CORS headers and OPTIONS preflight answers.
void enable_cors(httplib::Server& server);

}  // namespace farmledger
