#include "farmledger/gateway.hpp"

#include <thread>

#include <json.hpp>

#include "farmledger/node.hpp"

namespace farmledger {

namespace {

constexpr std::string_view kPrefix = "/ipfs/";

GatewayResponse text_response(int status, std::string body) { return {status, "text/plain", std::move(body), {}}; }

}  // namespace

std::string sniff_media_type(std::string_view body) {
  return nlohmann::json::accept(body) ? "application/json" : "application/octet-stream";
}

Gateway::Gateway(Node& node, SimGuard& guard, GatewayConfig config)
    : node_(node), guard_(guard), config_(config) {
  if (config_.resolve_timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "resolve_timeout must be positive");
}

GatewayResponse Gateway::resolve(std::string_view path) {
  if (path.substr(0, kPrefix.size()) != kPrefix) return text_response(400, "expected /ipfs/<cid>\n");
  auto text = path.substr(kPrefix.size());
  while (!text.empty() && text.back() == '/') text.remove_suffix(1);

  Cid cid;
  try {
    cid = parse_cid(text);
  } catch (const Error& e) {
    return text_response(400, "invalid cid: " + std::string(e.code_name()) + "\n");
  }

  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + config_.resolve_timeout;
  while (true) {
    try {
      auto bytes = guard_.with([&] { return node_.cat(cid, config_.attempt_deadline); });
      std::string body = to_string(bytes);
      auto type = sniff_media_type(body);
      return {200, std::move(type), std::move(body), cid.text()};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotFoundAnywhere && e.code() != ErrorCode::IntegrityError &&
          e.code() != ErrorCode::MissingBlock) {
        throw;
      }
    }
    const auto now = Clock::now();
    if (now + config_.poll_interval >= deadline) {
      std::this_thread::sleep_until(deadline);
      break;
    }
    std::this_thread::sleep_for(config_.poll_interval);
  }
  return text_response(404, "content not found: " + cid.text() + "\n");
}

}  // namespace farmledger
