#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "farmledger/cid.hpp"
#include "farmledger/guard.hpp"
#include "farmledger/simtime.hpp"

namespace farmledger {
class Node;
}

namespace farmledger::pinning {

/// api_key identifies the caller and may be shown; api_secret is returned
/// once, at issuance.
struct ApiCredentials {
  std::string api_key;     // 20 random bytes, hex
  std::string api_secret;  // 32 random bytes, hex
};

inline constexpr std::string_view kJwtHeader = R"({"alg":"HS256","typ":"JWT"})";

std::string jwt_payload(std::string_view api_key, std::int64_t iat);

/// HS256 over base64url(header) "." base64url(payload), keyed by the raw
/// secret bytes.
std::string sign_jwt(std::string_view api_key, std::string_view api_secret_hex, std::int64_t iat);

/// Structural parse only. Errors: MalformedToken.
struct ParsedJwt {
  std::string signing_input;
  std::string api_key;
  std::int64_t iat = 0;
  Bytes signature;
};
ParsedJwt parse_jwt(std::string_view token);

enum class PinStatus { Fetching, Pinned, Failed };
std::string_view pin_status_name(PinStatus s);

struct PinEntry {
  Cid cid;
  std::string owner;
  SimTime pinned_at{0};
  PinStatus status = PinStatus::Fetching;
};

/// Retrieves and pins a DAG on the service node. The default goes through the
/// node's own network; a standalone service may pull from an upstream API.
using Fetcher = std::function<void(Node& node, const Cid& cid)>;

class PinningService {
 public:
  PinningService(Node& node, SimGuard& guard, Fetcher fetcher = {});

  ApiCredentials issue_credentials();
  /// iat defaults to the current unix time.
  std::string issue_jwt(const ApiCredentials& creds, std::optional<std::int64_t> iat = std::nullopt) const;
  /// Errors: MalformedToken, UnknownKey, BadSignature.
  std::string verify_jwt(std::string_view token) const;
  bool revoke(const std::string& api_key);

  /// Idempotent per (key, cid). Errors: AuthError, NotFoundAnywhere (the
  /// entry is kept with status failed).
  PinEntry pin_by_hash(std::string_view token, const Cid& cid);
  /// Errors: AuthError, NotOwner, NotFound.
  void unpin(std::string_view token, const Cid& cid);
  /// Errors: AuthError.
  std::vector<PinEntry> list_pins(std::string_view token) const;

  std::size_t entry_count() const;

 private:
  std::string authenticate(std::string_view token) const;

  Node& node_;
  SimGuard& guard_;
  Fetcher fetcher_;

  mutable std::mutex mutex_;
  std::map<std::string, std::string> secrets_;
  std::map<std::pair<std::string, Cid>, PinEntry> entries_;
};

}  // namespace farmledger::pinning
