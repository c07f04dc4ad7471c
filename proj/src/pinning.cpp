#include "farmledger/pinning.hpp"

#include <algorithm>
#include <chrono>

#include <json.hpp>

#include "farmledger/crypto.hpp"
#include "farmledger/encoding.hpp"
#include "farmledger/node.hpp"

namespace farmledger::pinning {

namespace {

constexpr std::size_t kKeyBytes = 20;
constexpr std::size_t kSecretBytes = 32;

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedToken, why); }

bool is_lower_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

}  // namespace

std::string jwt_payload(std::string_view api_key, std::int64_t iat) {
  return "{\"key\":\"" + std::string(api_key) + "\",\"iat\":" + std::to_string(iat) + "}";
}

std::string sign_jwt(std::string_view api_key, std::string_view api_secret_hex, std::int64_t iat) {
  const auto signing_input = base64url_encode(as_bytes(kJwtHeader)) + "." +
                             base64url_encode(as_bytes(jwt_payload(api_key, iat)));
  const auto secret = hex_decode(api_secret_hex);
  const auto mac = hmac_sha256(secret, as_bytes(signing_input));
  return signing_input + "." + base64url_encode(mac);
}

ParsedJwt parse_jwt(std::string_view token) {
  const auto first = token.find('.');
  const auto second = first == std::string_view::npos ? first : token.find('.', first + 1);
  if (second == std::string_view::npos || token.find('.', second + 1) != std::string_view::npos) {
    malformed("token must have three segments");
  }
  ParsedJwt out;
  out.signing_input = std::string(token.substr(0, second));
  std::string header, payload;
  try {
    header = to_string(base64url_decode(token.substr(0, first)));
    payload = to_string(base64url_decode(token.substr(first + 1, second - first - 1)));
    out.signature = base64url_decode(token.substr(second + 1));
  } catch (const Error&) {
    malformed("segment is not base64url");
  }
  if (header != kJwtHeader) malformed("unsupported header");
  if (out.signature.size() != 32) malformed("signature must be 32 bytes");

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::exception&) {
    malformed("payload is not JSON");
  }
  if (!doc.is_object() || !doc.contains("key") || !doc["key"].is_string() || !doc.contains("iat") ||
      !doc["iat"].is_number_integer()) {
    malformed("payload must carry key and iat");
  }
  out.api_key = doc["key"].get<std::string>();
  out.iat = doc["iat"].get<std::int64_t>();
  if (payload != jwt_payload(out.api_key, out.iat)) malformed("payload is not in canonical form");
  return out;
}

std::string_view pin_status_name(PinStatus s) {
  switch (s) {
    case PinStatus::Fetching: return "fetching";
    case PinStatus::Pinned: return "pinned";
    case PinStatus::Failed: return "failed";
  }
  return "";
}

PinningService::PinningService(Node& node, SimGuard& guard, Fetcher fetcher)
    : node_(node), guard_(guard), fetcher_(std::move(fetcher)) {
  if (!fetcher_) {
    fetcher_ = [](Node& n, const Cid& cid) { n.pin(cid); };
  }
}

ApiCredentials PinningService::issue_credentials() {
  std::lock_guard lock(mutex_);
  ApiCredentials creds;
  do {
    creds.api_key = hex_encode(random_bytes(kKeyBytes));
  } while (secrets_.count(creds.api_key));
  creds.api_secret = hex_encode(random_bytes(kSecretBytes));
  secrets_.emplace(creds.api_key, creds.api_secret);
  return creds;
}

std::string PinningService::issue_jwt(const ApiCredentials& creds, std::optional<std::int64_t> iat) const {
  const auto t = iat.value_or(std::chrono::duration_cast<std::chrono::seconds>(
                                  std::chrono::system_clock::now().time_since_epoch())
                                  .count());
  return sign_jwt(creds.api_key, creds.api_secret, t);
}

std::string PinningService::verify_jwt(std::string_view token) const {
  const auto parsed = parse_jwt(token);
  if (parsed.api_key.size() != kKeyBytes * 2 || !is_lower_hex(parsed.api_key)) malformed("api key is not 40 hex digits");
  std::string secret;
  {
    std::lock_guard lock(mutex_);
    auto it = secrets_.find(parsed.api_key);
    if (it == secrets_.end()) throw Error(ErrorCode::UnknownKey, "api key is not registered");
    secret = it->second;
  }
  const auto expected = hmac_sha256(hex_decode(secret), as_bytes(parsed.signing_input));
  if (!constant_time_equal(expected, parsed.signature)) throw Error(ErrorCode::BadSignature, "signature mismatch");
  return parsed.api_key;
}

bool PinningService::revoke(const std::string& api_key) {
  std::lock_guard lock(mutex_);
  return secrets_.erase(api_key) != 0;
}

std::string PinningService::authenticate(std::string_view token) const {
  try {
    return verify_jwt(token);
  } catch (const Error& e) {
    throw Error(ErrorCode::AuthError, std::string(e.code_name()) + ": " + e.what());
  }
}

PinEntry PinningService::pin_by_hash(std::string_view token, const Cid& cid) {
  const auto owner = authenticate(token);
  const auto key = std::make_pair(owner, cid);
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second.status != PinStatus::Failed) return it->second;
    entries_[key] = PinEntry{cid, owner, guard_.with([&] { return node_.now(); }), PinStatus::Fetching};
  }

  PinStatus status = PinStatus::Pinned;
  std::optional<Error> failure;
  try {
    guard_.with([&] { fetcher_(node_, cid); });
  } catch (const Error& e) {
    status = PinStatus::Failed;
    failure = e;
  }

  std::lock_guard lock(mutex_);
  auto& entry = entries_[key];
  entry.status = status;
  if (failure) throw *failure;
  return entry;
}

void PinningService::unpin(std::string_view token, const Cid& cid) {
  const auto owner = authenticate(token);
  std::unique_lock lock(mutex_);
  auto it = entries_.find({owner, cid});
  if (it == entries_.end()) {
    for (const auto& [k, entry] : entries_) {
      if (k.second == cid) throw Error(ErrorCode::NotOwner, "pin belongs to another key");
    }
    throw Error(ErrorCode::NotFound, "no pin for " + cid.text());
  }
  entries_.erase(it);
  bool still_held = false;
  for (const auto& [k, entry] : entries_) {
    if (k.second == cid && entry.status == PinStatus::Pinned) still_held = true;
  }
  lock.unlock();
  if (!still_held) guard_.with([&] { node_.unpin(cid); });
}

std::vector<PinEntry> PinningService::list_pins(std::string_view token) const {
  const auto owner = authenticate(token);
  std::lock_guard lock(mutex_);
  std::vector<PinEntry> out;
  for (const auto& [k, entry] : entries_) {
    if (k.first == owner) out.push_back(entry);
  }
  return out;
}

std::size_t PinningService::entry_count() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace farmledger::pinning
