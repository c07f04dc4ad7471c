#include "farmledger/peer.hpp"

#include <charconv>
#include <vector>

#include "farmledger/errors.hpp"

namespace farmledger {

PeerId generate_peer(const IdentitySeed& seed) { return PeerId::from_digest(sha256(seed)); }

std::string render_ipv4(const Ipv4& ip) {
  return std::to_string(ip[0]) + "." + std::to_string(ip[1]) + "." + std::to_string(ip[2]) + "." +
         std::to_string(ip[3]);
}

namespace {

[[noreturn]] void malformed(std::string_view text, std::string_view why) {
  throw Error(ErrorCode::MalformedMultiaddr, "malformed multiaddress '" + std::string(text) + "': " + std::string(why));
}

bool parse_decimal(std::string_view s, unsigned long max, unsigned long& out) {
  if (s.empty() || s.size() > 5) return false;
  if (s.size() > 1 && s[0] == '0') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && out <= max;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Ipv4 parse_ipv4(std::string_view text) {
  auto parts = split(text, '.');
  if (parts.size() != 4) malformed(text, "ip4 needs four octets");
  Ipv4 ip{};
  for (std::size_t i = 0; i < 4; ++i) {
    unsigned long v = 0;
    if (!parse_decimal(parts[i], 255, v)) malformed(text, "bad ip4 octet");
    ip[i] = static_cast<std::uint8_t>(v);
  }
  return ip;
}

std::string render_multiaddr(const Multiaddress& m) {
  return "/ip4/" + render_ipv4(m.ip) + "/tcp/" + std::to_string(m.port) + "/p2p/" + m.peer.text();
}

Multiaddress parse_multiaddr(std::string_view text) {
  // "", "ip4", <ip>, "tcp", <port>, "p2p", <id>
  auto parts = split(text, '/');
  if (parts.size() != 7 || !parts[0].empty()) malformed(text, "expected /ip4/<ip>/tcp/<port>/p2p/<id>");
  if (parts[1] != "ip4") malformed(text, "only ip4 is supported");
  if (parts[3] != "tcp") malformed(text, "only tcp is supported");
  if (parts[5] != "p2p") malformed(text, "expected p2p segment");

  Multiaddress m;
  m.ip = parse_ipv4(parts[2]);
  unsigned long port = 0;
  if (!parse_decimal(parts[4], 65535, port)) malformed(text, "bad tcp port");
  m.port = static_cast<std::uint16_t>(port);
  try {
    m.peer = PeerId::parse(parts[6]);
  } catch (const Error& e) {
    malformed(text, e.what());
  }
  if (m.peer.text() != parts[6]) malformed(text, "non-canonical peer id");
  return m;
}

}  // namespace farmledger
