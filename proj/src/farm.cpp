#include "farmledger/farm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <tuple>

#include <json.hpp>

#include "farmledger/node.hpp"
#include "farmledger/png.hpp"

namespace farmledger::farm {

namespace {

using nlohmann::json;

constexpr const char* kFields[] = {"date",         "farm_id",  "location", "farm_type",       "product_type",
                                   "yield_kg",     "water_l",  "electricity_kwh", "fertilizer_kg"};
constexpr std::size_t kFieldCount = 9;

std::vector<std::string> split_header(std::string_view header) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = header.find(',', start);
    out.emplace_back(header.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// RFC 4180 style: quoted fields may hold commas, doubled quotes and newlines.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_rows(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < text.size()) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        if (quoted) throw RowError(row.line, "", "unterminated quoted field");
        done = true;
        break;
      }
      const char c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            quoted = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        continue;
      }
      if (c == '"' && field.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
        ++i;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        ++i;
      } else if (c == '\n' || c == '\r') {
        i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
        ++line;
        done = true;
      } else {
        if (was_quoted) throw RowError(row.line, "", "text after closing quote");
        field.push_back(c);
        ++i;
      }
    }
    row.fields.push_back(std::move(field));
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

bool valid_utf8(std::string_view s) {
  try {
    (void)json(std::string(s)).dump();
    return true;
  } catch (const json::exception&) {
    return false;
  }
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::optional<double> parse_quantity(std::string_view s) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::fixed);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

void check_text(std::size_t line, const char* field, const std::string& value, bool token) {
  if (value.empty() || blank(value)) throw RowError(line, field, "must not be empty");
  if (!valid_utf8(value)) throw RowError(line, field, "invalid UTF-8");
  if (token && std::any_of(value.begin(), value.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
    throw RowError(line, field, "must not contain whitespace");
  }
}

void check_quantity(std::size_t line, const char* field, double value) {
  if (!std::isfinite(value)) throw RowError(line, field, "must be finite");
  if (value < 0) throw RowError(line, field, "must not be negative");
}

FarmRecord parse_row(const CsvRow& row) {
  if (row.fields.size() != kFieldCount) {
    throw RowError(row.line, "", "expected 9 fields, got " + std::to_string(row.fields.size()));
  }
  const auto& f = row.fields;
  FarmRecord r;

  auto date = parse_date(f[0]);
  if (!date) throw RowError(row.line, "date", "expected YYYY-MM-DD");
  r.date = *date;

  check_text(row.line, "farm_id", f[1], true);
  r.farm_id = f[1];
  check_text(row.line, "location", f[2], false);
  r.location = f[2];

  auto type = parse_farm_type(f[3]);
  if (!type) throw RowError(row.line, "farm_type", "expected conventional or vertical");
  r.farm_type = *type;

  check_text(row.line, "product_type", f[4], false);
  r.product_type = f[4];

  double* quantities[] = {&r.yield_kg, &r.water_l, &r.electricity_kwh, &r.fertilizer_kg};
  for (std::size_t q = 0; q < 4; ++q) {
    const char* name = kFields[5 + q];
    auto value = parse_quantity(f[5 + q]);
    if (!value) throw RowError(row.line, name, "not a decimal number");
    check_quantity(row.line, name, *value);
    *quantities[q] = *value == 0 ? 0.0 : *value;
  }
  return r;
}

auto sort_key(const FarmRecord& r) {
  return std::tie(r.date, r.farm_id, r.product_type, r.location, r.farm_type, r.yield_kg, r.water_l,
                  r.electricity_kwh, r.fertilizer_kg);
}

[[noreturn]] void not_a_dataset(const std::string& why) { throw Error(ErrorCode::NotADataset, why); }

}  // namespace

RowError::RowError(std::size_t line, std::string field, std::string reason)
    : Error(ErrorCode::RowError,
            "line " + std::to_string(line) + (field.empty() ? "" : ", field " + field) + ": " + reason),
      line_(line),
      field_(std::move(field)),
      reason_(std::move(reason)) {}

std::string_view farm_type_name(FarmType t) { return t == FarmType::Vertical ? "vertical" : "conventional"; }

std::optional<FarmType> parse_farm_type(std::string_view text) {
  if (text == "conventional") return FarmType::Conventional;
  if (text == "vertical") return FarmType::Vertical;
  return std::nullopt;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    std::from_chars(text.data() + pos, text.data() + pos + len, v);
    return v;
  };
  const Date d{std::chrono::year{num(0, 4)}, std::chrono::month{static_cast<unsigned>(num(5, 2))},
               std::chrono::day{static_cast<unsigned>(num(8, 2))}};
  if (!d.ok()) return std::nullopt;
  return d;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string format_number(double value) {
  if (value == 0) return "0";
  char buf[400];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "number not representable");
  return std::string(buf, ptr);
}

Dataset parse_csv(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xef && static_cast<unsigned char>(text[1]) == 0xbb &&
      static_cast<unsigned char>(text[2]) == 0xbf) {
    text.remove_prefix(3);  // BOM
  }
  auto eol = text.find_first_of("\r\n");
  std::string_view header = text.substr(0, eol);
  if (header != kCsvHeader) {
    auto got = split_header(header);
    std::string detail = "expected header " + std::string(kCsvHeader);
    for (std::size_t i = 0; i < kFieldCount; ++i) {
      if (i >= got.size() || got[i] != kFields[i]) {
        detail += "; column " + std::to_string(i + 1) + " should be " + kFields[i];
        break;
      }
    }
    throw Error(ErrorCode::HeaderMismatch, detail);
  }

  Dataset ds;
  for (const auto& row : read_rows(text)) {
    if (row.line == 1) continue;
    ds.records.push_back(parse_row(row));
  }
  return ds;
}

Bytes canonicalize(const Dataset& dataset) {
  std::vector<const FarmRecord*> sorted;
  sorted.reserve(dataset.records.size());
  for (const auto& r : dataset.records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FarmRecord* a, const FarmRecord* b) { return sort_key(*a) < sort_key(*b); });

  std::string out = "{\"records\":[";
  bool first = true;
  for (const auto* r : sorted) {
    if (!first) out += ',';
    first = false;
    out += "{\"date\":\"" + format_date(r->date) + "\"";
    out += ",\"farm_id\":" + json(r->farm_id).dump();
    out += ",\"location\":" + json(r->location).dump();
    out += ",\"farm_type\":\"" + std::string(farm_type_name(r->farm_type)) + "\"";
    out += ",\"product_type\":" + json(r->product_type).dump();
    out += ",\"yield_kg\":" + format_number(r->yield_kg);
    out += ",\"water_l\":" + format_number(r->water_l);
    out += ",\"electricity_kwh\":" + format_number(r->electricity_kwh);
    out += ",\"fertilizer_kg\":" + format_number(r->fertilizer_kg);
    out += '}';
  }
  out += "]}";
  return to_bytes(out);
}

Dataset parse_canonical(ByteView bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception&) {
    not_a_dataset("content is not JSON");
  }
  if (!doc.is_object() || doc.size() != 1 || !doc.contains("records") || !doc["records"].is_array()) {
    not_a_dataset("expected {\"records\":[...]}");
  }

  Dataset ds;
  for (const auto& item : doc["records"]) {
    if (!item.is_object() || item.size() != kFieldCount) not_a_dataset("record has the wrong shape");
    for (std::size_t i = 0; i < kFieldCount; ++i) {
      const auto& v = item.contains(kFields[i]) ? item.at(kFields[i]) : json();
      if (i < 5 ? !v.is_string() : !v.is_number()) not_a_dataset(std::string("bad field ") + kFields[i]);
    }
    FarmRecord r;
    auto date = parse_date(item["date"].get<std::string>());
    auto type = parse_farm_type(item["farm_type"].get<std::string>());
    if (!date || !type) not_a_dataset("bad date or farm_type");
    r.date = *date;
    r.farm_type = *type;
    r.farm_id = item["farm_id"].get<std::string>();
    r.location = item["location"].get<std::string>();
    r.product_type = item["product_type"].get<std::string>();
    r.yield_kg = item["yield_kg"].get<double>();
    r.water_l = item["water_l"].get<double>();
    r.electricity_kwh = item["electricity_kwh"].get<double>();
    r.fertilizer_kg = item["fertilizer_kg"].get<double>();
    try {
      check_text(0, "farm_id", r.farm_id, true);
      check_text(0, "location", r.location, false);
      check_text(0, "product_type", r.product_type, false);
      for (double q : {r.yield_kg, r.water_l, r.electricity_kwh, r.fertilizer_kg}) check_quantity(0, "quantity", q);
    } catch (const RowError& e) {
      not_a_dataset(e.field() + " " + e.reason());
    }
    ds.records.push_back(std::move(r));
  }

  const auto again = canonicalize(ds);
  if (!std::equal(again.begin(), again.end(), bytes.begin(), bytes.end())) {
    not_a_dataset("content is not in canonical form");
  }
  return ds;
}

std::string visualizer_link(std::string_view visualizer_base, const Cid& cid) {
  while (!visualizer_base.empty() && visualizer_base.back() == '/') visualizer_base.remove_suffix(1);
  return std::string(visualizer_base) + "/visualize?cid=" + cid.text();
}

UploadReceipt make_receipt(const Cid& cid, std::string_view visualizer_base) {
  auto link = visualizer_link(visualizer_base, cid);
  auto code = qr::QrCode::encode_text(link, qr::Ecc::Medium);
  auto png = render_qr_png(code);
  return UploadReceipt{cid, std::move(link), std::move(code), std::move(png)};
}

UploadReceipt upload_dataset(const Dataset& dataset, Node& node, std::string_view visualizer_base) {
  const auto bytes = canonicalize(dataset);
  return make_receipt(node.add(bytes), visualizer_base);
}

}  // namespace farmledger::farm
