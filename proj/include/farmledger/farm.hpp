#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "farmledger/bytes.hpp"
#include "farmledger/cid.hpp"
#include "farmledger/errors.hpp"
#include "farmledger/qr.hpp"

namespace farmledger {
class Node;
}

namespace farmledger::farm {

inline constexpr std::string_view kCsvHeader =
    "date,farm_id,location,farm_type,product_type,yield_kg,water_l,electricity_kwh,fertilizer_kg";

using Date = std::chrono::year_month_day;

enum class FarmType { Conventional, Vertical };

std::string_view farm_type_name(FarmType t);
std::optional<FarmType> parse_farm_type(std::string_view text);

/// One observation. Quantities are kg, litres, kWh and kg.
struct FarmRecord {
  Date date;
  std::string farm_id;
  std::string location;
  FarmType farm_type = FarmType::Conventional;
  std::string product_type;
  double yield_kg = 0;
  double water_l = 0;
  double electricity_kwh = 0;
  double fertilizer_kg = 0;

  bool operator==(const FarmRecord&) const = default;
};

struct Dataset {
  std::vector<FarmRecord> records;
};

/// A rejected CSV row. `line` is 1-based and counts the header.
class RowError : public Error {
 public:
  RowError(std::size_t line, std::string field, std::string reason);

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string field_;
  std::string reason_;
};

/// Strict YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

/// Shortest round-tripping decimal with no exponent and no trailing zeros.
std::string format_number(double value);

/// Errors: HeaderMismatch, RowError (first bad row).
Dataset parse_csv(std::string_view text);

/// Canonical JSON: {"records":[...]} sorted, fields in header order, compact.
Bytes canonicalize(const Dataset& dataset);

/// Accepts only byte strings that canonicalize() could have produced.
/// Throws Error(NotADataset).
Dataset parse_canonical(ByteView bytes);

std::string visualizer_link(std::string_view visualizer_base, const Cid& cid);

struct UploadReceipt {
  Cid cid;
  std::string visualizer_link;
  qr::QrCode qr;
  Bytes qr_png;
};

UploadReceipt make_receipt(const Cid& cid, std::string_view visualizer_base);

/// Adds the canonical bytes to the node and builds the receipt.
UploadReceipt upload_dataset(const Dataset& dataset, Node& node, std::string_view visualizer_base);

}  // namespace farmledger::farm
