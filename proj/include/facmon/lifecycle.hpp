#pragma once

// Processing: transfers, condition changes, repairs, and the warranty and
// maintenance views over registered items.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "facmon/domain.hpp"
#include "facmon/storage.hpp"

namespace facmon {

struct TransferRecord {
  std::string id;
  std::string barcode;
  std::string from_location_id;
  std::string to_location_id;
  Date date;
  std::string actor;
  std::optional<std::string> note;
  std::uint64_t revision = 0;  // item version this transfer produced; orders history

  bool operator==(const TransferRecord&) const = default;
};

struct StatusChange {
  std::string id;
  std::string barcode;
  LifecycleEvent event = LifecycleEvent::REPORT_LIGHT_DAMAGE;
  Condition from = Condition::GOOD;
  Condition to = Condition::GOOD;
  Date date;
  std::string actor;
  std::string note;
  std::uint64_t revision = 0;

  bool operator==(const StatusChange&) const = default;
};

enum class RepairStatus { OPEN, COMPLETED, CANCELLED };

struct RepairRecord {
  std::string id;
  std::string barcode;
  Date opened_date;
  std::optional<Date> completed_date;
  std::string description;
  std::optional<Money> cost;
  std::string actor;
  std::optional<std::string> completed_by;
  RepairStatus status = RepairStatus::OPEN;

  bool operator==(const RepairRecord&) const = default;
};

struct WarrantyEntry {
  Item item;
  std::int64_t days = 0;
};

struct WarrantyReport {
  std::vector<WarrantyEntry> in_warranty;  // days = days remaining
  std::vector<WarrantyEntry> expired;      // days = days since expiry
  std::vector<Item> none;
};

struct MaintenanceDue {
  Item item;
  Date due_date;
  std::int64_t days_overdue = 0;
};

struct ItemHistory {
  std::vector<TransferRecord> transfers;
  std::vector<StatusChange> status_changes;
  std::vector<RepairRecord> repairs;
};

class Lifecycle {
 public:
  explicit Lifecycle(Store& store) : store_(store) {}

  /// Errors: UNKNOWN_ITEM, TERMINAL_ITEM, UNKNOWN_LOCATION, SAME_LOCATION, CONFLICT.
  TransferRecord transfer_item(std::string_view barcode, const LocationAddress& to,
                               const Actor& actor, Date date,
                               std::optional<std::string> note = std::nullopt);

  /// Moving to LOST/DONATED cancels an open repair; REPAIR_COMPLETE closes it.
  /// Errors: UNKNOWN_ITEM, ILLEGAL_TRANSITION, CONFLICT.
  StatusChange change_status(std::string_view barcode, LifecycleEvent event, const Actor& actor,
                             Date date, std::string note = {});

  /// Errors: UNKNOWN_ITEM, NOT_DAMAGED, REPAIR_ALREADY_OPEN.
  RepairRecord open_repair(std::string_view barcode, Date date, std::string description,
                           const Actor& actor);

  /// Applies REPAIR_COMPLETE to the item in the same commit.
  /// Errors: UNKNOWN_REPAIR, ALREADY_COMPLETED, INVALID_DATE_ORDER, ILLEGAL_TRANSITION.
  RepairRecord complete_repair(std::string_view repair_id, Date completed_date,
                               std::optional<Money> cost, const Actor& actor);

  [[nodiscard]] WarrantyReport warranty_report(Date as_of) const;
  /// Most overdue first, ties by barcode.
  [[nodiscard]] std::vector<MaintenanceDue> maintenance_due(Date as_of) const;
  /// Errors: UNKNOWN_ITEM.
  [[nodiscard]] ItemHistory history(std::string_view barcode) const;
  /// Errors: UNKNOWN_REPAIR.
  [[nodiscard]] RepairRecord get_repair(std::string_view repair_id) const;

 private:
  Store& store_;
};

void to_json(nlohmann::json& j, const TransferRecord& v);
void from_json(const nlohmann::json& j, TransferRecord& v);
void to_json(nlohmann::json& j, const StatusChange& v);
void from_json(const nlohmann::json& j, StatusChange& v);
void to_json(nlohmann::json& j, const RepairRecord& v);
void from_json(const nlohmann::json& j, RepairRecord& v);
void to_json(nlohmann::json& j, const WarrantyReport& v);
void to_json(nlohmann::json& j, const MaintenanceDue& v);
void to_json(nlohmann::json& j, const ItemHistory& v);

NLOHMANN_JSON_SERIALIZE_ENUM(RepairStatus, {{RepairStatus::OPEN, "OPEN"},
                                            {RepairStatus::COMPLETED, "COMPLETED"},
                                            {RepairStatus::CANCELLED, "CANCELLED"}})

}  // namespace facmon
