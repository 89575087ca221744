#pragma once

// Aggregated read views and the periodic summary. Every call reads a single
// committed snapshot.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "facmon/domain.hpp"
#include "facmon/monitoring.hpp"
#include "facmon/registry.hpp"
#include "facmon/storage.hpp"

namespace facmon {

struct Period {
  Date from;
  Date to;
  bool operator==(const Period&) const = default;
};

inline constexpr int kWarrantyExpiryHorizonDays = 30;

struct SummaryReport {
  Period period;
  Date as_of;
  long items_total = 0;
  std::map<Condition, long> items_by_condition;
  std::map<std::string, long> items_by_campus;
  std::map<std::string, long> items_by_category;
  long findings_opened = 0;
  long findings_resolved = 0;
  long findings_open_at_end = 0;
  std::optional<double> mean_resolution_days;
  long warranty_expiring_within_30_days = 0;

  bool operator==(const SummaryReport&) const = default;
};

struct LocationView {
  LocationRef location;
  std::vector<Item> items;
  std::vector<MonitoringRecord> open_findings;
};

enum class Dataset { ITEMS, MONITORING, SUMMARY };

Dataset parse_dataset(std::string_view s);

struct ExportFilter {
  ItemFilter items;
  RecordFilter records;
  std::optional<Period> period;  // SUMMARY only
  std::optional<Date> as_of;     // SUMMARY only; defaults to period.to
};

class Reporting {
 public:
  explicit Reporting(Store& store) : store_(store) {}

  /// Errors: INVALID_PERIOD (from > to, or as_of < to).
  [[nodiscard]] SummaryReport summary(Period period, Date as_of) const;
  /// Items with exactly this condition, by barcode.
  [[nodiscard]] std::vector<Item> condition_view(Condition condition,
                                                 const ItemFilter& scope = {}) const;
  /// Errors: UNKNOWN_LOCATION.
  [[nodiscard]] LocationView location_view(const LocationAddress& address) const;

  /// UTF-8 CSV, header first, rows by primary key.
  [[nodiscard]] std::string export_csv(Dataset dataset, const ExportFilter& filter = {}) const;

 private:
  Store& store_;
};

void to_json(nlohmann::json& j, const SummaryReport& v);
void to_json(nlohmann::json& j, const LocationView& v);

}  // namespace facmon
