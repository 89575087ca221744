#pragma once

// Finding workflow: submit -> (follow up) -> resolve.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "facmon/domain.hpp"
#include "facmon/storage.hpp"

namespace facmon {

enum class FindingStatus { OPEN, FOLLOW_UP, RESOLVED };

std::string_view to_string(FindingStatus s) noexcept;
FindingStatus parse_finding_status(std::string_view s);

struct MonitoringRecord {
  std::string id;
  std::optional<std::string> barcode;
  std::string object_name;
  std::optional<std::string> object_description;
  Date date;
  std::string location_id;
  std::string finding;
  std::string recommendation;
  std::string reporter;  // user id
  FindingStatus status = FindingStatus::OPEN;
  std::optional<std::string> follow_up_note;
  std::optional<Date> resolution_date;
  std::map<PhotoView, PhotoRef> photos;

  bool operator==(const MonitoringRecord&) const = default;
};

struct PhotoUpload {
  PhotoView view = PhotoView::FRONT;
  std::string bytes;
  std::string media_type;
};

struct FindingInput {
  std::optional<std::string> barcode;
  std::string object_name;  // defaults to the item's name when a barcode is given
  std::optional<std::string> object_description;
  Date date;
  std::optional<LocationAddress> location;  // defaults to the item's location
  std::string finding;
  std::string recommendation;
  std::vector<PhotoUpload> photos;
};

/// Read scope of a WORK_UNIT user: own records plus records at assigned locations.
struct RecordScope {
  std::string reporter;
  std::vector<std::string> location_ids;
};

struct RecordFilter {
  std::optional<FindingStatus> status;
  std::optional<std::string> campus_code;
  std::optional<std::string> location_code;
  std::optional<Condition> condition_of_item;
  std::optional<std::pair<Date, Date>> period;  // inclusive
  std::optional<std::string> reporter;
  std::optional<bool> item_linked;  // false: global findings only
  std::optional<RecordScope> scope;
};

class Monitoring {
 public:
  explicit Monitoring(Store& store) : store_(store) {}

  /// Errors: FORBIDDEN, EMPTY_FINDING, UNKNOWN_ITEM, UNKNOWN_LOCATION, INVALID_ARGUMENT,
  /// photo errors as in Registry::attach_photo.
  MonitoringRecord submit_finding(const FindingInput& input, const Actor& reporter);

  /// Errors: FORBIDDEN, UNKNOWN_RECORD, WRONG_STATE.
  MonitoringRecord follow_up(std::string_view record_id, std::string note, const Actor& actor);

  /// Errors: FORBIDDEN, UNKNOWN_RECORD, WRONG_STATE, INVALID_DATE_ORDER.
  MonitoringRecord resolve(std::string_view record_id, Date resolution_date, const Actor& actor);

  /// Errors: UNKNOWN_RECORD, EMPTY_PAYLOAD, UNSUPPORTED_MEDIA_TYPE.
  PhotoRef attach_photo(std::string_view record_id, const PhotoUpload& photo, const Actor& actor);

  /// Date descending, then id. Errors: INVALID_PERIOD.
  [[nodiscard]] std::vector<MonitoringRecord> list_records(const RecordFilter& filter = {}) const;
  [[nodiscard]] MonitoringRecord get_record(std::string_view record_id) const;

 private:
  Store& store_;
};

void to_json(nlohmann::json& j, const MonitoringRecord& v);
void from_json(const nlohmann::json& j, MonitoringRecord& v);

NLOHMANN_JSON_SERIALIZE_ENUM(FindingStatus, {{FindingStatus::OPEN, "OPEN"},
                                             {FindingStatus::FOLLOW_UP, "FOLLOW_UP"},
                                             {FindingStatus::RESOLVED, "RESOLVED"}})

}  // namespace facmon
