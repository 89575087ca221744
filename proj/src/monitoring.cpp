#include "facmon/monitoring.hpp"

#include <algorithm>

#include "facmon/catalog.hpp"
#include "facmon/codec.hpp"
#include "facmon/error.hpp"
#include "facmon/registry.hpp"

namespace facmon {

using nlohmann::json;

namespace {

std::string upper_trim(std::string_view s) {
  auto out = trim(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void require_admin(const Actor& actor, std::string_view what) {
  if (actor.role != Role::FACILITIES_ADMIN) {
    fail(ErrorCode::FORBIDDEN, "only facilities administrators may " + std::string(what));
  }
}

PhotoRef store_photo(Store& store, const PhotoUpload& p) {
  if (p.bytes.empty()) fail(ErrorCode::EMPTY_PAYLOAD, "photo is empty");
  if (std::find(kPhotoMediaTypes.begin(), kPhotoMediaTypes.end(), p.media_type) ==
      kPhotoMediaTypes.end()) {
    fail(ErrorCode::UNSUPPORTED_MEDIA_TYPE,
         "photos must be image/jpeg or image/png, got '" + p.media_type + "'");
  }
  return PhotoRef{store.put_blob(p.bytes), p.view, p.media_type, p.bytes.size()};
}

MonitoringRecord load(const Catalog& catalog, std::string_view id) {
  auto rec = catalog.get<MonitoringRecord>(kind::kFinding, id);
  if (!rec) fail(ErrorCode::UNKNOWN_RECORD, "no monitoring record " + std::string(id));
  return *rec;
}

}  // namespace

std::string_view to_string(FindingStatus s) noexcept {
  switch (s) {
    case FindingStatus::OPEN: return "OPEN";
    case FindingStatus::FOLLOW_UP: return "FOLLOW_UP";
    case FindingStatus::RESOLVED: return "RESOLVED";
  }
  return "?";
}

FindingStatus parse_finding_status(std::string_view s) {
  if (s == "OPEN") return FindingStatus::OPEN;
  if (s == "FOLLOW_UP") return FindingStatus::FOLLOW_UP;
  if (s == "RESOLVED") return FindingStatus::RESOLVED;
  fail(ErrorCode::INVALID_ARGUMENT, "unknown finding status '" + std::string(s) + "'");
}

MonitoringRecord Monitoring::submit_finding(const FindingInput& in, const Actor& reporter) {
  if (reporter.role == Role::LEADERSHIP) {
    fail(ErrorCode::FORBIDDEN, "leadership accounts cannot submit findings");
  }
  Catalog catalog(store_.snapshot());
  MonitoringRecord rec;
  rec.finding = trim(in.finding);
  if (rec.finding.empty()) fail(ErrorCode::EMPTY_FINDING, "finding text is required");

  std::optional<Item> item;
  if (in.barcode && !trim(*in.barcode).empty()) {
    auto barcode = normalize_barcode(*in.barcode);
    item = catalog.item(barcode);
    if (!item) fail(ErrorCode::UNKNOWN_ITEM, "no item with barcode " + barcode);
    rec.barcode = barcode;
  }

  if (in.location) {
    LocationAddress address{upper_trim(in.location->campus_code),
                            upper_trim(in.location->location_code)};
    auto loc = catalog.location(address);
    if (!loc) {
      fail(ErrorCode::UNKNOWN_LOCATION,
           "location " + address.campus_code + "/" + address.location_code + " does not exist");
    }
    rec.location_id = loc->id;
  } else if (item) {
    rec.location_id = item->location_id;
  } else {
    fail(ErrorCode::UNKNOWN_LOCATION, "a location is required for findings without an item");
  }

  rec.object_name = trim(in.object_name);
  if (rec.object_name.empty() && item) rec.object_name = item->name;
  if (rec.object_name.empty()) fail(ErrorCode::INVALID_ARGUMENT, "object name is required");
  if (in.object_description && !trim(*in.object_description).empty()) {
    rec.object_description = trim(*in.object_description);
  }
  rec.id = make_id("fnd");
  rec.date = in.date;
  rec.recommendation = trim(in.recommendation);
  rec.reporter = reporter.user_id;
  rec.status = FindingStatus::OPEN;
  for (const auto& p : in.photos) rec.photos[p.view] = store_photo(store_, p);

  Changeset cs;
  cs.actor = reporter.user_id;
  cs.action = "finding.submit";
  cs.put(std::string(kind::kFinding), rec.id, 0, rec);
  store_.commit(cs);
  return rec;
}

MonitoringRecord Monitoring::follow_up(std::string_view record_id, std::string note,
                                       const Actor& actor) {
  require_admin(actor, "record follow-ups");
  Catalog catalog(store_.snapshot());
  auto rec = load(catalog, record_id);
  if (rec.status != FindingStatus::OPEN) {
    fail(ErrorCode::WRONG_STATE, "record " + rec.id + " is " + std::string(to_string(rec.status)));
  }
  auto version = catalog.version(kind::kFinding, rec.id);
  rec.status = FindingStatus::FOLLOW_UP;
  rec.follow_up_note = trim(note);
  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "finding.follow_up";
  cs.put(std::string(kind::kFinding), rec.id, version, rec);
  store_.commit(cs);
  return rec;
}

MonitoringRecord Monitoring::resolve(std::string_view record_id, Date resolution_date,
                                     const Actor& actor) {
  require_admin(actor, "resolve findings");
  Catalog catalog(store_.snapshot());
  auto rec = load(catalog, record_id);
  if (rec.status == FindingStatus::RESOLVED) {
    fail(ErrorCode::WRONG_STATE, "record " + rec.id + " is already resolved");
  }
  if (resolution_date < rec.date) {
    fail(ErrorCode::INVALID_DATE_ORDER, "resolution date precedes the finding date");
  }
  auto version = catalog.version(kind::kFinding, rec.id);
  rec.status = FindingStatus::RESOLVED;
  rec.resolution_date = resolution_date;
  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "finding.resolve";
  cs.put(std::string(kind::kFinding), rec.id, version, rec);
  store_.commit(cs);
  return rec;
}

PhotoRef Monitoring::attach_photo(std::string_view record_id, const PhotoUpload& photo,
                                  const Actor& actor) {
  Catalog catalog(store_.snapshot());
  auto rec = load(catalog, record_id);
  auto ref = store_photo(store_, photo);
  auto version = catalog.version(kind::kFinding, rec.id);
  rec.photos[photo.view] = ref;
  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "photo.upload";
  cs.put(std::string(kind::kFinding), rec.id, version, rec);
  store_.commit(cs);
  return ref;
}

std::vector<MonitoringRecord> Monitoring::list_records(const RecordFilter& f) const {
  if (f.period && f.period->second < f.period->first) {
    fail(ErrorCode::INVALID_PERIOD, "period start is after its end");
  }
  Catalog catalog(store_.snapshot());
  std::vector<MonitoringRecord> out;
  for (auto& rec : catalog.all<MonitoringRecord>(kind::kFinding)) {
    if (f.status && rec.status != *f.status) continue;
    if (f.reporter && rec.reporter != *f.reporter) continue;
    if (f.item_linked && rec.barcode.has_value() != *f.item_linked) continue;
    if (f.period && (rec.date < f.period->first || f.period->second < rec.date)) continue;
    if (f.scope) {
      const auto& ids = f.scope->location_ids;
      bool own = rec.reporter == f.scope->reporter;
      bool at_assigned = std::find(ids.begin(), ids.end(), rec.location_id) != ids.end();
      if (!own && !at_assigned) continue;
    }
    if (f.campus_code || f.location_code) {
      auto address = catalog.address_of(rec.location_id);
      if (f.campus_code && upper_trim(*f.campus_code) != address.campus_code) continue;
      if (f.location_code && upper_trim(*f.location_code) != address.location_code) continue;
    }
    if (f.condition_of_item) {
      if (!rec.barcode) continue;
      auto item = catalog.item(*rec.barcode);
      if (!item || item->condition != *f.condition_of_item) continue;
    }
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.date != b.date) return b.date < a.date;
    return a.id < b.id;
  });
  return out;
}

MonitoringRecord Monitoring::get_record(std::string_view record_id) const {
  return load(Catalog(store_.snapshot()), record_id);
}

void to_json(json& j, const MonitoringRecord& v) {
  json photos = json::array();
  for (const auto& [view, ref] : v.photos) photos.push_back(ref);
  j = json{{"id", v.id},
           {"barcode", optional_json(v.barcode)},
           {"object_name", v.object_name},
           {"object_description", optional_json(v.object_description)},
           {"date", v.date},
           {"location_id", v.location_id},
           {"finding", v.finding},
           {"recommendation", v.recommendation},
           {"reporter", v.reporter},
           {"status", v.status},
           {"follow_up_note", optional_json(v.follow_up_note)},
           {"resolution_date", optional_json(v.resolution_date)},
           {"photos", std::move(photos)}};
}

void from_json(const json& j, MonitoringRecord& v) {
  v.id = j.at("id").get<std::string>();
  v.barcode = optional_from<std::string>(j, "barcode");
  v.object_name = j.at("object_name").get<std::string>();
  v.object_description = optional_from<std::string>(j, "object_description");
  v.date = j.at("date").get<Date>();
  v.location_id = j.at("location_id").get<std::string>();
  v.finding = j.at("finding").get<std::string>();
  v.recommendation = j.at("recommendation").get<std::string>();
  v.reporter = j.at("reporter").get<std::string>();
  v.status = j.at("status").get<FindingStatus>();
  v.follow_up_note = optional_from<std::string>(j, "follow_up_note");
  v.resolution_date = optional_from<Date>(j, "resolution_date");
  v.photos.clear();
  for (const auto& p : j.at("photos")) {
    auto ref = p.get<PhotoRef>();
    v.photos[ref.view] = std::move(ref);
  }
}

}  // namespace facmon
