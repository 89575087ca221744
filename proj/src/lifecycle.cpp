#include "facmon/lifecycle.hpp"

#include <algorithm>
#include <map>

#include "facmon/catalog.hpp"
#include "facmon/codec.hpp"
#include "facmon/error.hpp"

namespace facmon {

using nlohmann::json;

namespace {

Item require_item(const Catalog& catalog, std::string_view raw_barcode, std::string& barcode) {
  barcode = normalize_barcode(raw_barcode);
  auto item = catalog.item(barcode);
  if (!item) fail(ErrorCode::UNKNOWN_ITEM, "no item with barcode " + barcode);
  return *item;
}

std::string upper_trim(std::string_view s) {
  auto out = trim(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

TransferRecord Lifecycle::transfer_item(std::string_view raw_barcode, const LocationAddress& to,
                                        const Actor& actor, Date date,
                                        std::optional<std::string> note) {
  Catalog catalog(store_.snapshot());
  std::string barcode;
  auto item = require_item(catalog, raw_barcode, barcode);
  if (is_terminal(item.condition)) {
    fail(ErrorCode::TERMINAL_ITEM,
         barcode + " is " + std::string(to_string(item.condition)) + " and cannot be moved");
  }
  LocationAddress target{upper_trim(to.campus_code), upper_trim(to.location_code)};
  auto location = catalog.location(target);
  if (!location || !location->active) {
    fail(ErrorCode::UNKNOWN_LOCATION,
         "location " + target.campus_code + "/" + target.location_code + " does not exist");
  }
  if (location->id == item.location_id) {
    fail(ErrorCode::SAME_LOCATION, barcode + " is already at " + target.location_code);
  }
  auto version = catalog.version(kind::kItem, barcode);
  TransferRecord rec{make_id("trf"), barcode, item.location_id, location->id, date,
                     actor.user_id,  note,    version + 1};
  item.location_id = location->id;

  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "item.transfer";
  cs.entity_kind = kind::kItem;
  cs.entity_id = barcode;
  cs.put(std::string(kind::kItem), barcode, version, item);
  cs.put(std::string(kind::kTransfer), rec.id, 0, rec);
  store_.commit(cs);
  return rec;
}

StatusChange Lifecycle::change_status(std::string_view raw_barcode, LifecycleEvent event,
                                      const Actor& actor, Date date, std::string note) {
  Catalog catalog(store_.snapshot());
  std::string barcode;
  auto item = require_item(catalog, raw_barcode, barcode);
  auto to = next_condition(item.condition, event);
  auto version = catalog.version(kind::kItem, barcode);
  StatusChange change{make_id("sc"), barcode, event, item.condition, to, date, actor.user_id,
                      std::move(note), version + 1};

  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "item.status";
  cs.entity_kind = kind::kItem;
  cs.entity_id = barcode;
  if (item.open_repair_id) {
    auto repair = catalog.get<RepairRecord>(kind::kRepair, *item.open_repair_id);
    if (repair && repair->status == RepairStatus::OPEN && (is_terminal(to) || !is_damaged(to))) {
      auto rv = catalog.version(kind::kRepair, repair->id);
      if (event == LifecycleEvent::REPAIR_COMPLETE) {
        if (date < repair->opened_date) {
          fail(ErrorCode::INVALID_DATE_ORDER, "completion date precedes the repair's opening");
        }
        repair->status = RepairStatus::COMPLETED;
        repair->completed_date = date;
      } else {
        repair->status = RepairStatus::CANCELLED;
      }
      repair->completed_by = actor.user_id;
      cs.put(std::string(kind::kRepair), repair->id, rv, *repair);
      item.open_repair_id.reset();
    }
  }
  item.condition = to;
  cs.put(std::string(kind::kItem), barcode, version, item);
  cs.put(std::string(kind::kStatusChange), change.id, 0, change);
  store_.commit(cs);
  return change;
}

RepairRecord Lifecycle::open_repair(std::string_view raw_barcode, Date date,
                                    std::string description, const Actor& actor) {
  Catalog catalog(store_.snapshot());
  std::string barcode;
  auto item = require_item(catalog, raw_barcode, barcode);
  if (!is_damaged(item.condition)) {
    fail(ErrorCode::NOT_DAMAGED,
         barcode + " is " + std::string(to_string(item.condition)) + "; only damaged items are repaired");
  }
  if (item.open_repair_id) {
    fail(ErrorCode::REPAIR_ALREADY_OPEN, barcode + " already has open repair " + *item.open_repair_id);
  }
  auto version = catalog.version(kind::kItem, barcode);
  RepairRecord rec;
  rec.id = make_id("rep");
  rec.barcode = barcode;
  rec.opened_date = date;
  rec.description = trim(description);
  rec.actor = actor.user_id;
  item.open_repair_id = rec.id;

  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "item.repair.open";
  cs.entity_kind = kind::kRepair;
  cs.entity_id = rec.id;
  cs.put(std::string(kind::kItem), barcode, version, item);
  cs.put(std::string(kind::kRepair), rec.id, 0, rec);
  store_.commit(cs);
  return rec;
}

RepairRecord Lifecycle::complete_repair(std::string_view repair_id, Date completed_date,
                                        std::optional<Money> cost, const Actor& actor) {
  Catalog catalog(store_.snapshot());
  auto repair = catalog.get<RepairRecord>(kind::kRepair, repair_id);
  if (!repair) fail(ErrorCode::UNKNOWN_REPAIR, "no repair " + std::string(repair_id));
  if (repair->status != RepairStatus::OPEN) {
    fail(ErrorCode::ALREADY_COMPLETED, "repair " + repair->id + " is already closed");
  }
  if (completed_date < repair->opened_date) {
    fail(ErrorCode::INVALID_DATE_ORDER, "completion date precedes the repair's opening");
  }
  auto item = catalog.item(repair->barcode);
  if (!item) fail(ErrorCode::UNKNOWN_ITEM, "no item with barcode " + repair->barcode);
  auto to = next_condition(item->condition, LifecycleEvent::REPAIR_COMPLETE);
  auto item_version = catalog.version(kind::kItem, item->barcode);
  auto repair_version = catalog.version(kind::kRepair, repair->id);

  StatusChange change{make_id("sc"),  item->barcode,         LifecycleEvent::REPAIR_COMPLETE,
                      item->condition, to,                   completed_date,
                      actor.user_id,   "repair " + repair->id, item_version + 1};
  repair->status = RepairStatus::COMPLETED;
  repair->completed_date = completed_date;
  repair->cost = cost;
  repair->completed_by = actor.user_id;
  item->condition = to;
  item->open_repair_id.reset();

  Changeset cs;
  cs.actor = actor.user_id;
  cs.action = "item.repair.complete";
  cs.entity_kind = kind::kRepair;
  cs.entity_id = repair->id;
  cs.put(std::string(kind::kRepair), repair->id, repair_version, *repair);
  cs.put(std::string(kind::kItem), item->barcode, item_version, *item);
  cs.put(std::string(kind::kStatusChange), change.id, 0, change);
  store_.commit(cs);
  return *repair;
}

WarrantyReport Lifecycle::warranty_report(Date as_of) const {
  Catalog catalog(store_.snapshot());
  WarrantyReport report;
  for (auto& item : catalog.items()) {
    if (is_terminal(item.condition)) continue;
    auto status = warranty_status(item.warranty_end_date, as_of);
    if (auto* in = std::get_if<InWarranty>(&status)) {
      report.in_warranty.push_back({std::move(item), in->days_remaining});
    } else if (auto* ex = std::get_if<WarrantyExpired>(&status)) {
      report.expired.push_back({std::move(item), ex->days_since});
    } else {
      report.none.push_back(std::move(item));
    }
  }
  return report;
}

std::vector<MaintenanceDue> Lifecycle::maintenance_due(Date as_of) const {
  Catalog catalog(store_.snapshot());
  std::map<std::string, Date, std::less<>> last_service;
  for (const auto& repair : catalog.all<RepairRecord>(kind::kRepair)) {
    if (repair.status != RepairStatus::COMPLETED || !repair.completed_date) continue;
    auto [it, inserted] = last_service.emplace(repair.barcode, *repair.completed_date);
    if (!inserted && it->second < *repair.completed_date) it->second = *repair.completed_date;
  }
  std::vector<MaintenanceDue> out;
  for (auto& item : catalog.items()) {
    if (is_terminal(item.condition) || !item.maintenance_interval_days) continue;
    auto anchor = item.purchase_date;
    if (auto it = last_service.find(item.barcode); it != last_service.end()) anchor = it->second;
    auto due = anchor.plus_days(*item.maintenance_interval_days);
    if (due <= as_of) out.push_back({std::move(item), due, due.days_until(as_of)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.days_overdue > b.days_overdue;
  });
  return out;
}

ItemHistory Lifecycle::history(std::string_view raw_barcode) const {
  Catalog catalog(store_.snapshot());
  std::string barcode;
  require_item(catalog, raw_barcode, barcode);
  ItemHistory h;
  for (auto& t : catalog.all<TransferRecord>(kind::kTransfer)) {
    if (t.barcode == barcode) h.transfers.push_back(std::move(t));
  }
  for (auto& s : catalog.all<StatusChange>(kind::kStatusChange)) {
    if (s.barcode == barcode) h.status_changes.push_back(std::move(s));
  }
  for (auto& r : catalog.all<RepairRecord>(kind::kRepair)) {
    if (r.barcode == barcode) h.repairs.push_back(std::move(r));
  }
  auto by_revision = [](const auto& a, const auto& b) { return a.revision < b.revision; };
  std::sort(h.transfers.begin(), h.transfers.end(), by_revision);
  std::sort(h.status_changes.begin(), h.status_changes.end(), by_revision);
  std::sort(h.repairs.begin(), h.repairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.opened_date, a.id) < std::tie(b.opened_date, b.id);
  });
  return h;
}

RepairRecord Lifecycle::get_repair(std::string_view repair_id) const {
  Catalog catalog(store_.snapshot());
  auto repair = catalog.get<RepairRecord>(kind::kRepair, repair_id);
  if (!repair) fail(ErrorCode::UNKNOWN_REPAIR, "no repair " + std::string(repair_id));
  return *repair;
}

// --- JSON -------------------------------------------------------------------

void to_json(json& j, const TransferRecord& v) {
  j = json{{"id", v.id},
           {"barcode", v.barcode},
           {"from_location_id", v.from_location_id},
           {"to_location_id", v.to_location_id},
           {"date", v.date},
           {"actor", v.actor},
           {"note", optional_json(v.note)},
           {"revision", v.revision}};
}
void from_json(const json& j, TransferRecord& v) {
  v.id = j.at("id").get<std::string>();
  v.barcode = j.at("barcode").get<std::string>();
  v.from_location_id = j.at("from_location_id").get<std::string>();
  v.to_location_id = j.at("to_location_id").get<std::string>();
  v.date = j.at("date").get<Date>();
  v.actor = j.at("actor").get<std::string>();
  v.note = optional_from<std::string>(j, "note");
  v.revision = j.at("revision").get<std::uint64_t>();
}

void to_json(json& j, const StatusChange& v) {
  j = json{{"id", v.id},     {"barcode", v.barcode}, {"event", v.event}, {"from", v.from},
           {"to", v.to},     {"date", v.date},       {"actor", v.actor}, {"note", v.note},
           {"revision", v.revision}};
}
void from_json(const json& j, StatusChange& v) {
  v.id = j.at("id").get<std::string>();
  v.barcode = j.at("barcode").get<std::string>();
  v.event = j.at("event").get<LifecycleEvent>();
  v.from = j.at("from").get<Condition>();
  v.to = j.at("to").get<Condition>();
  v.date = j.at("date").get<Date>();
  v.actor = j.at("actor").get<std::string>();
  v.note = j.at("note").get<std::string>();
  v.revision = j.at("revision").get<std::uint64_t>();
}

void to_json(json& j, const RepairRecord& v) {
  j = json{{"id", v.id},
           {"barcode", v.barcode},
           {"opened_date", v.opened_date},
           {"completed_date", optional_json(v.completed_date)},
           {"description", v.description},
           {"cost", optional_json(v.cost)},
           {"actor", v.actor},
           {"completed_by", optional_json(v.completed_by)},
           {"status", v.status}};
}
void from_json(const json& j, RepairRecord& v) {
  v.id = j.at("id").get<std::string>();
  v.barcode = j.at("barcode").get<std::string>();
  v.opened_date = j.at("opened_date").get<Date>();
  v.completed_date = optional_from<Date>(j, "completed_date");
  v.description = j.at("description").get<std::string>();
  v.cost = optional_from<Money>(j, "cost");
  v.actor = j.at("actor").get<std::string>();
  v.completed_by = optional_from<std::string>(j, "completed_by");
  v.status = j.at("status").get<RepairStatus>();
}

void to_json(json& j, const WarrantyReport& v) {
  json in = json::array(), expired = json::array(), none = json::array();
  for (const auto& e : v.in_warranty) in.push_back({{"item", e.item}, {"days_remaining", e.days}});
  for (const auto& e : v.expired) expired.push_back({{"item", e.item}, {"days_since", e.days}});
  for (const auto& i : v.none) none.push_back(i);
  j = json{{"in_warranty", std::move(in)}, {"expired", std::move(expired)}, {"none", std::move(none)}};
}

void to_json(json& j, const MaintenanceDue& v) {
  j = json{{"item", v.item}, {"due_date", v.due_date}, {"days_overdue", v.days_overdue}};
}

void to_json(json& j, const ItemHistory& v) {
  j = json{{"transfers", v.transfers},
           {"status_changes", v.status_changes},
           {"repairs", v.repairs}};
}

}  // namespace facmon
