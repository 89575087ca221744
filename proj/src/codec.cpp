#include "facmon/codec.hpp"

#include "facmon/error.hpp"

namespace facmon {

using nlohmann::json;

void to_json(json& j, const Date& d) { j = d.to_string(); }

void from_json(const json& j, Date& d) {
  if (!j.is_string()) fail(ErrorCode::INVALID_ARGUMENT, "dates must be YYYY-MM-DD strings");
  d = Date::parse(j.get_ref<const std::string&>());
}

void to_json(json& j, const CampusRef& v) {
  j = json{{"id", v.id}, {"code", v.code}, {"name", v.name}, {"address", v.address},
           {"active", v.active}};
}
void from_json(const json& j, CampusRef& v) {
  v.id = j.at("id").get<std::string>();
  v.code = j.at("code").get<std::string>();
  v.name = j.at("name").get<std::string>();
  v.address = j.at("address").get<std::string>();
  v.active = j.at("active").get<bool>();
}

void to_json(json& j, const LocationRef& v) {
  j = json{{"id", v.id},       {"code", v.code},           {"name", v.name},
           {"floor", v.floor}, {"campus_id", v.campus_id}, {"active", v.active}};
}
void from_json(const json& j, LocationRef& v) {
  v.id = j.at("id").get<std::string>();
  v.code = j.at("code").get<std::string>();
  v.name = j.at("name").get<std::string>();
  v.floor = j.at("floor").get<int>();
  v.campus_id = j.at("campus_id").get<std::string>();
  v.active = j.at("active").get<bool>();
}

void to_json(json& j, const TaxonomyRef& v) {
  j = json{{"id", v.id}, {"kind", v.kind}, {"code", v.code}, {"name", v.name},
           {"active", v.active}};
}
void from_json(const json& j, TaxonomyRef& v) {
  v.id = j.at("id").get<std::string>();
  v.kind = j.at("kind").get<TaxonomyKind>();
  v.code = j.at("code").get<std::string>();
  v.name = j.at("name").get<std::string>();
  v.active = j.at("active").get<bool>();
}

void to_json(json& j, const LocationAddress& v) {
  j = json{{"campus_code", v.campus_code}, {"location_code", v.location_code}};
}
void from_json(const json& j, LocationAddress& v) {
  v.campus_code = j.at("campus_code").get<std::string>();
  v.location_code = j.at("location_code").get<std::string>();
}

void to_json(json& j, const PhotoRef& v) {
  j = json{{"id", v.id}, {"view", v.view}, {"media_type", v.media_type},
           {"byte_length", v.byte_length}};
}
void from_json(const json& j, PhotoRef& v) {
  v.id = j.at("id").get<std::string>();
  v.view = j.at("view").get<PhotoView>();
  v.media_type = j.at("media_type").get<std::string>();
  v.byte_length = j.at("byte_length").get<std::uint64_t>();
}

void to_json(json& j, const Item& v) {
  json photos = json::array();
  for (const auto& [view, ref] : v.photos) photos.push_back(ref);
  j = json{{"id", v.id},
           {"barcode", v.barcode},
           {"name", v.name},
           {"specification", v.specification},
           {"category_id", v.category_id},
           {"type_id", v.type_id},
           {"brand_id", v.brand_id},
           {"source_id", v.source_id},
           {"purchase_date", v.purchase_date},
           {"warranty_end_date", optional_json(v.warranty_end_date)},
           {"maintenance_interval_days", optional_json(v.maintenance_interval_days)},
           {"condition", v.condition},
           {"location_id", v.location_id},
           {"custodian", v.custodian},
           {"photos", std::move(photos)},
           {"open_repair_id", optional_json(v.open_repair_id)},
           {"registered_on", optional_json(v.registered_on)}};
}
void from_json(const json& j, Item& v) {
  v.id = j.at("id").get<std::string>();
  v.barcode = j.at("barcode").get<std::string>();
  v.name = j.at("name").get<std::string>();
  v.specification = j.at("specification").get<std::string>();
  v.category_id = j.at("category_id").get<std::string>();
  v.type_id = j.at("type_id").get<std::string>();
  v.brand_id = j.at("brand_id").get<std::string>();
  v.source_id = j.at("source_id").get<std::string>();
  v.purchase_date = j.at("purchase_date").get<Date>();
  v.warranty_end_date = optional_from<Date>(j, "warranty_end_date");
  v.maintenance_interval_days = optional_from<int>(j, "maintenance_interval_days");
  v.condition = j.at("condition").get<Condition>();
  v.location_id = j.at("location_id").get<std::string>();
  v.custodian = j.at("custodian").get<std::string>();
  v.photos.clear();
  for (const auto& p : j.at("photos")) {
    auto ref = p.get<PhotoRef>();
    v.photos[ref.view] = std::move(ref);
  }
  v.open_repair_id = optional_from<std::string>(j, "open_repair_id");
  v.registered_on = optional_from<Date>(j, "registered_on");
}

void to_json(json& j, const WarrantyStatus& v) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoWarranty>) {
          j = json{{"status", "NONE"}};
        } else if constexpr (std::is_same_v<T, InWarranty>) {
          j = json{{"status", "IN_WARRANTY"}, {"days_remaining", s.days_remaining}};
        } else {
          j = json{{"status", "EXPIRED"}, {"days_since", s.days_since}};
        }
      },
      v);
}

void to_json(json& j, const Money& v) { j = v.to_string(); }

void from_json(const json& j, Money& v) {
  if (j.is_string()) {
    v = Money::parse(j.get_ref<const std::string&>());
  } else if (j.is_number_unsigned() || j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) fail(ErrorCode::INVALID_ARGUMENT, "amount must be non-negative");
    v = Money{j.get<std::int64_t>() * 100};
  } else {
    fail(ErrorCode::INVALID_ARGUMENT, "amount must be a decimal string or integer");
  }
}

}  // namespace facmon
