#pragma once

// JSON representations of the domain value types. The same shapes are used in
// the journal and on the wire: snake_case keys, ISO-8601 dates, enum names.

#include <optional>

#include <nlohmann/json.hpp>

#include "facmon/domain.hpp"

namespace facmon {

void to_json(nlohmann::json& j, const Date& d);
void from_json(const nlohmann::json& j, Date& d);

void to_json(nlohmann::json& j, const CampusRef& v);
void from_json(const nlohmann::json& j, CampusRef& v);
void to_json(nlohmann::json& j, const LocationRef& v);
void from_json(const nlohmann::json& j, LocationRef& v);
void to_json(nlohmann::json& j, const TaxonomyRef& v);
void from_json(const nlohmann::json& j, TaxonomyRef& v);
void to_json(nlohmann::json& j, const LocationAddress& v);
void from_json(const nlohmann::json& j, LocationAddress& v);
void to_json(nlohmann::json& j, const PhotoRef& v);
void from_json(const nlohmann::json& j, PhotoRef& v);
void to_json(nlohmann::json& j, const Item& v);
void from_json(const nlohmann::json& j, Item& v);
void to_json(nlohmann::json& j, const WarrantyStatus& v);
void to_json(nlohmann::json& j, const Money& v);
void from_json(const nlohmann::json& j, Money& v);

NLOHMANN_JSON_SERIALIZE_ENUM(Condition, {{Condition::GOOD, "GOOD"},
                                         {Condition::LIGHT_DAMAGE, "LIGHT_DAMAGE"},
                                         {Condition::HEAVY_DAMAGE, "HEAVY_DAMAGE"},
                                         {Condition::LOST, "LOST"},
                                         {Condition::DONATED, "DONATED"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LifecycleEvent,
                             {{LifecycleEvent::REPORT_LIGHT_DAMAGE, "REPORT_LIGHT_DAMAGE"},
                              {LifecycleEvent::REPORT_HEAVY_DAMAGE, "REPORT_HEAVY_DAMAGE"},
                              {LifecycleEvent::REPORT_LOST, "REPORT_LOST"},
                              {LifecycleEvent::DONATE, "DONATE"},
                              {LifecycleEvent::REPAIR_COMPLETE, "REPAIR_COMPLETE"},
                              {LifecycleEvent::RECOVER, "RECOVER"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Role, {{Role::FACILITIES_ADMIN, "FACILITIES_ADMIN"},
                                    {Role::WORK_UNIT, "WORK_UNIT"},
                                    {Role::LEADERSHIP, "LEADERSHIP"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PhotoView, {{PhotoView::FRONT, "FRONT"},
                                         {PhotoView::SIDE, "SIDE"},
                                         {PhotoView::BACK, "BACK"},
                                         {PhotoView::SERIAL, "SERIAL"}})
NLOHMANN_JSON_SERIALIZE_ENUM(TaxonomyKind, {{TaxonomyKind::CATEGORY, "CATEGORY"},
                                            {TaxonomyKind::TYPE, "TYPE"},
                                            {TaxonomyKind::BRAND, "BRAND"},
                                            {TaxonomyKind::SOURCE, "SOURCE"}})

// Helpers for optional members: absent values are written as null.
template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace facmon
