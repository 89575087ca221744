#include "facmon/catalog.hpp"

#include "facmon/crypto.hpp"

namespace facmon {

std::string_view entity_kind(TaxonomyKind k) noexcept {
  switch (k) {
    case TaxonomyKind::CATEGORY: return kind::kCategory;
    case TaxonomyKind::TYPE: return kind::kType;
    case TaxonomyKind::BRAND: return kind::kBrand;
    case TaxonomyKind::SOURCE: return kind::kSource;
  }
  return kind::kCategory;
}

std::string location_key(std::string_view campus_id, std::string_view code) {
  std::string key(campus_id);
  key.push_back('|');
  key.append(code);
  return key;
}

std::string make_id(std::string_view prefix) {
  std::string id(prefix);
  id.push_back('_');
  id.append(crypto::random_hex(8));
  return id;
}

std::optional<CampusRef> Catalog::campus_by_code(std::string_view code) const {
  return get<CampusRef>(kind::kCampus, code);
}

std::optional<CampusRef> Catalog::campus_by_id(std::string_view id) const {
  for (const auto& [key, vd] : snap_->kind(kind::kCampus)) {
    if (vd.doc->value("id", std::string{}) == id) return vd.doc->get<CampusRef>();
  }
  return std::nullopt;
}

std::vector<CampusRef> Catalog::campuses() const { return all<CampusRef>(kind::kCampus); }

std::optional<LocationRef> Catalog::location(const LocationAddress& address) const {
  auto campus = campus_by_code(address.campus_code);
  if (!campus) return std::nullopt;
  return get<LocationRef>(kind::kLocation, location_key(campus->id, address.location_code));
}

std::optional<LocationRef> Catalog::location_by_id(std::string_view id) const {
  for (const auto& [key, vd] : snap_->kind(kind::kLocation)) {
    if (vd.doc->value("id", std::string{}) == id) return vd.doc->get<LocationRef>();
  }
  return std::nullopt;
}

std::vector<LocationRef> Catalog::locations() const { return all<LocationRef>(kind::kLocation); }

LocationAddress Catalog::address_of(std::string_view location_id) const {
  auto loc = location_by_id(location_id);
  if (!loc) return {};
  auto campus = campus_by_id(loc->campus_id);
  return {campus ? campus->code : std::string{}, loc->code};
}

std::optional<TaxonomyRef> Catalog::taxonomy(TaxonomyKind k, std::string_view code) const {
  return get<TaxonomyRef>(entity_kind(k), code);
}

std::optional<TaxonomyRef> Catalog::taxonomy_by_id(TaxonomyKind k, std::string_view id) const {
  for (const auto& [key, vd] : snap_->kind(entity_kind(k))) {
    if (vd.doc->value("id", std::string{}) == id) return vd.doc->get<TaxonomyRef>();
  }
  return std::nullopt;
}

std::vector<TaxonomyRef> Catalog::taxonomy_list(TaxonomyKind k) const {
  return all<TaxonomyRef>(entity_kind(k));
}

std::optional<Item> Catalog::item(std::string_view barcode) const {
  return get<Item>(kind::kItem, barcode);
}

std::vector<Item> Catalog::items() const { return all<Item>(kind::kItem); }

}  // namespace facmon
