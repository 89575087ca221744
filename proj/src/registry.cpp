#include "facmon/registry.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "facmon/error.hpp"

namespace facmon {

namespace {

constexpr std::array<DefaultCategory, 20> kDefaultCategories = {{
    {"C01", "Mesin ketik dan Hitung"},
    {"C02", "Alat Reproduksi (Pengganda)"},
    {"C03", "Peralatan Penyimpanan Peralatan Ktr"},
    {"C04", "Alat Kantor Lainnya"},
    {"C05", "Peralatan Rumah Tangga"},
    {"C06", "Alat Pembersih"},
    {"C07", "Perangkat Pendingin"},
    {"C08", "Peralatan Dapur"},
    {"C09", "Peralatan Rumah Berlangganan Lainnya"},
    {"C10", "Alat Pemadam Kebakaran"},
    {"C11", "Komputer"},
    {"C12", "Komputer Pribadi"},
    {"C13", "Peralatan Komputer Mainframe"},
    {"C14", "Peralatan Komputer Mini"},
    {"C15", "Peralatan Komputer Pribadi"},
    {"C16", "Peralatan Jaringan"},
    {"C17", "Peralatan Studio dan Peralatan Komunikasi"},
    {"C18", "Peralatan Video dan Film Studio"},
    {"C19", "Peralatan Video dan Film Studio A"},
    {"C20", "Peralatan Percetakan"},
}};

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Codes are trimmed and uppercased; printable, no separators used in storage keys.
std::string normalize_code(std::string_view raw, std::size_t max_len, std::string_view what) {
  auto code = upper(trim(raw));
  if (code.empty()) fail(ErrorCode::INVALID_ARGUMENT, std::string(what) + " code is empty");
  if (code.size() > max_len) {
    fail(ErrorCode::INVALID_ARGUMENT,
         std::string(what) + " code longer than " + std::to_string(max_len) + " characters");
  }
  for (char c : code) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_';
    if (!ok) fail(ErrorCode::INVALID_ARGUMENT, std::string(what) + " code has invalid characters");
  }
  return code;
}

std::string require_text(std::string_view raw, std::string_view what) {
  auto text = trim(raw);
  if (text.empty()) fail(ErrorCode::INVALID_ARGUMENT, std::string(what) + " is required");
  return text;
}

std::optional<TaxonomyKind> taxonomy_kind_of(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::CATEGORY: return TaxonomyKind::CATEGORY;
    case ReferenceKind::TYPE: return TaxonomyKind::TYPE;
    case ReferenceKind::BRAND: return TaxonomyKind::BRAND;
    case ReferenceKind::SOURCE: return TaxonomyKind::SOURCE;
    default: return std::nullopt;
  }
}

std::string actor_name(const Actor& a) { return a.user_id; }

struct ValidatedReceipt {
  Item item;
  std::vector<std::pair<std::string, std::string>> cited;  // (kind, key) read set
};

// Resolves and validates one receipt against `catalog`. `taken` holds barcodes
// claimed earlier in the same batch.
ValidatedReceipt validate_receipt(const ItemReceipt& r, const Catalog& catalog,
                                  const std::set<std::string>& taken, Date date) {
  ValidatedReceipt out;
  auto& item = out.item;
  item.barcode = normalize_barcode(r.barcode);
  if (catalog.item(item.barcode) || taken.count(item.barcode)) {
    fail(ErrorCode::DUPLICATE_BARCODE, "barcode " + item.barcode + " is already registered");
  }
  if (r.warranty_end_date && *r.warranty_end_date < r.purchase_date) {
    fail(ErrorCode::INVALID_WARRANTY_RANGE, "warranty ends before the purchase date");
  }
  if (r.maintenance_interval_days && *r.maintenance_interval_days <= 0) {
    fail(ErrorCode::INVALID_ARGUMENT, "maintenance interval must be a positive number of days");
  }
  item.name = require_text(r.name, "item name");

  auto resolve = [&](TaxonomyKind k, std::string_view code) {
    auto normalized = upper(trim(code));
    auto ref = catalog.taxonomy(k, normalized);
    if (!ref || !ref->active) {
      fail(ErrorCode::UNKNOWN_REFERENCE, lower(to_string(k)) + " '" + std::string(code) +
                                             "' does not exist or is inactive");
    }
    out.cited.emplace_back(std::string(entity_kind(k)), ref->code);
    return ref->id;
  };
  item.category_id = resolve(TaxonomyKind::CATEGORY, r.category_code);
  item.type_id = resolve(TaxonomyKind::TYPE, r.type_code);
  item.brand_id = resolve(TaxonomyKind::BRAND, r.brand_code);
  item.source_id = resolve(TaxonomyKind::SOURCE, r.source_code);

  LocationAddress address{upper(trim(r.campus_code)), upper(trim(r.location_code))};
  auto campus = catalog.campus_by_code(address.campus_code);
  auto location = catalog.location(address);
  if (!campus || !campus->active || !location || !location->active) {
    fail(ErrorCode::UNKNOWN_REFERENCE, "location '" + address.campus_code + "/" +
                                           address.location_code +
                                           "' does not exist or is inactive");
  }
  out.cited.emplace_back(std::string(kind::kCampus), campus->code);
  out.cited.emplace_back(std::string(kind::kLocation), location_key(campus->id, location->code));

  item.id = make_id("itm");
  item.specification = trim(r.specification);
  item.purchase_date = r.purchase_date;
  item.warranty_end_date = r.warranty_end_date;
  item.maintenance_interval_days = r.maintenance_interval_days;
  item.condition = Condition::GOOD;
  item.location_id = location->id;
  item.custodian = trim(r.custodian);
  item.registered_on = date;
  return out;
}

}  // namespace

const std::array<DefaultCategory, 20>& default_categories() noexcept { return kDefaultCategories; }

std::string Registry::upsert_reference(ReferenceKind kind, const ReferenceInput& input,
                                       const Actor& actor, UpsertMode mode) {
  Catalog catalog(store_.snapshot());
  Changeset cs;
  cs.actor = actor_name(actor);

  auto existing_or_dup = [&](bool exists, std::string_view code) {
    if (exists && mode == UpsertMode::CreateOnly) {
      fail(ErrorCode::DUPLICATE_CODE,
           lower(to_string(kind)) + " code '" + std::string(code) + "' already exists");
    }
  };

  if (kind == ReferenceKind::CAMPUS) {
    CampusRef ref;
    ref.code = normalize_code(input.code, 8, "campus");
    ref.name = require_text(input.name, "campus name");
    ref.address = trim(input.address);
    auto prev = catalog.campus_by_code(ref.code);
    existing_or_dup(prev.has_value(), ref.code);
    ref.id = prev ? prev->id : make_id("cmp");
    cs.action = prev ? "reference.update" : "reference.create";
    cs.put(std::string(kind::kCampus), ref.code, catalog.version(kind::kCampus, ref.code), ref);
    store_.commit(cs);
    return ref.id;
  }

  if (kind == ReferenceKind::LOCATION) {
    LocationRef ref;
    ref.code = normalize_code(input.code, 32, "location");
    ref.name = trim(input.name);
    if (ref.name.empty()) ref.name = ref.code;
    if (input.floor < 1) fail(ErrorCode::INVALID_ARGUMENT, "floor must be 1 or higher");
    ref.floor = input.floor;
    auto campus_code = upper(trim(input.campus_code));
    auto campus = catalog.campus_by_code(campus_code);
    if (!campus) fail(ErrorCode::UNKNOWN_PARENT, "campus '" + campus_code + "' does not exist");
    ref.campus_id = campus->id;
    auto key = location_key(campus->id, ref.code);
    auto prev = catalog.get<LocationRef>(kind::kLocation, key);
    existing_or_dup(prev.has_value(), ref.code);
    ref.id = prev ? prev->id : make_id("loc");
    cs.action = prev ? "reference.update" : "reference.create";
    cs.expect(std::string(kind::kCampus), campus->code, catalog.version(kind::kCampus, campus->code));
    cs.put(std::string(kind::kLocation), key, catalog.version(kind::kLocation, key), ref);
    store_.commit(cs);
    return ref.id;
  }

  auto tk = *taxonomy_kind_of(kind);
  TaxonomyRef ref;
  ref.kind = tk;
  ref.code = normalize_code(input.code, 16, lower(to_string(tk)));
  ref.name = require_text(input.name, lower(to_string(tk)) + " name");
  auto prev = catalog.taxonomy(tk, ref.code);
  existing_or_dup(prev.has_value(), ref.code);
  ref.id = prev ? prev->id : make_id("tax");
  cs.action = prev ? "reference.update" : "reference.create";
  auto ek = std::string(entity_kind(tk));
  cs.put(ek, ref.code, catalog.version(ek, ref.code), ref);
  store_.commit(cs);
  return ref.id;
}

void Registry::deactivate_reference(ReferenceKind kind, std::string_view raw_code,
                                    const Actor& actor, std::string_view campus_code) {
  Catalog catalog(store_.snapshot());
  auto code = upper(trim(raw_code));
  Changeset cs;
  cs.actor = actor_name(actor);
  cs.action = "reference.deactivate";
  auto missing = [&] {
    fail(ErrorCode::UNKNOWN_REFERENCE, lower(to_string(kind)) + " '" + code + "' does not exist");
  };
  if (kind == ReferenceKind::CAMPUS) {
    auto ref = catalog.campus_by_code(code);
    if (!ref) missing();
    ref->active = false;
    cs.put(std::string(kind::kCampus), code, catalog.version(kind::kCampus, code), *ref);
  } else if (kind == ReferenceKind::LOCATION) {
    auto campus = catalog.campus_by_code(upper(trim(campus_code)));
    if (!campus) missing();
    auto key = location_key(campus->id, code);
    auto ref = catalog.get<LocationRef>(kind::kLocation, key);
    if (!ref) missing();
    ref->active = false;
    cs.put(std::string(kind::kLocation), key, catalog.version(kind::kLocation, key), *ref);
  } else {
    auto tk = *taxonomy_kind_of(kind);
    auto ref = catalog.taxonomy(tk, code);
    if (!ref) missing();
    ref->active = false;
    auto ek = std::string(entity_kind(tk));
    cs.put(ek, code, catalog.version(ek, code), *ref);
  }
  store_.commit(cs);
}

std::vector<TaxonomyRef> Registry::seed_default_categories(const Actor& actor) {
  Catalog catalog(store_.snapshot());
  for (const auto& c : kDefaultCategories) {
    if (catalog.taxonomy(TaxonomyKind::CATEGORY, c.code)) {
      fail(ErrorCode::ALREADY_SEEDED, "category " + std::string(c.code) + " already exists");
    }
  }
  Changeset cs;
  cs.actor = actor_name(actor);
  cs.action = "reference.seed";
  cs.entity_kind = kind::kCategory;
  cs.entity_id = "C01..C20";
  std::vector<TaxonomyRef> out;
  for (const auto& c : kDefaultCategories) {
    TaxonomyRef ref{make_id("tax"), TaxonomyKind::CATEGORY, std::string(c.code),
                    std::string(c.name), true};
    cs.put(std::string(kind::kCategory), ref.code, 0, ref);
    out.push_back(std::move(ref));
  }
  store_.commit(cs);
  return out;
}

Item Registry::register_item(const ItemReceipt& receipt, const Actor& actor, Date date) {
  Catalog catalog(store_.snapshot());
  auto v = validate_receipt(receipt, catalog, {}, date);
  Changeset cs;
  cs.actor = actor_name(actor);
  cs.action = "item.register";
  for (const auto& [k, key] : v.cited) cs.expect(k, key, catalog.version(k, key));
  cs.put(std::string(kind::kItem), v.item.barcode, 0, v.item);
  store_.commit(cs);
  return v.item;
}

std::vector<Item> Registry::import_items(const std::vector<ItemReceipt>& receipts,
                                         const Actor& actor, Date date) {
  Catalog catalog(store_.snapshot());
  std::set<std::string> taken;
  std::set<std::pair<std::string, std::string>> cited;
  std::vector<Item> items;
  for (std::size_t i = 0; i < receipts.size(); ++i) {
    try {
      auto v = validate_receipt(receipts[i], catalog, taken, date);
      taken.insert(v.item.barcode);
      cited.insert(v.cited.begin(), v.cited.end());
      items.push_back(std::move(v.item));
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (items.empty()) return items;
  Changeset cs;
  cs.actor = actor_name(actor);
  cs.action = "item.import";
  cs.entity_kind = kind::kItem;
  cs.entity_id = std::to_string(items.size()) + " items";
  for (const auto& [k, key] : cited) cs.expect(k, key, catalog.version(k, key));
  for (const auto& item : items) cs.put(std::string(kind::kItem), item.barcode, 0, item);
  store_.commit(cs);
  return items;
}

PhotoRef Registry::attach_photo(std::string_view raw_barcode, PhotoView view,
                                std::string_view bytes, std::string_view media_type,
                                const Actor& actor) {
  Catalog catalog(store_.snapshot());
  auto barcode = normalize_barcode(raw_barcode);
  auto item = catalog.item(barcode);
  if (!item) fail(ErrorCode::UNKNOWN_ITEM, "no item with barcode " + barcode);
  if (bytes.empty()) fail(ErrorCode::EMPTY_PAYLOAD, "photo is empty");
  if (std::find(kPhotoMediaTypes.begin(), kPhotoMediaTypes.end(), media_type) ==
      kPhotoMediaTypes.end()) {
    fail(ErrorCode::UNSUPPORTED_MEDIA_TYPE,
         "photos must be image/jpeg or image/png, got '" + std::string(media_type) + "'");
  }
  PhotoRef ref{store_.put_blob(bytes), view, std::string(media_type), bytes.size()};
  auto version = catalog.version(kind::kItem, barcode);
  item->photos[view] = ref;
  Changeset cs;
  cs.actor = actor_name(actor);
  cs.action = "photo.upload";
  cs.put(std::string(kind::kItem), barcode, version, *item);
  store_.commit(cs);
  return ref;
}

Item Registry::get_item(std::string_view raw_barcode) const {
  Catalog catalog(store_.snapshot());
  auto barcode = normalize_barcode(raw_barcode);
  auto item = catalog.item(barcode);
  if (!item) fail(ErrorCode::UNKNOWN_ITEM, "no item with barcode " + barcode);
  return *item;
}

bool matches(const ItemFilter& f, const Item& item, const Catalog& catalog) {
  if (f.condition && item.condition != *f.condition) return false;
  if (f.location_ids && std::find(f.location_ids->begin(), f.location_ids->end(),
                                  item.location_id) == f.location_ids->end()) {
    return false;
  }
  if (f.campus_code || f.location_code) {
    auto address = catalog.address_of(item.location_id);
    if (f.campus_code && upper(trim(*f.campus_code)) != address.campus_code) return false;
    if (f.location_code && upper(trim(*f.location_code)) != address.location_code) return false;
  }
  if (f.category_code) {
    auto cat = catalog.taxonomy_by_id(TaxonomyKind::CATEGORY, item.category_id);
    if (!cat || cat->code != upper(trim(*f.category_code))) return false;
  }
  if (f.text && !f.text->empty()) {
    auto needle = lower(*f.text);
    auto has = [&](std::string_view hay) { return lower(hay).find(needle) != std::string::npos; };
    if (!has(item.barcode) && !has(item.name) && !has(item.specification) &&
        !has(item.custodian)) {
      return false;
    }
  }
  return true;
}

std::vector<Item> Registry::list_items(const ItemFilter& filter) const {
  Catalog catalog(store_.snapshot());
  std::vector<Item> out;
  for (auto& item : catalog.items()) {
    if (matches(filter, item, catalog)) out.push_back(std::move(item));
  }
  return out;
}

std::string Registry::generate_barcode(std::string_view campus_code,
                                       std::string_view category_code) const {
  Catalog catalog(store_.snapshot());
  auto prefix = upper(trim(campus_code)) + "-" + upper(trim(category_code)) + "-";
  normalize_barcode(prefix + "00000");
  int highest = 0;
  const auto& items = catalog.state().kind(kind::kItem);
  for (auto it = items.lower_bound(prefix); it != items.end() && it->first.starts_with(prefix);
       ++it) {
    auto tail = std::string_view(it->first).substr(prefix.size());
    if (tail.size() == 5 && std::all_of(tail.begin(), tail.end(), ::isdigit)) {
      highest = std::max(highest, std::stoi(std::string(tail)));
    }
  }
  if (highest >= 99999) fail(ErrorCode::TOO_LONG, "barcode sequence exhausted for " + prefix);
  auto seq = std::to_string(highest + 1);
  return prefix + std::string(5 - seq.size(), '0') + seq;
}

std::vector<CampusRef> Registry::campuses() const {
  return Catalog(store_.snapshot()).campuses();
}

std::vector<LocationRef> Registry::locations() const {
  return Catalog(store_.snapshot()).locations();
}

std::vector<TaxonomyRef> Registry::taxonomy(TaxonomyKind kind) const {
  return Catalog(store_.snapshot()).taxonomy_list(kind);
}

}  // namespace facmon
