#include "facmon/api.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "facmon/catalog.hpp"
#include "facmon/codec.hpp"
#include "facmon/crypto.hpp"
#include "facmon/csv.hpp"

namespace facmon {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UNKNOWN_PARENT:
    case ErrorCode::UNKNOWN_REFERENCE:
    case ErrorCode::UNKNOWN_ITEM:
    case ErrorCode::UNKNOWN_LOCATION:
    case ErrorCode::UNKNOWN_REPAIR:
    case ErrorCode::UNKNOWN_RECORD:
    case ErrorCode::UNKNOWN_USER:
    case ErrorCode::UNKNOWN_BLOB:
    case ErrorCode::UNKNOWN_ROUTE:
      return 404;

    case ErrorCode::DUPLICATE_CODE:
    case ErrorCode::DUPLICATE_BARCODE:
    case ErrorCode::DUPLICATE_USERNAME:
    case ErrorCode::SAME_LOCATION:
    case ErrorCode::WRONG_STATE:
    case ErrorCode::ILLEGAL_TRANSITION:
    case ErrorCode::CONFLICT:
    case ErrorCode::ALREADY_SEEDED:
    case ErrorCode::TERMINAL_ITEM:
    case ErrorCode::NOT_DAMAGED:
    case ErrorCode::REPAIR_ALREADY_OPEN:
    case ErrorCode::ALREADY_COMPLETED:
    case ErrorCode::CONSTRAINT_VIOLATION:
      return 409;

    case ErrorCode::EMPTY_BARCODE:
    case ErrorCode::EMPTY_PAYLOAD:
    case ErrorCode::EMPTY_FINDING:
    case ErrorCode::INVALID_CHARS:
    case ErrorCode::INVALID_WARRANTY_RANGE:
    case ErrorCode::INVALID_DATE_ORDER:
    case ErrorCode::INVALID_PERIOD:
    case ErrorCode::INVALID_USERNAME:
    case ErrorCode::INVALID_RANGE:
    case ErrorCode::INVALID_ARGUMENT:
    case ErrorCode::INVALID_REQUEST:
    case ErrorCode::TOO_LONG:
    case ErrorCode::WEAK_PASSWORD:
    case ErrorCode::MISSING_WORK_UNIT:
    case ErrorCode::HEADER_MISMATCH:
      return 422;

    case ErrorCode::INVALID_CREDENTIALS:
    case ErrorCode::UNAUTHENTICATED:
      return 401;

    case ErrorCode::FORBIDDEN:
    case ErrorCode::ACCOUNT_INACTIVE:
      return 403;

    case ErrorCode::UNSUPPORTED_MEDIA_TYPE:
      return 415;
    case ErrorCode::PAYLOAD_TOO_LARGE:
      return 413;

    case ErrorCode::CONFIG_ERROR:
    case ErrorCode::BIND_FAILURE:
    case ErrorCode::DATA_DIR_UNWRITABLE:
    case ErrorCode::DATA_DIR_LOCKED:
    case ErrorCode::CORRUPT_STORE:
    case ErrorCode::INTERNAL:
      return 500;
  }
  return 500;
}

namespace {

struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct Ctx {
  Services& s;
  const httplib::Request& req;
  Actor actor;
  const RouteInfo& route;

  [[nodiscard]] bool scoped() const {
    return route.scoped_permission && !permits(actor.role, *route.permission);
  }
};

using HandlerFn = Reply (*)(Ctx&);

struct Route {
  RouteInfo info;
  HandlerFn handler;
};

Reply ok(const json& j, int status = 200) { return Reply{status, j.dump(), "application/json"}; }

Reply error_reply(ErrorCode code, const std::string& message) {
  json j{{"code", to_string(code)}, {"message", message}};
  return Reply{http_status(code), j.dump(), "application/json"};
}

// ---- request decoding ----

json body_object(const httplib::Request& req) {
  if (req.body.empty()) fail(ErrorCode::INVALID_REQUEST, "request body must be a JSON object");
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::INVALID_REQUEST, "request body must be a JSON object");
  }
  return j;
}

std::optional<std::string> opt_str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail(ErrorCode::INVALID_REQUEST, std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::string req_str(const json& j, const char* key) {
  auto v = opt_str(j, key);
  if (!v) fail(ErrorCode::INVALID_REQUEST, std::string(key) + " is required");
  return *v;
}

std::optional<Date> opt_date(const json& j, const char* key) {
  auto v = opt_str(j, key);
  if (!v) return std::nullopt;
  return Date::parse(*v);
}

std::optional<int> opt_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    fail(ErrorCode::INVALID_REQUEST, std::string(key) + " must be an integer");
  }
  return it->get<int>();
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

std::optional<Date> query_date(const httplib::Request& req, const char* key) {
  auto v = query(req, key);
  if (!v) return std::nullopt;
  return Date::parse(*v);
}

long long parse_count(const std::string& name, const std::string& text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0) {
    fail(ErrorCode::INVALID_ARGUMENT, name + " must be a non-negative integer");
  }
  return v;
}

std::string param(const Ctx& c, const char* name) { return c.req.path_params.at(name); }

template <typename T>
Reply page(const Ctx& c, const std::vector<T>& all) {
  long long limit = kDefaultPageLimit;
  long long offset = 0;
  if (auto v = query(c.req, "limit")) limit = parse_count("limit", *v);
  if (auto v = query(c.req, "offset")) offset = parse_count("offset", *v);
  if (limit < 1 || limit > kMaxPageLimit) {
    fail(ErrorCode::INVALID_ARGUMENT, "limit must be between 1 and " + std::to_string(kMaxPageLimit));
  }
  json data = json::array();
  auto n = static_cast<long long>(all.size());
  for (long long i = offset; i < n && i < offset + limit; ++i) data.push_back(json(all[static_cast<std::size_t>(i)]));
  return ok(json{{"data", std::move(data)}, {"total", n}, {"limit", limit}, {"offset", offset}});
}

// ---- references ----

ReferenceKind reference_kind(const std::string& segment) {
  if (segment == "campuses") return ReferenceKind::CAMPUS;
  if (segment == "locations") return ReferenceKind::LOCATION;
  if (segment == "categories") return ReferenceKind::CATEGORY;
  if (segment == "types") return ReferenceKind::TYPE;
  if (segment == "brands") return ReferenceKind::BRAND;
  if (segment == "sources") return ReferenceKind::SOURCE;
  fail(ErrorCode::UNKNOWN_ROUTE, "unknown reference kind '" + segment + "'");
}

TaxonomyKind taxonomy_of(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::CATEGORY: return TaxonomyKind::CATEGORY;
    case ReferenceKind::TYPE: return TaxonomyKind::TYPE;
    case ReferenceKind::BRAND: return TaxonomyKind::BRAND;
    case ReferenceKind::SOURCE: return TaxonomyKind::SOURCE;
    default: break;
  }
  fail(ErrorCode::INTERNAL, "not a taxonomy kind");
}

json reference_list(Services& s, ReferenceKind k) {
  switch (k) {
    case ReferenceKind::CAMPUS: return s.registry.campuses();
    case ReferenceKind::LOCATION: return s.registry.locations();
    default: return s.registry.taxonomy(taxonomy_of(k));
  }
}

json reference_doc(Services& s, ReferenceKind k, const std::string& id) {
  for (const auto& entry : reference_list(s, k)) {
    if (entry.value("id", std::string{}) == id) return entry;
  }
  fail(ErrorCode::INTERNAL, "reference vanished after write");
}

ReferenceInput reference_input(const json& j, ReferenceKind k) {
  ReferenceInput in;
  in.code = req_str(j, "code");
  in.name = req_str(j, "name");
  if (k == ReferenceKind::CAMPUS) in.address = opt_str(j, "address").value_or("");
  if (k == ReferenceKind::LOCATION) {
    in.campus_code = req_str(j, "campus_code");
    in.floor = opt_int(j, "floor").value_or(1);
  }
  return in;
}

Reply h_ref_list(Ctx& c) { return ok(reference_list(c.s, reference_kind(param(c, "kind")))); }

Reply h_ref_create(Ctx& c) {
  auto k = reference_kind(param(c, "kind"));
  auto id = c.s.registry.upsert_reference(k, reference_input(body_object(c.req), k), c.actor);
  return ok(reference_doc(c.s, k, id), 201);
}

Reply h_ref_update(Ctx& c) {
  auto k = reference_kind(param(c, "kind"));
  auto j = body_object(c.req);
  j["code"] = param(c, "code");
  auto id = c.s.registry.upsert_reference(k, reference_input(j, k), c.actor,
                                          UpsertMode::CreateOrUpdate);
  return ok(reference_doc(c.s, k, id));
}

Reply h_ref_deactivate(Ctx& c) {
  auto k = reference_kind(param(c, "kind"));
  auto campus = query(c.req, "campus").value_or("");
  if (k == ReferenceKind::LOCATION && campus.empty()) {
    fail(ErrorCode::INVALID_REQUEST, "campus query parameter is required for locations");
  }
  c.s.registry.deactivate_reference(k, param(c, "code"), c.actor, campus);
  return ok(json{{"code", param(c, "code")}, {"active", false}});
}

// ---- items ----

ItemFilter item_filter(const Ctx& c) {
  ItemFilter f;
  f.campus_code = query(c.req, "campus");
  f.location_code = query(c.req, "location");
  f.category_code = query(c.req, "category");
  if (auto v = query(c.req, "condition")) f.condition = parse_condition(*v);
  f.text = query(c.req, "q");
  if (c.actor.role == Role::WORK_UNIT) f.location_ids = c.actor.assigned_locations;
  return f;
}

Item visible_item(const Ctx& c, const std::string& barcode) {
  auto item = c.s.registry.get_item(barcode);
  if (c.actor.role == Role::WORK_UNIT) {
    const auto& own = c.actor.assigned_locations;
    if (std::find(own.begin(), own.end(), item.location_id) == own.end()) {
      fail(ErrorCode::UNKNOWN_ITEM, "item " + item.barcode + " does not exist");
    }
  }
  return item;
}

Reply h_item_register(Ctx& c) {
  auto j = body_object(c.req);
  ItemReceipt r;
  r.name = req_str(j, "name");
  r.specification = opt_str(j, "specification").value_or("");
  r.category_code = req_str(j, "category_code");
  r.type_code = req_str(j, "type_code");
  r.brand_code = req_str(j, "brand_code");
  r.source_code = req_str(j, "source_code");
  auto purchase = opt_date(j, "purchase_date");
  if (!purchase) fail(ErrorCode::INVALID_REQUEST, "purchase_date is required");
  r.purchase_date = *purchase;
  r.warranty_end_date = opt_date(j, "warranty_end_date");
  r.maintenance_interval_days = opt_int(j, "maintenance_interval_days");
  r.campus_code = req_str(j, "campus_code");
  r.location_code = req_str(j, "location_code");
  r.custodian = opt_str(j, "custodian").value_or("");
  auto barcode = opt_str(j, "barcode");
  r.barcode = barcode ? *barcode : c.s.registry.generate_barcode(r.campus_code, r.category_code);
  return ok(c.s.registry.register_item(r, c.actor, c.s.today()), 201);
}

Reply h_item_list(Ctx& c) { return page(c, c.s.registry.list_items(item_filter(c))); }

Reply h_item_get(Ctx& c) { return ok(visible_item(c, param(c, "barcode"))); }

Reply h_item_history(Ctx& c) {
  visible_item(c, param(c, "barcode"));
  return ok(c.s.lifecycle.history(param(c, "barcode")));
}

Reply h_item_transfer(Ctx& c) {
  auto j = body_object(c.req);
  LocationAddress to{req_str(j, "campus_code"), req_str(j, "location_code")};
  auto date = opt_date(j, "date").value_or(c.s.today());
  return ok(c.s.lifecycle.transfer_item(param(c, "barcode"), to, c.actor, date, opt_str(j, "note")),
            201);
}

Reply h_item_status(Ctx& c) {
  auto j = body_object(c.req);
  auto event = parse_event(req_str(j, "event"));
  auto date = opt_date(j, "date").value_or(c.s.today());
  return ok(c.s.lifecycle.change_status(param(c, "barcode"), event, c.actor, date,
                                        opt_str(j, "note").value_or("")),
            201);
}

struct Upload {
  PhotoView view;
  std::string bytes;
  std::string media_type;
};

Upload read_upload(const httplib::Request& req) {
  if (!req.is_multipart_form_data()) {
    fail(ErrorCode::INVALID_REQUEST, "photo upload must be multipart/form-data");
  }
  if (!req.has_file("view")) fail(ErrorCode::INVALID_REQUEST, "view field is required");
  if (!req.has_file("file")) fail(ErrorCode::INVALID_REQUEST, "file part is required");
  auto file = req.get_file_value("file");
  return Upload{parse_photo_view(req.get_file_value("view").content), std::move(file.content),
                file.content_type};
}

Reply h_item_photo(Ctx& c) {
  auto u = read_upload(c.req);
  return ok(c.s.registry.attach_photo(param(c, "barcode"), u.view, u.bytes, u.media_type, c.actor),
            201);
}

Reply h_repair_open(Ctx& c) {
  auto j = body_object(c.req);
  auto date = opt_date(j, "date").value_or(c.s.today());
  return ok(c.s.lifecycle.open_repair(param(c, "barcode"), date, req_str(j, "description"), c.actor),
            201);
}

Reply h_repair_get(Ctx& c) { return ok(c.s.lifecycle.get_repair(param(c, "id"))); }

Reply h_repair_complete(Ctx& c) {
  auto j = body_object(c.req);
  auto date = opt_date(j, "date").value_or(c.s.today());
  std::optional<Money> cost;
  if (auto it = j.find("cost"); it != j.end() && !it->is_null()) {
    if (it->is_string()) {
      cost = Money::parse(it->get<std::string>());
    } else if (it->is_number_unsigned()) {
      cost = Money{static_cast<std::int64_t>(it->get<std::uint64_t>()) * 100};
    } else {
      fail(ErrorCode::INVALID_REQUEST, "cost must be a decimal string");
    }
  }
  return ok(c.s.lifecycle.complete_repair(param(c, "id"), date, cost, c.actor));
}

// ---- monitoring ----

RecordFilter record_filter(const Ctx& c) {
  RecordFilter f;
  if (auto v = query(c.req, "status")) f.status = parse_finding_status(*v);
  f.campus_code = query(c.req, "campus");
  f.location_code = query(c.req, "location");
  if (auto v = query(c.req, "condition")) f.condition_of_item = parse_condition(*v);
  auto from = query_date(c.req, "from");
  auto to = query_date(c.req, "to");
  if (from || to) {
    if (!from || !to) fail(ErrorCode::INVALID_PERIOD, "from and to must be given together");
    f.period = std::pair{*from, *to};
  }
  f.reporter = query(c.req, "reporter");
  if (auto v = query(c.req, "linked")) {
    if (*v != "true" && *v != "false") fail(ErrorCode::INVALID_ARGUMENT, "linked must be true or false");
    f.item_linked = *v == "true";
  }
  if (c.scoped()) f.scope = RecordScope{c.actor.user_id, c.actor.assigned_locations};
  return f;
}

MonitoringRecord visible_record(const Ctx& c, const std::string& id) {
  auto rec = c.s.monitoring.get_record(id);
  if (c.scoped()) {
    const auto& own = c.actor.assigned_locations;
    bool visible = rec.reporter == c.actor.user_id ||
                   std::find(own.begin(), own.end(), rec.location_id) != own.end();
    if (!visible) fail(ErrorCode::UNKNOWN_RECORD, "record " + id + " does not exist");
  }
  return rec;
}

Reply h_finding_submit(Ctx& c) {
  auto j = body_object(c.req);
  FindingInput in;
  in.barcode = opt_str(j, "barcode");
  in.object_name = opt_str(j, "object_name").value_or("");
  in.object_description = opt_str(j, "object_description");
  in.date = opt_date(j, "date").value_or(c.s.today());
  auto campus = opt_str(j, "campus_code");
  auto location = opt_str(j, "location_code");
  if (campus || location) {
    if (!campus || !location) {
      fail(ErrorCode::INVALID_REQUEST, "campus_code and location_code must be given together");
    }
    in.location = LocationAddress{*campus, *location};
  }
  in.finding = opt_str(j, "finding").value_or("");
  in.recommendation = opt_str(j, "recommendation").value_or("");
  return ok(c.s.monitoring.submit_finding(in, c.actor), 201);
}

Reply h_finding_list(Ctx& c) { return page(c, c.s.monitoring.list_records(record_filter(c))); }

Reply h_finding_get(Ctx& c) { return ok(visible_record(c, param(c, "id"))); }

Reply h_finding_follow_up(Ctx& c) {
  auto j = body_object(c.req);
  return ok(c.s.monitoring.follow_up(param(c, "id"), opt_str(j, "note").value_or(""), c.actor));
}

Reply h_finding_resolve(Ctx& c) {
  auto j = body_object(c.req);
  auto date = opt_date(j, "resolution_date");
  if (!date) fail(ErrorCode::INVALID_REQUEST, "resolution_date is required");
  return ok(c.s.monitoring.resolve(param(c, "id"), *date, c.actor));
}

Reply h_finding_photo(Ctx& c) {
  auto id = param(c, "id");
  if (c.actor.role == Role::WORK_UNIT) {
    auto rec = c.s.monitoring.get_record(id);
    if (rec.reporter != c.actor.user_id) fail(ErrorCode::UNKNOWN_RECORD, "record " + id + " does not exist");
  }
  auto u = read_upload(c.req);
  return ok(c.s.monitoring.attach_photo(id, PhotoUpload{u.view, std::move(u.bytes), u.media_type},
                                        c.actor),
            201);
}

// ---- reports ----

Period query_period(const Ctx& c) {
  auto from = query_date(c.req, "from");
  auto to = query_date(c.req, "to");
  if (!from || !to) fail(ErrorCode::INVALID_PERIOD, "from and to are required");
  return Period{*from, *to};
}

Reply h_report_summary(Ctx& c) {
  auto period = query_period(c);
  auto as_of = query_date(c.req, "as_of").value_or(period.to);
  return ok(c.s.reporting.summary(period, as_of));
}

Reply h_report_by_condition(Ctx& c) {
  if (auto v = query(c.req, "condition")) {
    return ok(c.s.reporting.condition_view(parse_condition(*v)));
  }
  json all = json::object();
  for (auto cond : kAllConditions) all[std::string(to_string(cond))] = c.s.reporting.condition_view(cond);
  return ok(all);
}

Reply h_report_by_location(Ctx& c) {
  auto campus = query(c.req, "campus");
  auto location = query(c.req, "location");
  if (!campus || !location) fail(ErrorCode::INVALID_REQUEST, "campus and location are required");
  return ok(c.s.reporting.location_view(LocationAddress{*campus, *location}));
}

Reply h_report_warranty(Ctx& c) {
  return ok(c.s.lifecycle.warranty_report(query_date(c.req, "as_of").value_or(c.s.today())));
}

Reply h_report_maintenance(Ctx& c) {
  return ok(c.s.lifecycle.maintenance_due(query_date(c.req, "as_of").value_or(c.s.today())));
}

Reply csv_reply(std::string body) { return Reply{200, std::move(body), "text/csv; charset=utf-8"}; }

Reply h_export_items(Ctx& c) {
  ExportFilter f;
  f.items = item_filter(c);
  return csv_reply(c.s.reporting.export_csv(Dataset::ITEMS, f));
}

Reply h_export_monitoring(Ctx& c) {
  ExportFilter f;
  f.records = record_filter(c);
  return csv_reply(c.s.reporting.export_csv(Dataset::MONITORING, f));
}

Reply h_export_summary(Ctx& c) {
  ExportFilter f;
  f.period = query_period(c);
  f.as_of = query_date(c.req, "as_of");
  return csv_reply(c.s.reporting.export_csv(Dataset::SUMMARY, f));
}

Reply h_photo_get(Ctx& c) {
  auto hash = param(c, "hash");
  if (!crypto::is_sha256_hex(hash)) fail(ErrorCode::UNKNOWN_BLOB, "no such photo");
  auto bytes = c.s.store.get_blob(hash);
  std::string type = "application/octet-stream";
  if (bytes.size() >= 3 && bytes.compare(0, 3, "\xFF\xD8\xFF") == 0) type = "image/jpeg";
  if (bytes.size() >= 8 && bytes.compare(0, 8, "\x89PNG\r\n\x1A\n") == 0) type = "image/png";
  return Reply{200, std::move(bytes), type};
}

// ---- users & audit ----

Reply h_user_create(Ctx& c) {
  auto j = body_object(c.req);
  NewUser u;
  u.username = req_str(j, "username");
  u.password = req_str(j, "password");
  u.role = parse_role(req_str(j, "role"));
  u.work_unit_name = opt_str(j, "work_unit_name");
  if (auto it = j.find("locations"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) fail(ErrorCode::INVALID_REQUEST, "locations must be an array");
    for (const auto& loc : *it) {
      if (!loc.is_object()) fail(ErrorCode::INVALID_REQUEST, "locations entries must be objects");
      u.locations.push_back(LocationAddress{req_str(loc, "campus_code"), req_str(loc, "location_code")});
    }
  }
  return ok(c.s.auth.add_user(u, c.actor), 201);
}

Reply h_user_list(Ctx& c) { return ok(c.s.auth.list_users()); }

Reply h_user_deactivate(Ctx& c) { return ok(c.s.auth.deactivate_user(param(c, "username"), c.actor)); }

// Audit documents carry stored user records verbatim; digests never leave the server.
void redact_digests(json& j) {
  if (j.is_object()) {
    if (auto it = j.find("password_digest"); it != j.end()) *it = "[redacted]";
    for (auto& [key, value] : j.items()) redact_digests(value);
  } else if (j.is_array()) {
    for (auto& value : j) redact_digests(value);
  }
}

Reply h_audit(Ctx& c) {
  auto last = c.s.store.snapshot()->last_seq();
  std::uint64_t from = 1;
  std::uint64_t to = last;
  if (auto v = query(c.req, "from")) from = static_cast<std::uint64_t>(parse_count("from", *v));
  if (auto v = query(c.req, "to")) to = static_cast<std::uint64_t>(parse_count("to", *v));
  if (last == 0 && !c.req.has_param("from") && !c.req.has_param("to")) return page(c, std::vector<json>{});
  std::vector<json> entries;
  for (const auto& entry : c.s.store.audit_range(from, std::min(to, last))) {
    json j = entry;
    redact_digests(j);
    entries.push_back(std::move(j));
  }
  return page(c, entries);
}

// ---- public routes ----

Reply h_login(Ctx& c) {
  auto j = body_object(c.req);
  auto grant = c.s.auth.authenticate(req_str(j, "username"), req_str(j, "password"));
  return ok(json{{"token", grant.token},
                 {"username", grant.user.username},
                 {"role", grant.user.role},
                 {"expires_at", format_timestamp(grant.expires_at)}});
}

Reply h_health(Ctx& c) {
  if (!c.s.store.healthy()) return error_reply(ErrorCode::INTERNAL, "storage unavailable");
  return ok(json{{"status", "ok"}});
}

using P = Permission;

const std::vector<Route>& routes() {
  static const std::vector<Route> table = {
      {{"POST", "/api/login", std::nullopt, std::nullopt}, h_login},
      {{"GET", "/healthz", std::nullopt, std::nullopt}, h_health},

      {{"GET", "/api/references/:kind", P::ReferenceRead, std::nullopt}, h_ref_list},
      {{"POST", "/api/references/:kind", P::ReferenceWrite, std::nullopt}, h_ref_create},
      {{"PUT", "/api/references/:kind/:code", P::ReferenceWrite, std::nullopt}, h_ref_update},
      {{"DELETE", "/api/references/:kind/:code", P::ReferenceWrite, std::nullopt}, h_ref_deactivate},

      {{"POST", "/api/items", P::ItemRegister, std::nullopt}, h_item_register},
      {{"GET", "/api/items", P::ItemRead, std::nullopt}, h_item_list},
      {{"GET", "/api/items/:barcode", P::ItemRead, std::nullopt}, h_item_get},
      {{"GET", "/api/items/:barcode/history", P::ItemRead, std::nullopt}, h_item_history},
      {{"POST", "/api/items/:barcode/transfer", P::ItemTransfer, std::nullopt}, h_item_transfer},
      {{"POST", "/api/items/:barcode/status", P::ItemStatus, std::nullopt}, h_item_status},
      {{"POST", "/api/items/:barcode/photos", P::ItemRegister, std::nullopt}, h_item_photo},
      {{"POST", "/api/items/:barcode/repairs", P::ItemRepair, std::nullopt}, h_repair_open},
      {{"GET", "/api/repairs/:id", P::ItemRepair, std::nullopt}, h_repair_get},
      {{"POST", "/api/repairs/:id/complete", P::ItemRepair, std::nullopt}, h_repair_complete},

      {{"POST", "/api/monitoring", P::FindingSubmit, std::nullopt}, h_finding_submit},
      {{"GET", "/api/monitoring", P::FindingRead, P::FindingReadOwn}, h_finding_list},
      {{"GET", "/api/monitoring/:id", P::FindingRead, P::FindingReadOwn}, h_finding_get},
      {{"POST", "/api/monitoring/:id/follow-up", P::FindingFollowUp, std::nullopt}, h_finding_follow_up},
      {{"POST", "/api/monitoring/:id/resolve", P::FindingResolve, std::nullopt}, h_finding_resolve},
      {{"POST", "/api/monitoring/:id/photos", P::PhotoUpload, std::nullopt}, h_finding_photo},

      {{"GET", "/api/reports/summary", P::ReportRead, std::nullopt}, h_report_summary},
      {{"GET", "/api/reports/by-condition", P::ReportRead, std::nullopt}, h_report_by_condition},
      {{"GET", "/api/reports/by-location", P::ReportRead, std::nullopt}, h_report_by_location},
      {{"GET", "/api/reports/warranty", P::ReportRead, std::nullopt}, h_report_warranty},
      {{"GET", "/api/reports/maintenance-due", P::ReportRead, std::nullopt}, h_report_maintenance},

      {{"GET", "/api/export/items.csv", P::ReportRead, std::nullopt}, h_export_items},
      {{"GET", "/api/export/monitoring.csv", P::ReportRead, std::nullopt}, h_export_monitoring},
      {{"GET", "/api/export/summary.csv", P::ReportRead, std::nullopt}, h_export_summary},

      {{"GET", "/api/photos/:hash", P::ItemRead, std::nullopt}, h_photo_get},

      {{"POST", "/api/users", P::UserManage, std::nullopt}, h_user_create},
      {{"GET", "/api/users", P::UserManage, std::nullopt}, h_user_list},
      {{"POST", "/api/users/:username/deactivate", P::UserManage, std::nullopt}, h_user_deactivate},

      {{"GET", "/api/audit", P::AuditRead, std::nullopt}, h_audit},
  };
  return table;
}

std::string bearer_token(const httplib::Request& req) {
  auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) {
    fail(ErrorCode::UNAUTHENTICATED, "missing bearer token");
  }
  return header.substr(prefix.size());
}

}  // namespace

const std::vector<RouteInfo>& route_table() {
  static const std::vector<RouteInfo> table = [] {
    std::vector<RouteInfo> out;
    for (const auto& r : routes()) out.push_back(r.info);
    return out;
  }();
  return table;
}

struct ApiServer::Impl {
  Services& services;
  ApiOptions options;
  httplib::Server server;
  std::thread thread;
  std::shared_ptr<spdlog::logger> log;

  Impl(Services& s, ApiOptions o) : services(s), options(std::move(o)) {
    log = options.access_log ? options.access_log : spdlog::default_logger();
    server.set_payload_max_length(options.max_upload_bytes);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      ErrorCode code = ErrorCode::INTERNAL;
      if (res.status == 404) code = ErrorCode::UNKNOWN_ROUTE;
      if (res.status == 413) code = ErrorCode::PAYLOAD_TOO_LARGE;
      if (res.status == 400) code = ErrorCode::INVALID_REQUEST;
      auto reply = error_reply(code, httplib::status_message(res.status));
      res.set_content(reply.body, reply.content_type);
      return httplib::Server::HandlerResponse::Handled;
    });
    server.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
      log->info("{} {} {}", req.method, req.path, res.status);
    });
    for (const auto& route : routes()) install(route);
  }

  void install(const Route& route) {
    auto handler = [this, &route](const httplib::Request& req, httplib::Response& res) {
      Reply reply;
      try {
        Actor actor = Actor::system();
        if (route.info.authenticated()) {
          actor = services.auth.resolve_session(bearer_token(req));
          if (!route.info.allows(actor.role)) {
            fail(ErrorCode::FORBIDDEN, "role " + std::string(to_string(actor.role)) +
                                           " may not " + route.info.method + " " + route.info.pattern);
          }
        }
        Ctx ctx{services, req, std::move(actor), route.info};
        reply = route.handler(ctx);
      } catch (const Error& e) {
        reply = error_reply(e.code(), e.what());
      } catch (const json::exception& e) {
        reply = error_reply(ErrorCode::INVALID_REQUEST, e.what());
      } catch (const std::exception& e) {
        log->error("{} {} failed: {}", req.method, req.path, e.what());
        reply = error_reply(ErrorCode::INTERNAL, "internal error");
      }
      res.status = reply.status;
      res.set_content(std::move(reply.body), reply.content_type);
    };
    const auto& m = route.info.method;
    const auto& p = route.info.pattern;
    if (m == "GET") server.Get(p, handler);
    else if (m == "POST") server.Post(p, handler);
    else if (m == "PUT") server.Put(p, handler);
    else if (m == "DELETE") server.Delete(p, handler);
  }
};

ApiServer::ApiServer(Services& services, ApiOptions options)
    : impl_(std::make_unique<Impl>(services, std::move(options))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ < 0) fail(ErrorCode::BIND_FAILURE, "cannot bind " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      fail(ErrorCode::BIND_FAILURE, "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  return port_;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }

void ApiServer::start() {
  impl_->thread = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace facmon
