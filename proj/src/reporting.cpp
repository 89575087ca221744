#include "facmon/reporting.hpp"

#include <algorithm>

#include "facmon/auth.hpp"
#include "facmon/catalog.hpp"
#include "facmon/codec.hpp"
#include "facmon/csv.hpp"
#include "facmon/error.hpp"

namespace facmon {

using nlohmann::json;

namespace {

SummaryReport compute_summary(const Catalog& catalog, Period period, Date as_of) {
  if (period.to < period.from) fail(ErrorCode::INVALID_PERIOD, "period start is after its end");
  if (as_of < period.to) fail(ErrorCode::INVALID_PERIOD, "as_of precedes the end of the period");

  SummaryReport r;
  r.period = period;
  r.as_of = as_of;
  for (auto c : kAllConditions) r.items_by_condition[c] = 0;
  for (const auto& campus : catalog.campuses()) r.items_by_campus[campus.code] = 0;
  for (const auto& cat : catalog.taxonomy_list(TaxonomyKind::CATEGORY)) {
    r.items_by_category[cat.code] = 0;
  }

  std::map<std::string, std::string> campus_code_of_location;
  for (const auto& loc : catalog.locations()) {
    auto campus = catalog.campus_by_id(loc.campus_id);
    campus_code_of_location[loc.id] = campus ? campus->code : std::string{};
  }
  std::map<std::string, std::string> category_code_of;
  for (const auto& cat : catalog.taxonomy_list(TaxonomyKind::CATEGORY)) {
    category_code_of[cat.id] = cat.code;
  }

  for (const auto& item : catalog.items()) {
    ++r.items_total;
    ++r.items_by_condition[item.condition];
    ++r.items_by_campus[campus_code_of_location[item.location_id]];
    ++r.items_by_category[category_code_of[item.category_id]];
    if (is_terminal(item.condition)) continue;
    auto status = warranty_status(item.warranty_end_date, as_of);
    if (auto* in = std::get_if<InWarranty>(&status);
        in && in->days_remaining <= kWarrantyExpiryHorizonDays) {
      ++r.warranty_expiring_within_30_days;
    }
  }

  long latency_sum = 0;
  long opened_by_end = 0;
  long resolved_by_end = 0;
  for (const auto& rec : catalog.all<MonitoringRecord>(kind::kFinding)) {
    if (period.from <= rec.date && rec.date <= period.to) ++r.findings_opened;
    if (rec.date <= period.to) ++opened_by_end;
    if (rec.status == FindingStatus::RESOLVED && rec.resolution_date) {
      const auto& rd = *rec.resolution_date;
      if (rd <= period.to) ++resolved_by_end;
      if (period.from <= rd && rd <= period.to) {
        ++r.findings_resolved;
        latency_sum += rec.date.days_until(rd);
      }
    }
  }
  r.findings_open_at_end = std::max(0L, opened_by_end - resolved_by_end);
  if (r.findings_resolved > 0) {
    r.mean_resolution_days = static_cast<double>(latency_sum) / static_cast<double>(r.findings_resolved);
  }
  return r;
}

std::string number_text(double v) { return json(v).dump(); }

}  // namespace

Dataset parse_dataset(std::string_view s) {
  if (s == "ITEMS" || s == "items") return Dataset::ITEMS;
  if (s == "MONITORING" || s == "monitoring") return Dataset::MONITORING;
  if (s == "SUMMARY" || s == "summary") return Dataset::SUMMARY;
  fail(ErrorCode::INVALID_ARGUMENT, "unknown dataset '" + std::string(s) + "'");
}

SummaryReport Reporting::summary(Period period, Date as_of) const {
  return compute_summary(Catalog(store_.snapshot()), period, as_of);
}

std::vector<Item> Reporting::condition_view(Condition condition, const ItemFilter& scope) const {
  Catalog catalog(store_.snapshot());
  auto filter = scope;
  filter.condition = condition;
  std::vector<Item> out;
  for (auto& item : catalog.items()) {
    if (matches(filter, item, catalog)) out.push_back(std::move(item));
  }
  return out;
}

LocationView Reporting::location_view(const LocationAddress& address) const {
  Catalog catalog(store_.snapshot());
  auto upper = [](std::string s) {
    s = trim(s);
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  LocationAddress normalized{upper(address.campus_code), upper(address.location_code)};
  auto loc = catalog.location(normalized);
  if (!loc) {
    fail(ErrorCode::UNKNOWN_LOCATION, "location " + normalized.campus_code + "/" +
                                          normalized.location_code + " does not exist");
  }
  LocationView view;
  view.location = *loc;
  for (auto& item : catalog.items()) {
    if (item.location_id == loc->id) view.items.push_back(std::move(item));
  }
  for (auto& rec : catalog.all<MonitoringRecord>(kind::kFinding)) {
    if (rec.location_id == loc->id && rec.status != FindingStatus::RESOLVED) {
      view.open_findings.push_back(std::move(rec));
    }
  }
  std::sort(view.open_findings.begin(), view.open_findings.end(), [](const auto& a, const auto& b) {
    if (a.date != b.date) return b.date < a.date;
    return a.id < b.id;
  });
  return view;
}

std::string Reporting::export_csv(Dataset dataset, const ExportFilter& filter) const {
  auto snap = store_.snapshot();
  Catalog catalog(snap);
  std::string out;
  switch (dataset) {
    case Dataset::ITEMS: {
      out.append(csv::kItemHeader).push_back('\n');
      for (const auto& item : catalog.items()) {
        if (matches(filter.items, item, catalog)) csv::append_row(out, csv::item_row(item, catalog));
      }
      break;
    }
    case Dataset::MONITORING: {
      // Filtering reuses list_records semantics, then rows go out by id.
      auto records = Monitoring(store_).list_records(filter.records);
      std::sort(records.begin(), records.end(),
                [](const auto& a, const auto& b) { return a.id < b.id; });
      std::map<std::string, std::string> usernames;
      for (const auto& [key, vd] : snap->kind(kind::kUser)) {
        usernames[vd.doc->at("id").get<std::string>()] = key;
      }
      out.append(csv::kMonitoringHeader).push_back('\n');
      for (const auto& r : records) {
        auto who = usernames.count(r.reporter) ? usernames[r.reporter] : r.reporter;
        csv::append_row(out, {r.id, r.barcode.value_or(""), r.object_name, r.date.to_string(),
                              catalog.address_of(r.location_id).location_code, r.finding,
                              r.recommendation, std::string(to_string(r.status)),
                              r.resolution_date ? r.resolution_date->to_string() : std::string{},
                              who});
      }
      break;
    }
    case Dataset::SUMMARY: {
      if (!filter.period) fail(ErrorCode::INVALID_PERIOD, "summary export needs a period");
      auto s = compute_summary(catalog, *filter.period, filter.as_of.value_or(filter.period->to));
      out.append(csv::kSummaryHeader).push_back('\n');
      auto row = [&](std::string metric, std::string value) {
        csv::append_row(out, {std::move(metric), std::move(value)});
      };
      row("period_from", s.period.from.to_string());
      row("period_to", s.period.to.to_string());
      row("as_of", s.as_of.to_string());
      row("items_total", std::to_string(s.items_total));
      for (const auto& [c, n] : s.items_by_condition) {
        row("items_by_condition." + std::string(to_string(c)), std::to_string(n));
      }
      for (const auto& [code, n] : s.items_by_campus) row("items_by_campus." + code, std::to_string(n));
      for (const auto& [code, n] : s.items_by_category) {
        row("items_by_category." + code, std::to_string(n));
      }
      row("findings_opened", std::to_string(s.findings_opened));
      row("findings_resolved", std::to_string(s.findings_resolved));
      row("findings_open_at_end", std::to_string(s.findings_open_at_end));
      row("mean_resolution_days",
          s.mean_resolution_days ? number_text(*s.mean_resolution_days) : std::string{});
      row("warranty_expiring_within_30_days", std::to_string(s.warranty_expiring_within_30_days));
      break;
    }
  }
  return out;
}

void to_json(json& j, const SummaryReport& v) {
  json by_condition = json::object();
  for (const auto& [c, n] : v.items_by_condition) by_condition[std::string(to_string(c))] = n;
  j = json{{"period", {{"from", v.period.from}, {"to", v.period.to}}},
           {"as_of", v.as_of},
           {"items_total", v.items_total},
           {"items_by_condition", std::move(by_condition)},
           {"items_by_campus", v.items_by_campus},
           {"items_by_category", v.items_by_category},
           {"findings_opened", v.findings_opened},
           {"findings_resolved", v.findings_resolved},
           {"findings_open_at_end", v.findings_open_at_end},
           {"mean_resolution_days", optional_json(v.mean_resolution_days)},
           {"warranty_expiring_within_30_days", v.warranty_expiring_within_30_days}};
}

void to_json(json& j, const LocationView& v) {
  j = json{{"location", v.location}, {"items", v.items}, {"open_findings", v.open_findings}};
}

}  // namespace facmon
