#include "facmon/csv.hpp"

#include <charconv>

#include "facmon/error.hpp"

namespace facmon::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_row(std::string& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(row[i]);
  }
  out.push_back('\n');
}

std::vector<Row> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // CRLF: the LF ends the row.
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) fail(ErrorCode::INVALID_ARGUMENT, "unterminated quoted field at line " + std::to_string(line));
  if (!field.empty() || !row.empty() || field_started) end_row();
  return rows;
}

Row item_row(const Item& item, const Catalog& catalog) {
  auto code_of = [&](TaxonomyKind k, const std::string& id) {
    auto ref = catalog.taxonomy_by_id(k, id);
    return ref ? ref->code : std::string{};
  };
  auto address = catalog.address_of(item.location_id);
  return Row{item.barcode,
             item.name,
             item.specification,
             code_of(TaxonomyKind::CATEGORY, item.category_id),
             code_of(TaxonomyKind::TYPE, item.type_id),
             code_of(TaxonomyKind::BRAND, item.brand_id),
             code_of(TaxonomyKind::SOURCE, item.source_id),
             item.purchase_date.to_string(),
             item.warranty_end_date ? item.warranty_end_date->to_string() : std::string{},
             item.maintenance_interval_days ? std::to_string(*item.maintenance_interval_days)
                                            : std::string{},
             address.campus_code,
             address.location_code,
             item.custodian};
}

std::vector<ItemReceipt> parse_item_import(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  auto rows = parse(text);
  Row expected_header;
  for (auto& r : parse(kItemHeader)) expected_header = std::move(r);
  if (rows.empty() || rows.front() != expected_header) {
    fail(ErrorCode::HEADER_MISMATCH, "first line must be exactly: " + std::string(kItemHeader));
  }
  std::vector<ItemReceipt> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto where = "row " + std::to_string(i) + ": ";
    if (r.size() != expected_header.size()) {
      fail(ErrorCode::INVALID_ARGUMENT, where + "expected " +
                                            std::to_string(expected_header.size()) +
                                            " fields, found " + std::to_string(r.size()));
    }
    try {
      ItemReceipt rec;
      rec.barcode = r[0];
      rec.name = r[1];
      rec.specification = r[2];
      rec.category_code = r[3];
      rec.type_code = r[4];
      rec.brand_code = r[5];
      rec.source_code = r[6];
      rec.purchase_date = Date::parse(r[7]);
      if (!r[8].empty()) rec.warranty_end_date = Date::parse(r[8]);
      if (!r[9].empty()) {
        int days = 0;
        auto [p, ec] = std::from_chars(r[9].data(), r[9].data() + r[9].size(), days);
        if (ec != std::errc{} || p != r[9].data() + r[9].size() || days <= 0) {
          fail(ErrorCode::INVALID_ARGUMENT, "maintenance_interval_days must be a positive integer");
        }
        rec.maintenance_interval_days = days;
      }
      rec.campus_code = r[10];
      rec.location_code = r[11];
      rec.custodian = r[12];
      out.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  return out;
}

}  // namespace facmon::csv
