#pragma once

// RFC 4180 CSV plus the item import/export and monitoring export layouts.
// Output uses LF line endings; input accepts LF or CRLF.

#include <string>
#include <string_view>
#include <vector>

#include "facmon/catalog.hpp"
#include "facmon/monitoring.hpp"
#include "facmon/registry.hpp"

namespace facmon::csv {

using Row = std::vector<std::string>;

inline constexpr std::string_view kItemHeader =
    "barcode,name,specification,category_code,type_code,brand_code,source_code,purchase_date,"
    "warranty_end_date,maintenance_interval_days,campus_code,location_code,custodian";
inline constexpr std::string_view kMonitoringHeader =
    "id,barcode,object_name,date,location_code,finding,recommendation,status,resolution_date,"
    "reporter";
inline constexpr std::string_view kSummaryHeader = "metric,value";

std::string escape(std::string_view field);
void append_row(std::string& out, const Row& row);

/// Skips a leading UTF-8 BOM. Errors: INVALID_ARGUMENT on an unterminated quoted field.
std::vector<Row> parse(std::string_view text);

Row item_row(const Item& item, const Catalog& catalog);

/// Parses an item import file. Errors: HEADER_MISMATCH; INVALID_ARGUMENT with
/// "row N:" (data rows counted from 1) for malformed cells.
std::vector<ItemReceipt> parse_item_import(std::string_view text);

}  // namespace facmon::csv
