#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include "facmon/catalog.hpp"
#include "facmon/error.hpp"
#include "facmon/services.hpp"
#include "facmon/storage.hpp"

namespace facmon::testing {

/// Code of the facmon::Error thrown by `fn`, or INTERNAL (recorded as a failure) if none.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a facmon::Error";
  return ErrorCode::INTERNAL;
}

class TempDir {
 public:
  TempDir() {
    auto tmpl = (std::filesystem::temp_directory_path() / "facmon-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline Timestamp noon(Date d) {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(d.sys_days() + std::chrono::hours(12));
}

inline StoreOptions fast_store_options(Date today) {
  StoreOptions o;
  o.sync = false;
  o.clock = [today] { return noon(today); };
  return o;
}

/// A store plus services on a fresh directory with a fixed clock.
struct Env {
  explicit Env(Date today = Date(2026, 6, 15), StoreOptions options = {}, bool fixed_clock = true)
      : today(today) {
    if (fixed_clock) {
      options.sync = false;
      options.clock = [today] { return noon(today); };
    }
    store = Store::open(dir.path() / "data", std::move(options));
    services = std::make_unique<Services>(*store, fast_auth_options());
  }

  void reopen(StoreOptions options = {}) {
    services.reset();
    store.reset();
    options.sync = false;
    auto t = today;
    options.clock = [t] { return noon(t); };
    store = Store::open(dir.path() / "data", std::move(options));
    services = std::make_unique<Services>(*store, fast_auth_options());
  }

  Services& s() { return *services; }
  Catalog catalog() { return Catalog(store->snapshot()); }

  TempDir dir;
  Date today;
  std::unique_ptr<Store> store;
  std::unique_ptr<Services> services;
};

/// Campuses A, B; four rooms; the 20 standard categories; two each of types,
/// brands and sources.
inline void seed_reference(Services& s) {
  auto actor = Actor::system();
  auto ref = [&](ReferenceKind k, std::string code, std::string name, std::string campus = {},
                 int floor = 1) {
    ReferenceInput in;
    in.code = std::move(code);
    in.name = std::move(name);
    in.campus_code = std::move(campus);
    in.floor = floor;
    s.registry.upsert_reference(k, in, actor);
  };
  ref(ReferenceKind::CAMPUS, "A", "Kampus A");
  ref(ReferenceKind::CAMPUS, "B", "Kampus B");
  ref(ReferenceKind::LOCATION, "A.101", "Ruang A.101", "A", 1);
  ref(ReferenceKind::LOCATION, "A.102", "Ruang A.102", "A", 1);
  ref(ReferenceKind::LOCATION, "B.201", "Ruang Admin B.201", "B", 2);
  ref(ReferenceKind::LOCATION, "B.202", "Ruang B.202", "B", 2);
  s.registry.seed_default_categories(actor);
  ref(ReferenceKind::TYPE, "ELK", "Elektronik");
  ref(ReferenceKind::TYPE, "FUR", "Furnitur");
  ref(ReferenceKind::BRAND, "GEN", "Generik");
  ref(ReferenceKind::BRAND, "LG", "LG");
  ref(ReferenceKind::SOURCE, "BUY", "Pembelian");
  ref(ReferenceKind::SOURCE, "GRANT", "Hibah");
}

inline ItemReceipt receipt(std::string barcode, std::string campus = "A",
                           std::string location = "A.101", Date purchase = Date(2025, 1, 10),
                           std::optional<Date> warranty = std::nullopt,
                           std::optional<int> interval = std::nullopt,
                           std::string category = "C01") {
  ItemReceipt r;
  r.barcode = std::move(barcode);
  r.name = "Item " + r.barcode;
  r.specification = "spec";
  r.category_code = std::move(category);
  r.type_code = "ELK";
  r.brand_code = "GEN";
  r.source_code = "BUY";
  r.purchase_date = purchase;
  r.warranty_end_date = warranty;
  r.maintenance_interval_days = interval;
  r.campus_code = std::move(campus);
  r.location_code = std::move(location);
  r.custodian = "Pak Budi";
  return r;
}

}  // namespace facmon::testing
