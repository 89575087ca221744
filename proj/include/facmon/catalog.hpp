#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facmon/codec.hpp"
#include "facmon/domain.hpp"
#include "facmon/storage.hpp"

namespace facmon {

// Entity kinds as stored.
namespace kind {
inline constexpr std::string_view kCampus = "campus";
inline constexpr std::string_view kLocation = "location";
inline constexpr std::string_view kCategory = "category";
inline constexpr std::string_view kType = "type";
inline constexpr std::string_view kBrand = "brand";
inline constexpr std::string_view kSource = "source";
inline constexpr std::string_view kItem = "item";
inline constexpr std::string_view kTransfer = "transfer";
inline constexpr std::string_view kStatusChange = "status_change";
inline constexpr std::string_view kRepair = "repair";
inline constexpr std::string_view kFinding = "finding";
inline constexpr std::string_view kUser = "user";
inline constexpr std::string_view kSession = "session";
}  // namespace kind

std::string_view entity_kind(TaxonomyKind k) noexcept;

/// Storage key of a location: unique per (campus, code).
std::string location_key(std::string_view campus_id, std::string_view code);

/// Fresh opaque identifier, e.g. `itm_3f9a0c1d2b4e5f60`.
std::string make_id(std::string_view prefix);

/// Typed read accessors over one committed snapshot.
class Catalog {
 public:
  explicit Catalog(Snapshot snapshot) : snap_(std::move(snapshot)) {}

  [[nodiscard]] const StoreState& state() const { return *snap_; }
  [[nodiscard]] const Snapshot& snapshot() const { return snap_; }

  [[nodiscard]] std::optional<CampusRef> campus_by_code(std::string_view code) const;
  [[nodiscard]] std::optional<CampusRef> campus_by_id(std::string_view id) const;
  [[nodiscard]] std::vector<CampusRef> campuses() const;

  [[nodiscard]] std::optional<LocationRef> location(const LocationAddress& address) const;
  [[nodiscard]] std::optional<LocationRef> location_by_id(std::string_view id) const;
  [[nodiscard]] std::vector<LocationRef> locations() const;
  /// Codes of a location id; empty strings when it does not resolve.
  [[nodiscard]] LocationAddress address_of(std::string_view location_id) const;

  [[nodiscard]] std::optional<TaxonomyRef> taxonomy(TaxonomyKind k, std::string_view code) const;
  [[nodiscard]] std::optional<TaxonomyRef> taxonomy_by_id(TaxonomyKind k, std::string_view id) const;
  [[nodiscard]] std::vector<TaxonomyRef> taxonomy_list(TaxonomyKind k) const;

  [[nodiscard]] std::optional<Item> item(std::string_view barcode) const;
  /// Ordered by barcode.
  [[nodiscard]] std::vector<Item> items() const;

  template <typename T>
  [[nodiscard]] std::optional<T> get(std::string_view kind, std::string_view key) const {
    const auto* doc = snap_->find(kind, key);
    if (!doc) return std::nullopt;
    return doc->template get<T>();
  }

  /// Every entity of a kind, in key order.
  template <typename T>
  [[nodiscard]] std::vector<T> all(std::string_view kind) const {
    std::vector<T> out;
    for (const auto& [key, vd] : snap_->kind(kind)) out.push_back(vd.doc->template get<T>());
    return out;
  }

  [[nodiscard]] std::uint64_t version(std::string_view kind, std::string_view key) const {
    return snap_->version_of(kind, key);
  }

 private:
  Snapshot snap_;
};

}  // namespace facmon
