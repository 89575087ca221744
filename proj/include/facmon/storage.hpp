#pragma once

// Embedded, file-backed transactional store.
//
// Layout of a data directory:
//   LOCK          exclusive advisory lock held while a Store is open
//   journal.log   "FACMON-JOURNAL 1" header, then one CRC-framed JSON record per line
//   blobs/aa/<sha256>
//
// Every mutation goes through commit(): the changeset's version checks, the
// journal append + fsync and the in-memory publish happen under one commit
// mutex, so readers holding a snapshot never see a partial changeset. A torn
// final journal line (crash mid-append) is discarded on open.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "facmon/date.hpp"

namespace facmon {

using Document = nlohmann::json;

inline constexpr int kStoreFormatVersion = 1;
inline constexpr std::size_t kAuditSnapshotLimit = 64 * 1024;

struct VersionedDoc {
  std::uint64_t version = 0;
  std::shared_ptr<const Document> doc;
};

/// Immutable view of every committed entity at one commit point.
class StoreState {
 public:
  using KindMap = std::map<std::string, VersionedDoc, std::less<>>;

  [[nodiscard]] const Document* find(std::string_view kind, std::string_view key) const;
  /// 0 when absent.
  [[nodiscard]] std::uint64_t version_of(std::string_view kind, std::string_view key) const;
  [[nodiscard]] const KindMap& kind(std::string_view kind) const;
  [[nodiscard]] std::uint64_t last_seq() const noexcept { return last_seq_; }
  [[nodiscard]] std::vector<std::string> kinds() const;

  /// Flattened "kind/key" -> document map; used by export and replay checks.
  [[nodiscard]] std::map<std::string, Document> flatten() const;

 private:
  friend class Store;
  std::map<std::string, std::shared_ptr<const KindMap>, std::less<>> kinds_;
  std::uint64_t last_seq_ = 0;
};

using Snapshot = std::shared_ptr<const StoreState>;

struct AuditEntry {
  std::uint64_t seq = 0;
  Timestamp timestamp;
  std::string actor;
  std::string action;
  std::string entity_kind;
  std::string entity_id;
  Document before;  // object of "kind/key" -> doc|null, or an overflow reference
  Document after;

  bool operator==(const AuditEntry&) const = default;
};

/// Entity writes plus the audit attribution that accompanies them.
struct Changeset {
  struct Write {
    std::string kind;
    std::string key;
    std::uint64_t expected_version = 0;  // 0: entity must not exist yet
    std::optional<Document> doc;         // nullopt erases
  };
  struct Read {
    std::string kind;
    std::string key;
    std::uint64_t expected_version = 0;
  };

  std::string actor;
  std::string action;
  std::string entity_kind;
  std::string entity_id;
  std::vector<Write> writes;
  std::vector<Read> reads;

  Changeset& put(std::string kind, std::string key, std::uint64_t expected_version, Document doc);
  Changeset& erase(std::string kind, std::string key, std::uint64_t expected_version);
  /// Fails the commit with CONFLICT if the entity moved since it was read.
  Changeset& expect(std::string kind, std::string key, std::uint64_t expected_version);
};

enum class CrashPoint { None, BeforeJournalWrite, MidJournalWrite, AfterJournalSync };

/// Thrown by fault injection; the Store is unusable afterwards.
struct SimulatedCrash : std::runtime_error {
  SimulatedCrash() : std::runtime_error("simulated crash") {}
};

struct StoreOptions {
  bool sync = true;
  std::function<Timestamp()> clock;
  // Test hooks.
  CrashPoint crash_point = CrashPoint::None;
  std::uint64_t crash_on_commit = 1;  // n-th commit after open
  std::function<void()> before_commit;
};

class Store {
 public:
  /// Opens (creating if needed) the data directory and replays its journal.
  /// Errors: DATA_DIR_UNWRITABLE, DATA_DIR_LOCKED, CORRUPT_STORE.
  static std::unique_ptr<Store> open(const std::filesystem::path& dir, StoreOptions options = {});

  /// Materialises an archive produced by export_archive() into an empty directory.
  static std::unique_ptr<Store> restore(const std::filesystem::path& dir, std::string_view archive,
                                        StoreOptions options = {});

  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  [[nodiscard]] Snapshot snapshot() const;

  /// Applies the changeset atomically and durably. Returns the audit seq.
  /// Errors: CONFLICT (version mismatch), CONSTRAINT_VIOLATION (malformed changeset).
  std::uint64_t commit(const Changeset& changeset);

  /// Content-addressed blob write; identical bytes are stored once.
  std::string put_blob(std::string_view bytes);
  /// Errors: UNKNOWN_BLOB, CORRUPT_STORE (bytes no longer match their hash).
  [[nodiscard]] std::string get_blob(std::string_view hash) const;
  [[nodiscard]] bool has_blob(std::string_view hash) const;

  /// Inclusive range; INVALID_RANGE when from > to.
  [[nodiscard]] std::vector<AuditEntry> audit_range(std::uint64_t from, std::uint64_t to) const;

  /// Resolves an audit before/after document that overflowed into a blob.
  [[nodiscard]] Document resolve_audit_snapshot(const Document& snapshot) const;

  /// Deterministic full-state archive (entities, audit log, blobs).
  [[nodiscard]] std::string export_archive() const;

  [[nodiscard]] Timestamp now() const;
  [[nodiscard]] bool healthy() const;
  [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  Store(std::filesystem::path dir, StoreOptions options);

  void acquire_lock();
  void replay_journal();
  void apply_record(const Document& record, StoreState& state);
  void append_record(const Document& record, bool inject_faults);
  [[nodiscard]] Document snapshot_for_audit(Document snapshot);
  [[nodiscard]] std::filesystem::path blob_path(std::string_view hash) const;

  std::filesystem::path dir_;
  StoreOptions options_;
  int lock_fd_ = -1;
  int journal_fd_ = -1;
  std::uint64_t commits_since_open_ = 0;
  bool crashed_ = false;

  mutable std::mutex state_mutex_;  // guards state_ pointer swaps
  Snapshot state_;
  mutable std::mutex commit_mutex_;  // serialises the commit pipeline
  mutable std::mutex audit_mutex_;
  std::vector<AuditEntry> audit_;
};

Document to_json(const AuditEntry& entry);
inline void to_json(Document& j, const AuditEntry& entry) { j = to_json(entry); }
AuditEntry audit_entry_from_json(const Document& doc);

}  // namespace facmon
