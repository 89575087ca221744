#include "facmon/storage.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "facmon/crypto.hpp"
#include "facmon/error.hpp"

namespace facmon {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kJournalHeader = "FACMON-JOURNAL 1\n";
constexpr std::string_view kArchiveFormat = "facmon-archive";

const StoreState::KindMap& empty_kind_map() {
  static const StoreState::KindMap empty;
  return empty;
}

std::string flat_key(std::string_view kind, std::string_view key) {
  std::string out;
  out.reserve(kind.size() + key.size() + 1);
  out.append(kind).append("/").append(key);
  return out;
}

std::uint32_t crc_of(std::string_view payload) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
}

std::string frame(std::string_view payload) {
  char head[10];
  std::snprintf(head, sizeof head, "%08x ", crc_of(payload));
  std::string line;
  line.reserve(payload.size() + 10);
  line.append(head, 9).append(payload).push_back('\n');
  return line;
}

// Returns the payload when the line is a well-formed frame.
std::optional<std::string_view> unframe(std::string_view line) {
  if (line.size() < 10 || line[8] != ' ') return std::nullopt;
  auto payload = line.substr(9);
  std::uint32_t stored = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    char c = line[i];
    std::uint32_t v;
    if (c >= '0' && c <= '9') v = static_cast<std::uint32_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<std::uint32_t>(c - 'a' + 10);
    else return std::nullopt;
    stored = (stored << 4) | v;
  }
  if (stored != crc_of(payload)) return std::nullopt;
  return payload;
}

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    auto n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::DATA_DIR_UNWRITABLE, std::string("write failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Document entity_row(std::string_view kind, std::string_view key, const VersionedDoc& vd) {
  return Document{{"kind", kind}, {"key", key}, {"version", vd.version}, {"doc", *vd.doc}};
}

}  // namespace

// ---------------------------------------------------------------------------
// StoreState

const Document* StoreState::find(std::string_view kind, std::string_view key) const {
  const auto& m = this->kind(kind);
  auto it = m.find(key);
  return it == m.end() ? nullptr : it->second.doc.get();
}

std::uint64_t StoreState::version_of(std::string_view kind, std::string_view key) const {
  const auto& m = this->kind(kind);
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second.version;
}

const StoreState::KindMap& StoreState::kind(std::string_view kind) const {
  auto it = kinds_.find(kind);
  return it == kinds_.end() ? empty_kind_map() : *it->second;
}

std::vector<std::string> StoreState::kinds() const {
  std::vector<std::string> out;
  for (const auto& [k, m] : kinds_) {
    if (!m->empty()) out.push_back(k);
  }
  return out;
}

std::map<std::string, Document> StoreState::flatten() const {
  std::map<std::string, Document> out;
  for (const auto& [kind, m] : kinds_) {
    for (const auto& [key, vd] : *m) out.emplace(flat_key(kind, key), *vd.doc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Changeset

Changeset& Changeset::put(std::string kind, std::string key, std::uint64_t expected_version,
                          Document doc) {
  writes.push_back({std::move(kind), std::move(key), expected_version, std::move(doc)});
  return *this;
}

Changeset& Changeset::erase(std::string kind, std::string key, std::uint64_t expected_version) {
  writes.push_back({std::move(kind), std::move(key), expected_version, std::nullopt});
  return *this;
}

Changeset& Changeset::expect(std::string kind, std::string key, std::uint64_t expected_version) {
  reads.push_back({std::move(kind), std::move(key), expected_version});
  return *this;
}

// ---------------------------------------------------------------------------
// Audit codec

Document to_json(const AuditEntry& e) {
  return Document{{"seq", e.seq},
                  {"timestamp", format_timestamp(e.timestamp)},
                  {"actor", e.actor},
                  {"action", e.action},
                  {"entity_kind", e.entity_kind},
                  {"entity_id", e.entity_id},
                  {"before", e.before},
                  {"after", e.after}};
}

AuditEntry audit_entry_from_json(const Document& doc) {
  AuditEntry e;
  e.seq = doc.at("seq").get<std::uint64_t>();
  auto ts = parse_timestamp(doc.at("timestamp").get<std::string>());
  if (!ts) fail(ErrorCode::CORRUPT_STORE, "bad audit timestamp");
  e.timestamp = *ts;
  e.actor = doc.at("actor").get<std::string>();
  e.action = doc.at("action").get<std::string>();
  e.entity_kind = doc.at("entity_kind").get<std::string>();
  e.entity_id = doc.at("entity_id").get<std::string>();
  e.before = doc.at("before");
  e.after = doc.at("after");
  return e;
}

// ---------------------------------------------------------------------------
// Store

Store::Store(fs::path dir, StoreOptions options)
    : dir_(std::move(dir)), options_(std::move(options)), state_(std::make_shared<StoreState>()) {}

Store::~Store() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

std::unique_ptr<Store> Store::open(const fs::path& dir, StoreOptions options) {
  std::error_code ec;
  fs::create_directories(dir / "blobs", ec);
  if (ec) fail(ErrorCode::DATA_DIR_UNWRITABLE, "cannot create " + dir.string() + ": " + ec.message());
  if (::access(dir.c_str(), W_OK) != 0) {
    fail(ErrorCode::DATA_DIR_UNWRITABLE, dir.string() + " is not writable");
  }
  std::unique_ptr<Store> store(new Store(dir, std::move(options)));
  store->acquire_lock();
  store->replay_journal();
  return store;
}

void Store::acquire_lock() {
  auto path = dir_ / "LOCK";
  lock_fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) fail(ErrorCode::DATA_DIR_UNWRITABLE, "cannot create " + path.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    fail(ErrorCode::DATA_DIR_LOCKED,
         dir_.string() + " is in use by another process (a running server?)");
  }
}

void Store::replay_journal() {
  auto path = dir_ / "journal.log";
  std::string content = fs::exists(path) ? read_file(path) : std::string{};

  journal_fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (journal_fd_ < 0) fail(ErrorCode::DATA_DIR_UNWRITABLE, "cannot open " + path.string());

  if (content.size() < kJournalHeader.size()) {
    // New journal, or one torn before its header completed.
    if (::ftruncate(journal_fd_, 0) != 0) fail(ErrorCode::DATA_DIR_UNWRITABLE, "truncate failed");
    ::lseek(journal_fd_, 0, SEEK_SET);
    write_all(journal_fd_, kJournalHeader);
    ::fsync(journal_fd_);
    fsync_dir(dir_);
    return;
  }
  if (content.compare(0, 15, kJournalHeader.substr(0, 15)) != 0) {
    fail(ErrorCode::CORRUPT_STORE, "journal header missing");
  }
  auto header_end = content.find('\n');
  auto version = std::stoi(content.substr(15, header_end - 15));
  if (version != kStoreFormatVersion) {
    fail(ErrorCode::CORRUPT_STORE, "unsupported journal format version " + std::to_string(version));
  }

  auto state = std::make_shared<StoreState>();
  std::size_t pos = header_end + 1;
  std::size_t good_end = pos;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    bool last = nl == std::string::npos || nl + 1 == content.size();
    if (nl == std::string::npos) break;  // torn tail without newline
    auto payload = unframe(std::string_view(content).substr(pos, nl - pos));
    if (!payload) {
      if (last) break;
      fail(ErrorCode::CORRUPT_STORE, "journal record at byte " + std::to_string(pos) + " is damaged");
    }
    apply_record(Document::parse(*payload), *state);
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end < content.size()) {
    if (::ftruncate(journal_fd_, static_cast<off_t>(good_end)) != 0) {
      fail(ErrorCode::DATA_DIR_UNWRITABLE, "cannot truncate torn journal tail");
    }
    ::fsync(journal_fd_);
  }
  ::lseek(journal_fd_, 0, SEEK_END);
  state_ = std::move(state);
}

void Store::apply_record(const Document& record, StoreState& state) {
  const auto& type = record.at("type").get_ref<const std::string&>();
  if (type == "checkpoint") {
    state.kinds_.clear();
    std::map<std::string, std::shared_ptr<StoreState::KindMap>> building;
    for (const auto& row : record.at("entities")) {
      auto& m = building[row.at("kind").get<std::string>()];
      if (!m) m = std::make_shared<StoreState::KindMap>();
      m->insert_or_assign(row.at("key").get<std::string>(),
                          VersionedDoc{row.at("version").get<std::uint64_t>(),
                                       std::make_shared<const Document>(row.at("doc"))});
    }
    for (auto& [k, m] : building) state.kinds_.emplace(k, std::move(m));
    state.last_seq_ = record.at("last_seq").get<std::uint64_t>();
    std::lock_guard lk(audit_mutex_);
    audit_.clear();
    for (const auto& a : record.at("audit")) audit_.push_back(audit_entry_from_json(a));
    return;
  }
  if (type != "commit") fail(ErrorCode::CORRUPT_STORE, "unknown journal record type " + type);

  auto seq = record.at("seq").get<std::uint64_t>();
  if (seq != state.last_seq_ + 1) {
    fail(ErrorCode::CORRUPT_STORE, "journal sequence gap at seq " + std::to_string(seq));
  }
  std::map<std::string, std::shared_ptr<StoreState::KindMap>> touched;
  for (const auto& w : record.at("writes")) {
    auto kind = w.at("kind").get<std::string>();
    auto& m = touched[kind];
    if (!m) {
      auto it = state.kinds_.find(kind);
      m = it == state.kinds_.end() ? std::make_shared<StoreState::KindMap>()
                                   : std::make_shared<StoreState::KindMap>(*it->second);
    }
    auto key = w.at("key").get<std::string>();
    if (w.at("doc").is_null()) {
      m->erase(key);
    } else {
      m->insert_or_assign(std::move(key),
                          VersionedDoc{w.at("version").get<std::uint64_t>(),
                                       std::make_shared<const Document>(w.at("doc"))});
    }
  }
  for (auto& [k, m] : touched) state.kinds_.insert_or_assign(k, std::move(m));
  state.last_seq_ = seq;
  std::lock_guard lk(audit_mutex_);
  audit_.push_back(audit_entry_from_json(record.at("audit")));
}

void Store::append_record(const Document& record, bool inject_faults) {
  auto line = frame(record.dump());
  bool crash = inject_faults && options_.crash_point != CrashPoint::None &&
               commits_since_open_ == options_.crash_on_commit;
  if (crash && options_.crash_point == CrashPoint::BeforeJournalWrite) {
    crashed_ = true;
    throw SimulatedCrash{};
  }
  if (crash && options_.crash_point == CrashPoint::MidJournalWrite) {
    write_all(journal_fd_, std::string_view(line).substr(0, line.size() / 2));
    ::fsync(journal_fd_);
    crashed_ = true;
    throw SimulatedCrash{};
  }
  write_all(journal_fd_, line);
  if (options_.sync) ::fdatasync(journal_fd_);
  if (crash && options_.crash_point == CrashPoint::AfterJournalSync) {
    crashed_ = true;
    throw SimulatedCrash{};
  }
}

Snapshot Store::snapshot() const {
  std::lock_guard lk(state_mutex_);
  return state_;
}

Timestamp Store::now() const { return options_.clock ? options_.clock() : now_ms(); }

Document Store::snapshot_for_audit(Document snapshot) {
  auto text = snapshot.dump();
  if (text.size() <= kAuditSnapshotLimit) return snapshot;
  auto hash = put_blob(text);
  return Document{{"overflow_blob", hash}, {"bytes", text.size()}, {"truncated", true}};
}

Document Store::resolve_audit_snapshot(const Document& snapshot) const {
  if (snapshot.is_object() && snapshot.contains("overflow_blob") &&
      snapshot.value("truncated", false)) {
    return Document::parse(get_blob(snapshot.at("overflow_blob").get<std::string>()));
  }
  return snapshot;
}

std::uint64_t Store::commit(const Changeset& cs) {
  if (options_.before_commit) options_.before_commit();
  std::lock_guard commit_lock(commit_mutex_);
  if (crashed_) throw SimulatedCrash{};

  if (cs.writes.empty()) fail(ErrorCode::CONSTRAINT_VIOLATION, "changeset has no writes");
  if (cs.action.empty()) fail(ErrorCode::CONSTRAINT_VIOLATION, "changeset has no audit action");
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& w : cs.writes) {
    if (w.kind.empty() || w.key.empty() || w.kind.find('/') != std::string::npos) {
      fail(ErrorCode::CONSTRAINT_VIOLATION, "malformed entity key");
    }
    if (!seen.emplace(w.kind, w.key).second) {
      fail(ErrorCode::CONSTRAINT_VIOLATION, "entity " + flat_key(w.kind, w.key) + " written twice");
    }
    if (w.doc && !w.doc->is_object()) {
      fail(ErrorCode::CONSTRAINT_VIOLATION, "entity documents must be JSON objects");
    }
  }

  auto current = snapshot();
  auto check = [&](const std::string& kind, const std::string& key, std::uint64_t expected) {
    if (current->version_of(kind, key) != expected) {
      fail(ErrorCode::CONFLICT, flat_key(kind, key) + " was modified concurrently");
    }
  };
  for (const auto& r : cs.reads) check(r.kind, r.key, r.expected_version);
  for (const auto& w : cs.writes) {
    check(w.kind, w.key, w.expected_version);
    if (!w.doc && w.expected_version == 0) {
      fail(ErrorCode::CONFLICT, flat_key(w.kind, w.key) + " does not exist");
    }
  }

  ++commits_since_open_;
  const auto seq = current->last_seq_ + 1;
  Document before = Document::object();
  Document after = Document::object();
  Document writes = Document::array();
  for (const auto& w : cs.writes) {
    auto fk = flat_key(w.kind, w.key);
    const auto* prev = current->find(w.kind, w.key);
    before[fk] = prev ? *prev : Document(nullptr);
    after[fk] = w.doc ? *w.doc : Document(nullptr);
    writes.push_back({{"kind", w.kind},
                      {"key", w.key},
                      {"version", w.expected_version + 1},
                      {"doc", w.doc ? *w.doc : Document(nullptr)}});
  }

  AuditEntry entry{seq,
                   now(),
                   cs.actor.empty() ? std::string("system") : cs.actor,
                   cs.action,
                   cs.entity_kind.empty() ? cs.writes.front().kind : cs.entity_kind,
                   cs.entity_id.empty() ? cs.writes.front().key : cs.entity_id,
                   snapshot_for_audit(std::move(before)),
                   snapshot_for_audit(std::move(after))};

  Document record{{"type", "commit"}, {"seq", seq}, {"writes", std::move(writes)},
                  {"audit", to_json(entry)}};
  append_record(record, true);

  auto next = std::make_shared<StoreState>(*current);
  apply_record(record, *next);
  {
    std::lock_guard lk(state_mutex_);
    state_ = std::move(next);
  }
  return seq;
}

fs::path Store::blob_path(std::string_view hash) const {
  return dir_ / "blobs" / std::string(hash.substr(0, 2)) / std::string(hash);
}

std::string Store::put_blob(std::string_view bytes) {
  if (bytes.empty()) fail(ErrorCode::EMPTY_PAYLOAD, "blob is empty");
  auto hash = crypto::sha256_hex(bytes);
  auto path = blob_path(hash);
  if (fs::exists(path)) return hash;
  fs::create_directories(path.parent_path());
  auto tmp = dir_ / "blobs" / (".tmp-" + crypto::random_hex(8));
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0444);
  if (fd < 0) fail(ErrorCode::DATA_DIR_UNWRITABLE, "cannot write blob");
  try {
    write_all(fd, bytes);
  } catch (...) {
    ::close(fd);
    fs::remove(tmp);
    throw;
  }
  if (options_.sync) ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
  if (options_.sync) fsync_dir(path.parent_path());
  return hash;
}

bool Store::has_blob(std::string_view hash) const {
  return crypto::is_sha256_hex(hash) && fs::exists(blob_path(hash));
}

std::string Store::get_blob(std::string_view hash) const {
  if (!has_blob(hash)) fail(ErrorCode::UNKNOWN_BLOB, "no blob " + std::string(hash));
  auto bytes = read_file(blob_path(hash));
  if (crypto::sha256_hex(bytes) != hash) {
    fail(ErrorCode::CORRUPT_STORE, "blob " + std::string(hash) + " does not match its hash");
  }
  return bytes;
}

std::vector<AuditEntry> Store::audit_range(std::uint64_t from, std::uint64_t to) const {
  if (from > to) fail(ErrorCode::INVALID_RANGE, "audit range start after end");
  std::lock_guard lk(audit_mutex_);
  std::vector<AuditEntry> out;
  // seq n lives at index n-1 (no gaps).
  for (auto seq = std::max<std::uint64_t>(from, 1); seq <= to && seq <= audit_.size(); ++seq) {
    out.push_back(audit_[seq - 1]);
  }
  return out;
}

std::string Store::export_archive() const {
  std::lock_guard commit_lock(commit_mutex_);
  auto state = snapshot();
  Document entities = Document::array();
  for (const auto& kind : state->kinds()) {
    for (const auto& [key, vd] : state->kind(kind)) entities.push_back(entity_row(kind, key, vd));
  }
  Document audit = Document::array();
  {
    std::lock_guard lk(audit_mutex_);
    for (const auto& e : audit_) audit.push_back(to_json(e));
  }
  std::vector<std::string> hashes;
  for (const auto& entry : fs::recursive_directory_iterator(dir_ / "blobs")) {
    if (!entry.is_regular_file()) continue;
    auto name = entry.path().filename().string();
    if (crypto::is_sha256_hex(name)) hashes.push_back(name);
  }
  std::sort(hashes.begin(), hashes.end());
  Document blobs = Document::array();
  for (const auto& h : hashes) {
    blobs.push_back({{"hash", h}, {"data", crypto::base64_encode(get_blob(h))}});
  }
  Document archive{{"format", kArchiveFormat},   {"format_version", kStoreFormatVersion},
                   {"last_seq", state->last_seq()}, {"entities", std::move(entities)},
                   {"audit", std::move(audit)},     {"blobs", std::move(blobs)}};
  return archive.dump() + "\n";
}

std::unique_ptr<Store> Store::restore(const fs::path& dir, std::string_view archive_text,
                                      StoreOptions options) {
  Document archive;
  try {
    archive = Document::parse(archive_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::INVALID_ARGUMENT, std::string("archive is not valid JSON: ") + e.what());
  }
  if (!archive.is_object() || archive.value("format", "") != kArchiveFormat) {
    fail(ErrorCode::INVALID_ARGUMENT, "not a facmon archive");
  }
  if (archive.value("format_version", 0) != kStoreFormatVersion) {
    fail(ErrorCode::INVALID_ARGUMENT, "archive format version " +
                                          archive.at("format_version").dump() + " not supported");
  }
  auto store = open(dir, std::move(options));
  auto current = store->snapshot();
  if (current->last_seq() != 0 || !current->kinds().empty()) {
    fail(ErrorCode::INVALID_ARGUMENT, "restore target " + dir.string() + " is not empty");
  }
  for (const auto& b : archive.at("blobs")) {
    auto bytes = crypto::base64_decode(b.at("data").get<std::string>());
    if (store->put_blob(bytes) != b.at("hash").get<std::string>()) {
      fail(ErrorCode::CORRUPT_STORE, "archive blob does not match its hash");
    }
  }
  Document checkpoint{{"type", "checkpoint"},
                      {"last_seq", archive.at("last_seq")},
                      {"entities", archive.at("entities")},
                      {"audit", archive.at("audit")}};
  std::lock_guard commit_lock(store->commit_mutex_);
  auto next = std::make_shared<StoreState>();
  store->apply_record(checkpoint, *next);
  store->append_record(checkpoint, false);
  {
    std::lock_guard lk(store->state_mutex_);
    store->state_ = std::move(next);
  }
  return store;
}

bool Store::healthy() const {
  return !crashed_ && journal_fd_ >= 0 && fs::is_directory(dir_ / "blobs");
}

}  // namespace facmon
