// facmon: operator CLI. Runs the service, seeds fixtures, manages users,
// imports/exports CSV and drives the item and finding workflows headlessly.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "facmon/api.hpp"
#include "facmon/catalog.hpp"
#include "facmon/codec.hpp"
#include "facmon/config.hpp"
#include "facmon/csv.hpp"
#include "facmon/services.hpp"

using nlohmann::json;
using namespace facmon;

namespace {

enum class Output { Table, Json, Csv };

struct Globals {
  std::string config_path;
  std::string data_dir;
  std::string output = "table";
  std::string remote;
  std::string token;
};

Output output_format(const Globals& g) {
  if (g.output == "json") return Output::Json;
  if (g.output == "csv") return Output::Csv;
  return Output::Table;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

bool is_scalar(const json& v) { return !v.is_object() && !v.is_array(); }

std::vector<std::string> columns_of(const json& rows) {
  std::vector<std::string> cols;
  for (const auto& row : rows) {
    if (!row.is_object()) continue;
    for (const auto& [k, v] : row.items()) {
      if (is_scalar(v) && std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  return cols;
}

void print_table(const json& v) {
  if (v.is_array()) {
    auto cols = columns_of(v);
    if (cols.empty()) {
      for (const auto& row : v) std::cout << scalar_text(row) << "\n";
      return;
    }
    std::vector<std::size_t> width(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) width[i] = cols[i].size();
    for (const auto& row : v) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        width[i] = std::max(width[i], scalar_text(row.value(cols[i], json())).size());
      }
    }
    auto line = [&](auto cell) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        auto text = cell(i);
        std::cout << text;
        if (i + 1 < cols.size()) std::cout << std::string(width[i] - text.size() + 2, ' ');
      }
      std::cout << "\n";
    };
    line([&](std::size_t i) { return cols[i]; });
    for (const auto& row : v) line([&](std::size_t i) { return scalar_text(row.value(cols[i], json())); });
    return;
  }
  if (v.is_object()) {
    for (const auto& [k, val] : v.items()) {
      std::cout << k << ": " << (is_scalar(val) ? scalar_text(val) : val.dump()) << "\n";
    }
    return;
  }
  std::cout << scalar_text(v) << "\n";
}

void print_csv(const json& v) {
  std::string out;
  if (v.is_array()) {
    auto cols = columns_of(v);
    csv::append_row(out, cols);
    for (const auto& row : v) {
      std::vector<std::string> cells;
      for (const auto& c : cols) cells.push_back(scalar_text(row.value(c, json())));
      csv::append_row(out, cells);
    }
  } else if (v.is_object()) {
    csv::append_row(out, {"field", "value"});
    for (const auto& [k, val] : v.items()) {
      csv::append_row(out, {k, is_scalar(val) ? scalar_text(val) : val.dump()});
    }
  } else {
    csv::append_row(out, {scalar_text(v)});
  }
  std::cout << out;
}

void emit(const Globals& g, const json& v) {
  switch (output_format(g)) {
    case Output::Json: std::cout << v.dump(2) << "\n"; break;
    case Output::Csv: print_csv(v); break;
    case Output::Table: print_table(v); break;
  }
}

// ---- backends ----

Config resolve_config(const Globals& g) {
  Config c = g.config_path.empty() ? Config{} : load_config_file(g.config_path);
  apply_env(c, process_env);
  if (!g.data_dir.empty()) c.data_dir = g.data_dir;
  return c;
}

AuthOptions auth_options(const Config& c) {
  AuthOptions a;
  a.session_ttl = std::chrono::hours(c.session_ttl_hours);
  if (auto v = process_env("FACMON_PWHASH_FAST"); v && *v == "1") {
    auto fast = fast_auth_options();
    a.pwhash_ops_limit = fast.pwhash_ops_limit;
    a.pwhash_mem_limit = fast.pwhash_mem_limit;
  }
  return a;
}

struct Embedded {
  std::unique_ptr<Store> store;
  std::unique_ptr<Services> services;

  explicit Embedded(const Globals& g) {
    auto config = resolve_config(g);
    store = Store::open(config.data_dir);
    services = std::make_unique<Services>(*store, auth_options(config));
  }
  Services& operator*() { return *services; }
  Services* operator->() { return services.get(); }
};

class Remote {
 public:
  explicit Remote(const Globals& g) : client_(g.remote) {
    token_ = g.token.empty() ? process_env("FACMON_TOKEN").value_or("") : g.token;
    client_.set_connection_timeout(10);
    client_.set_read_timeout(60);
  }

  json get(const std::string& path, const httplib::Params& params = {}) {
    return decode(check(client_.Get(path, params, headers(), httplib::Progress{})));
  }
  std::string get_raw(const std::string& path, const httplib::Params& params = {}) {
    return check(client_.Get(path, params, headers(), httplib::Progress{})).body;
  }
  json post(const std::string& path, const json& body) {
    return decode(check(client_.Post(path, headers(), body.dump(), "application/json")));
  }

  /// Collects every page of a paginated listing.
  json get_all(const std::string& path, httplib::Params params) {
    json out = json::array();
    long offset = 0;
    for (;;) {
      auto p = params;
      p.emplace("limit", std::to_string(kMaxPageLimit));
      p.emplace("offset", std::to_string(offset));
      auto page = get(path, p);
      for (auto& row : page.at("data")) out.push_back(std::move(row));
      offset += kMaxPageLimit;
      if (offset >= page.at("total").get<long>()) break;
    }
    return out;
  }

 private:
  httplib::Headers headers() const {
    httplib::Headers h;
    if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
    return h;
  }

  static const httplib::Response& check(const httplib::Result& r) {
    if (!r) fail(ErrorCode::INTERNAL, "request failed: " + httplib::to_string(r.error()));
    if (r->status >= 400) {
      auto j = json::parse(r->body, nullptr, false);
      if (j.is_object() && j.contains("code")) {
        auto code = parse_error_code(j.value("code", "INTERNAL"));
        fail(code.value_or(ErrorCode::INTERNAL), j.value("message", std::string{}));
      }
      fail(ErrorCode::INTERNAL, "HTTP " + std::to_string(r->status));
    }
    return *r;
  }

  static json decode(const httplib::Response& r) {
    auto j = json::parse(r.body, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::INTERNAL, "server returned invalid JSON");
    return j;
  }

  httplib::Client client_;
  std::string token_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::INVALID_ARGUMENT, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::INVALID_ARGUMENT, "cannot write " + path);
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::INVALID_ARGUMENT, "cannot write " + path);
}

std::string read_password_stdin() {
  std::string pw;
  std::getline(std::cin, pw);
  if (!pw.empty() && pw.back() == '\r') pw.pop_back();
  return pw;
}

std::optional<Date> opt_date(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return Date::parse(s);
}

void set_if(json& j, const char* key, const std::string& v) {
  if (!v.empty()) j[key] = v;
}

void put_param(httplib::Params& p, const char* key, const std::string& v) {
  if (!v.empty()) p.emplace(key, v);
}

// ---- serve ----

int run_serve(const Globals& g, const std::string& bind_flag, long long ttl_flag,
              long long max_upload_flag) {
  auto config = resolve_config(g);
  if (!bind_flag.empty()) config.bind_addr = bind_flag;
  if (ttl_flag > 0) config.session_ttl_hours = static_cast<int>(ttl_flag);
  if (max_upload_flag > 0) config.max_upload_bytes = static_cast<std::size_t>(max_upload_flag);
  validate(config);
  auto addr = parse_bind_addr(config.bind_addr);

  // Block termination signals before any thread starts so sigwait owns them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto store = Store::open(config.data_dir);
  Services services(*store, auth_options(config));
  ApiOptions options;
  options.max_upload_bytes = config.max_upload_bytes;
  ApiServer server(services, options);
  int port = server.bind(addr.host, addr.port);
  spdlog::info("listening on {}:{} data_dir={}", addr.host, port, config.data_dir.string());
  std::cout << "listening on " << addr.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {} received, shutting down", sig);
    server.stop();
  });
  server.serve();
  // serve() also returns if the listener fails; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  spdlog::info("stopped");
  return 0;
}

// ---- seed ----

void seed_demo(Registry& registry, const Actor& actor) {
  auto ref = [&](ReferenceKind k, std::string code, std::string name, std::string campus = {},
                 int floor = 1, std::string address = {}) {
    ReferenceInput in;
    in.code = std::move(code);
    in.name = std::move(name);
    in.campus_code = std::move(campus);
    in.floor = floor;
    in.address = std::move(address);
    registry.upsert_reference(k, in, actor);
  };
  ref(ReferenceKind::CAMPUS, "A", "Kampus A", {}, 1, "Jl. Kampus A No. 1");
  ref(ReferenceKind::CAMPUS, "B", "Kampus B", {}, 1, "Jl. Kampus B No. 2");
  ref(ReferenceKind::LOCATION, "A.101", "Ruang Kuliah A.101", "A", 1);
  ref(ReferenceKind::LOCATION, "B.201", "Ruang Admin B.201", "B", 2);
  ref(ReferenceKind::TYPE, "ELK", "Elektronik");
  ref(ReferenceKind::TYPE, "FUR", "Furnitur");
  ref(ReferenceKind::BRAND, "GEN", "Generik");
  ref(ReferenceKind::SOURCE, "BUY", "Pembelian");
  ref(ReferenceKind::SOURCE, "GRANT", "Hibah");
}

}  // namespace

int main(int argc, char** argv) {
  // Diagnostics go to stderr; stdout carries data only.
  spdlog::set_default_logger(spdlog::stderr_color_mt("facmon"));
  CLI::App app{"facmon: campus facilities monitoring"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--data-dir", g.data_dir, "data directory (overrides DATA_DIR)");
  app.add_option("--output", g.output, "output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  app.add_option("--remote", g.remote, "talk to a running server at this base URL");
  app.add_option("--token", g.token, "bearer token for --remote (or FACMON_TOKEN)");

  std::function<int()> action;
  auto embedded_only = [&](const char* name) {
    if (!g.remote.empty()) {
      throw CLI::ValidationError(std::string(name) + " is not available with --remote");
    }
  };

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::string bind_flag;
  long long ttl_flag = 0;
  long long max_upload_flag = 0;
  serve->add_option("--bind", bind_flag, "host:port (overrides BIND_ADDR)");
  serve->add_option("--session-ttl-hours", ttl_flag, "overrides SESSION_TTL_HOURS")
      ->check(CLI::PositiveNumber);
  serve->add_option("--max-upload-bytes", max_upload_flag, "overrides MAX_UPLOAD_BYTES")
      ->check(CLI::PositiveNumber);
  serve->callback([&] {
    embedded_only("serve");
    action = [&] { return run_serve(g, bind_flag, ttl_flag, max_upload_flag); };
  });

  // seed
  auto* seed = app.add_subcommand("seed", "insert the standard categories (and a demo fixture)");
  bool demo = false;
  std::string admin_user;
  bool admin_pw_stdin = false;
  seed->add_flag("--demo", demo, "also insert demo campuses, locations and taxonomy");
  seed->add_option("--admin", admin_user, "create a FACILITIES_ADMIN user with this name");
  seed->add_flag("--admin-password-stdin", admin_pw_stdin, "read the admin password from stdin");
  seed->callback([&] {
    embedded_only("seed");
    action = [&] {
      Embedded e(g);
      auto actor = Actor::system();
      auto cats = e->registry.seed_default_categories(actor);
      if (demo) seed_demo(e->registry, actor);
      if (!admin_user.empty()) {
        auto pw = admin_pw_stdin ? read_password_stdin()
                                 : process_env("FACMON_ADMIN_PASSWORD").value_or("");
        e->auth.add_user(NewUser{admin_user, pw, Role::FACILITIES_ADMIN, std::nullopt, {}}, actor);
      }
      std::cout << cats.size() << " categories\n";
      return 0;
    };
  });

  // user
  auto* user = app.add_subcommand("user", "manage accounts");
  user->require_subcommand(1);
  auto* user_add = user->add_subcommand("add", "add a user");
  NewUser new_user;
  std::string role_text;
  std::string work_unit;
  std::vector<std::string> user_locations;
  bool pw_stdin = false;
  user_add->add_option("username", new_user.username)->required();
  user_add->add_option("--role", role_text, "FACILITIES_ADMIN, WORK_UNIT or LEADERSHIP")->required();
  user_add->add_option("--work-unit", work_unit, "work unit name (WORK_UNIT only)");
  user_add->add_option("--location", user_locations, "CAMPUS/LOCATION, repeatable");
  user_add->add_flag("--password-stdin", pw_stdin, "read the password from stdin (else FACMON_PASSWORD)");
  user_add->callback([&] {
    embedded_only("user add");
    action = [&] {
      Embedded e(g);
      new_user.role = parse_role(role_text);
      if (!work_unit.empty()) new_user.work_unit_name = work_unit;
      for (const auto& loc : user_locations) {
        auto slash = loc.find('/');
        if (slash == std::string::npos) fail(ErrorCode::INVALID_ARGUMENT, "--location must be CAMPUS/LOCATION");
        new_user.locations.push_back(LocationAddress{loc.substr(0, slash), loc.substr(slash + 1)});
      }
      new_user.password = pw_stdin ? read_password_stdin() : process_env("FACMON_PASSWORD").value_or("");
      emit(g, e->auth.add_user(new_user, Actor::system()));
      return 0;
    };
  });
  auto* user_list = user->add_subcommand("list", "list users");
  user_list->callback([&] {
    embedded_only("user list");
    action = [&] {
      Embedded e(g);
      emit(g, e->auth.list_users());
      return 0;
    };
  });
  auto* user_deactivate = user->add_subcommand("deactivate", "deactivate a user");
  std::string deactivate_name;
  user_deactivate->add_option("username", deactivate_name)->required();
  user_deactivate->callback([&] {
    embedded_only("user deactivate");
    action = [&] {
      Embedded e(g);
      emit(g, e->auth.deactivate_user(deactivate_name, Actor::system()));
      return 0;
    };
  });

  // login (remote helper)
  auto* login = app.add_subcommand("login", "obtain a session token from a running server");
  std::string login_user;
  login->add_option("username", login_user)->required();
  login->callback([&] {
    action = [&] {
      if (g.remote.empty()) fail(ErrorCode::INVALID_ARGUMENT, "login needs --remote");
      Remote r(g);
      auto pw = read_password_stdin();
      emit(g, r.post("/api/login", json{{"username", login_user}, {"password", pw}}));
      return 0;
    };
  });

  // import
  auto* import_cmd = app.add_subcommand("import", "bulk import");
  import_cmd->require_subcommand(1);
  auto* import_items = import_cmd->add_subcommand("items", "import items from CSV (all or nothing)");
  std::string import_path;
  std::string import_date;
  import_items->add_option("csv", import_path)->required()->check(CLI::ExistingFile);
  import_items->add_option("--date", import_date, "registration date (default today)");
  import_items->callback([&] {
    embedded_only("import");
    action = [&] {
      auto receipts = csv::parse_item_import(read_file(import_path));
      Embedded e(g);
      auto date = opt_date(import_date).value_or(e->today());
      auto items = e->registry.import_items(receipts, Actor::system(), date);
      std::cout << items.size() << " items imported\n";
      return 0;
    };
  });

  // export
  auto* export_cmd = app.add_subcommand("export", "write a dataset as CSV");
  std::string dataset_text;
  std::string export_path;
  std::string from_text;
  std::string to_text;
  std::string as_of_text;
  export_cmd->add_option("dataset", dataset_text, "items, monitoring or summary")->required();
  export_cmd->add_option("path", export_path)->required();
  export_cmd->add_option("--from", from_text, "summary period start");
  export_cmd->add_option("--to", to_text, "summary period end");
  export_cmd->add_option("--as-of", as_of_text, "summary reference date (default --to)");
  export_cmd->callback([&] {
    action = [&] {
      auto dataset = parse_dataset(dataset_text);
      std::string body;
      if (!g.remote.empty()) {
        Remote r(g);
        httplib::Params p;
        put_param(p, "from", from_text);
        put_param(p, "to", to_text);
        put_param(p, "as_of", as_of_text);
        const char* path = dataset == Dataset::ITEMS        ? "/api/export/items.csv"
                           : dataset == Dataset::MONITORING ? "/api/export/monitoring.csv"
                                                            : "/api/export/summary.csv";
        body = r.get_raw(path, p);
      } else {
        Embedded e(g);
        ExportFilter f;
        if (dataset == Dataset::SUMMARY) {
          auto from = opt_date(from_text);
          auto to = opt_date(to_text);
          if (!from || !to) fail(ErrorCode::INVALID_PERIOD, "summary export needs --from and --to");
          f.period = Period{*from, *to};
          f.as_of = opt_date(as_of_text);
        }
        body = e->reporting.export_csv(dataset, f);
      }
      write_file(export_path, body);
      return 0;
    };
  });

  // report
  auto* report = app.add_subcommand("report", "print reports");
  report->require_subcommand(1);
  auto* report_summary = report->add_subcommand("summary", "periodic summary");
  std::string rep_from;
  std::string rep_to;
  std::string rep_as_of;
  report_summary->add_option("--from", rep_from)->required();
  report_summary->add_option("--to", rep_to)->required();
  report_summary->add_option("--as-of", rep_as_of);
  report_summary->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        Remote r(g);
        httplib::Params p{{"from", rep_from}, {"to", rep_to}};
        put_param(p, "as_of", rep_as_of);
        emit(g, r.get("/api/reports/summary", p));
        return 0;
      }
      Embedded e(g);
      Period period{Date::parse(rep_from), Date::parse(rep_to)};
      emit(g, e->reporting.summary(period, opt_date(rep_as_of).value_or(period.to)));
      return 0;
    };
  });

  // item
  auto* item = app.add_subcommand("item", "items");
  item->require_subcommand(1);

  auto* item_register = item->add_subcommand("register", "register an incoming item");
  std::string r_barcode, r_name, r_spec, r_category, r_type, r_brand, r_source, r_purchase,
      r_warranty, r_campus, r_location, r_custodian, r_date;
  int r_interval = 0;
  item_register->add_option("--barcode", r_barcode, "default: generated");
  item_register->add_option("--name", r_name)->required();
  item_register->add_option("--specification", r_spec);
  item_register->add_option("--category", r_category)->required();
  item_register->add_option("--type", r_type)->required();
  item_register->add_option("--brand", r_brand)->required();
  item_register->add_option("--source", r_source)->required();
  item_register->add_option("--purchase-date", r_purchase)->required();
  item_register->add_option("--warranty-end", r_warranty);
  item_register->add_option("--maintenance-interval-days", r_interval);
  item_register->add_option("--campus", r_campus)->required();
  item_register->add_option("--location", r_location)->required();
  item_register->add_option("--custodian", r_custodian);
  item_register->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        json body{{"name", r_name},          {"category_code", r_category}, {"type_code", r_type},
                  {"brand_code", r_brand},   {"source_code", r_source},     {"purchase_date", r_purchase},
                  {"campus_code", r_campus}, {"location_code", r_location}};
        set_if(body, "barcode", r_barcode);
        set_if(body, "specification", r_spec);
        set_if(body, "warranty_end_date", r_warranty);
        set_if(body, "custodian", r_custodian);
        if (r_interval > 0) body["maintenance_interval_days"] = r_interval;
        emit(g, Remote(g).post("/api/items", body));
        return 0;
      }
      Embedded e(g);
      ItemReceipt rc;
      rc.barcode = r_barcode.empty() ? e->registry.generate_barcode(r_campus, r_category) : r_barcode;
      rc.name = r_name;
      rc.specification = r_spec;
      rc.category_code = r_category;
      rc.type_code = r_type;
      rc.brand_code = r_brand;
      rc.source_code = r_source;
      rc.purchase_date = Date::parse(r_purchase);
      rc.warranty_end_date = opt_date(r_warranty);
      if (item_register->count("--maintenance-interval-days")) rc.maintenance_interval_days = r_interval;
      rc.campus_code = r_campus;
      rc.location_code = r_location;
      rc.custodian = r_custodian;
      emit(g, e->registry.register_item(rc, Actor::system(), e->today()));
      return 0;
    };
  });

  auto* item_transfer = item->add_subcommand("transfer", "move an item to another location");
  std::string t_barcode, t_campus, t_location, t_date, t_note;
  item_transfer->add_option("barcode", t_barcode)->required();
  item_transfer->add_option("--campus", t_campus)->required();
  item_transfer->add_option("--location", t_location)->required();
  item_transfer->add_option("--date", t_date);
  item_transfer->add_option("--note", t_note);
  item_transfer->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        json body{{"campus_code", t_campus}, {"location_code", t_location}};
        set_if(body, "date", t_date);
        set_if(body, "note", t_note);
        emit(g, Remote(g).post("/api/items/" + t_barcode + "/transfer", body));
        return 0;
      }
      Embedded e(g);
      std::optional<std::string> note;
      if (!t_note.empty()) note = t_note;
      emit(g, e->lifecycle.transfer_item(t_barcode, LocationAddress{t_campus, t_location},
                                         Actor::system(), opt_date(t_date).value_or(e->today()), note));
      return 0;
    };
  });

  auto* item_status = item->add_subcommand("status", "apply a lifecycle event");
  std::string s_barcode, s_event, s_date, s_note;
  item_status->add_option("barcode", s_barcode)->required();
  item_status->add_option("--event", s_event)->required();
  item_status->add_option("--date", s_date);
  item_status->add_option("--note", s_note);
  item_status->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        json body{{"event", s_event}};
        set_if(body, "date", s_date);
        set_if(body, "note", s_note);
        emit(g, Remote(g).post("/api/items/" + s_barcode + "/status", body));
        return 0;
      }
      Embedded e(g);
      emit(g, e->lifecycle.change_status(s_barcode, parse_event(s_event), Actor::system(),
                                         opt_date(s_date).value_or(e->today()), s_note));
      return 0;
    };
  });

  auto* item_get = item->add_subcommand("get", "show one item");
  std::string g_barcode;
  item_get->add_option("barcode", g_barcode)->required();
  item_get->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        emit(g, Remote(g).get("/api/items/" + g_barcode));
        return 0;
      }
      Embedded e(g);
      emit(g, e->registry.get_item(g_barcode));
      return 0;
    };
  });

  auto* item_list = item->add_subcommand("list", "list items");
  std::string l_campus, l_location, l_category, l_condition, l_text;
  item_list->add_option("--campus", l_campus);
  item_list->add_option("--location", l_location);
  item_list->add_option("--category", l_category);
  item_list->add_option("--condition", l_condition);
  item_list->add_option("--q", l_text, "substring of barcode, name, specification or custodian");
  item_list->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        httplib::Params p;
        put_param(p, "campus", l_campus);
        put_param(p, "location", l_location);
        put_param(p, "category", l_category);
        put_param(p, "condition", l_condition);
        put_param(p, "q", l_text);
        emit(g, Remote(g).get_all("/api/items", p));
        return 0;
      }
      Embedded e(g);
      ItemFilter f;
      if (!l_campus.empty()) f.campus_code = l_campus;
      if (!l_location.empty()) f.location_code = l_location;
      if (!l_category.empty()) f.category_code = l_category;
      if (!l_condition.empty()) f.condition = parse_condition(l_condition);
      if (!l_text.empty()) f.text = l_text;
      emit(g, e->registry.list_items(f));
      return 0;
    };
  });

  // finding
  auto* finding = app.add_subcommand("finding", "monitoring findings");
  finding->require_subcommand(1);

  auto* f_submit = finding->add_subcommand("submit", "record a finding");
  std::string f_barcode, f_object, f_desc, f_date, f_campus, f_location, f_text, f_rec;
  f_submit->add_option("--barcode", f_barcode);
  f_submit->add_option("--object-name", f_object);
  f_submit->add_option("--object-description", f_desc);
  f_submit->add_option("--date", f_date);
  f_submit->add_option("--campus", f_campus);
  f_submit->add_option("--location", f_location);
  f_submit->add_option("--finding", f_text)->required();
  f_submit->add_option("--recommendation", f_rec);
  f_submit->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        json body{{"finding", f_text}, {"recommendation", f_rec}};
        set_if(body, "barcode", f_barcode);
        set_if(body, "object_name", f_object);
        set_if(body, "object_description", f_desc);
        set_if(body, "date", f_date);
        set_if(body, "campus_code", f_campus);
        set_if(body, "location_code", f_location);
        emit(g, Remote(g).post("/api/monitoring", body));
        return 0;
      }
      Embedded e(g);
      FindingInput in;
      if (!f_barcode.empty()) in.barcode = f_barcode;
      in.object_name = f_object;
      if (!f_desc.empty()) in.object_description = f_desc;
      in.date = opt_date(f_date).value_or(e->today());
      if (!f_campus.empty() || !f_location.empty()) in.location = LocationAddress{f_campus, f_location};
      in.finding = f_text;
      in.recommendation = f_rec;
      emit(g, e->monitoring.submit_finding(in, Actor::system()));
      return 0;
    };
  });

  auto* f_follow = finding->add_subcommand("follow-up", "mark a finding as followed up");
  std::string fu_id, fu_note;
  f_follow->add_option("id", fu_id)->required();
  f_follow->add_option("--note", fu_note);
  f_follow->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        emit(g, Remote(g).post("/api/monitoring/" + fu_id + "/follow-up", json{{"note", fu_note}}));
        return 0;
      }
      Embedded e(g);
      emit(g, e->monitoring.follow_up(fu_id, fu_note, Actor::system()));
      return 0;
    };
  });

  auto* f_resolve = finding->add_subcommand("resolve", "resolve a finding");
  std::string rs_id, rs_date;
  f_resolve->add_option("id", rs_id)->required();
  f_resolve->add_option("--date", rs_date, "resolution date")->required();
  f_resolve->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        emit(g, Remote(g).post("/api/monitoring/" + rs_id + "/resolve",
                               json{{"resolution_date", rs_date}}));
        return 0;
      }
      Embedded e(g);
      emit(g, e->monitoring.resolve(rs_id, Date::parse(rs_date), Actor::system()));
      return 0;
    };
  });

  auto* f_list = finding->add_subcommand("list", "list findings");
  std::string fl_status, fl_campus, fl_location, fl_condition, fl_from, fl_to;
  f_list->add_option("--status", fl_status);
  f_list->add_option("--campus", fl_campus);
  f_list->add_option("--location", fl_location);
  f_list->add_option("--condition", fl_condition, "condition of the linked item");
  f_list->add_option("--from", fl_from);
  f_list->add_option("--to", fl_to);
  f_list->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        httplib::Params p;
        put_param(p, "status", fl_status);
        put_param(p, "campus", fl_campus);
        put_param(p, "location", fl_location);
        put_param(p, "condition", fl_condition);
        put_param(p, "from", fl_from);
        put_param(p, "to", fl_to);
        emit(g, Remote(g).get_all("/api/monitoring", p));
        return 0;
      }
      Embedded e(g);
      RecordFilter f;
      if (!fl_status.empty()) f.status = parse_finding_status(fl_status);
      if (!fl_campus.empty()) f.campus_code = fl_campus;
      if (!fl_location.empty()) f.location_code = fl_location;
      if (!fl_condition.empty()) f.condition_of_item = parse_condition(fl_condition);
      if (!fl_from.empty() || !fl_to.empty()) {
        auto from = opt_date(fl_from);
        auto to = opt_date(fl_to);
        if (!from || !to) fail(ErrorCode::INVALID_PERIOD, "--from and --to must be given together");
        f.period = std::pair{*from, *to};
      }
      emit(g, e->monitoring.list_records(f));
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (!action) return 2;
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << "\n";
    return 1;
  }
}
