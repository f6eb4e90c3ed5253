#include "blimp/store.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include "blimp/design_file.hpp"

namespace blimp {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw DesignError(DesignError::Kind::schema, {{path, message}});
}

kv::Value scalar_from_json(const json& j, const std::string& path) {
  kv::Value v;
  if (j.is_boolean()) {
    v.data = j.get<bool>();
  } else if (j.is_number_integer()) {
    v.data = j.get<double>();
    v.integral = true;
  } else if (j.is_number()) {
    v.data = j.get<double>();
  } else if (j.is_string()) {
    v.data = j.get<std::string>();
  } else if (j.is_array()) {
    kv::Array items;
    for (std::size_t i = 0; i < j.size(); ++i) items.push_back(scalar_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    v.data = std::move(items);
  } else {
    schema_error(path, "unsupported value type");
  }
  return v;
}

kv::Table table_from_json(const json& j, const std::string& path) {
  kv::Table t;
  for (const auto& [key, value] : j.items()) {
    const std::string p = path.empty() ? key : path + "." + key;
    if (value.is_object()) schema_error(p, "nested tables are not allowed here");
    if (value.is_null()) continue;
    t.set(key, scalar_from_json(value, p));
  }
  return t;
}

json value_to_json(const kv::Value& v) {
  if (const auto* d = std::get_if<double>(&v.data)) {
    if (v.integral) return static_cast<long long>(*d);
    return *d;
  }
  if (const auto* b = std::get_if<bool>(&v.data)) return *b;
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  json arr = json::array();
  for (const auto& item : std::get<kv::Array>(v.data)) arr.push_back(value_to_json(item));
  return arr;
}

json table_to_json(const kv::Table& t) {
  json j = json::object();
  for (const auto& [k, v] : t.entries) j[k] = value_to_json(v);
  return j;
}

bool all_objects(const json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const auto& e : j) {
    if (!e.is_object()) return false;
  }
  return true;
}

} // namespace

kv::Document document_from_json(const json& j) {
  if (!j.is_object()) schema_error("", "design must be a JSON object");
  kv::Document doc;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      doc.tables.emplace_back(key, table_from_json(value, key));
    } else if (all_objects(value)) {
      std::vector<kv::Table> rows;
      for (std::size_t i = 0; i < value.size(); ++i) {
        rows.push_back(table_from_json(value[i], key + "[" + std::to_string(i) + "]"));
      }
      doc.table_arrays.emplace_back(key, std::move(rows));
    } else if (!value.is_null()) {
      doc.root.set(key, scalar_from_json(value, key));
    }
  }
  return doc;
}

json document_to_json(const kv::Document& doc) {
  json j = table_to_json(doc.root);
  for (const auto& [name, t] : doc.tables) j[name] = table_to_json(t);
  for (const auto& [name, rows] : doc.table_arrays) {
    json arr = json::array();
    for (const auto& t : rows) arr.push_back(table_to_json(t));
    j[name] = arr;
  }
  return j;
}

DesignSpec design_from_json(const json& j) { return design_from_document(document_from_json(j)); }

json design_to_json(const DesignSpec& design) { return document_to_json(kv::parse(serialize_design(design))); }

std::string content_hash(const DesignSpec& design) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : serialize_design(design)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("BLIMP_DATA_DIR"); env && *env) return env;
  return "blimp-data";
}

DesignStore::DesignStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  std::ifstream in(dir_ / "index.json");
  if (!in) return;
  const json idx = json::parse(in, nullptr, false);
  if (idx.is_discarded() || !idx.contains("designs") || !idx["designs"].is_array()) {
    throw std::runtime_error("corrupt design index in " + dir_.string());
  }
  for (const auto& e : idx["designs"]) {
    index_.push_back({e.value("id", ""), e.value("name", ""), e.value("content_hash", ""), e.value("created_at", "")});
  }
}

void DesignStore::save_index() const {
  json arr = json::array();
  for (const auto& d : index_) {
    arr.push_back({{"id", d.id}, {"name", d.name}, {"content_hash", d.content_hash}, {"created_at", d.created_at}});
  }
  const auto tmp = dir_ / "index.json.tmp";
  {
    std::ofstream out(tmp);
    out << json{{"designs", arr}}.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / "index.json");
}

StoredDesign DesignStore::put(const DesignSpec& design) {
  const std::string text = serialize_design(design);
  const std::string hash = content_hash(design);
  std::unique_lock lock(mu_);
  for (const auto& d : index_) {
    if (d.id == hash) return d;
  }
  {
    std::ofstream out(dir_ / (hash + ".toml"));
    out << text;
    if (!out) throw std::runtime_error("cannot write design " + hash);
  }
  StoredDesign rec{hash, design.name, hash, utc_timestamp()};
  index_.push_back(rec);
  save_index();
  return rec;
}

std::optional<StoredDesign> DesignStore::info(const std::string& id) const {
  std::shared_lock lock(mu_);
  for (const auto& d : index_) {
    if (d.id == id) return d;
  }
  return std::nullopt;
}

std::optional<DesignSpec> DesignStore::get(const std::string& id) const {
  if (!info(id)) return std::nullopt;
  std::shared_lock lock(mu_);
  std::ifstream in(dir_ / (id + ".toml"));
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  return parse_design(text.str());
}

std::vector<StoredDesign> DesignStore::list() const {
  std::shared_lock lock(mu_);
  return index_;
}

} // namespace blimp
