#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "blimp/design.hpp"
#include "blimp/kvdoc.hpp"

namespace blimp {

/// JSON design objects mirror the design file: top-level scalars, one object
/// per `[section]` and an array of objects for `[[thrusters]]`. Throws
/// DesignError.
kv::Document document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const kv::Document& doc);
DesignSpec design_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const DesignSpec& design);

/// 16 hex digits of FNV-1a over the canonical serialization.
std::string content_hash(const DesignSpec& design);

struct StoredDesign {
  std::string id;
  std::string name;
  std::string content_hash;
  std::string created_at; // ISO-8601 UTC
};

/// Directory of canonical design files plus an `index.json`. Identical
/// designs share an id (the content hash). Reads take a shared lock, writes
/// an exclusive one.
class DesignStore {
 public:
  /// Creates the directory if needed and loads the index.
  explicit DesignStore(std::filesystem::path dir);

  StoredDesign put(const DesignSpec& design);
  std::optional<DesignSpec> get(const std::string& id) const;
  std::optional<StoredDesign> info(const std::string& id) const;
  std::vector<StoredDesign> list() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void save_index() const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  std::vector<StoredDesign> index_;
};

/// `BLIMP_DATA_DIR` if set, otherwise ./blimp-data.
std::filesystem::path default_data_dir();

std::string utc_timestamp();

} // namespace blimp
