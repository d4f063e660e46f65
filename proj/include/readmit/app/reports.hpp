#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace readmit::app {

/// Identifies the run a report came from.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// Collects written files so the run manifest can list them.
class ReportWriter {
 public:
  ReportWriter(std::filesystem::path dir, Provenance provenance);

  const std::filesystem::path& dir() const { return dir_; }
  const Provenance& provenance() const { return provenance_; }

  /// Adds "config_hash" and "seed" at the top level.
  void json(std::string_view name, nlohmann::json body);
  /// Prefixes a "# config_hash=..., seed=..." comment line.
  void csv(std::string_view name, std::string_view body);
  /// Written as is (data caches, models).
  void raw(std::string_view name, std::string_view body);

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  Provenance provenance_;
  std::vector<std::string> written_;
};

void write_file(const std::filesystem::path& path, std::string_view body);

}  // namespace readmit::app
