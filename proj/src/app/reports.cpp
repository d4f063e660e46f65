#include "readmit/app/reports.hpp"

#include <fstream>

#include "readmit/error.hpp"

namespace readmit::app {

void write_file(const std::filesystem::path& path, std::string_view body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

ReportWriter::ReportWriter(std::filesystem::path dir, Provenance provenance)
    : dir_(std::move(dir)), provenance_(std::move(provenance)) {
  std::filesystem::create_directories(dir_);
}

void ReportWriter::json(std::string_view name, nlohmann::json body) {
  nlohmann::json doc = {{"config_hash", provenance_.config_hash}, {"seed", provenance_.seed}};
  doc.update(body);
  raw(name, doc.dump(2) + "\n");
}

void ReportWriter::csv(std::string_view name, std::string_view body) {
  std::string text = "# config_hash=" + provenance_.config_hash + ", seed=" + std::to_string(provenance_.seed) + "\n";
  text += body;
  raw(name, text);
}

void ReportWriter::raw(std::string_view name, std::string_view body) {
  write_file(dir_ / name, body);
  written_.emplace_back(name);
}

}  // namespace readmit::app
