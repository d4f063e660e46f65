#pragma once

#include <filesystem>
#include <memory>

#include <json.hpp>

#include "readmit/models/scorer.hpp"

namespace readmit {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const Scorer& model);
/// Throws DataError on an unknown format, version or model kind.
std::unique_ptr<Scorer> model_from_json(const nlohmann::json& j);

void save_model(const Scorer& model, const std::filesystem::path& path);
std::unique_ptr<Scorer> load_model(const std::filesystem::path& path);

}  // namespace readmit
