#include "readmit/models/model_io.hpp"

#include <fstream>

#include "readmit/error.hpp"
#include "readmit/models/adaboost.hpp"
#include "readmit/models/bayes_net.hpp"
#include "readmit/models/mlp.hpp"
#include "readmit/models/naive_bayes.hpp"
#include "readmit/models/random_forest.hpp"

namespace readmit {

nlohmann::json model_to_json(const Scorer& model) {
  return {{"format", "readmit-model"},
          {"version", kModelFormatVersion},
          {"kind", to_string(model.kind())},
          {"schema", to_json(model.schema_shape())},
          {"parameters", model.parameters_json()}};
}

std::unique_ptr<Scorer> model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "readmit-model") throw DataError("model file: unknown format");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("model file: version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    }
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = parse_model_kind(kind_name);
    if (!kind) throw DataError("model file: unknown model kind " + kind_name);
    const auto shape = schema_shape_from_json(j.at("schema"));
    const auto& p = j.at("parameters");
    switch (*kind) {
      case ModelKind::kNaiveBayes: return std::make_unique<NaiveBayes>(NaiveBayes::from_json(shape, p));
      case ModelKind::kBayesNet: return std::make_unique<BayesNet>(BayesNet::from_json(shape, p));
      case ModelKind::kRandomForest: return std::make_unique<RandomForest>(RandomForest::from_json(shape, p));
      case ModelKind::kAdaBoost: return std::make_unique<AdaBoost>(AdaBoost::from_json(shape, p));
      case ModelKind::kMlp: return std::make_unique<Mlp>(Mlp::from_json(shape, p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  throw DataError("model file: unknown model kind");
}

void save_model(const Scorer& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model).dump() << '\n';
}

std::unique_ptr<Scorer> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace readmit
