#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biostate/cluster_model.hpp"
#include "biostate/error.hpp"
#include "biostate/gmm.hpp"
#include "biostate/matrix.hpp"
#include "biostate/model_selection.hpp"
#include "biostate/panel.hpp"
#include "biostate/pca.hpp"
#include "biostate/profiles.hpp"
#include "biostate/screening.hpp"

namespace biostate {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  Matrix m;
  m.rows = j.size();
  m.cols = m.rows > 0 ? j.at(0).size() : 0;
  m.data.reserve(m.rows * m.cols);
  for (const auto& row : j) {
    require(row.size() == m.cols, Errc::MalformedCsv, "ragged JSON matrix");
    for (const auto& v : row) m.data.push_back(v.get<double>());
  }
  return m;
}

inline json schema_to_json(std::span<const BiomarkerDescriptor> schema) {
  json out = json::array();
  for (const auto& d : schema)
    out.push_back({{"name", d.name}, {"unit", d.unit}, {"window", window_token(d.window)}});
  return out;
}

inline std::vector<BiomarkerDescriptor> schema_from_json(const json& j) {
  std::vector<BiomarkerDescriptor> schema;
  for (const auto& item : j) {
    BiomarkerDescriptor d;
    d.name = item.at("name").get<std::string>();
    d.unit = item.value("unit", std::string{});
    const auto window = parse_window(item.value("window", std::string{"Pre"}));
    require(window.has_value(), Errc::MalformedCsv, "bad window in schema JSON");
    d.window = *window;
    schema.push_back(std::move(d));
  }
  return schema;
}

// -- normalization -------------------------------------------------------------

inline json normalization_to_json(const NormalizationParams& params,
                                  std::span<const BiomarkerDescriptor> schema) {
  return json{{"means", params.means},
              {"stds", params.stds},
              {"schema", schema_to_json(schema)}};
}

inline NormalizationParams normalization_from_json(const json& j,
                                                   std::vector<BiomarkerDescriptor>* schema = nullptr) {
  NormalizationParams params;
  params.means = j.at("means").get<std::vector<double>>();
  params.stds = j.at("stds").get<std::vector<double>>();
  if (schema != nullptr) *schema = schema_from_json(j.at("schema"));
  return params;
}

// -- screening ------------------------------------------------------------------

inline json screening_to_json(const ScreeningReport& report) {
  json distances = json::object();
  for (std::size_t i = 0; i < report.subjects.size(); ++i)
    distances[report.subjects[i]] = report.distances[i];
  return json{{"threshold", report.threshold},
              {"distances", distances},
              {"flagged", report.flagged},
              {"retained", report.retained}};
}

// -- clustering -------------------------------------------------------------------

inline json cluster_model_to_json(const ClusterModel& model,
                                  std::span<const std::string> subjects) {
  require(subjects.size() == model.assignments.size(), Errc::ShapeMismatch,
          "subjects do not match model");
  json out{{"k", model.k},
           {"method", method_token(model.method)},
           {"silhouette", model.silhouette},
           {"subjects", std::vector<std::string>(subjects.begin(), subjects.end())},
           {"assignments", model.assignments},
           {"centroids", matrix_to_json(model.centroids)}};
  if (model.seed.has_value())
    out["seed"] = *model.seed;
  else
    out["seed"] = nullptr;
  return out;
}

inline ClusterModel cluster_model_from_json(const json& j,
                                            std::vector<std::string>* subjects = nullptr) {
  ClusterModel model;
  model.k = j.at("k").get<std::size_t>();
  const auto method = parse_method(j.at("method").get<std::string>());
  require(method.has_value(), Errc::MalformedCsv, "bad method in model JSON");
  model.method = *method;
  model.silhouette = j.at("silhouette").get<double>();
  model.assignments = j.at("assignments").get<std::vector<std::size_t>>();
  model.centroids = matrix_from_json(j.at("centroids"));
  if (j.contains("seed") && !j.at("seed").is_null())
    model.seed = j.at("seed").get<std::uint64_t>();
  if (subjects != nullptr) *subjects = j.at("subjects").get<std::vector<std::string>>();
  return model;
}

inline json stability_to_json(const StabilityReport& report, std::size_t k,
                              ClusterMethod method) {
  return json{{"runs", report.runs},
              {"k", k},
              {"method", method_token(method)},
              {"mean_ari", report.mean_ari},
              {"per_run_silhouette", report.per_run_silhouette}};
}

// -- gmm ---------------------------------------------------------------------------

inline json gmm_to_json(const GmmModel& model) {
  return json{{"weights", model.weights},
              {"means", matrix_to_json(model.means)},
              {"variances", matrix_to_json(model.variances)},
              {"config",
               {{"components", model.config.components},
                {"reg_covar", model.config.reg_covar},
                {"max_iter", model.config.max_iter},
                {"tol", model.config.tol},
                {"seed", model.config.seed}}},
              {"final_log_likelihood", model.final_log_likelihood},
              {"converged", model.converged}};
}

inline GmmModel gmm_from_json(const json& j) {
  GmmModel model;
  model.weights = j.at("weights").get<std::vector<double>>();
  model.means = matrix_from_json(j.at("means"));
  model.variances = matrix_from_json(j.at("variances"));
  const auto& c = j.at("config");
  model.config.components = c.at("components").get<std::size_t>();
  model.config.reg_covar = c.at("reg_covar").get<double>();
  model.config.max_iter = c.at("max_iter").get<std::size_t>();
  model.config.tol = c.at("tol").get<double>();
  model.config.seed = c.at("seed").get<std::uint64_t>();
  model.final_log_likelihood = j.at("final_log_likelihood").get<double>();
  model.converged = j.value("converged", false);
  return model;
}

// -- pca ------------------------------------------------------------------------------

inline json pca_to_json(const PcaModel& model) {
  return json{{"mean", model.mean},
              {"components", matrix_to_json(model.components)},
              {"explained_variance", model.explained_variance},
              {"explained_ratio", model.explained_ratio}};
}

// -- profile report ---------------------------------------------------------------------

inline json profile_report_to_json(const ProfileReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"cluster", row.cluster},
                    {"state", state_name(row.state)},
                    {"count", row.count},
                    {"share", row.share},
                    {"centroid", row.centroid}});
  return json{{"clusters", rows}, {"warnings", report.warnings}};
}

}  // namespace biostate
