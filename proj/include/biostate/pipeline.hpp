#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "biostate/cohort_csv.hpp"
#include "biostate/csv.hpp"
#include "biostate/error.hpp"
#include "biostate/gmm.hpp"
#include "biostate/json_io.hpp"
#include "biostate/kmeans.hpp"
#include "biostate/linkage.hpp"
#include "biostate/model_selection.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"
#include "biostate/pca.hpp"
#include "biostate/profiles.hpp"
#include "biostate/screening.hpp"
#include "biostate/seedgen.hpp"
#include "biostate/svg.hpp"
#include "biostate/version.hpp"

namespace biostate {

/// Reproducible configuration for the chained pipeline and its subcommands.
struct RunConfig {
  std::string input_path;  // empty: generate the synthetic seed
  std::string out_dir = ".";
  double screen_threshold = 25.0;
  bool refit_after_screen = false;
  std::vector<std::size_t> ks = {3, 5};
  ClusterMethod method = ClusterMethod::Ward;
  std::size_t stability_runs = 10;
  std::size_t gmm_components = 5;
  double reg_covar = 0.1;
  std::size_t gmm_max_iter = 200;
  double gmm_tol = 1e-4;
  std::size_t augment_count = 275;
  std::uint64_t seed = 0;
  bool force_ratio = true;  // the chained pipeline exists to escape the ratio gate
  std::vector<std::size_t> seed_counts = {3, 3, 3, 3, 3};
  std::string rules_path;      // empty: shipped defaults
  std::string seed_spec_path;  // empty: canonical spec with seed_counts
};

/// Canonical key=value dump; the FNV-1a hash of this string is embedded in
/// every artifact so outputs can be traced to their exact configuration.
inline std::string config_canonical(const RunConfig& c) {
  std::ostringstream out;
  out << "augment_count=" << c.augment_count << "\n";
  out << "force_ratio=" << (c.force_ratio ? 1 : 0) << "\n";
  out << "gmm_components=" << c.gmm_components << "\n";
  out << "gmm_max_iter=" << c.gmm_max_iter << "\n";
  out << "gmm_tol=" << format_double(c.gmm_tol) << "\n";
  out << "input=" << c.input_path << "\n";
  out << "ks=";
  for (std::size_t i = 0; i < c.ks.size(); ++i) out << (i > 0 ? "," : "") << c.ks[i];
  out << "\n";
  out << "method=" << method_token(c.method) << "\n";
  out << "refit_after_screen=" << (c.refit_after_screen ? 1 : 0) << "\n";
  out << "reg_covar=" << format_double(c.reg_covar) << "\n";
  out << "rules=" << c.rules_path << "\n";
  out << "screen_threshold=" << format_double(c.screen_threshold) << "\n";
  out << "seed=" << c.seed << "\n";
  out << "seed_counts=";
  for (std::size_t i = 0; i < c.seed_counts.size(); ++i)
    out << (i > 0 ? "," : "") << c.seed_counts[i];
  out << "\n";
  out << "seed_spec=" << c.seed_spec_path << "\n";
  out << "stability_runs=" << c.stability_runs << "\n";
  return out.str();
}

inline std::string config_hash_hex(const RunConfig& c) {
  return to_hex16(fnv1a64(config_canonical(c)));
}

/// Writes artifacts under a fixed directory, prefixing each with the tool
/// version and config hash.
class ArtifactWriter {
 public:
  ArtifactWriter(std::string out_dir, std::string config_hash)
      : out_dir_(std::move(out_dir)), config_hash_(std::move(config_hash)) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    require(!ec, Errc::IoFailure, "cannot create output directory " + out_dir_);
  }

  std::vector<std::string> meta(const std::string& extra = "") const {
    std::string line = tool_banner() + " config=" + config_hash_;
    if (!extra.empty()) line += " " + extra;
    return {line};
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir_) / name).string();
  }

  void write_text(const std::string& name, const std::string& content) const {
    std::ofstream out(path(name), std::ios::binary);
    require(out.good(), Errc::IoFailure, "cannot open " + path(name) + " for writing");
    out << content;
    require(out.good(), Errc::IoFailure, "failed writing " + path(name));
  }

  void write_json(const std::string& name, json payload) const {
    payload["meta"] = {{"tool", tool_banner()}, {"config", config_hash_}};
    write_text(name, payload.dump(2) + "\n");
  }

  const std::string& config_hash() const { return config_hash_; }

 private:
  std::string out_dir_;
  std::string config_hash_;
};

inline std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), Errc::IoFailure, "failed reading " + path);
  return buf.str();
}

/// Load a panel CSV and bring it into z-space. Files carrying a `space=z`
/// metadata tag (everything this tool emits) are wrapped as-is; native-unit
/// files are normalized. An explicit flag overrides sniffing.
inline NormalizedPanel load_normalized_input(const std::string& path,
                                             std::optional<bool> z_space_override =
                                                 std::nullopt) {
  const std::string text = slurp_file(path);
  bool z_space = false;
  if (z_space_override.has_value()) {
    z_space = *z_space_override;
  } else {
    std::istringstream meta_stream(text);
    const auto meta = read_csv_metadata(meta_stream);
    const auto it = meta.find("space");
    z_space = it != meta.end() && it->second == "z";
  }
  std::istringstream in(text);
  BiomarkerPanel panel = load_panel(in);
  if (z_space) return wrap_zspace(std::move(panel));
  return apply_normalization(panel, fit_normalization(panel));
}

inline std::vector<SignatureRule> load_rules_or_default(const std::string& path) {
  if (path.empty()) return default_rules();
  const std::string text = slurp_file(path);
  std::istringstream in(text);
  return parse_rules(in);
}

struct PipelineResult {
  NormalizedPanel input;                      // after z-space mapping
  std::vector<PhysiologicalState> seed_labels;  // empty when input came from a file
  ScreeningReport screening;
  NormalizedPanel retained;
  GmmModel gmm;
  Cohort cohort;
  std::map<std::size_t, ClusterModel> models;        // per k, on the cohort
  std::map<std::size_t, StabilityReport> stability_reports;
  std::map<std::size_t, ProfileReport> profiles;
  PcaModel pca;
  Matrix scores;
  RatioCheck seed_ratio = RatioCheck::Insufficient;
  std::vector<std::string> notes;
};

/// The full chained flow: obtain panel (seed generator or file) -> safety
/// screening -> GMM augmentation -> clustering of the augmented cohort at
/// every configured k -> 2-D projection -> physiological profiling. All
/// artifacts land in config.out_dir; the returned struct carries every
/// intermediate product for callers that want them in memory.
inline PipelineResult run_pipeline(const RunConfig& config) {
  require(!config.ks.empty(), Errc::BadArgument, "pipeline needs at least one k");
  require(config.augment_count >= 1, Errc::BadArgument,
          "augmentation count must be at least 1");
  require(config.screen_threshold > 0.0, Errc::BadArgument,
          "screening threshold must be positive");
  PipelineResult result;
  ArtifactWriter writer(config.out_dir, config_hash_hex(config));
  const auto rules = load_rules_or_default(config.rules_path);

  // input panel
  if (config.input_path.empty()) {
    SeedSpec spec;
    if (!config.seed_spec_path.empty()) {
      const std::string text = slurp_file(config.seed_spec_path);
      std::istringstream in(text);
      spec = parse_seed_spec(in);
      spec.seed = derive_seed(config.seed, "seedgen");
    } else {
      spec = SeedSpec::canonical(derive_seed(config.seed, "seedgen"),
                                 config.seed_counts);
      verify_profiles_match_rules(spec, rules);
    }
    SeedResult seed = generate_seed(spec);
    result.input = std::move(seed.panel);
    result.seed_labels = std::move(seed.labels);
    {
      std::ostringstream out;
      save_panel(out, result.input, writer.meta("space=z"));
      writer.write_text("seed.csv", out.str());
    }
    {
      std::ostringstream out;
      save_labels(out, result.input.subjects, result.seed_labels, writer.meta());
      writer.write_text("labels.csv", out.str());
    }
  } else {
    result.input = load_normalized_input(config.input_path);
  }
  writer.write_json("normalization.json",
                    normalization_to_json(result.input.params, result.input.schema));

  // screening
  result.screening = screen(result.input, config.screen_threshold);
  writer.write_json("screening.json", screening_to_json(result.screening));
  result.retained = exclude(result.input, result.screening);
  if (config.refit_after_screen && !result.screening.flagged.empty()) {
    BiomarkerPanel raw = denormalize(result.retained);
    result.retained = apply_normalization(raw, fit_normalization(raw));
    result.notes.push_back("normalization refit on retained subjects");
  }
  {
    std::ostringstream out;
    save_panel(out, result.retained, writer.meta("space=z"));
    writer.write_text("retained.csv", out.str());
  }

  // augmentation
  result.seed_ratio =
      check_ratio(result.retained.subject_count(), result.retained.column_count());
  if (result.seed_ratio == RatioCheck::Insufficient) {
    result.notes.push_back(
        "observation-to-variable ratio below 5:1 (" +
        std::to_string(result.retained.subject_count()) + "/" +
        std::to_string(result.retained.column_count()) +
        "); augmentation is the mitigation");
    require(config.force_ratio, Errc::BadArgument,
            "refusing to fit on an under-ratio panel without force");
  }
  GmmConfig gmm_config{config.gmm_components, config.reg_covar, config.gmm_max_iter,
                       config.gmm_tol, derive_seed(config.seed, "gmm")};
  result.gmm = fit_gmm(result.retained, gmm_config);
  if (!result.gmm.converged)
    result.notes.push_back("EM stopped at max_iter before reaching tol");
  writer.write_json("gmm.json", gmm_to_json(result.gmm));
  result.cohort = augment_cohort(result.retained, result.gmm, config.augment_count,
                                 derive_seed(config.seed, "sample"));
  {
    std::ostringstream out;
    save_cohort(out, result.cohort, writer.meta("space=z"));
    writer.write_text("cohort.csv", out.str());
  }

  // clustering on the augmented cohort
  const NormalizedPanel& cohort_panel = result.cohort.panel;
  LinkageTree tree;
  if (config.method == ClusterMethod::Ward) {
    tree = ward_linkage(cohort_panel);
    {
      std::ostringstream out;
      save_linkage(out, tree, writer.meta());
      writer.write_text("linkage.txt", out.str());
    }
    writer.write_text("dendrogram.svg",
                      render_dendrogram(tree, cohort_panel.subjects, writer.meta()));
  }
  for (std::size_t k : config.ks) {
    ClusterModel model =
        config.method == ClusterMethod::Ward
            ? cut_tree(tree, k, cohort_panel)
            : kmeans(cohort_panel, k, derive_seed(config.seed, "kmeans"));
    writer.write_json("model_k" + std::to_string(k) + ".json",
                      cluster_model_to_json(model, cohort_panel.subjects));
    if (config.stability_runs >= 2) {
      const StabilityReport stab =
          stability(cohort_panel, k, config.method, config.stability_runs);
      writer.write_json("stability_k" + std::to_string(k) + ".json",
                        stability_to_json(stab, k, config.method));
      result.stability_reports.emplace(k, stab);
    }
    result.models.emplace(k, std::move(model));
  }

  // 2-D projection colored by the finest configured resolution
  const std::size_t max_k = *std::max_element(config.ks.begin(), config.ks.end());
  const ClusterModel& fine = result.models.at(max_k);
  result.pca = fit_pca(cohort_panel.z, 2);
  result.scores = pca_project(result.pca, cohort_panel.z);
  writer.write_json("pca.json", pca_to_json(result.pca));
  {
    std::ostringstream out;
    save_scores(out, cohort_panel.subjects, result.scores, fine.assignments,
                result.cohort.provenance, writer.meta());
    writer.write_text("scores.csv", out.str());
  }
  writer.write_text("scatter.svg",
                    render_scatter(result.scores, fine.assignments,
                                   result.cohort.provenance, writer.meta()));

  // profiling per k
  for (std::size_t k : config.ks) {
    const ClusterModel& model = result.models.at(k);
    ProfileReport report = profile_report(cohort_panel, model, rules);
    writer.write_json("profile_k" + std::to_string(k) + ".json",
                      profile_report_to_json(report));
    {
      std::ostringstream out;
      save_profile_text(out, report, cohort_panel.schema, writer.meta());
      writer.write_text("profile_k" + std::to_string(k) + ".txt", out.str());
    }
    const Matrix signatures = centroid_signatures(cohort_panel, model);
    std::vector<std::string> row_labels;
    const auto states = classify(signatures, cohort_panel.schema, rules);
    for (std::size_t c = 0; c < model.k; ++c)
      row_labels.push_back("c" + std::to_string(c) + " " + state_name(states[c]));
    writer.write_text("heatmap_k" + std::to_string(k) + ".svg",
                      render_heatmap(signatures, cohort_panel.schema, row_labels,
                                     writer.meta()));
    result.profiles.emplace(k, std::move(report));
  }
  return result;
}

}  // namespace biostate
