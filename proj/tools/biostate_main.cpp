// Command-line front end for the biomarker state-discovery pipeline.
//
// Subcommands mirror the pipeline stages: seedgen, screen, cluster, augment,
// project, report, and the chained pipeline. Every artifact embeds the tool
// version and a hash of the effective configuration.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "biostate/biostate.hpp"

namespace {

using namespace biostate;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(const Error& err) {
  switch (err.code()) {
    case Errc::IoFailure: return kExitIo;
    case Errc::NumericalFailure: return kExitNumerical;
    default: return kExitUsage;
  }
}

struct CliOptions {
  RunConfig config;
  std::string method_name = "ward";
  bool force = false;
  std::optional<bool> z_space;  // tri-state: unset -> sniff metadata
  bool strict_convergence = false;
  std::uint64_t kmeans_seed = 0;
};

void add_input_flags(CLI::App* cmd, CliOptions& opt, bool required_input) {
  auto* input = cmd->add_option("--input", opt.config.input_path, "input panel CSV");
  if (required_input) input->required();
  cmd->add_option("--out-dir", opt.config.out_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--seed", opt.config.seed, "global RNG seed")->capture_default_str();
  cmd->add_flag(
      "--z-space,!--native",
      [&opt](std::int64_t count) { opt.z_space = count > 0; },
      "treat input as z-space (default: sniff the file's space= metadata)");
}

NormalizedPanel load_input(const CliOptions& opt) {
  return load_normalized_input(opt.config.input_path, opt.z_space);
}

void emit_notes(const PipelineResult& result) {
  for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
}

int run_seedgen(const CliOptions& opt) {
  RunConfig config = opt.config;
  config.input_path.clear();
  ArtifactWriter writer(config.out_dir, config_hash_hex(config));
  SeedSpec spec;
  if (!config.seed_spec_path.empty()) {
    const std::string text = slurp_file(config.seed_spec_path);
    std::istringstream in(text);
    spec = parse_seed_spec(in);
    spec.seed = derive_seed(config.seed, "seedgen");
  } else {
    spec = SeedSpec::canonical(derive_seed(config.seed, "seedgen"), config.seed_counts);
    verify_profiles_match_rules(spec, load_rules_or_default(config.rules_path));
  }
  const SeedResult seed = generate_seed(spec);
  {
    std::ostringstream out;
    save_panel(out, seed.panel, writer.meta("space=z"));
    writer.write_text("seed.csv", out.str());
  }
  {
    std::ostringstream out;
    save_labels(out, seed.panel.subjects, seed.labels, writer.meta());
    writer.write_text("labels.csv", out.str());
  }
  std::cout << "seed: " << seed.panel.subject_count() << " subjects x "
            << seed.panel.column_count() << " markers -> " << writer.path("seed.csv")
            << "\n";
  return kExitOk;
}

int run_screen(const CliOptions& opt) {
  ArtifactWriter writer(opt.config.out_dir, config_hash_hex(opt.config));
  const NormalizedPanel panel = load_input(opt);
  writer.write_json("normalization.json",
                    normalization_to_json(panel.params, panel.schema));
  const ScreeningReport report = screen(panel, opt.config.screen_threshold);
  writer.write_json("screening.json", screening_to_json(report));
  NormalizedPanel retained = exclude(panel, report);
  if (opt.config.refit_after_screen && !report.flagged.empty()) {
    BiomarkerPanel raw = denormalize(retained);
    retained = apply_normalization(raw, fit_normalization(raw));
  }
  {
    std::ostringstream out;
    save_panel(out, retained, writer.meta("space=z"));
    writer.write_text("retained.csv", out.str());
  }
  std::cout << "screened " << panel.subject_count() << " subjects at threshold "
            << format_double(report.threshold) << ": " << report.flagged.size()
            << " flagged, " << report.retained.size() << " retained\n";
  for (const auto& id : report.flagged) std::cout << "flagged: " << id << "\n";
  return kExitOk;
}

int run_cluster(const CliOptions& opt) {
  ArtifactWriter writer(opt.config.out_dir, config_hash_hex(opt.config));
  const NormalizedPanel panel = load_input(opt);
  LinkageTree tree;
  if (opt.config.method == ClusterMethod::Ward) {
    tree = ward_linkage(panel);
    {
      std::ostringstream out;
      save_linkage(out, tree, writer.meta());
      writer.write_text("linkage.txt", out.str());
    }
    writer.write_text("dendrogram.svg",
                      render_dendrogram(tree, panel.subjects, writer.meta()));
  }
  for (std::size_t k : opt.config.ks) {
    const ClusterModel model = opt.config.method == ClusterMethod::Ward
                                   ? cut_tree(tree, k, panel)
                                   : kmeans(panel, k, opt.kmeans_seed);
    writer.write_json("model_k" + std::to_string(k) + ".json",
                      cluster_model_to_json(model, panel.subjects));
    std::cout << "k=" << k << " silhouette=" << format_double(model.silhouette) << "\n";
    if (opt.config.stability_runs >= 2) {
      const StabilityReport stab =
          stability(panel, k, opt.config.method, opt.config.stability_runs);
      writer.write_json("stability_k" + std::to_string(k) + ".json",
                        stability_to_json(stab, k, opt.config.method));
      std::cout << "k=" << k << " mean ARI over " << stab.runs
                << " runs: " << format_double(stab.mean_ari) << "\n";
    }
  }
  return kExitOk;
}

int run_augment(const CliOptions& opt) {
  require(opt.config.augment_count >= 1, Errc::BadArgument,
          "--count must be at least 1");
  ArtifactWriter writer(opt.config.out_dir, config_hash_hex(opt.config));
  const NormalizedPanel panel = load_input(opt);
  const RatioCheck ratio = check_ratio(panel.subject_count(), panel.column_count());
  if (ratio == RatioCheck::Insufficient) {
    std::cerr << "warning: " << panel.subject_count() << " observations for "
              << panel.column_count()
              << " variables is below the 5:1 stability ratio\n";
    require(opt.force, Errc::BadArgument,
            "pass --force to fit a mixture on an under-ratio panel");
  }
  GmmConfig config{opt.config.gmm_components, opt.config.reg_covar,
                   opt.config.gmm_max_iter, opt.config.gmm_tol,
                   derive_seed(opt.config.seed, "gmm")};
  const GmmModel model = fit_gmm(panel, config);
  if (!model.converged) {
    std::cerr << "warning: EM stopped at max_iter before reaching tol\n";
    require(!opt.strict_convergence, Errc::NumericalFailure,
            "EM did not converge and --strict was given");
  }
  writer.write_json("gmm.json", gmm_to_json(model));
  const Cohort cohort = augment_cohort(panel, model, opt.config.augment_count,
                                       derive_seed(opt.config.seed, "sample"));
  {
    std::ostringstream out;
    save_cohort(out, cohort, writer.meta("space=z"));
    writer.write_text("cohort.csv", out.str());
  }
  std::cout << "cohort: " << panel.subject_count() << " seed + "
            << opt.config.augment_count << " synthetic = "
            << cohort.panel.subject_count() << " rows -> "
            << writer.path("cohort.csv") << "\n";
  return kExitOk;
}

int run_project(const CliOptions& opt) {
  ArtifactWriter writer(opt.config.out_dir, config_hash_hex(opt.config));
  const std::string text = slurp_file(opt.config.input_path);
  std::istringstream in(text);
  const Cohort cohort = load_cohort(in);
  const std::size_t k = opt.config.ks.empty() ? 5 : opt.config.ks.back();
  const ClusterModel model = cut_tree(ward_linkage(cohort.panel), k, cohort.panel);
  const PcaModel pca = fit_pca(cohort.panel.z, 2);
  const Matrix scores = pca_project(pca, cohort.panel.z);
  writer.write_json("pca.json", pca_to_json(pca));
  {
    std::ostringstream out;
    save_scores(out, cohort.panel.subjects, scores, model.assignments,
                cohort.provenance, writer.meta());
    writer.write_text("scores.csv", out.str());
  }
  writer.write_text("scatter.svg", render_scatter(scores, model.assignments,
                                                  cohort.provenance, writer.meta()));
  std::cout << "pc1 ratio " << format_double(pca.explained_ratio[0]) << ", pc2 ratio "
            << format_double(pca.explained_ratio[1]) << " -> "
            << writer.path("scatter.svg") << "\n";
  return kExitOk;
}

int run_report(const CliOptions& opt, const std::string& model_path) {
  ArtifactWriter writer(opt.config.out_dir, config_hash_hex(opt.config));
  const std::string text = slurp_file(opt.config.input_path);
  std::istringstream in(text);
  const Cohort cohort = load_cohort(in);
  const auto rules = load_rules_or_default(opt.config.rules_path);

  ClusterModel model;
  if (!model_path.empty()) {
    const json parsed = json::parse(slurp_file(model_path));
    std::vector<std::string> subjects;
    model = cluster_model_from_json(parsed, &subjects);
    require(subjects == cohort.panel.subjects, Errc::StaleModel,
            "model subjects do not match cohort");
  } else {
    const std::size_t k = opt.config.ks.empty() ? 5 : opt.config.ks.back();
    model = cut_tree(ward_linkage(cohort.panel), k, cohort.panel);
  }

  const ProfileReport report = profile_report(cohort.panel, model, rules);
  writer.write_json("profile.json", profile_report_to_json(report));
  std::ostringstream table;
  save_profile_text(table, report, cohort.panel.schema, writer.meta());
  writer.write_text("profile.txt", table.str());

  const Matrix signatures = centroid_signatures(cohort.panel, model);
  const auto states = classify(signatures, cohort.panel.schema, rules);
  std::vector<std::string> row_labels;
  for (std::size_t c = 0; c < model.k; ++c)
    row_labels.push_back("c" + std::to_string(c) + " " + state_name(states[c]));
  writer.write_text("heatmap.svg", render_heatmap(signatures, cohort.panel.schema,
                                                  row_labels, writer.meta()));
  std::ostringstream stdout_table;
  save_profile_text(stdout_table, report, cohort.panel.schema);
  std::cout << stdout_table.str();
  return kExitOk;
}

int run_full_pipeline(const CliOptions& opt) {
  RunConfig config = opt.config;
  const PipelineResult result = run_pipeline(config);
  emit_notes(result);
  const std::size_t fine_k = *std::max_element(config.ks.begin(), config.ks.end());
  std::ostringstream table;
  save_profile_text(table, result.profiles.at(fine_k), result.cohort.panel.schema);
  std::cout << table.str();
  std::cout << "artifacts in " << config.out_dir << " (config "
            << config_hash_hex(config) << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent physiological state discovery from biomarker panels"};
  app.set_version_flag("--version", biostate::tool_banner());
  app.set_config("--config", "", "key=value config file; flags win");
  app.require_subcommand(1);

  CliOptions opt;
  std::string model_path;
  std::vector<std::size_t> counts;

  auto* seedgen = app.add_subcommand("seedgen", "generate the synthetic seed panel");
  add_input_flags(seedgen, opt, false);
  seedgen->add_option("--counts", counts, "subjects per profile (5 values)")->delimiter(',');
  seedgen->add_option("--spec", opt.config.seed_spec_path, "seed spec file");

  auto* screen_cmd = app.add_subcommand("screen", "multivariate safety screening");
  add_input_flags(screen_cmd, opt, true);
  screen_cmd
      ->add_option("--threshold", opt.config.screen_threshold,
                   "distance threshold from the global centroid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  screen_cmd->add_flag("--refit-after-screen", opt.config.refit_after_screen,
                       "refit normalization on retained subjects");

  auto* cluster_cmd = app.add_subcommand("cluster", "hierarchical / k-means clustering");
  add_input_flags(cluster_cmd, opt, true);
  cluster_cmd->add_option("--k", opt.config.ks, "resolutions to cut")
      ->capture_default_str();
  cluster_cmd->add_option("--method", opt.method_name, "ward | kmeans")
      ->capture_default_str();
  cluster_cmd->add_option("--stability-runs", opt.config.stability_runs,
                          "stability repetitions (0 disables)")
      ->capture_default_str();
  cluster_cmd->add_option("--kmeans-seed", opt.kmeans_seed, "seed for a single k-means run");

  auto* augment_cmd = app.add_subcommand("augment", "mixture fit + synthetic cohort");
  add_input_flags(augment_cmd, opt, true);
  augment_cmd->add_option("--count", opt.config.augment_count, "synthetic rows to draw")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment_cmd->add_option("--components", opt.config.gmm_components, "mixture size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  augment_cmd->add_option("--reg-covar", opt.config.reg_covar, "variance floor")
      ->capture_default_str();
  augment_cmd->add_option("--max-iter", opt.config.gmm_max_iter, "EM iteration cap")
      ->capture_default_str();
  augment_cmd->add_option("--tol", opt.config.gmm_tol, "EM improvement tolerance")
      ->capture_default_str();
  augment_cmd->add_flag("--force", opt.force, "fit even below the 5:1 ratio");
  augment_cmd->add_flag("--strict", opt.strict_convergence,
                        "treat EM non-convergence as an error");

  auto* project_cmd = app.add_subcommand("project", "2-D PCA projection of a cohort");
  add_input_flags(project_cmd, opt, true);
  project_cmd->add_option("--k", opt.config.ks, "resolution for point colors");

  auto* report_cmd = app.add_subcommand("report", "physiological profile report");
  add_input_flags(report_cmd, opt, true);
  report_cmd->add_option("--model", model_path, "cluster model JSON (default: ward cut)");
  report_cmd->add_option("--k", opt.config.ks, "resolution when no model is given");
  report_cmd->add_option("--rules", opt.config.rules_path, "signature rule file");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "chained end-to-end run");
  add_input_flags(pipeline_cmd, opt, false);
  pipeline_cmd->add_option("--threshold", opt.config.screen_threshold)
      ->capture_default_str();
  pipeline_cmd->add_flag("--refit-after-screen", opt.config.refit_after_screen);
  pipeline_cmd->add_option("--k", opt.config.ks)->capture_default_str();
  pipeline_cmd->add_option("--method", opt.method_name)->capture_default_str();
  pipeline_cmd->add_option("--stability-runs", opt.config.stability_runs)
      ->capture_default_str();
  pipeline_cmd->add_option("--components", opt.config.gmm_components)
      ->capture_default_str();
  pipeline_cmd->add_option("--reg-covar", opt.config.reg_covar)->capture_default_str();
  pipeline_cmd->add_option("--count", opt.config.augment_count)->capture_default_str();
  pipeline_cmd->add_option("--counts", counts, "seed subjects per profile")->delimiter(',');
  pipeline_cmd->add_option("--rules", opt.config.rules_path);
  pipeline_cmd->add_option("--spec", opt.config.seed_spec_path, "seed spec file");
  pipeline_cmd->add_flag("!--no-force", opt.config.force_ratio,
                         "refuse under-ratio mixture fits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!counts.empty()) opt.config.seed_counts = counts;
  const auto method = biostate::parse_method(opt.method_name);
  if (!method.has_value()) {
    std::cerr << "error: unknown method '" << opt.method_name << "' (ward | kmeans)\n";
    return kExitUsage;
  }
  opt.config.method = *method;

  try {
    if (seedgen->parsed()) return run_seedgen(opt);
    if (screen_cmd->parsed()) return run_screen(opt);
    if (cluster_cmd->parsed()) return run_cluster(opt);
    if (augment_cmd->parsed()) return run_augment(opt);
    if (project_cmd->parsed()) return run_project(opt);
    if (report_cmd->parsed()) return run_report(opt, model_path);
    if (pipeline_cmd->parsed()) return run_full_pipeline(opt);
  } catch (const biostate::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
