#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "biostate/csv.hpp"
#include "biostate/profiles.hpp"
#include "biostate/seedgen.hpp"

using namespace biostate;

TEST_CASE("default spec yields the 15x32 seed with the embedded groups") {
  const auto spec = SeedSpec::default_spec(0);
  CHECK(spec.subject_count() == 15);
  CHECK(spec.profiles.size() == 5);
  CHECK(spec.biomarker_names.size() == 32);
  verify_profiles_match_rules(spec, default_rules());

  const auto seed = generate_seed(spec);
  CHECK(seed.panel.subject_count() == 15);
  CHECK(seed.panel.column_count() == 32);
  REQUIRE(seed.labels.size() == 15);

  std::map<PhysiologicalState, std::size_t> counts;
  for (auto s : seed.labels) counts[s]++;
  CHECK(counts[PhysiologicalState::Homeostasis] == 3);
  CHECK(counts[PhysiologicalState::SilentRisk] == 3);

  // silent-risk rows should sit near homocysteine +2, insulin +1.5
  std::size_t hcy = 0, ins = 0;
  for (std::size_t j = 0; j < seed.panel.schema.size(); ++j) {
    if (seed.panel.schema[j].name == "homocysteine") hcy = j;
    if (seed.panel.schema[j].name == "insulin") ins = j;
  }
  for (std::size_t i = 0; i < 15; ++i) {
    if (seed.labels[i] != PhysiologicalState::SilentRisk) continue;
    CHECK(std::abs(seed.panel.z(i, hcy) - 2.0) < 1.5);
    CHECK(std::abs(seed.panel.z(i, ins) - 1.5) < 1.5);
  }
}

TEST_CASE("population-weighted counts follow the reference shares") {
  const auto spec = SeedSpec::population_weighted(1);
  CHECK(spec.subject_count() == 15);
  CHECK(spec.profiles[0].count == 6);  // homeostasis majority
  CHECK(spec.profiles[4].count == 1);  // silent risk minority
  verify_profiles_match_rules(spec, default_rules());
}

TEST_CASE("zero-std profiles reproduce their means exactly") {
  SeedSpec spec;
  spec.biomarker_names = {"a", "b"};
  spec.background_std = 0.0;
  spec.profiles = {{PhysiologicalState::Unclassified, 2, {{"a", 1.5, 0.0}}},
                   {PhysiologicalState::Unclassified, 2, {{"b", -2.0, 0.0}}}};
  const auto seed = generate_seed(spec);
  CHECK(seed.panel.z(0, 0) == 1.5);
  CHECK(seed.panel.z(0, 1) == 0.0);
  CHECK(seed.panel.z(2, 1) == -2.0);
}

TEST_CASE("equal seeds give byte-identical CSV") {
  const auto a = generate_seed(SeedSpec::default_spec(42));
  const auto b = generate_seed(SeedSpec::default_spec(42));
  std::ostringstream csv_a, csv_b;
  save_panel(csv_a, a.panel);
  save_panel(csv_b, b.panel);
  CHECK(csv_a.str() == csv_b.str());

  const auto c = generate_seed(SeedSpec::default_spec(43));
  std::ostringstream csv_c;
  save_panel(csv_c, c.panel);
  CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("group means converge to spec means at count 200") {
  auto spec = SeedSpec::default_spec(7);
  for (auto& profile : spec.profiles) profile.count = 200;
  const auto seed = generate_seed(spec);
  std::size_t row = 0;
  for (const auto& profile : spec.profiles) {
    std::vector<double> mean(spec.biomarker_names.size(), 0.0);
    for (std::size_t s = 0; s < profile.count; ++s, ++row)
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += seed.panel.z(row, j);
    for (double& v : mean) v /= static_cast<double>(profile.count);
    std::map<std::string, double> expected;
    for (const auto& level : profile.levels) expected[level.marker] = level.mean_z;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const auto it = expected.find(spec.biomarker_names[j]);
      const double target = it == expected.end() ? 0.0 : it->second;
      CHECK(std::abs(mean[j] - target) < 0.15);
    }
  }
}

TEST_CASE("generated group centroids classify back to their declared state") {
  const auto spec = SeedSpec::default_spec(3);
  const auto seed = generate_seed(spec);
  std::size_t row = 0;
  for (const auto& profile : spec.profiles) {
    Matrix centroid(1, seed.panel.column_count());
    for (std::size_t s = 0; s < profile.count; ++s, ++row)
      for (std::size_t j = 0; j < centroid.cols; ++j)
        centroid(0, j) += seed.panel.z(row, j);
    for (double& v : centroid.data) v /= static_cast<double>(profile.count);
    const auto states = classify(centroid, seed.panel.schema, default_rules());
    CHECK(states[0] == profile.state);
  }
}

TEST_CASE("invalid specs are rejected") {
  SeedSpec empty;
  CHECK_THROWS_MATCHES(generate_seed(empty), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::SpecInvalid;
                       }));
  SeedSpec dup;
  dup.biomarker_names = {"a", "a"};
  dup.profiles = {{PhysiologicalState::Unclassified, 3, {}}};
  CHECK_THROWS_MATCHES(generate_seed(dup), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::SpecInvalid;
                       }));
  SeedSpec unknown_level;
  unknown_level.biomarker_names = {"a"};
  unknown_level.profiles = {{PhysiologicalState::Unclassified, 3, {{"zz", 1.0, 0.1}}}};
  CHECK_THROWS_MATCHES(generate_seed(unknown_level), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::SpecInvalid;
                       }));
}

TEST_CASE("labels sidecar lists one row per subject") {
  const auto seed = generate_seed(SeedSpec::default_spec(5));
  std::ostringstream out;
  save_labels(out, seed.panel.subjects, seed.labels);
  const std::string text = out.str();
  CHECK(text.rfind("id,true_state\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 16);  // header + 15 rows
  CHECK(text.find("seed_01,Homeostasis") != std::string::npos);
}

TEST_CASE("seed spec file round trip") {
  const auto spec = SeedSpec::population_weighted(9);
  const std::string text = serialize_seed_spec(spec);
  std::istringstream in(text);
  const auto parsed = parse_seed_spec(in);
  CHECK(parsed == spec);

  std::istringstream bad("profile: NotAState count=3\n");
  CHECK_THROWS_MATCHES(parse_seed_spec(bad), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::SpecInvalid;
                       }));
}
