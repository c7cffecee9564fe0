#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"
#include "biostate/profiles.hpp"
#include "biostate/rng.hpp"

namespace biostate {

/// Target level for one marker within a profile: mean and spread in z units.
struct MarkerLevel {
  std::string marker;
  double mean_z = 0.0;
  double std_z = 0.3;

  bool operator==(const MarkerLevel&) const = default;
};

/// One embedded physiological profile: a state, how many subjects carry it,
/// and the marker levels its signature pins. Unlisted markers sit at the
/// homeostatic background (mean 0, background_std).
struct ProfileSpec {
  PhysiologicalState state = PhysiologicalState::Homeostasis;
  std::size_t count = 0;
  std::vector<MarkerLevel> levels;

  bool operator==(const ProfileSpec&) const = default;
};

struct SeedSpec {
  std::vector<std::string> biomarker_names;
  std::vector<ProfileSpec> profiles;
  double background_std = 0.5;
  std::uint64_t seed = 0;

  std::size_t subject_count() const {
    std::size_t total = 0;
    for (const auto& p : profiles) total += p.count;
    return total;
  }

  bool operator==(const SeedSpec&) const = default;

  static SeedSpec canonical(std::uint64_t seed, std::vector<std::size_t> counts);
  /// 15 subjects, 3 per profile.
  static SeedSpec default_spec(std::uint64_t seed = 0) {
    return canonical(seed, {3, 3, 3, 3, 3});
  }
  /// 15 subjects allocated by the reference population shares: 6,3,3,2,1.
  static SeedSpec population_weighted(std::uint64_t seed = 0) {
    return canonical(seed, {6, 3, 3, 2, 1});
  }
};

/// The 32-marker space: 10 named physiological markers plus generator
/// placeholders marker_11..marker_32.
inline std::vector<std::string> default_marker_names() {
  std::vector<std::string> names = {
      "CK",   "LDH",         "CRP",            "cortisol", "testosterone",
      "SpO2", "heart_rate",  "blood_pressure", "insulin",  "homocysteine"};
  char buf[16];
  for (int i = 11; i <= 32; ++i) {
    std::snprintf(buf, sizeof(buf), "marker_%d", i);
    names.emplace_back(buf);
  }
  return names;
}

inline SeedSpec SeedSpec::canonical(std::uint64_t seed, std::vector<std::size_t> counts) {
  require(counts.size() == 5, Errc::SpecInvalid, "canonical seed uses 5 profiles");
  SeedSpec spec;
  spec.seed = seed;
  spec.biomarker_names = default_marker_names();
  using PS = PhysiologicalState;
  // Homeostasis pins every marker at the band center.
  ProfileSpec homeostasis{PS::Homeostasis, counts[0], {}};
  for (const auto& name : spec.biomarker_names)
    homeostasis.levels.push_back({name, 0.0, 0.3});
  spec.profiles = {
      homeostasis,
      {PS::AnabolicPower, counts[1], {{"testosterone", 1.2, 0.3}, {"cortisol", -0.8, 0.3}}},
      {PS::MetabolicStress, counts[2], {{"cortisol", 1.8, 0.3}, {"CK", 0.0, 0.3}}},
      {PS::MechanicalDamage, counts[3], {{"CK", 2.4, 0.3}, {"LDH", 2.1, 0.3}}},
      {PS::SilentRisk,
       counts[4],
       {{"homocysteine", 2.0, 0.3},
        {"insulin", 1.5, 0.3},
        {"CK", 0.0, 0.3},
        {"cortisol", 0.0, 0.3}}},
  };
  // Every profile's signature also pins the remaining core rule markers at
  // their normal level; reference signatures describe these markers as normal, not
  // merely unspecified.
  for (auto& profile : spec.profiles) {
    for (const char* core : {"CK", "LDH", "cortisol", "testosterone", "insulin",
                             "homocysteine"}) {
      bool listed = false;
      for (const auto& level : profile.levels)
        if (level.marker == core) {
          listed = true;
          break;
        }
      if (!listed) profile.levels.push_back({core, 0.0, 0.3});
    }
  }
  return spec;
}

inline void validate_seed_spec(const SeedSpec& spec) {
  require(!spec.profiles.empty(), Errc::SpecInvalid, "seed spec has no profiles");
  require(!spec.biomarker_names.empty(), Errc::SpecInvalid, "seed spec has no markers");
  require(spec.background_std >= 0.0, Errc::SpecInvalid, "background std must be >= 0");
  std::set<std::string> names;
  for (const auto& n : spec.biomarker_names) {
    require(!n.empty(), Errc::SpecInvalid, "empty marker name");
    require(names.insert(n).second, Errc::SpecInvalid, "duplicate marker name " + n);
  }
  require(spec.subject_count() >= 2, Errc::SpecInvalid,
          "seed spec must generate at least 2 subjects");
  for (const auto& profile : spec.profiles) {
    require(profile.count >= 1, Errc::SpecInvalid, "profile with zero subjects");
    for (const auto& level : profile.levels) {
      require(names.count(level.marker) == 1, Errc::SpecInvalid,
              "profile level references unknown marker " + level.marker);
      require(std::isfinite(level.mean_z) && level.std_z >= 0.0, Errc::SpecInvalid,
              "bad level for marker " + level.marker);
    }
  }
}

/// Generator/profiler consistency: every profile's exact mean vector must
/// classify to its declared state. Profiles declared Unclassified are plain
/// ground-truth groupings and are exempt.
inline void verify_profiles_match_rules(const SeedSpec& spec,
                                        std::span<const SignatureRule> rules) {
  validate_seed_spec(spec);
  std::vector<BiomarkerDescriptor> schema;
  for (const auto& name : spec.biomarker_names) schema.push_back({name, "z", Window::Pre});
  Matrix means(spec.profiles.size(), schema.size());
  for (std::size_t p = 0; p < spec.profiles.size(); ++p)
    for (const auto& level : spec.profiles[p].levels)
      for (std::size_t j = 0; j < schema.size(); ++j)
        if (schema[j].name == level.marker) means(p, j) = level.mean_z;
  const auto states = classify(means, schema, rules);
  for (std::size_t p = 0; p < spec.profiles.size(); ++p) {
    if (spec.profiles[p].state == PhysiologicalState::Unclassified) continue;
    require(states[p] == spec.profiles[p].state, Errc::SpecInvalid,
            std::string("profile mean for ") + state_name(spec.profiles[p].state) +
                " classifies as " + state_name(states[p]));
  }
}

struct SeedResult {
  NormalizedPanel panel;  // z-space, identity params
  std::vector<PhysiologicalState> labels;
};

/// Draw the synthetic seed: profile by profile, subject by subject, one
/// independent normal per marker. Deterministic for a given spec seed.
inline SeedResult generate_seed(const SeedSpec& spec) {
  validate_seed_spec(spec);
  const std::size_t n = spec.subject_count();
  const std::size_t b = spec.biomarker_names.size();

  BiomarkerPanel raw;
  for (const auto& name : spec.biomarker_names)
    raw.schema.push_back({name, "z", Window::Pre});
  raw.values = Matrix(n, b);

  std::map<std::string, std::size_t> col_of;
  for (std::size_t j = 0; j < b; ++j) col_of[spec.biomarker_names[j]] = j;

  SeedResult result;
  Rng rng(spec.seed);
  char buf[32];
  std::size_t row = 0;
  int digits = n >= 100 ? 3 : 2;
  for (const auto& profile : spec.profiles) {
    std::vector<double> mean(b, 0.0), std_dev(b, spec.background_std);
    for (const auto& level : profile.levels) {
      mean[col_of[level.marker]] = level.mean_z;
      std_dev[col_of[level.marker]] = level.std_z;
    }
    for (std::size_t s = 0; s < profile.count; ++s, ++row) {
      std::snprintf(buf, sizeof(buf), "seed_%0*zu", digits, row + 1);
      raw.subjects.emplace_back(buf);
      result.labels.push_back(profile.state);
      for (std::size_t j = 0; j < b; ++j)
        raw.values(row, j) = mean[j] + std_dev[j] * rng.next_normal();
    }
  }
  result.panel = wrap_zspace(std::move(raw));
  return result;
}

/// id,true_state sidecar for a generated seed.
inline void save_labels(std::ostream& out, const std::vector<std::string>& subjects,
                        std::span<const PhysiologicalState> labels,
                        std::span<const std::string> meta = {}) {
  require(subjects.size() == labels.size(), Errc::ShapeMismatch,
          "labels do not match subjects");
  for (const auto& m : meta) out << "# " << m << "\n";
  out << "id,true_state\n";
  for (std::size_t i = 0; i < subjects.size(); ++i)
    out << subjects[i] << "," << state_name(labels[i]) << "\n";
}

// -- declarative spec file ----------------------------------------------------
//
//   seed: 7
//   background_std: 0.5
//   markers: CK, LDH, insulin
//   profile: MechanicalDamage count=2
//   level: CK mean=2.4 std=0.3
//
// Later `level:` lines attach to the preceding `profile:`.

inline std::string serialize_seed_spec(const SeedSpec& spec) {
  std::ostringstream out;
  out << "seed: " << spec.seed << "\n";
  out << "background_std: " << format_double(spec.background_std) << "\n";
  out << "markers: ";
  for (std::size_t j = 0; j < spec.biomarker_names.size(); ++j) {
    if (j > 0) out << ", ";
    out << spec.biomarker_names[j];
  }
  out << "\n";
  for (const auto& profile : spec.profiles) {
    out << "profile: " << state_name(profile.state) << " count=" << profile.count << "\n";
    for (const auto& level : profile.levels)
      out << "level: " << level.marker << " mean=" << format_double(level.mean_z)
          << " std=" << format_double(level.std_z) << "\n";
  }
  return out.str();
}

inline SeedSpec parse_seed_spec(std::istream& in) {
  using profile_detail::strip;
  SeedSpec spec;
  spec.biomarker_names.clear();
  std::string raw;
  std::size_t line_no = 0;
  auto value_after = [&](const std::string& line, std::string_view key) {
    return strip(std::string_view(line).substr(key.size()));
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = strip(raw);
    if (line.empty()) continue;
    if (line.rfind("seed:", 0) == 0) {
      try {
        spec.seed = static_cast<std::uint64_t>(std::stoull(value_after(line, "seed:")));
      } catch (const std::exception&) {
        raise(Errc::SpecInvalid, "bad seed on line " + std::to_string(line_no));
      }
    } else if (line.rfind("background_std:", 0) == 0) {
      require(try_parse_double(value_after(line, "background_std:"), spec.background_std),
              Errc::SpecInvalid, "bad background_std on line " + std::to_string(line_no));
    } else if (line.rfind("markers:", 0) == 0) {
      std::istringstream names(value_after(line, "markers:"));
      std::string token;
      while (std::getline(names, token, ',')) {
        const std::string name = strip(token);
        if (!name.empty()) spec.biomarker_names.push_back(name);
      }
    } else if (line.rfind("profile:", 0) == 0) {
      std::istringstream body(value_after(line, "profile:"));
      std::string state_token, count_token;
      body >> state_token >> count_token;
      const auto state = parse_state(state_token);
      require(state.has_value(), Errc::SpecInvalid,
              "unknown state on line " + std::to_string(line_no));
      require(count_token.rfind("count=", 0) == 0, Errc::SpecInvalid,
              "profile needs count= on line " + std::to_string(line_no));
      ProfileSpec profile;
      profile.state = *state;
      try {
        profile.count = static_cast<std::size_t>(std::stoull(count_token.substr(6)));
      } catch (const std::exception&) {
        raise(Errc::SpecInvalid, "bad count on line " + std::to_string(line_no));
      }
      spec.profiles.push_back(std::move(profile));
    } else if (line.rfind("level:", 0) == 0) {
      require(!spec.profiles.empty(), Errc::SpecInvalid,
              "level before any profile on line " + std::to_string(line_no));
      std::istringstream body(value_after(line, "level:"));
      std::string marker, mean_token, std_token;
      body >> marker >> mean_token >> std_token;
      MarkerLevel level;
      level.marker = marker;
      require(mean_token.rfind("mean=", 0) == 0 && std_token.rfind("std=", 0) == 0,
              Errc::SpecInvalid, "level needs mean= and std= on line " +
                                     std::to_string(line_no));
      require(try_parse_double(mean_token.substr(5), level.mean_z) &&
                  try_parse_double(std_token.substr(4), level.std_z),
              Errc::SpecInvalid, "bad level numbers on line " + std::to_string(line_no));
      spec.profiles.back().levels.push_back(std::move(level));
    } else {
      raise(Errc::SpecInvalid, "unrecognized spec line " + std::to_string(line_no));
    }
  }
  validate_seed_spec(spec);
  return spec;
}

}  // namespace biostate
