#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "biostate/cluster_model.hpp"
#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/panel.hpp"

namespace biostate {

/// Named physiological states assignable to cluster signatures. Unclassified
/// is the mandatory fallback when no rule matches.
enum class PhysiologicalState {
  Homeostasis,
  AnabolicPower,
  MetabolicStress,
  MechanicalDamage,
  SilentRisk,
  Unclassified,
};

inline const char* state_name(PhysiologicalState s) {
  switch (s) {
    case PhysiologicalState::Homeostasis: return "Homeostasis";
    case PhysiologicalState::AnabolicPower: return "AnabolicPower";
    case PhysiologicalState::MetabolicStress: return "MetabolicStress";
    case PhysiologicalState::MechanicalDamage: return "MechanicalDamage";
    case PhysiologicalState::SilentRisk: return "SilentRisk";
    case PhysiologicalState::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

/// Case- and separator-insensitive state lookup ("silent_risk" == "SilentRisk").
inline std::optional<PhysiologicalState> parse_state(std::string_view token) {
  std::string key;
  for (char c : token)
    if (c != '_' && c != '-' && c != ' ')
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "homeostasis") return PhysiologicalState::Homeostasis;
  if (key == "anabolicpower") return PhysiologicalState::AnabolicPower;
  if (key == "metabolicstress") return PhysiologicalState::MetabolicStress;
  if (key == "mechanicaldamage") return PhysiologicalState::MechanicalDamage;
  if (key == "silentrisk") return PhysiologicalState::SilentRisk;
  if (key == "unclassified") return PhysiologicalState::Unclassified;
  return std::nullopt;
}

enum class Comparator { GreaterEq, LessEq, AbsLessEq };
enum class RuleScope { ListedMarkers, AllMarkers };

/// One condition over a marker's centroid z-score. A bare marker name matches
/// every window of that marker; "NAME@WINDOW" pins a single column. An empty
/// name is only valid under the AllMarkers scope.
struct RuleCondition {
  std::string marker;
  Comparator cmp = Comparator::GreaterEq;
  double threshold = 0.0;

  bool operator==(const RuleCondition&) const = default;
};

struct SignatureRule {
  PhysiologicalState state = PhysiologicalState::Unclassified;
  RuleScope scope = RuleScope::ListedMarkers;
  std::vector<RuleCondition> conditions;

  bool operator==(const SignatureRule&) const = default;
};

/// Shipped rule set: threshold bands at 75% of the reference signature
/// magnitudes, so a noisy centroid near an exemplar still matches.
inline std::vector<SignatureRule> default_rules() {
  using PS = PhysiologicalState;
  using C = Comparator;
  return {
      {PS::SilentRisk,
       RuleScope::ListedMarkers,
       {{"homocysteine", C::GreaterEq, 1.5},
        {"insulin", C::GreaterEq, 1.1},
        {"CK", C::AbsLessEq, 0.5},
        {"cortisol", C::AbsLessEq, 0.5}}},
      {PS::MechanicalDamage,
       RuleScope::ListedMarkers,
       {{"CK", C::GreaterEq, 1.8}, {"LDH", C::GreaterEq, 1.6}}},
      {PS::MetabolicStress,
       RuleScope::ListedMarkers,
       {{"cortisol", C::GreaterEq, 1.35}, {"CK", C::AbsLessEq, 0.5}}},
      {PS::AnabolicPower,
       RuleScope::ListedMarkers,
       {{"testosterone", C::GreaterEq, 0.9}, {"cortisol", C::LessEq, -0.6}}},
      {PS::Homeostasis,
       RuleScope::AllMarkers,
       {{"", C::AbsLessEq, 0.5}}},
  };
}

/// Evaluation priority; SilentRisk first so its normality constraints are not
/// shadowed by Homeostasis.
inline int state_priority(PhysiologicalState s) {
  switch (s) {
    case PhysiologicalState::SilentRisk: return 0;
    case PhysiologicalState::MechanicalDamage: return 1;
    case PhysiologicalState::MetabolicStress: return 2;
    case PhysiologicalState::AnabolicPower: return 3;
    case PhysiologicalState::Homeostasis: return 4;
    case PhysiologicalState::Unclassified: return 5;
  }
  return 5;
}

namespace profile_detail {

inline bool condition_holds(double z, const RuleCondition& cond) {
  switch (cond.cmp) {
    case Comparator::GreaterEq: return z >= cond.threshold;
    case Comparator::LessEq: return z <= cond.threshold;
    case Comparator::AbsLessEq: return std::abs(z) <= cond.threshold;
  }
  return false;
}

/// Columns a condition addresses: all columns for the AllMarkers scope, else
/// every column whose name (or full NAME@WINDOW label) equals the reference.
inline std::vector<std::size_t> matched_columns(
    const RuleCondition& cond, RuleScope scope,
    std::span<const BiomarkerDescriptor> schema) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (scope == RuleScope::AllMarkers || schema[j].name == cond.marker ||
        column_label(schema[j]) == cond.marker)
      cols.push_back(j);
  }
  return cols;
}

}  // namespace profile_detail

/// First matching rule in fixed priority order wins; rules whose markers are
/// absent from the schema are skipped (reported through `warnings`). No match
/// yields Unclassified.
inline std::vector<PhysiologicalState> classify(
    const Matrix& signatures, std::span<const BiomarkerDescriptor> schema,
    std::span<const SignatureRule> rules,
    std::vector<std::string>* warnings = nullptr) {
  require(signatures.cols == schema.size(), Errc::ShapeMismatch,
          "signature width does not match schema");
  std::vector<std::size_t> order(rules.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state_priority(rules[a].state) < state_priority(rules[b].state);
  });

  std::vector<bool> usable(rules.size(), true);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (const auto& cond : rules[r].conditions) {
      if (rules[r].scope == RuleScope::AllMarkers) continue;
      if (profile_detail::matched_columns(cond, rules[r].scope, schema).empty()) {
        usable[r] = false;
        if (warnings != nullptr)
          warnings->push_back("rule for " + std::string(state_name(rules[r].state)) +
                              " skipped: marker '" + cond.marker +
                              "' not in schema");
        break;
      }
    }
  }

  std::vector<PhysiologicalState> states(signatures.rows,
                                         PhysiologicalState::Unclassified);
  for (std::size_t c = 0; c < signatures.rows; ++c) {
    for (std::size_t idx : order) {
      const SignatureRule& rule = rules[idx];
      if (!usable[idx]) continue;
      bool all_hold = true;
      for (const auto& cond : rule.conditions) {
        for (std::size_t j :
             profile_detail::matched_columns(cond, rule.scope, schema)) {
          if (!profile_detail::condition_holds(signatures(c, j), cond)) {
            all_hold = false;
            break;
          }
        }
        if (!all_hold) break;
      }
      if (all_hold) {
        states[c] = rule.state;
        break;
      }
    }
  }
  return states;
}

/// Per-cluster mean z-vector, recomputed from the panel rows.
inline Matrix centroid_signatures(const NormalizedPanel& panel, const ClusterModel& model) {
  require(model.assignments.size() == panel.subject_count(), Errc::StaleModel,
          "model assignments do not match panel");
  require(model.k >= 1, Errc::StaleModel, "model has no clusters");
  Matrix signatures(model.k, panel.column_count());
  std::vector<std::size_t> counts(model.k, 0);
  for (std::size_t i = 0; i < panel.subject_count(); ++i) {
    const std::size_t c = model.assignments[i];
    require(c < model.k, Errc::StaleModel, "assignment label out of range");
    counts[c]++;
    for (std::size_t j = 0; j < panel.column_count(); ++j)
      signatures(c, j) += panel.z(i, j);
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    require(counts[c] > 0, Errc::StaleModel, "empty cluster in model");
    for (std::size_t j = 0; j < panel.column_count(); ++j)
      signatures(c, j) /= static_cast<double>(counts[c]);
  }
  return signatures;
}

struct ProfileRow {
  std::size_t cluster = 0;
  PhysiologicalState state = PhysiologicalState::Unclassified;
  std::size_t count = 0;
  double share = 0.0;
  std::vector<double> centroid;
};

/// Cluster interpretation table, ordered by population descending (ties by
/// cluster id). Shares sum to 1.
struct ProfileReport {
  std::vector<ProfileRow> rows;
  std::vector<std::string> warnings;
};

inline ProfileReport profile_report(const NormalizedPanel& panel,
                                    const ClusterModel& model,
                                    std::span<const SignatureRule> rules) {
  const Matrix signatures = centroid_signatures(panel, model);
  ProfileReport report;
  const auto states = classify(signatures, panel.schema, rules, &report.warnings);
  std::vector<std::size_t> counts(model.k, 0);
  for (std::size_t l : model.assignments) counts[l]++;
  const double n = static_cast<double>(panel.subject_count());
  for (std::size_t c = 0; c < model.k; ++c) {
    ProfileRow row;
    row.cluster = c;
    row.state = states[c];
    row.count = counts[c];
    row.share = static_cast<double>(counts[c]) / n;
    row.centroid.assign(signatures.row(c).begin(), signatures.row(c).end());
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ProfileRow& a, const ProfileRow& b) {
                     if (a.count != b.count) return a.count > b.count;
                     return a.cluster < b.cluster;
                   });
  return report;
}

/// Short text signature for a report row: the two largest |z| deviations, or
/// the homeostatic band when everything is inside it.
inline std::string signature_summary(const ProfileRow& row,
                                     std::span<const BiomarkerDescriptor> schema) {
  double peak = 0.0;
  for (double v : row.centroid) peak = std::max(peak, std::abs(v));
  if (peak <= 0.5) return "all |z| <= 0.5";
  std::vector<std::size_t> order(row.centroid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(row.centroid[a]) > std::abs(row.centroid[b]);
  });
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < std::min<std::size_t>(2, order.size()); ++i) {
    const std::size_t j = order[i];
    std::snprintf(buf, sizeof(buf), "%s %+.1f", schema[j].name.c_str(),
                  row.centroid[j]);
    if (!out.empty()) out += ", ";
    out += buf;
  }
  return out;
}

/// Plain-text table with cluster id, state, population, share, and signature.
inline void save_profile_text(std::ostream& out, const ProfileReport& report,
                              std::span<const BiomarkerDescriptor> schema,
                              std::span<const std::string> meta = {}) {
  for (const auto& m : meta) out << "# " << m << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %-18s %8s %8s  %s\n", "cluster", "state",
                "n", "share", "signature");
  out << line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof(line), "%-8zu %-18s %8zu %7.1f%%  %s\n", row.cluster,
                  state_name(row.state), row.count, 100.0 * row.share,
                  signature_summary(row, schema).c_str());
    out << line;
  }
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
}

// -- rule file ----------------------------------------------------------------
//
// One rule per line:
//   STATE: NAME >= z & NAME <= z & abs(NAME) <= z ...
//   HOMEOSTASIS: all abs <= 0.5
// '#' starts a comment.

inline std::string serialize_rules(std::span<const SignatureRule> rules) {
  std::ostringstream out;
  for (const auto& rule : rules) {
    out << state_name(rule.state) << ": ";
    if (rule.scope == RuleScope::AllMarkers) {
      out << "all abs <= " << format_double(rule.conditions.at(0).threshold);
    } else {
      bool first = true;
      for (const auto& cond : rule.conditions) {
        if (!first) out << " & ";
        first = false;
        switch (cond.cmp) {
          case Comparator::GreaterEq:
            out << cond.marker << " >= " << format_double(cond.threshold);
            break;
          case Comparator::LessEq:
            out << cond.marker << " <= " << format_double(cond.threshold);
            break;
          case Comparator::AbsLessEq:
            out << "abs(" << cond.marker << ") <= " << format_double(cond.threshold);
            break;
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

namespace profile_detail {

inline std::string strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline RuleCondition parse_condition(const std::string& text) {
  RuleCondition cond;
  std::string lhs;
  std::string rhs;
  const auto ge = text.find(">=");
  const auto le = text.find("<=");
  if (ge != std::string::npos) {
    cond.cmp = Comparator::GreaterEq;
    lhs = strip(std::string_view(text).substr(0, ge));
    rhs = strip(std::string_view(text).substr(ge + 2));
  } else if (le != std::string::npos) {
    cond.cmp = Comparator::LessEq;
    lhs = strip(std::string_view(text).substr(0, le));
    rhs = strip(std::string_view(text).substr(le + 2));
  } else {
    raise(Errc::SpecInvalid, "rule condition needs >= or <=: '" + text + "'");
  }
  if (lhs.size() > 5 && lhs.rfind("abs(", 0) == 0 && lhs.back() == ')') {
    require(cond.cmp == Comparator::LessEq, Errc::SpecInvalid,
            "abs() conditions must use <=: '" + text + "'");
    cond.cmp = Comparator::AbsLessEq;
    lhs = strip(std::string_view(lhs).substr(4, lhs.size() - 5));
  }
  require(!lhs.empty(), Errc::SpecInvalid, "empty marker in condition '" + text + "'");
  cond.marker = lhs;
  require(try_parse_double(rhs, cond.threshold), Errc::SpecInvalid,
          "bad threshold in condition '" + text + "'");
  require(std::isfinite(cond.threshold), Errc::SpecInvalid,
          "threshold must be finite in '" + text + "'");
  return cond;
}

}  // namespace profile_detail

inline std::vector<SignatureRule> parse_rules(std::istream& in) {
  using profile_detail::strip;
  std::vector<SignatureRule> rules;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = strip(raw);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    require(colon != std::string::npos, Errc::SpecInvalid,
            "rule line " + std::to_string(line_no) + " missing ':'");
    const auto state = parse_state(strip(std::string_view(line).substr(0, colon)));
    require(state.has_value(), Errc::SpecInvalid,
            "unknown state on rule line " + std::to_string(line_no));
    require(*state != PhysiologicalState::Unclassified, Errc::SpecInvalid,
            "Unclassified is the fallback and cannot carry a rule");
    SignatureRule rule;
    rule.state = *state;
    std::string body = strip(std::string_view(line).substr(colon + 1));
    if (body.rfind("all abs", 0) == 0) {
      rule.scope = RuleScope::AllMarkers;
      const auto le = body.find("<=");
      require(le != std::string::npos, Errc::SpecInvalid,
              "all-markers rule needs '<=' on line " + std::to_string(line_no));
      RuleCondition cond;
      cond.cmp = Comparator::AbsLessEq;
      require(try_parse_double(strip(std::string_view(body).substr(le + 2)),
                               cond.threshold),
              Errc::SpecInvalid,
              "bad threshold on rule line " + std::to_string(line_no));
      rule.conditions.push_back(cond);
    } else {
      std::size_t start = 0;
      while (start <= body.size()) {
        auto amp = body.find('&', start);
        if (amp == std::string::npos) amp = body.size();
        const std::string token = strip(std::string_view(body).substr(start, amp - start));
        require(!token.empty(), Errc::SpecInvalid,
                "empty condition on rule line " + std::to_string(line_no));
        rule.conditions.push_back(profile_detail::parse_condition(token));
        start = amp + 1;
        if (amp == body.size()) break;
      }
      require(!rule.conditions.empty(), Errc::SpecInvalid,
              "rule line " + std::to_string(line_no) + " has no conditions");
    }
    rules.push_back(std::move(rule));
  }
  require(!rules.empty(), Errc::SpecInvalid, "rule file defines no rules");
  return rules;
}

}  // namespace biostate
