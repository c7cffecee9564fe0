#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/linkage.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"
#include "biostate/rng.hpp"

namespace biostate {

struct GmmConfig {
  std::size_t components = 5;
  double reg_covar = 0.1;   // variance floor, applied every M-step
  std::size_t max_iter = 200;
  double tol = 1e-4;        // per-observation mean log-likelihood improvement
  std::uint64_t seed = 0;

  bool operator==(const GmmConfig&) const = default;
};

/// Diagonal-covariance Gaussian mixture. weights sum to 1; every variance
/// carries the reg_covar floor, so density evaluation is never singular.
struct GmmModel {
  std::vector<double> weights;  // length M
  Matrix means;                 // M x b
  Matrix variances;             // M x b
  GmmConfig config;
  double final_log_likelihood = 0.0;  // per-observation mean
  bool converged = false;

  std::size_t component_count() const { return weights.size(); }
  std::size_t dimension() const { return means.cols; }

  double log_density(std::span<const double> x) const {
    require(x.size() == means.cols, Errc::ShapeMismatch,
            "point dimension " + std::to_string(x.size()) + ", model dimension " +
                std::to_string(means.cols));
    std::vector<double> terms(weights.size());
    for (std::size_t m = 0; m < weights.size(); ++m) {
      double lp = weights[m] > 0.0 ? std::log(weights[m])
                                   : -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < x.size(); ++j)
        lp += log_normal_pdf(x[j], means(m, j), variances(m, j));
      terms[m] = lp;
    }
    return log_sum_exp(terms);
  }

  double density(std::span<const double> x) const { return std::exp(log_density(x)); }
};

/// EM fit. Hard initial labels come from `init_labels` when given, otherwise
/// from a Ward-linkage cut at M clusters; one responsibility-based M-step on
/// those labels produces the starting weights, means, and variances.
/// Terminates when the per-observation mean log-likelihood improves by less
/// than tol. ll_trace, when given, receives that quantity for every E-step.
///
/// Ward seeding rather than a k-means++ start: in the intended regime the fit
/// sees a handful of observations in dozens of dimensions, where Lloyd
/// restarts chase noise-carved partitions (their WCSS optimum routinely sits
/// below the planted structure) while the bottom-up merge order averages that
/// noise away. It is also deterministic, so the fit depends on the data
/// alone; config.seed feeds sampling, not initialization.
///
/// The M-step variance is max(responsibility-weighted variance, reg_covar):
/// the constrained maximum of Q over variances >= reg_covar. An additive
/// update (variance + reg_covar) would overshoot the Q-optimum and can lower
/// the likelihood when variances grow between iterations; the constrained
/// form keeps EM's monotonicity guarantee while still bounding every variance
/// away from zero.
inline GmmModel fit_gmm(const Matrix& z, const GmmConfig& config,
                        std::vector<double>* ll_trace = nullptr,
                        std::span<const std::size_t> init_labels = {}) {
  const std::size_t n = z.rows;
  const std::size_t b = z.cols;
  const std::size_t M = config.components;
  require(M >= 1, Errc::BadArgument, "components must be >= 1");
  require(b >= 1, Errc::BadArgument, "data must have at least one column");
  require(config.reg_covar >= 0.0 && config.tol > 0.0, Errc::BadArgument,
          "reg_covar must be >= 0 and tol > 0");
  require(n >= M, Errc::TooFewObservations,
          "n=" + std::to_string(n) + " observations for M=" + std::to_string(M) +
              " components");

  GmmModel model;
  model.config = config;
  model.weights.assign(M, 1.0 / static_cast<double>(M));
  model.means = Matrix(M, b);
  model.variances = Matrix(M, b);
  {
    std::vector<std::size_t> labels(n, 0);
    if (!init_labels.empty()) {
      require(init_labels.size() == n, Errc::ShapeMismatch,
              "init labels do not match data");
      for (std::size_t l : init_labels)
        require(l < M, Errc::BadArgument, "init label out of range");
      labels.assign(init_labels.begin(), init_labels.end());
      for (std::size_t m = 0; m < M; ++m)
        require(std::count(labels.begin(), labels.end(), m) > 0, Errc::BadArgument,
                "init labels leave component " + std::to_string(m) + " empty");
    } else if (M >= 2) {
      labels = cut_assignments(ward_linkage(z), M);
    }
    std::vector<double> counts(M, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[labels[i]] += 1.0;
      for (std::size_t j = 0; j < b; ++j) model.means(labels[i], j) += z(i, j);
    }
    for (std::size_t m = 0; m < M; ++m) {
      model.weights[m] = counts[m] / static_cast<double>(n);
      for (std::size_t j = 0; j < b; ++j) model.means(m, j) /= counts[m];
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < b; ++j) {
        const double d = z(i, j) - model.means(labels[i], j);
        model.variances(labels[i], j) += d * d;
      }
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t j = 0; j < b; ++j)
        model.variances(m, j) = std::max(
            std::max(model.variances(m, j) / counts[m], config.reg_covar), 1e-12);
  }

  Matrix resp(n, M);
  std::vector<double> terms(M);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
    // E-step
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t m = 0; m < M; ++m) {
        double lp = model.weights[m] > 0.0
                        ? std::log(model.weights[m])
                        : -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b; ++j)
          lp += log_normal_pdf(z(i, j), model.means(m, j), model.variances(m, j));
        terms[m] = lp;
      }
      const double norm = log_sum_exp(terms);
      ll += norm;
      for (std::size_t m = 0; m < M; ++m) resp(i, m) = std::exp(terms[m] - norm);
    }
    ll /= static_cast<double>(n);
    if (ll_trace != nullptr) ll_trace->push_back(ll);
    model.final_log_likelihood = ll;
    if (iter > 0 && ll - prev_ll < config.tol) {
      model.converged = true;
      break;
    }
    prev_ll = ll;

    // M-step
    for (std::size_t m = 0; m < M; ++m) {
      double nm = 0.0;
      for (std::size_t i = 0; i < n; ++i) nm += resp(i, m);
      model.weights[m] = nm / static_cast<double>(n);
      const double denom = std::max(nm, 1e-300);
      for (std::size_t j = 0; j < b; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += resp(i, m) * z(i, j);
        mean /= denom;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = z(i, j) - mean;
          var += resp(i, m) * d * d;
        }
        var = std::max(var / denom, config.reg_covar);
        model.means(m, j) = mean;
        model.variances(m, j) = std::max(var, 1e-12);
      }
    }
  }
  return model;
}

inline GmmModel fit_gmm(const NormalizedPanel& panel, const GmmConfig& config,
                        std::vector<double>* ll_trace = nullptr,
                        std::span<const std::size_t> init_labels = {}) {
  return fit_gmm(panel.z, config, ll_trace, init_labels);
}

/// Hard component assignment (argmax responsibility) for one point.
inline std::size_t gmm_assign(const GmmModel& model, std::span<const double> x) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t m = 0; m < model.component_count(); ++m) {
    double lp = model.weights[m] > 0.0 ? std::log(model.weights[m])
                                       : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x.size(); ++j)
      lp += log_normal_pdf(x[j], model.means(m, j), model.variances(m, j));
    if (lp > best) {
      best = lp;
      arg = m;
    }
  }
  return arg;
}

struct GmmSample {
  Matrix rows;                          // count x b
  std::vector<std::size_t> components;  // provenance per row
};

/// Ancestral sampling: component ~ Categorical(weights), then one independent
/// normal per coordinate. Bit-identical for identical (model, count, seed).
inline GmmSample sample_gmm(const GmmModel& model, std::size_t count, std::uint64_t seed) {
  require(count >= 1, Errc::BadArgument, "sample count must be >= 1");
  Rng rng(seed);
  GmmSample out;
  out.rows = Matrix(count, model.dimension());
  out.components.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = rng.next_weighted(model.weights);
    out.components[i] = m;
    for (std::size_t j = 0; j < model.dimension(); ++j)
      out.rows(i, j) = model.means(m, j) +
                       std::sqrt(model.variances(m, j)) * rng.next_normal();
  }
  return out;
}

/// Observation-to-variable ratio gate for multivariate stability.
enum class RatioCheck { Ok10to1, Ok5to1, Insufficient };

inline RatioCheck check_ratio(std::size_t n, std::size_t b) {
  require(n >= 1 && b >= 1, Errc::BadArgument, "check_ratio needs n, b >= 1");
  if (n >= 10 * b) return RatioCheck::Ok10to1;
  if (n >= 5 * b) return RatioCheck::Ok5to1;
  return RatioCheck::Insufficient;
}

inline const char* ratio_token(RatioCheck r) {
  switch (r) {
    case RatioCheck::Ok10to1: return "ok-10:1";
    case RatioCheck::Ok5to1: return "ok-5:1";
    case RatioCheck::Insufficient: return "insufficient";
  }
  return "insufficient";
}

/// Augmented cohort: the seed rows (provenance "seed", hard-assigned
/// component) followed by sampled rows (provenance "synthetic", sampled
/// component), with generated subject ids syn_001, syn_002, ...
struct Cohort {
  NormalizedPanel panel;
  std::vector<std::string> provenance;  // "seed" | "synthetic"
  std::vector<std::size_t> component;   // per row
};

inline Cohort augment_cohort(const NormalizedPanel& seed, const GmmModel& model,
                             std::size_t count, std::uint64_t sample_seed) {
  require(model.dimension() == seed.column_count(), Errc::ShapeMismatch,
          "model dimension does not match seed panel");
  const GmmSample sampled = sample_gmm(model, count, sample_seed);
  Cohort cohort;
  cohort.panel.schema = seed.schema;
  cohort.panel.params = seed.params;
  const std::size_t n0 = seed.subject_count();
  cohort.panel.subjects = seed.subjects;
  cohort.panel.z = Matrix(n0 + count, seed.column_count());
  for (std::size_t i = 0; i < n0; ++i) {
    auto src = seed.z.row(i);
    std::copy(src.begin(), src.end(), cohort.panel.z.row(i).begin());
    cohort.provenance.push_back("seed");
    cohort.component.push_back(gmm_assign(model, src));
  }
  char buf[32];
  for (std::size_t i = 0; i < count; ++i) {
    auto src = sampled.rows.row(i);
    std::copy(src.begin(), src.end(), cohort.panel.z.row(n0 + i).begin());
    std::snprintf(buf, sizeof(buf), "syn_%03zu", i + 1);
    cohort.panel.subjects.emplace_back(buf);
    cohort.provenance.push_back("synthetic");
    cohort.component.push_back(sampled.components[i]);
  }
  return cohort;
}

}  // namespace biostate
