#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "biostate/error.hpp"
#include "biostate/matrix.hpp"

namespace biostate {

inline double vec_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Population variance (divisor n).
inline double vec_population_variance(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

inline std::vector<double> column_means(const Matrix& m) {
  std::vector<double> mu(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) mu[j] += m(i, j);
  if (m.rows > 0)
    for (double& v : mu) v /= static_cast<double>(m.rows);
  return mu;
}

/// log(sum_i exp(v_i)) without overflow; returns -inf for an empty or
/// all -inf input.
inline double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// log N(x | mu, var) for a univariate normal.
inline double log_normal_pdf(double x, double mu, double var) {
  const double d = x - mu;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

// -- deterministic seeding / hashing ----------------------------------------

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Stable per-stage seed derivation from a single global seed.
inline std::uint64_t derive_seed(std::uint64_t global, std::string_view stage) {
  return splitmix64(global ^ fnv1a64(stage));
}

inline std::string to_hex16(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// -- locale-free number formatting -------------------------------------------

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline bool try_parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace biostate
