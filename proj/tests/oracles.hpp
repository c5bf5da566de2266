#pragma once

// Reference computations used only by tests. Deliberately written without
// any library routine so they stay independent of the code they check.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tsdict/series.hpp"

namespace tsdict::oracle {

struct Moments {
  double mean;
  double sd;
};

inline Moments window_moments(const std::vector<double>& v, std::size_t start, std::size_t m) {
  long double sum = 0;
  for (std::size_t i = 0; i < m; ++i) sum += v[start + i];
  const long double mean = sum / m;
  long double ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const long double d = v[start + i] - mean;
    ss += d * d;
  }
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / m))};
}

/// ||z(q) - z(t[i, i+m))|| in extended precision; +inf for flat windows.
inline std::vector<double> profile(const std::vector<double>& t, const std::vector<double>& q,
                                   double eps = 1e-8) {
  const std::size_t m = q.size();
  const auto qm = window_moments(q, 0, m);
  std::vector<double> out;
  for (std::size_t i = 0; i + m <= t.size(); ++i) {
    const auto tm = window_moments(t, i, m);
    if (tm.sd < eps) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    long double acc = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const long double a = (static_cast<long double>(q[j]) - qm.mean) / qm.sd;
      const long double b = (static_cast<long double>(t[i + j]) - tm.mean) / tm.sd;
      acc += (a - b) * (a - b);
    }
    out.push_back(static_cast<double>(std::sqrt(acc)));
  }
  return out;
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
  auto v = gaussian(n, seed);
  for (std::size_t i = 1; i < n; ++i) v[i] += v[i - 1];
  return v;
}

/// Encodes a string for z-normalized matching: each symbol becomes a block
/// of (alphabet + 1) samples, a delimiter of height 3 followed by a one-hot
/// code. All block-aligned windows of equal length share mean and std, so
/// identical substrings map to distance exactly 0.
struct SymbolEncoding {
  std::string alphabet;
  std::size_t block = 0;
  std::vector<double> values;
};

inline SymbolEncoding encode_symbols(std::string_view text) {
  SymbolEncoding enc;
  for (char c : text) {
    if (enc.alphabet.find(c) == std::string::npos) enc.alphabet.push_back(c);
  }
  enc.block = enc.alphabet.size() + 1;
  for (char c : text) {
    std::vector<double> blk(enc.block, 0.0);
    blk[0] = 3.0;
    blk[1 + enc.alphabet.find(c)] = 1.0;
    enc.values.insert(enc.values.end(), blk.begin(), blk.end());
  }
  return enc;
}

/// Number of occurrences of `pattern` in `text` (overlapping allowed).
inline std::size_t count_occurrences(std::string_view text, std::string_view pattern) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + pattern.size() <= text.size(); ++i) {
    n += text.substr(i, pattern.size()) == pattern;
  }
  return n;
}

}  // namespace tsdict::oracle
