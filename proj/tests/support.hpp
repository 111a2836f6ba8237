#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "latsort/rng.hpp"
#include "latsort/types.hpp"

namespace testing_support {

using latsort::Rng;
using latsort::Token;
using latsort::TokenSet;

inline TokenSet random_set(Rng& rng, std::size_t m, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<Token> t(m, Token(n));
  for (auto& row : t)
    for (auto& v : row) v = rng.uniform(lo, hi);
  return TokenSet(std::move(t));
}

// Small integer grid values so that ties and duplicates are frequent.
inline TokenSet tie_heavy_set(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<Token> t(m, Token(n));
  for (auto& row : t)
    for (auto& v : row) v = static_cast<double>(rng.below(3));
  return TokenSet(std::move(t));
}

inline std::vector<Token> sorted_rows(std::vector<Token> rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace testing_support
