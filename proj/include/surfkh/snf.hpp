#pragma once

// Smith normal form of sparse integer matrices. Unit pivots are eliminated
// sparsely in 64-bit arithmetic; whatever remains is diagonalized densely with
// arbitrary-precision integers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace surfkh {

using BigInt = boost::multiprecision::cpp_int;

struct SparseIntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::tuple<int, int, long long>> entries;  // duplicates are summed
};

struct SmithResult {
  int rank = 0;
  std::vector<BigInt> invariant_factors;  // nonzero diagonal entries, positive, divisibility chain

  std::vector<BigInt> torsion() const {
    std::vector<BigInt> t;
    for (const auto& d : invariant_factors) {
      if (d > 1) t.push_back(d);
    }
    return t;
  }
};

namespace detail {

inline bool checked_update(long long a, long long f, long long b, long long& out) {
  long long prod = 0;
  if (__builtin_mul_overflow(f, b, &prod)) return false;
  return !__builtin_sub_overflow(a, prod, &out);
}

inline std::vector<BigInt> dense_smith(std::vector<std::vector<BigInt>> a) {
  const std::size_t R = a.size();
  const std::size_t C = R ? a[0].size() : 0;
  std::vector<BigInt> diag;
  std::size_t t = 0;
  while (t < R && t < C) {
    // smallest nonzero entry of the trailing block goes to (t, t)
    std::size_t pi = R, pj = C;
    for (std::size_t i = t; i < R; ++i) {
      for (std::size_t j = t; j < C; ++j) {
        if (a[i][j] != 0 && (pi == R || abs(a[i][j]) < abs(a[pi][pj]))) {
          pi = i;
          pj = j;
        }
      }
    }
    if (pi == R) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (a[i][t] == 0) continue;
        const BigInt q = a[i][t] / a[t][t];
        for (std::size_t j = t; j < C; ++j) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) {
          std::swap(a[i], a[t]);
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (a[t][j] == 0) continue;
        const BigInt q = a[t][j] / a[t][t];
        for (std::size_t i = t; i < R; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) {
          for (auto& row : a) std::swap(row[t], row[j]);
          clean = false;
        }
      }
      if (!clean) continue;
      bool divisible = true;
      for (std::size_t i = t + 1; i < R && divisible; ++i) {
        for (std::size_t j = t + 1; j < C; ++j) {
          if (a[i][j] % a[t][t] != 0) {
            for (std::size_t k = t; k < C; ++k) a[t][k] += a[i][k];
            divisible = false;
            break;
          }
        }
      }
      if (divisible) break;
    }
    diag.push_back(abs(a[t][t]));
    ++t;
  }
  return diag;
}

}  // namespace detail

inline SmithResult smith_normal_form(const SparseIntMatrix& m) {
  std::vector<std::map<int, long long>> rows(static_cast<std::size_t>(m.rows));
  std::vector<std::set<int>> cols(static_cast<std::size_t>(m.cols));
  for (const auto& [r, c, v] : m.entries) {
    if (r < 0 || r >= m.rows || c < 0 || c >= m.cols) throw std::out_of_range("matrix entry out of range");
    rows[r][c] += v;
  }
  for (int r = 0; r < m.rows; ++r) {
    for (auto it = rows[r].begin(); it != rows[r].end();) {
      if (it->second == 0) {
        it = rows[r].erase(it);
      } else {
        cols[it->first].insert(r);
        ++it;
      }
    }
  }

  SmithResult res;
  bool overflow = false;
  bool progress = true;
  while (progress && !overflow) {
    progress = false;
    for (int r = 0; r < m.rows && !overflow; ++r) {
      if (rows[r].empty()) continue;
      int pc = -1;
      for (const auto& [c, v] : rows[r]) {
        if ((v == 1 || v == -1) && (pc < 0 || cols[c].size() < cols[pc].size())) pc = c;
      }
      if (pc < 0) continue;
      const long long p = rows[r][pc];
      std::vector<std::pair<int, std::map<int, long long>>> updated;
      for (int r2 : cols[pc]) {
        if (r2 == r) continue;
        const long long f = rows[r2].at(pc) * p;
        std::map<int, long long> nr = rows[r2];
        for (const auto& [c, v] : rows[r]) {
          long long out = 0;
          if (!detail::checked_update(nr[c], f, v, out)) {
            overflow = true;
            break;
          }
          if (out == 0) {
            nr.erase(c);
          } else {
            nr[c] = out;
          }
        }
        if (overflow) break;
        updated.emplace_back(r2, std::move(nr));
      }
      if (overflow) break;
      for (auto& [r2, nr] : updated) {
        for (const auto& [c, v] : rows[r2]) cols[c].erase(r2);
        rows[r2] = std::move(nr);
        for (const auto& [c, v] : rows[r2]) cols[c].insert(r2);
      }
      for (const auto& [c, v] : rows[r]) cols[c].erase(r);
      rows[r].clear();
      ++res.rank;
      res.invariant_factors.emplace_back(1);
      progress = true;
    }
  }

  std::vector<int> live_rows, live_cols;
  for (int r = 0; r < m.rows; ++r) {
    if (!rows[r].empty()) live_rows.push_back(r);
  }
  for (int c = 0; c < m.cols; ++c) {
    if (!cols[c].empty()) live_cols.push_back(c);
  }
  if (!live_rows.empty()) {
    std::map<int, std::size_t> col_pos;
    for (std::size_t j = 0; j < live_cols.size(); ++j) col_pos[live_cols[j]] = j;
    std::vector<std::vector<BigInt>> dense(live_rows.size(), std::vector<BigInt>(live_cols.size()));
    for (std::size_t i = 0; i < live_rows.size(); ++i) {
      for (const auto& [c, v] : rows[live_rows[i]]) dense[i][col_pos[c]] = v;
    }
    for (auto& d : detail::dense_smith(std::move(dense))) {
      ++res.rank;
      res.invariant_factors.push_back(std::move(d));
    }
  }
  std::sort(res.invariant_factors.begin(), res.invariant_factors.end());
  return res;
}

}  // namespace surfkh
