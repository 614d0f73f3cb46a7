#include "conelab/ratlin.hpp"

#include <algorithm>
#include <cstddef>

namespace conelab {

std::string rat_to_string(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational literal: " + s);
  }
}

RatMat::RatMat(std::size_t rows, std::size_t cols, std::vector<Rat> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
  if (e_.size() != rows_ * cols_)
    throw std::invalid_argument("RatMat: entry count does not match shape");
}

RatMat RatMat::identity(std::size_t n) {
  RatMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatMat RatMat::from_rows(const std::vector<RatVec>& rows) {
  if (rows.empty()) return RatMat(0, 0);
  RatMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw std::invalid_argument("RatMat::from_rows: ragged rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

RatVec RatMat::row(std::size_t i) const {
  RatVec r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
  return r;
}

Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec matvec(const RatMat& A, const RatVec& x) {
  if (A.cols() != x.size()) throw std::invalid_argument("matvec: size mismatch");
  RatVec y(A.rows(), Rat(0));
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) y[i] += A.at(i, j) * x[j];
  return y;
}

RatMat matmul(const RatMat& A, const RatMat& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: size mismatch");
  RatMat C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = 0; k < A.cols(); ++k) {
      if (A.at(i, k) == 0) continue;
      for (std::size_t j = 0; j < B.cols(); ++j)
        C.at(i, j) += A.at(i, k) * B.at(k, j);
    }
  return C;
}

RatVec kron(const RatVec& a, const RatVec& b) {
  RatVec out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

RatMat kron(const RatMat& A, const RatMat& B) {
  RatMat C(A.rows() * B.rows(), A.cols() * B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (A.at(i, j) == 0) continue;
      for (std::size_t k = 0; k < B.rows(); ++k)
        for (std::size_t l = 0; l < B.cols(); ++l)
          C.at(i * B.rows() + k, j * B.cols() + l) = A.at(i, j) * B.at(k, l);
    }
  return C;
}

bool is_zero(const RatVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& r) { return r == 0; });
}

RatVec primitive(const RatVec& v) {
  if (is_zero(v)) return v;
  Int l = 1;
  for (const Rat& r : v) l = lcm(l, denominator(r));
  Int g = 0;
  std::vector<Int> ints(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    ints[i] = numerator(v[i]) * (l / denominator(v[i]));
    g = gcd(g, ints[i]);
  }
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rat(ints[i] / g);
  return out;
}

namespace {

// Pivot choice for exact elimination: any nonzero entry works; prefer a
// small one to limit intermediate growth.
struct Elimination {
  RatMat A;                 // echelon form after run()
  std::vector<std::size_t> col_perm;   // col_perm[k] = original column of step k
  std::vector<std::size_t> pivot_rows; // row holding the k-th pivot
  std::size_t rank = 0;

  explicit Elimination(RatMat m) : A(std::move(m)) {
    col_perm.resize(A.cols());
    for (std::size_t j = 0; j < A.cols(); ++j) col_perm[j] = j;
  }

  static double weight(const Rat& r) {
    return static_cast<double>(numerator(r).str().size() +
                               denominator(r).str().size());
  }

  void run() {
    const std::size_t m = A.rows(), n = A.cols();
    std::vector<bool> row_used(m, false);
    for (std::size_t step = 0; step < n && rank < m; ++step) {
      // full pivot search over the remaining submatrix
      std::size_t pi = m, pj = n;
      double best = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (row_used[i]) continue;
        for (std::size_t jj = step; jj < n; ++jj) {
          const Rat& v = A.at(i, col_perm[jj]);
          if (v == 0) continue;
          double w = weight(v);
          if (pi == m || w < best) {
            pi = i;
            pj = jj;
            best = w;
          }
        }
      }
      if (pi == m) break;  // remaining submatrix is zero
      std::swap(col_perm[step], col_perm[pj]);
      row_used[pi] = true;
      pivot_rows.push_back(pi);
      const std::size_t pc = col_perm[step];
      const Rat pivot = A.at(pi, pc);
      for (std::size_t i = 0; i < m; ++i) {
        if (i == pi || A.at(i, pc) == 0) continue;
        Rat f = A.at(i, pc) / pivot;
        for (std::size_t jj = step; jj < n; ++jj) {
          const std::size_t c = col_perm[jj];
          A.at(i, c) -= f * A.at(pi, c);
        }
      }
      ++rank;
    }
  }
};

}  // namespace

std::size_t rank(const RatMat& A) {
  Elimination e(A);
  e.run();
  return e.rank;
}

std::size_t rank_of_rows(const std::vector<RatVec>& rows, std::size_t cols) {
  if (rows.empty()) return 0;
  return rank(RatMat::from_rows(rows));
}

std::optional<RatVec> solve_linear(const RatMat& A, const RatVec& b) {
  if (A.rows() != b.size())
    throw std::invalid_argument("solve_linear: A.rows() != b.size()");
  // Eliminate on the augmented matrix, but never pivot on the b column.
  RatMat aug(A.rows(), A.cols() + 1);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) aug.at(i, j) = A.at(i, j);
    aug.at(i, A.cols()) = b[i];
  }
  // Eliminate with pivots restricted to the first cols(A) columns.
  RatMat M = aug;
  std::vector<std::size_t> col_perm(A.cols());
  for (std::size_t j = 0; j < A.cols(); ++j) col_perm[j] = j;
  std::vector<bool> row_used(M.rows(), false);
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
  for (std::size_t step = 0; step < A.cols(); ++step) {
    std::size_t pi = M.rows(), pj = A.cols();
    double best = 0;
    for (std::size_t i = 0; i < M.rows(); ++i) {
      if (row_used[i]) continue;
      for (std::size_t jj = step; jj < A.cols(); ++jj) {
        const Rat& v = M.at(i, col_perm[jj]);
        if (v == 0) continue;
        double w = Elimination::weight(v);
        if (pi == M.rows() || w < best) {
          pi = i;
          pj = jj;
          best = w;
        }
      }
    }
    if (pi == M.rows()) break;
    std::swap(col_perm[step], col_perm[pj]);
    row_used[pi] = true;
    const std::size_t pc = col_perm[step];
    pivots.emplace_back(pi, pc);
    const Rat pivot = M.at(pi, pc);
    for (std::size_t i = 0; i < M.rows(); ++i) {
      if (i == pi || M.at(i, pc) == 0) continue;
      Rat f = M.at(i, pc) / pivot;
      for (std::size_t j = 0; j <= A.cols(); ++j) M.at(i, j) -= f * M.at(pi, j);
    }
  }
  // Consistency: rows with zero coefficients must have zero rhs.
  for (std::size_t i = 0; i < M.rows(); ++i) {
    if (row_used[i]) continue;
    bool zero_row = true;
    for (std::size_t j = 0; j < A.cols(); ++j)
      if (M.at(i, j) != 0) { zero_row = false; break; }
    if (zero_row && M.at(i, A.cols()) != 0) return std::nullopt;
    if (!zero_row)
      throw std::logic_error("solve_linear: unused nonzero row after elimination");
  }
  RatVec x(A.cols(), Rat(0));
  for (auto [ri, cj] : pivots) x[cj] = M.at(ri, A.cols()) / M.at(ri, cj);
  return x;
}

std::vector<RatVec> kernel_basis(const RatMat& A) {
  const std::size_t n = A.cols();
  // rref with ordered columns (no column exchange) keeps the output canonical.
  RatMat M = A;
  std::vector<std::size_t> pivot_col_of_row;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < M.rows(); ++c) {
    std::size_t pi = M.rows();
    for (std::size_t i = r; i < M.rows(); ++i)
      if (M.at(i, c) != 0) { pi = i; break; }
    if (pi == M.rows()) continue;
    for (std::size_t j = 0; j < n; ++j) std::swap(M.at(r, j), M.at(pi, j));
    const Rat pivot = M.at(r, c);
    for (std::size_t j = 0; j < n; ++j) M.at(r, j) /= pivot;
    for (std::size_t i = 0; i < M.rows(); ++i) {
      if (i == r || M.at(i, c) == 0) continue;
      Rat f = M.at(i, c);
      for (std::size_t j = 0; j < n; ++j) M.at(i, j) -= f * M.at(r, j);
    }
    pivot_col_of_row.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivot_col_of_row) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    RatVec v(n, Rat(0));
    v[c] = 1;
    for (std::size_t i = 0; i < pivot_col_of_row.size(); ++i)
      v[pivot_col_of_row[i]] = -M.at(i, c);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<RatVec> rref_basis(const std::vector<RatVec>& vecs, std::size_t cols) {
  std::vector<RatVec> rows;
  for (const auto& v : vecs) {
    if (v.size() != cols) throw std::invalid_argument("rref_basis: size mismatch");
    if (!is_zero(v)) rows.push_back(v);
  }
  if (rows.empty()) return {};
  RatMat M = RatMat::from_rows(rows);
  std::size_t r = 0;
  std::vector<std::size_t> pivot_cols;
  for (std::size_t c = 0; c < cols && r < M.rows(); ++c) {
    std::size_t pi = M.rows();
    for (std::size_t i = r; i < M.rows(); ++i)
      if (M.at(i, c) != 0) { pi = i; break; }
    if (pi == M.rows()) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(M.at(r, j), M.at(pi, j));
    const Rat pivot = M.at(r, c);
    for (std::size_t j = 0; j < cols; ++j) M.at(r, j) /= pivot;
    for (std::size_t i = 0; i < M.rows(); ++i) {
      if (i == r || M.at(i, c) == 0) continue;
      Rat f = M.at(i, c);
      for (std::size_t j = 0; j < cols; ++j) M.at(i, j) -= f * M.at(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<RatVec> out;
  for (std::size_t i = 0; i < r; ++i) out.push_back(M.row(i));
  return out;
}

RatVec reduce_mod_span(const RatVec& v, const std::vector<RatVec>& rref) {
  RatVec out = v;
  for (const auto& row : rref) {
    std::size_t p = 0;
    while (p < row.size() && row[p] == 0) ++p;
    if (p == row.size()) continue;
    if (out[p] == 0) continue;
    Rat f = out[p] / row[p];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= f * row[j];
  }
  return out;
}

}  // namespace conelab
