#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conelab {

/// Exact rational scalar. Backed by GMP; always kept canonical
/// (positive denominator, gcd(|num|, den) = 1).
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

using RatVec = std::vector<Rat>;

std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& s);

/// Dense row-major matrix of exact rationals.
class RatMat {
 public:
  RatMat() = default;
  RatMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols, Rat(0)) {}
  RatMat(std::size_t rows, std::size_t cols, std::vector<Rat> entries);

  static RatMat identity(std::size_t n);
  static RatMat from_rows(const std::vector<RatVec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  RatVec row(std::size_t i) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> e_;
};

Rat dot(const RatVec& a, const RatVec& b);
RatVec matvec(const RatMat& A, const RatVec& x);
RatMat matmul(const RatMat& A, const RatMat& B);

/// Kronecker product of vectors: out[i*b.size()+j] = a[i]*b[j].
RatVec kron(const RatVec& a, const RatVec& b);
/// Kronecker product of matrices, same row-major index convention.
RatMat kron(const RatMat& A, const RatMat& B);

bool is_zero(const RatVec& v);

/// Scales v by a positive rational so entries become integers with gcd 1.
/// Direction is preserved; the zero vector is returned unchanged.
RatVec primitive(const RatVec& v);

std::size_t rank(const RatMat& A);
std::size_t rank_of_rows(const std::vector<RatVec>& rows, std::size_t cols);

/// Some exact solution of A·x = b (free variables set to 0), or nullopt
/// if the system is inconsistent. Gaussian elimination with full pivoting.
std::optional<RatVec> solve_linear(const RatMat& A, const RatVec& b);

/// Basis of {x : A·x = 0}; size is cols(A) - rank(A).
std::vector<RatVec> kernel_basis(const RatMat& A);

/// Reduced-row-echelon basis of the span of the given vectors.
/// Canonical: two spans are equal iff their rref bases are equal.
std::vector<RatVec> rref_basis(const std::vector<RatVec>& vecs, std::size_t cols);

/// Subtracts the rref-basis components from v, yielding the canonical
/// representative of v modulo span(basis). basis must be in rref form.
RatVec reduce_mod_span(const RatVec& v, const std::vector<RatVec>& rref);

}  // namespace conelab
