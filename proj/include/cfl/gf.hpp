#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfl/error.hpp"

namespace cfl {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

bool is_prime(u32 p);

// Scalar arithmetic modulo a prime p.  Values are kept in [0, p).
inline u32 fadd(u32 a, u32 b, u32 p) { u32 s = a + b; return s >= p ? s - p : s; }
inline u32 fsub(u32 a, u32 b, u32 p) { return a >= b ? a - b : a + p - b; }
inline u32 fneg(u32 a, u32 p) { return a == 0 ? 0 : p - a; }
inline u32 fmul(u32 a, u32 b, u32 p) { return static_cast<u32>(static_cast<u64>(a) * b % p); }
u32 fpow(u32 a, u64 e, u32 p);
u32 finv(u32 a, u32 p);
u32 freduce(long long v, u32 p);

// An element of F_p that carries its characteristic.
struct FieldElem {
    u32 value = 0;
    u32 p = 2;

    FieldElem() = default;
    FieldElem(long long v, u32 prime);

    FieldElem operator+(FieldElem o) const;
    FieldElem operator-(FieldElem o) const;
    FieldElem operator*(FieldElem o) const;
    FieldElem operator-() const;
    FieldElem inverse() const;
    bool operator==(const FieldElem& o) const = default;
    bool is_zero() const { return value == 0; }
};

// Dense row-major matrix over F_p.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, u32 p);

    static Matrix identity(std::size_t n, u32 p);
    static Matrix from_rows(const std::vector<std::vector<long long>>& rows, u32 p);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    u32 prime() const { return p_; }
    bool square() const { return rows_ == cols_; }

    u32& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    u32 operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix scaled(u32 c) const;
    Matrix transpose() const;
    bool operator==(const Matrix& o) const = default;

    bool is_identity() const;
    bool is_zero() const;
    bool is_permutation() const;

    std::vector<u32> row(std::size_t i) const;
    void set_row(std::size_t i, const std::vector<u32>& r);
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
    Matrix select_rows(const std::vector<std::size_t>& idx) const;
    Matrix select_cols(const std::vector<std::size_t>& idx) const;
    static Matrix stack(const Matrix& top, const Matrix& bottom);
    static Matrix block_diagonal(const std::vector<Matrix>& blocks, u32 p);

    // In-place elementary operations.
    void add_row_multiple(std::size_t dst, std::size_t src, u32 c);
    void add_col_multiple(std::size_t dst, std::size_t src, u32 c);
    void scale_row(std::size_t i, u32 c);
    void scale_col(std::size_t j, u32 c);
    void swap_rows(std::size_t i, std::size_t j);
    void swap_cols(std::size_t i, std::size_t j);

    std::string to_string() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    u32 p_ = 2;
    std::vector<u32> a_;
};

std::ostream& operator<<(std::ostream& os, const Matrix& m);

// ---------------------------------------------------------------------------
// Gaussian elimination helpers.  A subspace of F^n is stored as a matrix whose
// rows form a basis in reduced row echelon form.

struct RowEchelon {
    Matrix reduced;                 // RREF of the input
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
    std::size_t rank() const { return pivots.size(); }
};

RowEchelon row_echelon(const Matrix& m);
std::size_t rank(const Matrix& m);
Matrix invert(const Matrix& m);
u32 determinant(const Matrix& m);
bool is_invertible(const Matrix& m);

// Basis of {v : v * m = 0} (left kernel), rows of the result.
Matrix left_kernel(const Matrix& m);
// Solve x * a = b for a row vector x (b a row vector); returns false if none.
bool solve_left(const Matrix& a, const std::vector<u32>& b, std::vector<u32>& x);

Matrix span(const Matrix& rows);  // RREF basis of the row space
Matrix subspace_sum(const Matrix& a, const Matrix& b);
Matrix subspace_intersection(const Matrix& a, const Matrix& b);
bool subspace_contains(const Matrix& space, const std::vector<u32>& v);
Matrix zero_space(std::size_t n, u32 p);
Matrix full_space(std::size_t n, u32 p);
// Preimage {v : v * f in target} of a subspace under v -> v * f.
Matrix subspace_preimage(const Matrix& f, const Matrix& target);
// Image {v * f : v in source}.
Matrix subspace_image(const Matrix& source, const Matrix& f);
// Rows of `extra` extending `base` to a basis of base + extra (a complement).
Matrix complement_in(const Matrix& base, const Matrix& whole);

// ---------------------------------------------------------------------------
// Elementary factors.  Indices are 0-based.  AddUnit(i, j) is the matrix
// I + e_i e_j^T; Scale(i, c) multiplies coordinate i by c; Transposition
// swaps i and j.

enum class FactorKind { Transposition, AddUnit, Scale };

struct ElementaryFactor {
    FactorKind kind;
    std::size_t i = 0;
    std::size_t j = 0;
    u32 lambda = 1;

    static ElementaryFactor transposition(std::size_t i, std::size_t j);
    static ElementaryFactor add_unit(std::size_t i, std::size_t j);
    static ElementaryFactor scale(std::size_t i, u32 lambda);

    Matrix to_matrix(std::size_t n, u32 p) const;
    bool operator==(const ElementaryFactor& o) const = default;
};

std::string to_string(const ElementaryFactor& f);

Matrix product(const std::vector<ElementaryFactor>& fs, std::size_t n, u32 p);

// A permutation as the image list perm[i]; its matrix has a 1 at (i, perm[i]).
Matrix permutation_matrix(const std::vector<std::size_t>& perm, u32 p);

struct LTUFactorization {
    std::vector<ElementaryFactor> L;
    std::vector<std::size_t> T;
    std::vector<ElementaryFactor> U;
};

LTUFactorization ltu_factorize(const Matrix& m);
std::vector<ElementaryFactor> elementary_factorize(const Matrix& m);
// Write a permutation matrix as a product of transpositions.
std::vector<ElementaryFactor> transpositions_of(const std::vector<std::size_t>& perm);

// ---------------------------------------------------------------------------
// Polynomials over F_p, coefficients from the constant term upwards, trimmed.

using Poly = std::vector<u32>;

Poly poly_trim(Poly a);
int poly_degree(const Poly& a);
Poly poly_add(const Poly& a, const Poly& b, u32 p);
Poly poly_sub(const Poly& a, const Poly& b, u32 p);
Poly poly_mul(const Poly& a, const Poly& b, u32 p);
Poly poly_scale(const Poly& a, u32 c, u32 p);
void poly_divmod(const Poly& a, const Poly& b, u32 p, Poly& q, Poly& r);
Poly poly_gcd(Poly a, Poly b, u32 p);
Poly poly_monic(const Poly& a, u32 p);
Poly poly_pow(const Poly& a, unsigned e, u32 p);
Matrix poly_eval(const Poly& f, const Matrix& a);
std::string poly_to_string(const Poly& a);

// Monic irreducible factorization: list of (factor, multiplicity) sorted by
// coefficient vector.  Trial division; fails with SizeLimitExceeded when the
// search would exceed the documented limit of 10^7 candidates.
std::vector<std::pair<Poly, unsigned>> poly_factor(const Poly& f, u32 p);

Matrix companion(const Poly& monic, u32 p);

// ---------------------------------------------------------------------------
// Conjugacy classes.

std::vector<Poly> invariant_factors(const Matrix& a);
std::vector<Poly> elementary_divisors(const Matrix& a);
Matrix rational_canonical_form(const Matrix& a);
bool conjugate_test(const Matrix& a, const Matrix& b);
bool class_contains_permutation(const Matrix& a);
constexpr std::size_t kPermutationSearchLimit = 8;

// S with S^{-1} A S block diagonal, one companion block per elementary
// divisor in the order returned by elementary_divisors.  Columns of S are
// the cyclic bases.
struct PrimaryDecomposition {
    Matrix change;                 // S
    std::vector<Poly> divisors;    // elementary divisors, block order
    std::vector<std::size_t> sizes;
};
PrimaryDecomposition primary_decomposition(const Matrix& a);

}  // namespace cfl
