#include "cfl/gf.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

namespace cfl {

bool is_prime(u32 p) {
    if (p < 2) return false;
    for (u64 d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

u32 fpow(u32 a, u64 e, u32 p) {
    u64 r = 1 % p, b = a % p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<u32>(r);
}

u32 finv(u32 a, u32 p) {
    if (a % p == 0) throw Singular("inverse of zero in F_" + std::to_string(p));
    return fpow(a, p - 2, p);
}

u32 freduce(long long v, u32 p) {
    long long r = v % static_cast<long long>(p);
    if (r < 0) r += p;
    return static_cast<u32>(r);
}

FieldElem::FieldElem(long long v, u32 prime) : p(prime) {
    if (!is_prime(prime)) throw NotPrime(std::to_string(prime) + " is not prime");
    value = freduce(v, prime);
}

static void same_field(u32 a, u32 b) {
    if (a != b) throw FieldMismatch("F_" + std::to_string(a) + " vs F_" + std::to_string(b));
}

FieldElem FieldElem::operator+(FieldElem o) const { same_field(p, o.p); FieldElem r = *this; r.value = fadd(value, o.value, p); return r; }
FieldElem FieldElem::operator-(FieldElem o) const { same_field(p, o.p); FieldElem r = *this; r.value = fsub(value, o.value, p); return r; }
FieldElem FieldElem::operator*(FieldElem o) const { same_field(p, o.p); FieldElem r = *this; r.value = fmul(value, o.value, p); return r; }
FieldElem FieldElem::operator-() const { FieldElem r = *this; r.value = fneg(value, p); return r; }
FieldElem FieldElem::inverse() const { FieldElem r = *this; r.value = finv(value, p); return r; }

// ---------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, u32 p) : rows_(rows), cols_(cols), p_(p), a_(rows * cols, 0) {}

Matrix Matrix::identity(std::size_t n, u32 p) {
    Matrix m(n, n, p);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % p;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<long long>>& rows, u32 p) {
    std::size_t c = rows.empty() ? 0 : rows[0].size();
    Matrix m(rows.size(), c, p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw DimensionMismatch("ragged matrix literal");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = freduce(rows[i][j], p);
    }
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape");
    same_field(p_, o.p_);
    Matrix r(rows_, o.cols_, p_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            u32 a = (*this)(i, k);
            if (!a) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                if (o(k, j)) r(i, j) = fadd(r(i, j), fmul(a, o(k, j), p_), p_);
        }
    return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix sum shape");
    Matrix r = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = fadd(a_[k], o.a_[k], p_);
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix difference shape");
    Matrix r = *this;
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = fsub(a_[k], o.a_[k], p_);
    return r;
}

Matrix Matrix::scaled(u32 c) const {
    Matrix r = *this;
    for (auto& x : r.a_) x = fmul(x, c, p_);
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(cols_, rows_, p_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

bool Matrix::is_identity() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != (i == j ? 1u % p_ : 0u)) return false;
    return true;
}

bool Matrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](u32 x) { return x == 0; });
}

bool Matrix::is_permutation() const {
    if (!square()) return false;
    std::vector<int> colcount(cols_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
        int ones = 0;
        for (std::size_t j = 0; j < cols_; ++j) {
            u32 x = (*this)(i, j);
            if (x == 0) continue;
            if (x != 1) return false;
            ++ones;
            ++colcount[j];
        }
        if (ones != 1) return false;
    }
    return std::all_of(colcount.begin(), colcount.end(), [](int c) { return c == 1; });
}

std::vector<u32> Matrix::row(std::size_t i) const {
    return std::vector<u32>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
}

void Matrix::set_row(std::size_t i, const std::vector<u32>& r) {
    if (r.size() != cols_) throw DimensionMismatch("row length");
    std::copy(r.begin(), r.end(), a_.begin() + i * cols_);
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(nr, nc, p_);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
    Matrix r(idx.size(), cols_, p_);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(idx[i], j);
    return r;
}

Matrix Matrix::select_cols(const std::vector<std::size_t>& idx) const {
    Matrix r(rows_, idx.size(), p_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) r(i, j) = (*this)(i, idx[j]);
    return r;
}

Matrix Matrix::stack(const Matrix& top, const Matrix& bottom) {
    if (top.cols_ != bottom.cols_) throw DimensionMismatch("stack widths");
    Matrix r(top.rows_ + bottom.rows_, top.cols_, top.p_);
    r.set_block(0, 0, top);
    r.set_block(top.rows_, 0, bottom);
    return r;
}

Matrix Matrix::block_diagonal(const std::vector<Matrix>& blocks, u32 p) {
    std::size_t n = 0, m = 0;
    for (const auto& b : blocks) { n += b.rows(); m += b.cols(); }
    Matrix r(n, m, p);
    std::size_t ro = 0, co = 0;
    for (const auto& b : blocks) {
        r.set_block(ro, co, b);
        ro += b.rows();
        co += b.cols();
    }
    return r;
}

void Matrix::add_row_multiple(std::size_t dst, std::size_t src, u32 c) {
    if (!c) return;
    for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(src, j)) (*this)(dst, j) = fadd((*this)(dst, j), fmul(c, (*this)(src, j), p_), p_);
}

void Matrix::add_col_multiple(std::size_t dst, std::size_t src, u32 c) {
    if (!c) return;
    for (std::size_t i = 0; i < rows_; ++i)
        if ((*this)(i, src)) (*this)(i, dst) = fadd((*this)(i, dst), fmul(c, (*this)(i, src), p_), p_);
}

void Matrix::scale_row(std::size_t i, u32 c) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = fmul((*this)(i, j), c, p_);
}

void Matrix::scale_col(std::size_t j, u32 c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = fmul((*this)(i, j), c, p_);
}

void Matrix::swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
}

void Matrix::swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
}

std::string Matrix::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << ',';
        os << '[';
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ',';
            os << (*this)(i, j);
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) { return os << m.to_string(); }

// ---------------------------------------------------------------------------

RowEchelon row_echelon(const Matrix& m) {
    RowEchelon e{m, {}};
    Matrix& a = e.reduced;
    const u32 p = a.prime();
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t piv = r;
        while (piv < a.rows() && a(piv, c) == 0) ++piv;
        if (piv == a.rows()) continue;
        a.swap_rows(r, piv);
        a.scale_row(r, finv(a(r, c), p));
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (i != r && a(i, c)) a.add_row_multiple(i, r, fneg(a(i, c), p));
        e.pivots.push_back(c);
        ++r;
    }
    return e;
}

std::size_t rank(const Matrix& m) { return row_echelon(m).rank(); }

Matrix invert(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("invert of non-square matrix");
    const std::size_t n = m.rows();
    Matrix aug(n, 2 * n, m.prime());
    aug.set_block(0, 0, m);
    aug.set_block(0, n, Matrix::identity(n, m.prime()));
    RowEchelon e = row_echelon(aug);
    if (e.rank() < n || (n > 0 && e.pivots[n - 1] != n - 1)) throw Singular("matrix is not invertible");
    return e.reduced.block(0, n, n, n);
}

u32 determinant(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("determinant of non-square matrix");
    Matrix a = m;
    const u32 p = a.prime();
    u32 det = 1 % p;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        std::size_t piv = c;
        while (piv < a.rows() && a(piv, c) == 0) ++piv;
        if (piv == a.rows()) return 0;
        if (piv != c) { a.swap_rows(c, piv); det = fneg(det, p); }
        det = fmul(det, a(c, c), p);
        u32 inv = finv(a(c, c), p);
        for (std::size_t i = c + 1; i < a.rows(); ++i)
            if (a(i, c)) a.add_row_multiple(i, c, fneg(fmul(a(i, c), inv, p), p));
    }
    return det;
}

bool is_invertible(const Matrix& m) { return m.square() && rank(m) == m.rows(); }

// Right kernel {x : m x = 0}, returned as rows.
static Matrix right_kernel(const Matrix& m) {
    const u32 p = m.prime();
    RowEchelon e = row_echelon(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : e.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Matrix k(free_cols.size(), m.cols(), p);
    for (std::size_t t = 0; t < free_cols.size(); ++t) {
        std::size_t f = free_cols[t];
        k(t, f) = 1 % p;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) k(t, e.pivots[r]) = fneg(e.reduced(r, f), p);
    }
    return k;
}

Matrix left_kernel(const Matrix& m) { return right_kernel(m.transpose()); }

bool solve_left(const Matrix& a, const std::vector<u32>& b, std::vector<u32>& x) {
    // x a = b  <=>  a^T x^T = b^T.  Row reduce [a^T | b^T].
    const u32 p = a.prime();
    const std::size_t n = a.rows(), m = a.cols();
    if (b.size() != m) throw DimensionMismatch("solve_left right-hand side");
    Matrix aug(m, n + 1, p);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(j, i);
        aug(i, n) = b[i];
    }
    RowEchelon e = row_echelon(aug);
    if (!e.pivots.empty() && e.pivots.back() == n) return false;
    x.assign(n, 0);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, n);
    return true;
}

Matrix span(const Matrix& rows) {
    RowEchelon e = row_echelon(rows);
    return e.reduced.block(0, 0, e.rank(), rows.cols());
}

Matrix subspace_sum(const Matrix& a, const Matrix& b) { return span(Matrix::stack(a, b)); }

Matrix subspace_intersection(const Matrix& a, const Matrix& b) {
    if (a.rows() == 0 || b.rows() == 0) return Matrix(0, a.cols(), a.prime());
    const u32 p = a.prime();
    Matrix nb = b.scaled(fneg(1 % p, p));
    Matrix k = left_kernel(Matrix::stack(a, nb));
    Matrix coeff = k.block(0, 0, k.rows(), a.rows());
    return span(coeff * a);
}

bool subspace_contains(const Matrix& space, const std::vector<u32>& v) {
    Matrix row(1, v.size(), space.prime());
    row.set_row(0, v);
    return rank(Matrix::stack(space, row)) == rank(space);
}

Matrix zero_space(std::size_t n, u32 p) { return Matrix(0, n, p); }
Matrix full_space(std::size_t n, u32 p) { return Matrix::identity(n, p); }

Matrix subspace_preimage(const Matrix& f, const Matrix& target) {
    const u32 p = f.prime();
    Matrix ann = right_kernel(target);  // rows w with target * w^T = 0
    if (ann.rows() == 0) return full_space(f.rows(), p);
    Matrix k = left_kernel(f * ann.transpose());
    return span(k);
}

Matrix subspace_image(const Matrix& source, const Matrix& f) { return span(source * f); }

Matrix complement_in(const Matrix& base, const Matrix& whole) {
    Matrix acc = span(base);
    Matrix out(0, whole.cols(), whole.prime());
    for (std::size_t i = 0; i < whole.rows(); ++i) {
        Matrix r = whole.block(i, 0, 1, whole.cols());
        Matrix next = Matrix::stack(acc, r);
        if (rank(next) > acc.rows()) {
            acc = span(next);
            out = Matrix::stack(out, r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

ElementaryFactor ElementaryFactor::transposition(std::size_t i, std::size_t j) {
    if (i == j) throw DimensionMismatch("transposition needs distinct indices");
    return {FactorKind::Transposition, i, j, 1};
}

ElementaryFactor ElementaryFactor::add_unit(std::size_t i, std::size_t j) {
    if (i == j) throw DimensionMismatch("crossover needs distinct indices");
    return {FactorKind::AddUnit, i, j, 1};
}

ElementaryFactor ElementaryFactor::scale(std::size_t i, u32 lambda) {
    if (lambda == 0) throw Singular("scale by zero");
    return {FactorKind::Scale, i, i, lambda};
}

Matrix ElementaryFactor::to_matrix(std::size_t n, u32 p) const {
    Matrix m = Matrix::identity(n, p);
    switch (kind) {
        case FactorKind::Transposition:
            m(i, i) = 0; m(j, j) = 0; m(i, j) = 1; m(j, i) = 1;
            break;
        case FactorKind::AddUnit:
            m(i, j) = 1;
            break;
        case FactorKind::Scale:
            m(i, i) = lambda % p;
            break;
    }
    return m;
}

std::string to_string(const ElementaryFactor& f) {
    switch (f.kind) {
        case FactorKind::Transposition: return "T(" + std::to_string(f.i) + "," + std::to_string(f.j) + ")";
        case FactorKind::AddUnit: return "E(" + std::to_string(f.i) + "," + std::to_string(f.j) + ")";
        case FactorKind::Scale: return "D(" + std::to_string(f.i) + ";" + std::to_string(f.lambda) + ")";
    }
    return "?";
}

Matrix product(const std::vector<ElementaryFactor>& fs, std::size_t n, u32 p) {
    Matrix m = Matrix::identity(n, p);
    for (const auto& f : fs) m = m * f.to_matrix(n, p);
    return m;
}

Matrix permutation_matrix(const std::vector<std::size_t>& perm, u32 p) {
    Matrix m(perm.size(), perm.size(), p);
    for (std::size_t i = 0; i < perm.size(); ++i) m(i, perm[i]) = 1 % p;
    return m;
}

// Appends E_ij^c as Scale(i,c) AddUnit(i,j) Scale(i,1/c); a bare AddUnit when c = 1.
static void push_add(std::vector<ElementaryFactor>& out, std::size_t i, std::size_t j, u32 c, u32 p) {
    if (c == 0) return;
    if (c == 1) {
        out.push_back(ElementaryFactor::add_unit(i, j));
        return;
    }
    out.push_back(ElementaryFactor::scale(i, c));
    out.push_back(ElementaryFactor::add_unit(i, j));
    out.push_back(ElementaryFactor::scale(i, finv(c, p)));
}

LTUFactorization ltu_factorize(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("ltu_factorize needs a square matrix");
    const std::size_t n = m.rows();
    const u32 p = m.prime();
    Matrix a = m;
    struct Op { std::size_t dst, src; u32 c; };
    std::vector<Op> row_ops, col_ops;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = 0;
        while (j < n && a(i, j) == 0) ++j;
        if (j == n) throw Singular("matrix is not invertible");
        perm[i] = j;
        u32 inv = finv(a(i, j), p);
        for (std::size_t k = i + 1; k < n; ++k)
            if (a(k, j)) {
                u32 c = fneg(fmul(a(k, j), inv, p), p);
                a.add_row_multiple(k, i, c);
                row_ops.push_back({k, i, c});
            }
        for (std::size_t l = j + 1; l < n; ++l)
            if (a(i, l)) {
                u32 c = fneg(fmul(a(i, l), inv, p), p);
                a.add_col_multiple(l, j, c);
                col_ops.push_back({l, j, c});
            }
    }
    LTUFactorization f;
    // Row operations were applied on the left: undo them in order of application.
    for (const auto& op : row_ops) push_add(f.L, op.dst, op.src, fneg(op.c, p), p);
    for (std::size_t i = 0; i < n; ++i)
        if (a(i, perm[i]) != 1) f.L.push_back(ElementaryFactor::scale(i, a(i, perm[i])));
    f.T = perm;
    // Column operations were applied on the right: undo them in reverse order.
    for (auto it = col_ops.rbegin(); it != col_ops.rend(); ++it) push_add(f.U, it->src, it->dst, fneg(it->c, p), p);
    return f;
}

std::vector<ElementaryFactor> transpositions_of(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> t = perm;
    std::vector<ElementaryFactor> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == i) continue;
        std::size_t k = i + 1;
        while (t[k] != i) ++k;
        // Swapping rows i and k of the current permutation matrix.
        out.push_back(ElementaryFactor::transposition(i, k));
        std::swap(t[i], t[k]);
    }
    return out;
}

std::vector<ElementaryFactor> elementary_factorize(const Matrix& m) {
    LTUFactorization f = ltu_factorize(m);
    std::vector<ElementaryFactor> out = f.L;
    auto ts = transpositions_of(f.T);
    out.insert(out.end(), ts.begin(), ts.end());
    out.insert(out.end(), f.U.begin(), f.U.end());
    return out;
}

// ---------------------------------------------------------------------------

Poly poly_trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

int poly_degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

Poly poly_add(const Poly& a, const Poly& b, u32 p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = fadd(r[i], b[i], p);
    return poly_trim(r);
}

Poly poly_sub(const Poly& a, const Poly& b, u32 p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = fsub(r[i], b[i], p);
    return poly_trim(r);
}

Poly poly_mul(const Poly& a, const Poly& b, u32 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = fadd(r[i + j], fmul(a[i], b[j], p), p);
    return poly_trim(r);
}

Poly poly_scale(const Poly& a, u32 c, u32 p) {
    Poly r = a;
    for (auto& x : r) x = fmul(x, c, p);
    return poly_trim(r);
}

void poly_divmod(const Poly& a, const Poly& b, u32 p, Poly& q, Poly& r) {
    if (b.empty()) throw Singular("polynomial division by zero");
    r = poly_trim(a);
    q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, 0);
    u32 lead_inv = finv(b.back(), p);
    while (!r.empty() && r.size() >= b.size()) {
        std::size_t shift = r.size() - b.size();
        u32 c = fmul(r.back(), lead_inv, p);
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] = fsub(r[shift + i], fmul(c, b[i], p), p);
        r = poly_trim(r);
    }
    q = poly_trim(q);
}

Poly poly_monic(const Poly& a, u32 p) {
    Poly t = poly_trim(a);
    if (t.empty()) return t;
    return poly_scale(t, finv(t.back(), p), p);
}

Poly poly_gcd(Poly a, Poly b, u32 p) {
    a = poly_trim(a);
    b = poly_trim(b);
    while (!b.empty()) {
        Poly q, r;
        poly_divmod(a, b, p, q, r);
        a = b;
        b = r;
    }
    return poly_monic(a, p);
}

Poly poly_pow(const Poly& a, unsigned e, u32 p) {
    Poly r{1 % p};
    for (unsigned k = 0; k < e; ++k) r = poly_mul(r, a, p);
    return r;
}

Matrix poly_eval(const Poly& f, const Matrix& a) {
    const u32 p = a.prime();
    Matrix r(a.rows(), a.cols(), p);
    for (auto it = f.rbegin(); it != f.rend(); ++it) r = r * a + Matrix::identity(a.rows(), p).scaled(*it);
    return r;
}

std::string poly_to_string(const Poly& a) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ']';
    return os.str();
}

static bool poly_less(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

std::vector<std::pair<Poly, unsigned>> poly_factor(const Poly& f0, u32 p) {
    Poly f = poly_monic(f0, p);
    std::vector<std::pair<Poly, unsigned>> out;
    if (poly_degree(f) <= 0) return out;
    for (int k = 1; 2 * k <= poly_degree(f); ++k) {
        double count = 1;
        for (int t = 0; t < k; ++t) count *= p;
        if (count > 1e7) throw SizeLimitExceeded("factorization search over F_" + std::to_string(p) + " in degree " + std::to_string(k));
        Poly cand(k + 1, 0);
        cand[k] = 1;
        while (true) {
            unsigned mult = 0;
            while (poly_degree(f) >= k) {
                Poly q, r;
                poly_divmod(f, cand, p, q, r);
                if (!r.empty()) break;
                f = q;
                ++mult;
            }
            if (mult) out.push_back({cand, mult});
            // Next monic candidate of degree k (base-p counter on low coefficients).
            int pos = 0;
            while (pos < k && cand[pos] == p - 1) cand[pos++] = 0;
            if (pos == k) break;
            ++cand[pos];
            if (2 * k > poly_degree(f)) break;
        }
    }
    if (poly_degree(f) > 0) out.push_back({f, 1});
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return poly_less(x.first, y.first); });
    return out;
}

Matrix companion(const Poly& monic, u32 p) {
    const std::size_t k = monic.size() - 1;
    Matrix c(k, k, p);
    for (std::size_t r = 0; r + 1 < k; ++r) c(r + 1, r) = 1 % p;
    for (std::size_t r = 0; r < k; ++r) c(r, k - 1) = fneg(monic[r], p);
    return c;
}

// ---------------------------------------------------------------------------
// Smith form of xI - A over F_p[x].  Keeps the inverse of the accumulated row
// transformation, whose columns give cyclic generators of F_p^w under A.

namespace {

struct SmithResult {
    std::vector<Poly> diag;
    std::vector<std::vector<Poly>> uinv;  // w x w polynomial matrix
};

SmithResult smith_char_matrix(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("characteristic matrix of non-square matrix");
    const std::size_t w = a.rows();
    const u32 p = a.prime();
    using PM = std::vector<std::vector<Poly>>;
    PM m(w, std::vector<Poly>(w)), ui(w, std::vector<Poly>(w));
    for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            Poly e;
            if (i == j) e = {fneg(a(i, j), p), 1 % p};
            else if (a(i, j)) e = {fneg(a(i, j), p)};
            m[i][j] = poly_trim(e);
            ui[i][j] = (i == j) ? Poly{1 % p} : Poly{};
        }
    auto row_sub = [&](std::size_t dst, std::size_t src, const Poly& q) {
        // row_dst -= q * row_src ; uinv col_src += q * col_dst
        for (std::size_t j = 0; j < w; ++j) m[dst][j] = poly_sub(m[dst][j], poly_mul(q, m[src][j], p), p);
        for (std::size_t i = 0; i < w; ++i) ui[i][src] = poly_add(ui[i][src], poly_mul(q, ui[i][dst], p), p);
    };
    auto col_sub = [&](std::size_t dst, std::size_t src, const Poly& q) {
        for (std::size_t i = 0; i < w; ++i) m[i][dst] = poly_sub(m[i][dst], poly_mul(q, m[i][src], p), p);
    };
    auto row_swap = [&](std::size_t x, std::size_t y) {
        if (x == y) return;
        std::swap(m[x], m[y]);
        for (std::size_t i = 0; i < w; ++i) std::swap(ui[i][x], ui[i][y]);
    };
    auto col_swap = [&](std::size_t x, std::size_t y) {
        if (x == y) return;
        for (std::size_t i = 0; i < w; ++i) std::swap(m[i][x], m[i][y]);
    };
    for (std::size_t k = 0; k < w; ++k) {
        while (true) {
            std::size_t bi = w, bj = w;
            int bd = -1;
            for (std::size_t i = k; i < w; ++i)
                for (std::size_t j = k; j < w; ++j)
                    if (!m[i][j].empty() && (bd < 0 || poly_degree(m[i][j]) < bd)) {
                        bd = poly_degree(m[i][j]);
                        bi = i;
                        bj = j;
                    }
            if (bd < 0) break;
            row_swap(k, bi);
            col_swap(k, bj);
            bool clean = true;
            for (std::size_t i = k + 1; i < w; ++i)
                if (!m[i][k].empty()) {
                    Poly q, r;
                    poly_divmod(m[i][k], m[k][k], p, q, r);
                    row_sub(i, k, q);
                    if (!r.empty()) clean = false;
                }
            for (std::size_t j = k + 1; j < w; ++j)
                if (!m[k][j].empty()) {
                    Poly q, r;
                    poly_divmod(m[k][j], m[k][k], p, q, r);
                    col_sub(j, k, q);
                    if (!r.empty()) clean = false;
                }
            if (!clean) continue;
            bool divides = true;
            for (std::size_t i = k + 1; i < w && divides; ++i)
                for (std::size_t j = k + 1; j < w; ++j) {
                    Poly q, r;
                    poly_divmod(m[i][j], m[k][k], p, q, r);
                    if (!r.empty()) {
                        // row_k += row_i ; uinv col_i -= col_k
                        for (std::size_t c = 0; c < w; ++c) m[k][c] = poly_add(m[k][c], m[i][c], p);
                        for (std::size_t r2 = 0; r2 < w; ++r2) ui[r2][i] = poly_sub(ui[r2][i], ui[r2][k], p);
                        divides = false;
                        break;
                    }
                }
            if (divides) break;
        }
        if (!m[k][k].empty()) {
            u32 lead = m[k][k].back();
            u32 inv = finv(lead, p);
            for (std::size_t j = 0; j < w; ++j) m[k][j] = poly_scale(m[k][j], inv, p);
            for (std::size_t i = 0; i < w; ++i) ui[i][k] = poly_scale(ui[i][k], lead, p);
        }
    }
    SmithResult res;
    for (std::size_t k = 0; k < w; ++k) res.diag.push_back(m[k][k]);
    res.uinv = ui;
    return res;
}

std::vector<u32> apply_poly_vector(const std::vector<std::vector<Poly>>& ui, std::size_t col, const Matrix& a) {
    const std::size_t w = a.rows();
    const u32 p = a.prime();
    std::vector<u32> v(w, 0);
    for (std::size_t r = 0; r < w; ++r) {
        if (ui[r][col].empty()) continue;
        Matrix fa = poly_eval(ui[r][col], a);
        for (std::size_t i = 0; i < w; ++i) v[i] = fadd(v[i], fa(i, r), p);
    }
    return v;
}

std::vector<u32> mat_vec(const Matrix& a, const std::vector<u32>& v) {
    std::vector<u32> r(a.rows(), 0);
    const u32 p = a.prime();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] = fadd(r[i], fmul(a(i, j), v[j], p), p);
    return r;
}

}  // namespace

std::vector<Poly> invariant_factors(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("invariant factors of non-square matrix");
    SmithResult s = smith_char_matrix(a);
    std::vector<Poly> out;
    for (const auto& d : s.diag)
        if (poly_degree(d) > 0) out.push_back(d);
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

std::vector<Poly> elementary_divisors(const Matrix& a) {
    const u32 p = a.prime();
    std::vector<Poly> out;
    for (const auto& d : invariant_factors(a))
        for (const auto& [f, e] : poly_factor(d, p)) out.push_back(poly_pow(f, e, p));
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

Matrix rational_canonical_form(const Matrix& a) {
    if (!is_invertible(a)) throw Singular("rational canonical form expects an invertible matrix");
    std::vector<Matrix> blocks;
    for (const auto& d : invariant_factors(a)) blocks.push_back(companion(d, a.prime()));
    return Matrix::block_diagonal(blocks, a.prime());
}

bool conjugate_test(const Matrix& a, const Matrix& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows()) throw DimensionMismatch("conjugate_test shapes");
    if (a.prime() != b.prime()) throw FieldMismatch("conjugate_test fields");
    return invariant_factors(a) == invariant_factors(b);
}

bool class_contains_permutation(const Matrix& a) {
    if (!is_invertible(a)) throw Singular("class_contains_permutation expects an invertible matrix");
    const std::size_t w = a.rows();
    if (w > kPermutationSearchLimit)
        throw SizeLimitExceeded("permutation search limited to size " + std::to_string(kPermutationSearchLimit));
    std::vector<std::size_t> perm(w);
    std::iota(perm.begin(), perm.end(), 0);
    const auto target = invariant_factors(a);
    do {
        if (invariant_factors(permutation_matrix(perm, a.prime())) == target) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

PrimaryDecomposition primary_decomposition(const Matrix& a) {
    if (!is_invertible(a)) throw Singular("primary decomposition expects an invertible matrix");
    const u32 p = a.prime();
    const std::size_t w = a.rows();
    SmithResult s = smith_char_matrix(a);
    struct Block { Poly divisor; std::vector<std::vector<u32>> basis; };
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < w; ++k) {
        if (poly_degree(s.diag[k]) <= 0) continue;
        std::vector<u32> g = apply_poly_vector(s.uinv, k, a);
        for (const auto& [f, e] : poly_factor(s.diag[k], p)) {
            Poly fe = poly_pow(f, e, p);
            Poly h, rem;
            poly_divmod(s.diag[k], fe, p, h, rem);
            std::vector<u32> v = mat_vec(poly_eval(h, a), g);
            Block b{fe, {}};
            for (int t = 0; t < poly_degree(fe); ++t) {
                b.basis.push_back(v);
                v = mat_vec(a, v);
            }
            blocks.push_back(b);
        }
    }
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) { return poly_less(x.divisor, y.divisor); });
    PrimaryDecomposition out{Matrix(w, w, p), {}, {}};
    std::size_t col = 0;
    for (const auto& b : blocks) {
        out.divisors.push_back(b.divisor);
        out.sizes.push_back(b.basis.size());
        for (const auto& v : b.basis) {
            for (std::size_t i = 0; i < w; ++i) out.change(i, col) = v[i];
            ++col;
        }
    }
    if (col != w || !is_invertible(out.change)) throw InternalError("primary decomposition lost rank");
    return out;
}

}  // namespace cfl
