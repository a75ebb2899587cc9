#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "cfl/gf.hpp"

namespace cfl {

// R1 = F[U,V]/(UV).  FV and FU tag the one-variable quotients C/U and C/V.
enum class Ring { R1, FUV, FV, FU };

std::string ring_name(Ring r);

struct Grading {
    int u = 0;
    int v = 0;
    auto operator<=>(const Grading&) const = default;
    Grading operator+(Grading o) const { return {u + o.u, v + o.v}; }
    Grading operator-(Grading o) const { return {u - o.u, v - o.v}; }
};

struct Monomial {
    u32 coef = 1;
    int u = 0;
    int v = 0;
    bool operator==(const Monomial&) const = default;
};

struct Generator {
    std::string id;
    int gu = 0;
    int gv = 0;
    Grading gr() const { return {gu, gv}; }
    bool operator==(const Generator&) const = default;
};

struct Term {
    std::size_t target = 0;
    Monomial m;
    bool operator==(const Term&) const = default;
};

// A finitely generated free bigraded complex.  d[s] lists the terms of the
// differential of generator s.
struct Complex {
    Ring ring = Ring::R1;
    u32 p = 2;
    std::vector<Generator> gens;
    std::vector<std::vector<Term>> d;

    Complex() = default;
    Complex(Ring r, u32 prime) : ring(r), p(prime) {}

    std::size_t rank() const { return gens.size(); }
    std::size_t add_generator(const std::string& id, int gu, int gv);
    std::optional<std::size_t> index_of(const std::string& id) const;
    // Adds coef * U^u V^v * target to the differential of source, merging with
    // an existing term of the same monomial.
    void add_term(std::size_t source, std::size_t target, long long coef, int u, int v);
    void add_term(const std::string& source, const std::string& target, long long coef, int u, int v);
    std::size_t term_count() const;
    bool operator==(const Complex&) const = default;
};

// Exponents of the monomial that a homogeneous entry must carry.  An entry
// from a row element of grading `row` to a column element of grading `col`
// in a map of degree -shift has exponents (col - row + shift) / 2.
bool entry_exponents(Grading row, Grading col, Grading shift, Ring ring, int& eu, int& ev);

// A homogeneous matrix over the ring.  Entry (i, j) is the coefficient of a
// monomial fixed by the gradings, so only the field coefficient is stored.
struct GMat {
    Matrix a;
    std::vector<Grading> rows, cols;
    Grading shift;
    Ring ring = Ring::R1;

    bool allowed(std::size_t i, std::size_t j) const;
    void mask();  // zero every entry whose monomial is not available
};

GMat gmul(const GMat& x, const GMat& y);
// Inverse of a square degree-0 homogeneous matrix; throws NotInvertible.
GMat ginverse(const GMat& b);
GMat gidentity(const std::vector<Grading>& gr, Ring ring, u32 p);

// Row convention: row s holds the coefficients of the differential of s.
GMat differential_matrix(const Complex& c);
Complex complex_from_matrix(const GMat& d, const std::vector<Generator>& gens, u32 p);
std::vector<Grading> gradings_of(const Complex& c);

// New basis e'_i = sum_j m(i, j) * mono(i, j) * e_j with mono fixed by the
// gradings of e'_i and e_j.
struct BasisChange {
    std::vector<Generator> new_gens;
    Matrix m;
};

GMat basis_matrix(const BasisChange& b, const std::vector<Generator>& old_gens, Ring ring);
BasisChange identity_change(const Complex& c);
// second after first: old -> mid -> new.
BasisChange compose(const BasisChange& first, const BasisChange& second, const std::vector<Generator>& old_gens,
                    Ring ring);

std::vector<std::string> validate(const Complex& c);
bool is_valid(const Complex& c);
Complex reduce_mod_uv(const Complex& c);
Complex quotient_u(const Complex& c);
Complex quotient_v(const Complex& c);
Complex apply_basis_change(const Complex& c, const BasisChange& b);
Complex bar(const Complex& c);
Complex direct_sum(const std::vector<Complex>& cs);
bool has_length_zero_arrow(const Complex& c);

struct StripResult {
    Complex reduced;
    std::size_t zero_count = 0;
    // Change from the input basis to (reduced generators, then each zero
    // complex as a source followed by its target).
    BasisChange change;
};
StripResult strip_zero_complexes(const Complex& c);

// Fills in gradings from the differential, anchoring each connected component
// at one (generator, grading) pair.  Throws GradingViolation on conflicts or
// when a component has no anchor.
void infer_gradings(Complex& c, const std::vector<std::pair<std::string, Grading>>& anchors);

// Relabel generators by a permutation: new index k holds old generator perm[k].
Complex permute(const Complex& c, const std::vector<std::size_t>& perm);

// Text format: "char p", "ring r1|fuv", optional "anchor id gu gv", lines
// "gen id gu gv" (gradings may be omitted when an anchor is present) and
// "d source target coef u v".  '#' starts a comment.  With char_override the
// coefficients are read as integers modulo that prime instead of the header's,
// and terms that vanish there are dropped.
Complex parse_complex(const std::string& text, std::optional<u32> char_override = std::nullopt);
std::string print_complex(const Complex& c);

}  // namespace cfl
