#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfl/complex.hpp"

namespace cfl {

enum class Direction { Vertical, Horizontal };

struct Arrow {
    std::size_t source = 0;
    std::size_t target = 0;
    int length = 0;
    bool operator==(const Arrow&) const = default;
};

// A basis of C in which C/U (vertical) or C/V (horizontal) has the form
// dx_i = V^a x_j (resp. U^a x_j) or dx_i = 0, each element meeting at most
// one arrow.
struct SimplifiedBasis {
    Direction dir = Direction::Vertical;
    std::vector<Generator> gens;
    std::vector<Arrow> arrows;
    BasisChange change;  // from the input basis

    // Index of the arrow leaving / entering generator k, if any.
    std::optional<std::size_t> arrow_from(std::size_t k) const;
    std::optional<std::size_t> arrow_to(std::size_t k) const;
};

// Reads the arrows of C/U or C/V in the basis of c itself.  Returns nullopt
// when the quotient is not in simplified form.
std::optional<std::vector<Arrow>> read_arrows(const Complex& c, Direction dir);

// Checks that applying b.change to c gives a complex whose quotient has
// exactly the arrows recorded in b.
bool check_simplified(const Complex& c, const SimplifiedBasis& b);

SimplifiedBasis vertical_simplify(const Complex& c);
SimplifiedBasis horizontal_simplify(const Complex& c);

// Reorders yb so that gr(x_i) = gr(y_i).  Throws CountMismatch if the
// grading multisets differ.
void align_gradings(const SimplifiedBasis& xb, SimplifiedBasis& yb);

struct TransitionData {
    SimplifiedBasis x;
    SimplifiedBasis y;
    Matrix P;  // x_i = sum_j P(i, j) y_j, scalar and block diagonal by grading
    Matrix Q;  // inverse of P
};

// Adjusts aligned bases by changes that are trivial modulo U (for x) and
// modulo V (for y) until the transition matrix has only field entries.
TransitionData normalize_transition(const Complex& c, SimplifiedBasis xb, SimplifiedBasis yb);

// The whole pipeline for a stripped complex.
TransitionData simplify_both(const Complex& c);

}  // namespace cfl
