#pragma once

#include <string>
#include <vector>

#include "cfl/classify.hpp"
#include "cfl/complex.hpp"

namespace cfl {

// Homology of a complex over F[V] (or F[U]): free part with the gradings of
// its generators and the orders d_i of the torsion summands F[V]/(V^{d_i}).
struct PidHomology {
    std::vector<Grading> free;
    std::vector<int> torsion;  // ascending
};

// Q must come from quotient_u (ring FV) or quotient_v (ring FU).
PidHomology homology_over_pid(const Complex& q);

enum class HomologyKind { Torsion, Knot, Link, Other };

struct HomologyType {
    HomologyKind kind = HomologyKind::Other;
    int components = 0;            // for Link
    std::vector<Grading> free_u;   // generators of H(C/U) modulo V-torsion
    std::vector<Grading> free_v;   // generators of H(C/V) modulo U-torsion
};

HomologyType homology_type(const Complex& c);
std::string to_string(const HomologyType& h);

// Longest horizontal (ord_u) or vertical (ord_v) arrow over all summands.
int ord_u(const Complex& c);
int ord_v(const Complex& c);
// The same numbers as the largest torsion order of H(C/V) and H(C/U).
int ord_u_from_homology(const Complex& c);
int ord_v_from_homology(const Complex& c);
int ord_u(const Decomposition& d);
int ord_v(const Decomposition& d);

// Compares the decompositions of C and of its bar, ignoring zero complexes.
// Complexes over F[U,V] are reduced modulo UV first.
bool is_symmetric(const Complex& c);

// True when some local-system summand has nonzero drift.
bool essentially_infinite(const Complex& c);
bool essentially_infinite(const Decomposition& d);

enum class Verdict { Yes, No, Unknown };
std::string to_string(Verdict v);

struct SimplifiedBasisVerdict {
    Verdict verdict = Verdict::Unknown;
    // Set when a yes rests on rebasing permutation holonomies into
    // identity cycles rather than on an obstruction.
    bool constructive_converse = false;
    std::string reason;
};

// Local systems with the same shape and anchor are grouped; the group's
// holonomy must be conjugate to a permutation.  Groups wider than the
// permutation search limit give Unknown unless another group already fails.
SimplifiedBasisVerdict admits_simplified_basis(const Complex& c);
SimplifiedBasisVerdict admits_simplified_basis(const Decomposition& d);

}  // namespace cfl
