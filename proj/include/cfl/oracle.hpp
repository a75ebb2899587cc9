#pragma once

#include <optional>
#include <vector>

#include "cfl/classify.hpp"
#include "cfl/complex.hpp"

namespace cfl {

// Bounds for the exhaustive searches.  Every search that would go past them
// throws BudgetExceeded instead of running.
struct SearchBudget {
    std::size_t max_rank = 4;
    u32 p = 2;
    // Largest arrow length tried when naming a summand; 0 derives it from the
    // grading spread of the summand.
    int max_exponent = 0;
    // Largest number of matrices enumerated in one search.
    std::size_t max_candidates = std::size_t(1) << 20;
};

struct IsoResult {
    bool isomorphic = false;
    // Basis change from the generators of the first complex to those of the
    // second, checked to carry one differential onto the other.
    std::optional<BasisChange> witness;
};

// Enumerates every homogeneous chain map of degree zero (the solution space
// of B d_C = d_D B, block by grading) and tests each for invertibility.
IsoResult brute_force_isomorphic(const Complex& c, const Complex& d, const SearchBudget& budget = {});

// Splits by nontrivial idempotent chain endomorphisms until none is left and
// names each piece by an isomorphism search against realized candidates.
// Complexes over F[U,V] are reduced modulo UV first.
Decomposition brute_force_decompose(const Complex& c, const SearchBudget& budget = {});

// Indecomposable pieces found by the idempotent search, each as a complex on
// its own generators.
std::vector<Complex> brute_force_split(const Complex& c, const SearchBudget& budget = {});

// Largest torsion order of H(C/V) over F[U] (for ord_u) or of H(C/U) over
// F[V] (for ord_v), from the dimensions of the homology of C/V tensored with
// F[U]/(U^N) as N grows.
int dense_torsion_order_u(const Complex& c);
int dense_torsion_order_v(const Complex& c);

// Every valid complex over R1 of the given rank with generator gradings in
// [0, spread]^2, both minima equal to zero, gradings listed in increasing
// order.
std::vector<Complex> all_complexes(std::size_t rank, int spread, u32 p);

}  // namespace cfl
