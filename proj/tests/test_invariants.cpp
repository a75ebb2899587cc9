#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "cfl/invariants.hpp"
#include "cfl/simplify.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cfl;
using namespace testutil;

namespace {

Complex descriptor_sum(const std::vector<SnakeDescriptor>& snakes, u32 p) {
    std::vector<Complex> parts;
    for (const auto& s : snakes) parts.push_back(realize(s, p));
    return direct_sum(parts);
}

// A permutation matrix conjugate to a, searched directly.
std::optional<Matrix> permutation_in_class(const Matrix& a) {
    const std::size_t w = a.rows();
    std::vector<std::size_t> perm(w);
    std::iota(perm.begin(), perm.end(), 0);
    const auto target = invariant_factors(a);
    do {
        Matrix m(w, w, a.prime());
        for (std::size_t i = 0; i < w; ++i) m(i, perm[i]) = 1;
        if (invariant_factors(m) == target) return m;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

// Realizes each (shape, anchor) group of local systems with a permutation
// holonomy and checks that the result is simplified in both directions and
// decomposes back into the same group.
void check_constructive_converse(const Decomposition& d) {
    std::map<std::pair<std::vector<int>, Grading>, std::vector<LocalSystemDescriptor>> groups;
    for (const auto& l : d.systems) groups[{l.shape, l.anchor}].push_back(l);
    for (const auto& [key, members] : groups) {
        std::size_t w = 0;
        for (const auto& l : members) w += l.w;
        Matrix a(w, w, d.p);
        std::size_t at = 0;
        for (const auto& l : members) {
            a.set_block(at, at, l.holonomy);
            at += l.w;
        }
        auto perm = permutation_in_class(a);
        REQUIRE(perm.has_value());
        Complex c = realize(LocalSystemDescriptor{key.first, key.second, w, *perm}, d.p);
        CHECK(read_arrows(c, Direction::Vertical).has_value());
        CHECK(read_arrows(c, Direction::Horizontal).has_value());
        Decomposition back = decompose(c);
        CHECK(back.systems == members);
    }
}

}  // namespace

TEST_CASE("homology over one variable") {
    Complex t = load_corpus("trefoil_f2.cfl");
    PidHomology hu = homology_over_pid(quotient_u(t));
    CHECK(hu.free.size() == 1);
    CHECK(hu.free[0] == Grading{0, 2});
    CHECK(hu.torsion == std::vector<int>{1});

    Complex z = realize_zero(2);
    PidHomology hz = homology_over_pid(quotient_u(z));
    CHECK(hz.free.empty());
    CHECK(hz.torsion.empty());

    Complex staircase = realize(SnakeDescriptor{SnakeKind::Standard, {2, -2, -1, 1, 3, -1}, {0, 0}}, 2);
    PidHomology hv = homology_over_pid(quotient_v(staircase));
    CHECK(hv.torsion == std::vector<int>{1, 2, 3});
    CHECK(hv.free.size() == 1);
    CHECK(homology_over_pid(quotient_u(staircase)).torsion == std::vector<int>{1, 1, 2});

    CHECK_THROWS_AS(homology_over_pid(t), ValidationError);
}

TEST_CASE("homology types") {
    CHECK(homology_type(load_corpus("trefoil_f2.cfl")).kind == HomologyKind::Knot);
    CHECK(homology_type(load_corpus("example_d.cfl")).kind == HomologyKind::Knot);
    CHECK(homology_type(load_corpus("example_t.cfl")).kind == HomologyKind::Knot);
    CHECK(homology_type(load_corpus("example_p.cfl")).kind == HomologyKind::Knot);
    CHECK(homology_type(load_corpus("figure_eight_f3.cfl")).kind == HomologyKind::Knot);
    LocalSystemDescriptor ls{{1, 1}, {0, 0}, 1, Matrix::identity(1, 2)};
    CHECK(homology_type(realize(ls, 2)).kind == HomologyKind::Torsion);
    CHECK(homology_type(load_corpus("example_e_mod2.cfl")).kind == HomologyKind::Torsion);

    // Two towers make the homology of a two-component link.
    Complex two = descriptor_sum({{SnakeKind::Standard, {}, {0, 0}}, {SnakeKind::Standard, {}, {-1, -1}}}, 2);
    HomologyType h2 = homology_type(two);
    CHECK(h2.kind == HomologyKind::Link);
    CHECK(h2.components == 2);
    CHECK(to_string(h2) == "link(2)");
    // One tower off the knot normalization.
    HomologyType off = homology_type(descriptor_sum({{SnakeKind::Standard, {}, {2, 2}}}, 2));
    CHECK(off.kind == HomologyKind::Link);
    CHECK(off.components == 1);
    Complex three = descriptor_sum(
        {{SnakeKind::Standard, {}, {0, 0}}, {SnakeKind::Standard, {}, {2, 2}}, {SnakeKind::Standard, {}, {4, 4}}}, 3);
    CHECK(homology_type(three).kind == HomologyKind::Other);

    std::mt19937 rng(41);
    for (int it = 0; it < 80; ++it) {
        const u32 p = it % 2 ? 3 : 2;
        RandomSum r = random_descriptor_sum(rng, p, 8);
        HomologyType h = homology_type(r.complex);
        HomologyType moved = homology_type(apply_basis_change(r.complex, random_change(r.complex, rng)));
        HomologyType padded = homology_type(direct_sum({r.complex, realize_zero(p, {1, 3})}));
        CHECK(moved.kind == h.kind);
        CHECK(moved.free_u == h.free_u);
        CHECK(moved.free_v == h.free_v);
        CHECK(padded.kind == h.kind);
        CHECK(padded.free_u == h.free_u);
        // A standard complex gives one tower on each side; a horizontal snake
        // leaves both ends free in C/U, a vertical snake in C/V.
        std::size_t fu = 0, fv = 0;
        for (const auto& s : r.expected.snakes) {
            fu += s.kind == SnakeKind::Standard ? 1 : s.kind == SnakeKind::Horizontal ? 2 : 0;
            fv += s.kind == SnakeKind::Standard ? 1 : s.kind == SnakeKind::Vertical ? 2 : 0;
        }
        CHECK(h.free_u.size() == fu);
        CHECK(h.free_v.size() == fv);
    }
}

TEST_CASE("torsion orders") {
    CHECK(ord_u(load_corpus("trefoil_f2.cfl")) == 1);
    CHECK(ord_u(realize(SnakeDescriptor{SnakeKind::Standard, {2, -2, -1, 1, 3, -1}, {0, 0}}, 2)) == 3);
    CHECK(ord_v(realize(SnakeDescriptor{SnakeKind::Standard, {2, -2, -1, 1, 3, -1}, {0, 0}}, 2)) == 2);
    CHECK(ord_u(Complex(Ring::R1, 2)) == 0);
    CHECK(ord_u_from_homology(Complex(Ring::R1, 2)) == 0);
    for (const char* name : {"trefoil_f2.cfl", "figure_eight_f3.cfl", "example_t.cfl", "example_d.cfl",
                             "example_p.cfl", "swap_square.cfl", "example_e_mod2.cfl", "example_e_mod3.cfl"}) {
        Complex c = load_corpus(name);
        INFO(name);
        CHECK(ord_u(c) == ord_u_from_homology(c));
        CHECK(ord_v(c) == ord_v_from_homology(c));
    }
    std::mt19937 rng(43);
    for (int it = 0; it < 200; ++it) {
        RandomSum r = random_descriptor_sum(rng, it % 2 ? 3 : 2, 6);
        CHECK(ord_u(r.complex) == ord_u_from_homology(r.complex));
        CHECK(ord_v(r.complex) == ord_v_from_homology(r.complex));
        CHECK(ord_u(r.complex) == ord_u(r.expected));
    }
}

TEST_CASE("symmetry") {
    CHECK(is_symmetric(load_corpus("example_d.cfl")));
    CHECK(is_symmetric(load_corpus("example_p.cfl")));
    CHECK_FALSE(is_symmetric(load_corpus("example_t.cfl")));
    CHECK(is_symmetric(load_corpus("trefoil_f2.cfl")));

    std::mt19937 rng(47);
    for (int it = 0; it < 80; ++it) {
        const u32 p = it % 2 ? 3 : 2;
        RandomSum r = random_descriptor_sum(rng, p, 8);
        CHECK(is_symmetric(bar(r.complex)) == is_symmetric(r.complex));
        CHECK(is_symmetric(direct_sum({r.complex, bar(r.complex)})));
        // Bar acts summand by summand.
        Decomposition whole = decompose(bar(r.complex));
        std::vector<Complex> parts;
        for (const auto& s : r.expected.snakes) parts.push_back(bar(realize(s, p)));
        for (const auto& l : r.expected.systems) parts.push_back(bar(realize(l, p)));
        for (std::size_t k = 0; k < r.expected.zeros; ++k) parts.push_back(bar(realize_zero(p)));
        CHECK(decomposition_equal(whole, decompose(direct_sum(parts))));
    }
}

TEST_CASE("essential infiniteness") {
    CHECK_FALSE(essentially_infinite(load_corpus("figure_eight_f3.cfl")));
    CHECK(essentially_infinite(reduce_mod_uv(load_corpus("example_t.cfl"))));
    CHECK(essentially_infinite(reduce_mod_uv(load_corpus("example_d.cfl"))));
    CHECK_FALSE(essentially_infinite(load_corpus("example_e_mod2.cfl")));
    CHECK_FALSE(essentially_infinite(load_corpus("example_p.cfl")));
    CHECK(essentially_infinite(realize(LocalSystemDescriptor{{1, 1}, {0, 0}, 1, Matrix::identity(1, 2)}, 2)));
    CHECK(shape_drift({1, 1, -1, -1}) == 0);
    CHECK(shape_drift({2, 2, 3, -5, -4, 4}) == 1);
}

TEST_CASE("simplified bases") {
    SimplifiedBasisVerdict p = admits_simplified_basis(load_corpus("example_p.cfl"));
    CHECK(p.verdict == Verdict::No);
    SimplifiedBasisVerdict f = admits_simplified_basis(load_corpus("swap_square.cfl"));
    CHECK(f.verdict == Verdict::Yes);
    CHECK(f.constructive_converse);
    check_constructive_converse(decompose(reduce_mod_uv(load_corpus("swap_square.cfl"))));
    SimplifiedBasisVerdict t = admits_simplified_basis(load_corpus("trefoil_f2.cfl"));
    CHECK(t.verdict == Verdict::Yes);
    CHECK_FALSE(t.constructive_converse);
    CHECK(admits_simplified_basis(load_corpus("figure_eight_f3.cfl")).verdict == Verdict::No);

    // A three-cycle over F2 splits into two indecomposables that are not
    // permutation classes on their own; together they are.
    Matrix cycle = Matrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}, 2);
    Decomposition d3 = decompose(realize(LocalSystemDescriptor{{1, 1, -1, -1}, {0, 0}, 3, cycle}, 2));
    CHECK(d3.systems.size() == 2);
    CHECK(admits_simplified_basis(d3).verdict == Verdict::Yes);
    check_constructive_converse(d3);

    // Wider than the permutation search.
    LocalSystemDescriptor wide{{1, 1}, {0, 0}, 9, companion({1, 0, 0, 0, 0, 0, 0, 0, 0, 1}, 2)};
    Decomposition dw;
    dw.p = 2;
    dw.systems = {wide};
    CHECK(admits_simplified_basis(dw).verdict == Verdict::Unknown);

    std::mt19937 rng(53);
    for (int it = 0; it < 60; ++it) {
        RandomSum r = random_descriptor_sum(rng, it % 2 ? 3 : 2, 10, 3);
        SimplifiedBasisVerdict v = admits_simplified_basis(r.complex);
        if (v.verdict == Verdict::Yes) check_constructive_converse(decompose(r.complex));
        if (r.expected.systems.empty()) CHECK(v.verdict == Verdict::Yes);
    }
}
