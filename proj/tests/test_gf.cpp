#include <map>
#include <numeric>
#include <random>
#include <set>

#include "cfl/gf.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cfl;

namespace {

// Every invertible w x w matrix over F_p, by enumerating all entry vectors.
std::vector<Matrix> all_invertible(std::size_t w, u32 p) {
    std::vector<Matrix> out;
    std::size_t cells = w * w;
    std::vector<u32> digits(cells, 0);
    while (true) {
        Matrix m(w, w, p);
        for (std::size_t k = 0; k < cells; ++k) m(k / w, k % w) = digits[k];
        if (is_invertible(m)) out.push_back(m);
        std::size_t pos = 0;
        while (pos < cells && digits[pos] == p - 1) digits[pos++] = 0;
        if (pos == cells) break;
        ++digits[pos];
    }
    return out;
}

}  // namespace

TEST_CASE("field elements validate the characteristic") {
    CHECK_THROWS_AS(FieldElem(1, 4), NotPrime);
    FieldElem a(2, 3);
    CHECK((a * a).value == 1);
    CHECK(a.inverse().value == 2);
    CHECK((-FieldElem(1, 5)).value == 4);
}

TEST_CASE("invert") {
    CHECK(invert(Matrix::identity(3, 5)).is_identity());
    auto m = Matrix::from_rows({{1, 1}, {0, 1}}, 2);
    CHECK(invert(m) == m);
    CHECK(invert(Matrix::from_rows({{2}}, 3)) == Matrix::from_rows({{2}}, 3));
    CHECK_THROWS_AS(invert(Matrix::from_rows({{1, 1}, {1, 1}}, 2)), Singular);
    std::mt19937 rng(7);
    for (int t = 0; t < 50; ++t) {
        Matrix r = testutil::random_invertible(5, 7, rng);
        CHECK((r * invert(r)).is_identity());
    }
}

TEST_CASE("graphical product of elementary matrices") {
    // P = E32 T23 E13 T12 D2^2 E21 over F3, indices shifted to start at 0.
    std::vector<ElementaryFactor> fs = {
        ElementaryFactor::add_unit(2, 1), ElementaryFactor::transposition(1, 2),
        ElementaryFactor::add_unit(0, 2), ElementaryFactor::transposition(0, 1),
        ElementaryFactor::scale(1, 2),    ElementaryFactor::add_unit(1, 0)};
    CHECK(product(fs, 3, 3) == Matrix::from_rows({{2, 2, 1}, {0, 0, 1}, {1, 0, 1}}, 3));
}

TEST_CASE("ltu factorization") {
    auto id = ltu_factorize(Matrix::identity(3, 2));
    CHECK(id.L.empty());
    CHECK(id.U.empty());
    CHECK(id.T == std::vector<std::size_t>{0, 1, 2});

    auto sw = ltu_factorize(permutation_matrix({1, 0}, 2));
    CHECK(sw.L.empty());
    CHECK(sw.U.empty());
    CHECK(sw.T == std::vector<std::size_t>{1, 0});

    // The top-left entry is nonzero, so the permutation part is forced to be
    // the identity for lower L and upper U.
    auto m = Matrix::from_rows({{1, 1}, {1, 0}}, 2);
    auto f = ltu_factorize(m);
    CHECK(f.T == std::vector<std::size_t>{0, 1});
    CHECK(product(f.L, 2, 2) * permutation_matrix(f.T, 2) * product(f.U, 2, 2) == m);

    std::mt19937 rng(11);
    for (u32 p : {2u, 3u, 5u}) {
        for (int t = 0; t < 100; ++t) {
            Matrix r = testutil::random_invertible(4, p, rng);
            auto g = ltu_factorize(r);
            CHECK(product(g.L, 4, p) * permutation_matrix(g.T, p) * product(g.U, 4, p) == r);
            for (const auto& e : g.L) {
                CHECK(e.kind != FactorKind::Transposition);
                if (e.kind == FactorKind::AddUnit) CHECK(e.i > e.j);
            }
            for (const auto& e : g.U) {
                CHECK(e.kind != FactorKind::Transposition);
                if (e.kind == FactorKind::AddUnit) CHECK(e.i < e.j);
            }
        }
    }
    CHECK_THROWS_AS(ltu_factorize(Matrix::from_rows({{1, 1}, {1, 1}}, 2)), Singular);
}

TEST_CASE("elementary factorization") {
    CHECK(elementary_factorize(Matrix::identity(4, 3)).empty());
    auto d = Matrix::from_rows({{2, 0}, {0, 1}}, 3);
    CHECK(elementary_factorize(d) == std::vector<ElementaryFactor>{ElementaryFactor::scale(0, 2)});
    auto e = Matrix::from_rows({{1, 2}, {0, 1}}, 3);
    CHECK(elementary_factorize(e) == std::vector<ElementaryFactor>{
                                         ElementaryFactor::scale(0, 2), ElementaryFactor::add_unit(0, 1),
                                         ElementaryFactor::scale(0, 2)});
    std::mt19937 rng(5);
    for (int t = 0; t < 100; ++t) {
        Matrix r = testutil::random_invertible(5, 3, rng);
        auto fs = elementary_factorize(r);
        CHECK(product(fs, 5, 3) == r);
        for (const auto& x : fs)
            if (x.kind == FactorKind::Scale) CHECK(x.lambda != 0);
    }
}

TEST_CASE("polynomial factorization") {
    auto f = poly_factor({1, 1, 1}, 2);
    REQUIRE(f.size() == 1);
    CHECK(f[0].second == 1);
    auto g = poly_factor({1, 0, 1}, 2);
    REQUIRE(g.size() == 1);
    CHECK(g[0].first == Poly{1, 1});
    CHECK(g[0].second == 2);
    // x^3 - x = x (x - 1) (x + 1) over F_3
    auto h = poly_factor({0, 2, 0, 1}, 3);
    CHECK(h.size() == 3);
}

TEST_CASE("rational canonical form and conjugacy") {
    CHECK(rational_canonical_form(Matrix::identity(3, 2)).is_identity());
    auto j = Matrix::from_rows({{1, 1}, {0, 1}}, 2);
    auto s = Matrix::from_rows({{0, 1}, {1, 0}}, 2);
    auto q = Matrix::from_rows({{1, 1}, {1, 0}}, 2);
    CHECK(rational_canonical_form(j) == rational_canonical_form(s));
    CHECK(rational_canonical_form(q) != rational_canonical_form(s));
    CHECK(rational_canonical_form(q) == Matrix::from_rows({{0, 1}, {1, 1}}, 2));
    CHECK(conjugate_test(j, s));
    CHECK_FALSE(conjugate_test(q, Matrix::identity(2, 2)));
    CHECK_THROWS_AS(conjugate_test(j, Matrix::identity(3, 2)), DimensionMismatch);

    // Brute force over GL2(F2): no conjugator takes q to the identity or to s.
    auto gl2 = all_invertible(2, 2);
    CHECK(gl2.size() == 6);
    for (const auto& g : gl2) {
        CHECK_FALSE(g * q * invert(g) == Matrix::identity(2, 2));
        CHECK_FALSE(g * q * invert(g) == s);
    }

    std::mt19937 rng(3);
    for (int t = 0; t < 50; ++t) {
        Matrix a = testutil::random_invertible(4, 3, rng);
        Matrix r = rational_canonical_form(a);
        CHECK(rational_canonical_form(r) == r);
        Matrix g = testutil::random_invertible(4, 3, rng);
        CHECK(rational_canonical_form(g * a * invert(g)) == r);
    }
}

TEST_CASE("conjugacy classes agree with orbits for small general linear groups") {
    for (auto [w, p] : {std::pair<std::size_t, u32>{1, 2}, {2, 2}, {3, 2}, {1, 3}, {2, 3}, {3, 3}}) {
        auto group = all_invertible(w, p);
        std::map<std::string, std::size_t> index;
        for (std::size_t k = 0; k < group.size(); ++k) index[group[k].to_string()] = k;
        // Union-find over conjugation by a generating set of elementary matrices.
        std::vector<std::size_t> parent(group.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::vector<Matrix> gens;
        for (std::size_t i = 0; i < w; ++i) {
            for (u32 c = 2; c < p; ++c) gens.push_back(ElementaryFactor::scale(i, c).to_matrix(w, p));
            for (std::size_t k = 0; k < w; ++k)
                if (k != i) gens.push_back(ElementaryFactor::add_unit(i, k).to_matrix(w, p));
        }
        for (std::size_t k = 0; k < group.size(); ++k)
            for (const auto& g : gens) {
                std::size_t other = index.at((g * group[k] * invert(g)).to_string());
                parent[find(k)] = find(other);
            }
        std::map<std::size_t, std::string> rcf_of_orbit;
        std::set<std::string> seen;
        bool consistent = true;
        for (std::size_t k = 0; k < group.size(); ++k) {
            std::string r = rational_canonical_form(group[k]).to_string();
            auto [it, fresh] = rcf_of_orbit.emplace(find(k), r);
            if (!fresh && it->second != r) consistent = false;
        }
        for (const auto& [root, r] : rcf_of_orbit)
            if (!seen.insert(r).second) consistent = false;
        CHECK(consistent);
    }
}

TEST_CASE("permutation containment") {
    CHECK(class_contains_permutation(Matrix::identity(3, 2)));
    CHECK(class_contains_permutation(Matrix::from_rows({{1, 1}, {0, 1}}, 2)));
    CHECK_FALSE(class_contains_permutation(Matrix::from_rows({{1, 1}, {1, 0}}, 2)));
    CHECK_THROWS_AS(class_contains_permutation(Matrix::identity(9, 2)), SizeLimitExceeded);
}

TEST_CASE("primary decomposition splits into companion blocks") {
    std::mt19937 rng(17);
    for (u32 p : {2u, 3u}) {
        for (int t = 0; t < 60; ++t) {
            std::size_t w = 1 + t % 5;
            Matrix a = testutil::random_invertible(w, p, rng);
            if (t % 3 == 0) a = Matrix::identity(w, p);
            auto pd = primary_decomposition(a);
            std::vector<Matrix> blocks;
            for (const auto& d : pd.divisors) blocks.push_back(companion(d, p));
            CHECK(invert(pd.change) * a * pd.change == Matrix::block_diagonal(blocks, p));
            CHECK(pd.divisors == elementary_divisors(a));
        }
    }
}
