#include <random>

#include "cfl/engine.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cfl;

namespace {

Complex trefoil() {
    return parse_complex("char 2\nanchor b 0 0\ngen a\ngen b\ngen c\nd a b 1 1 0\nd c b 1 0 1\n");
}

Complex figure_eight() {
    return parse_complex(
        "char 3\nanchor x 0 0\nanchor a 1 1\ngen a\ngen b\ngen c\ngen d\ngen x\n"
        "d a b 1 0 1\nd a c 1 1 0\nd b d 2 1 0\nd c d 1 0 1\n");
}

void check_normal_form(const Complex& c) {
    std::vector<EngineStep> trace;
    NormalForm nf = normal_form(c, &trace);
    for (const auto& st : trace) {
        CHECK(check_simplified(c, st.state.x));
        CHECK(check_simplified(c, st.state.y));
    }
    std::size_t total = 0;
    for (const auto& pc : nf.pieces) total += pc.size;
    CHECK(total == c.rank());
}

}  // namespace

TEST_CASE("letter order") {
    CHECK(letter_key(-1) < letter_key(-2));
    CHECK(letter_key(-5) < letter_key(0));
    CHECK(letter_key(0) < letter_key(3));
    CHECK(letter_key(3) < letter_key(2));
    CHECK(letter_key(2) < letter_key(1));
    CHECK(compare_words({-1}, {1}) == -1);
    CHECK(compare_words({3}, {2}) == -1);
    CHECK(compare_words({0, 0}, {}, 5) == 0);
}

TEST_CASE("trefoil word positions") {
    auto td = simplify_both(trefoil());
    auto pos = word_positions(td, 8);
    REQUIRE(pos.size() == 3);
    for (const auto& q : pos) {
        CHECK(q.mult == 1);
        if (q.g == Grading{0, 0}) {
            CHECK(q.a == std::vector<int>{1, 0});
            CHECK(q.b == std::vector<int>{1, 0});
        }
        if (q.g == Grading{1, -1}) {
            CHECK(q.a == std::vector<int>{-1, 1, 0});
            CHECK(q.b == std::vector<int>{0});
        }
    }
    auto orbits = link_positions(pos, 8);
    REQUIRE(orbits.size() == 1);
    CHECK_FALSE(orbits[0].band);
    CHECK(orbits[0].positions.size() == 3);
}

TEST_CASE("normal form on small examples") {
    check_normal_form(trefoil());
    auto nf = normal_form(figure_eight());
    REQUIRE(nf.pieces.size() == 2);
    std::size_t bands = 0;
    for (const auto& pc : nf.pieces) bands += pc.band;
    CHECK(bands == 1);
}

TEST_CASE("normal form on random scrambled complexes") {
    std::mt19937 rng(5);
    for (u32 p : {2u, 3u})
        for (int t = 0; t < 100; ++t) check_normal_form(testutil::random_scrambled(rng, p, 1 + t % 4));
}
