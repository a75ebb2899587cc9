#include <fstream>
#include <random>
#include <sstream>

#include "cfl/complex.hpp"
#include "doctest.h"

using namespace cfl;

namespace {

Complex trefoil(u32 p = 2) {
    return parse_complex("char " + std::to_string(p) +
                         "\nring r1\nanchor b 0 0\ngen a\ngen b\ngen c\nd a b 1 1 0\nd c b 1 0 1\n");
}

// S_h(1,2,1) drawn at (0,2),(1,2),(1,4),(2,4) with gradings read off the picture.
Complex staircase_h() {
    return parse_complex(
        "char 2\nring r1\nanchor x0 0 0\ngen x0\ngen x1\ngen x2\ngen x3\n"
        "d x1 x0 1 1 0\nd x1 x2 1 0 2\nd x3 x2 1 1 0\n");
}

}  // namespace

TEST_CASE("trefoil is a valid complex with inferred gradings") {
    Complex t = trefoil();
    CHECK(is_valid(t));
    CHECK(t.gens[0].gr() == Grading{-1, 1});
    CHECK(t.gens[2].gr() == Grading{1, -1});
    CHECK(parse_complex(print_complex(t)) == t);
}

TEST_CASE("validation catches d^2 and grading failures") {
    Complex c(Ring::R1, 2);
    c.add_generator("a", 2, 2);
    c.add_generator("b", 1, 1);
    c.add_generator("c", 0, 0);
    c.add_term("a", "b", 1, 0, 0);
    c.add_term("b", "c", 1, 0, 0);
    auto v = validate(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("d^2") != std::string::npos);

    Complex g(Ring::R1, 2);
    g.add_generator("a", 0, 0);
    g.add_generator("b", 0, 0);
    g.add_term("a", "b", 1, 1, 0);
    CHECK_FALSE(is_valid(g));
    CHECK_THROWS_AS(parse_complex("char 4\ngen a 0 0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_complex("char 2\ngen a 0 0\ngen a 0 0\n"), SyntaxError);
    CHECK_THROWS_AS(parse_complex("char 2\ngen a 0 0\nfoo\n"), SyntaxError);
}

TEST_CASE("figure-eight over F3 squares to zero") {
    Complex f = parse_complex(
        "char 3\nring r1\nanchor x 0 0\nanchor a 1 1\ngen a\ngen b\ngen c\ngen d\ngen x\n"
        "d a b 1 0 1\nd a c 1 1 0\nd b d 2 1 0\nd c d 1 0 1\n");
    CHECK(is_valid(f));
    CHECK(f.gens[3].gr() == Grading{1, 1});
    // The same square over F[U,V] needs the sign to close up.
    Complex g = f;
    g.ring = Ring::FUV;
    CHECK(is_valid(g));
    g.d[1][0].m.coef = 1;
    CHECK_FALSE(is_valid(g));
}

TEST_CASE("bar swaps the two variables") {
    Complex h = staircase_h();
    CHECK(is_valid(h));
    Complex v = bar(h);
    CHECK(is_valid(v));
    CHECK(bar(v) == h);
    // S_v(1,2,1) has the long arrow horizontal.
    CHECK(v.d[1][1].m.u == 2);
    CHECK(v.gens[2].gr() == Grading{h.gens[2].gv, h.gens[2].gu});
}

TEST_CASE("graded inverse and basis changes") {
    Complex t = trefoil(3);
    // b' = b, a' = a + V b is not homogeneous, a' = 2a is.
    BasisChange s{t.gens, Matrix::identity(3, 3)};
    s.m(0, 0) = 2;
    Complex t2 = apply_basis_change(t, s);
    CHECK(is_valid(t2));
    CHECK(t2.d[0][0].m.coef == 2);

    std::vector<Grading> gr = {{-4, 0}, {-2, 0}, {0, 0}, {-4, 2}};
    GMat b = gidentity(gr, Ring::R1, 5);
    b.a(0, 1) = 3;
    b.a(1, 2) = 4;
    b.a(0, 2) = 1;
    b.a(0, 3) = 2;
    GMat bi = ginverse(b);
    CHECK(gmul(b, bi).a.is_identity());
    CHECK(gmul(bi, b).a.is_identity());
    b.a(1, 1) = 0;
    CHECK_THROWS_AS(ginverse(b), NotInvertible);
}

TEST_CASE("stripping zero complexes") {
    Complex c = parse_complex(
        "char 3\nring r1\nanchor b 0 0\nanchor y 5 5\ngen a\ngen b\ngen c\ngen x\ngen y\n"
        "d a b 1 1 0\nd c b 1 0 1\nd x y 1 0 0\n");
    auto r = strip_zero_complexes(c);
    CHECK(r.zero_count == 1);
    CHECK(r.reduced.rank() == 3);
    CHECK_FALSE(has_length_zero_arrow(r.reduced));
    CHECK(is_valid(apply_basis_change(c, r.change)));

    // A length zero arrow tangled with the rest of the complex.
    Complex e(Ring::R1, 2);
    e.add_generator("s", 1, 1);
    e.add_generator("t", 0, 0);
    e.add_generator("w", 1, 1);
    e.add_generator("z", 0, 0);
    e.add_term("s", "t", 1, 0, 0);
    e.add_term("w", "t", 1, 0, 0);
    e.add_term("w", "z", 1, 0, 0);
    REQUIRE(is_valid(e));
    auto er = strip_zero_complexes(e);
    CHECK(er.zero_count == 2);
    CHECK(er.reduced.rank() == 0);
    Complex split = apply_basis_change(e, er.change);
    CHECK(split.rank() == 4);
    for (std::size_t k = 0; k < 4; k += 2) {
        REQUIRE(split.d[k].size() == 1);
        CHECK(split.d[k][0].target == k + 1);
        CHECK(split.d[k + 1].empty());
    }
}

TEST_CASE("direct sum and permutation") {
    Complex t = trefoil();
    Complex s = direct_sum({t, t});
    CHECK(s.rank() == 6);
    CHECK(s.gens[3].id == "2.a");
    CHECK(is_valid(s));
    Complex q = permute(t, {2, 0, 1});
    CHECK(is_valid(q));
    CHECK(q.gens[0].id == "c");
    CHECK(q.d[0][0].target == 2);
}

TEST_CASE("characteristic override") {
    std::ifstream in(std::string(CFL_CORPUS_DIR) + "/example_e.cfl");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    Complex three = parse_complex(text);
    CHECK(three.p == 3);
    CHECK(three.term_count() == 12);
    Complex two = parse_complex(text, 2u);
    CHECK(two.p == 2);
    CHECK(two.term_count() == 8);
    CHECK(two.gens == three.gens);
    CHECK_THROWS_AS(parse_complex(text, 4u), NotPrime);
    CHECK_THROWS_AS(parse_complex("char 2\ngen a 0 0\ngen b -1 -1\nd a b 2 0 0\n"), SyntaxError);
}
