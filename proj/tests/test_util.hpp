#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "cfl/classify.hpp"
#include "cfl/complex.hpp"
#include "cfl/gf.hpp"

namespace testutil {

inline cfl::Matrix random_matrix(std::size_t r, std::size_t c, cfl::u32 p, std::mt19937& rng) {
    cfl::Matrix m(r, c, p);
    std::uniform_int_distribution<cfl::u32> d(0, p - 1);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

inline cfl::Matrix random_invertible(std::size_t n, cfl::u32 p, std::mt19937& rng) {
    while (true) {
        cfl::Matrix m = random_matrix(n, n, p, rng);
        if (cfl::is_invertible(m)) return m;
    }
}

// Standard complex with letters b: odd positions horizontal, even vertical.
// A positive letter points the arrow from x_i to x_{i-1}.
inline cfl::Complex standard_complex(const std::vector<int>& b, cfl::u32 p, const std::string& prefix = "x") {
    cfl::Complex c(cfl::Ring::R1, p);
    for (std::size_t i = 0; i <= b.size(); ++i) c.add_generator(prefix + std::to_string(i), 0, 0);
    for (std::size_t i = 1; i <= b.size(); ++i) {
        int len = b[i - 1] > 0 ? b[i - 1] : -b[i - 1];
        bool horizontal = i % 2 == 1;
        std::size_t s = b[i - 1] > 0 ? i : i - 1, t = b[i - 1] > 0 ? i - 1 : i;
        c.add_term(s, t, 1, horizontal ? len : 0, horizontal ? 0 : len);
    }
    cfl::infer_gradings(c, {{prefix + "0", {0, 0}}});
    return c;
}

// A random homogeneous invertible change of basis of c.
inline cfl::BasisChange random_change(const cfl::Complex& c, std::mt19937& rng) {
    auto gr = cfl::gradings_of(c);
    std::uniform_int_distribution<cfl::u32> d(0, c.p - 1);
    while (true) {
        cfl::GMat b{cfl::Matrix(c.rank(), c.rank(), c.p), gr, gr, {0, 0}, c.ring};
        for (std::size_t i = 0; i < c.rank(); ++i)
            for (std::size_t j = 0; j < c.rank(); ++j)
                if (b.allowed(i, j)) b.a(i, j) = d(rng);
        try {
            cfl::ginverse(b);
        } catch (const cfl::NotInvertible&) {
            continue;
        }
        return {c.gens, b.a};
    }
}

inline cfl::Complex shuffle(const cfl::Complex& c, std::mt19937& rng) {
    std::vector<std::size_t> perm(c.rank());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    return cfl::permute(c, perm);
}

// Direct sum of a few random standard complexes with shifted anchors, then
// scrambled by a random basis change.
inline cfl::Complex random_scrambled(std::mt19937& rng, cfl::u32 p, std::size_t pieces, int max_len = 3) {
    std::vector<cfl::Complex> cs;
    std::uniform_int_distribution<int> len(1, max_len), half(0, 2), sign(0, 1), shift(-2, 2);
    for (std::size_t k = 0; k < pieces; ++k) {
        std::vector<int> b(2 * half(rng));
        for (auto& x : b) x = len(rng) * (sign(rng) ? 1 : -1);
        cfl::Complex c = standard_complex(b, p, "p" + std::to_string(k) + "x");
        int su = shift(rng), sv = shift(rng);
        for (auto& g : c.gens) {
            g.gu += 2 * su;
            g.gv += 2 * sv;
        }
        cs.push_back(c);
    }
    cfl::Complex s = cfl::direct_sum(cs);
    s = cfl::apply_basis_change(s, random_change(s, rng));
    return shuffle(s, rng);
}

inline std::vector<int> rev_neg(const std::vector<int>& s) {
    std::vector<int> r(s.rbegin(), s.rend());
    for (auto& x : r) x = -x;
    return r;
}

// Reflection of a period that keeps horizontal letters in odd positions.
inline std::vector<int> reflect(const std::vector<int>& s) {
    const std::size_t n = s.size();
    std::vector<int> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = -s[(2 * n - i - 2) % n];
    return r;
}

inline int random_letter(std::mt19937& rng, int max_len) {
    std::uniform_int_distribution<int> len(1, max_len), sign(0, 1);
    return len(rng) * (sign(rng) ? 1 : -1);
}

inline bool closes(const std::vector<int>& s) {
    cfl::Grading g;
    for (std::size_t i = 0; i < s.size(); ++i)
        g = g + cfl::letter_shift(i % 2 == 0 ? cfl::Direction::Horizontal : cfl::Direction::Vertical, s[i]);
    return g == cfl::Grading{};
}

// A shape that closes up in the plane, in canonical form with a minimal period.
inline std::vector<int> random_shape(std::mt19937& rng, std::size_t max_half) {
    std::uniform_int_distribution<std::size_t> half(1, max_half);
    while (true) {
        std::vector<int> s(2 * half(rng));
        for (auto& x : s) x = random_letter(rng, 2);
        if (!closes(s) || cfl::minimal_even_period(s).size() != s.size()) continue;
        return cfl::canonical_shape(s);
    }
}

// Holonomy with a single elementary divisor, as an indecomposable summand has.
inline cfl::Matrix random_indecomposable_holonomy(std::mt19937& rng, cfl::u32 p, std::size_t max_w) {
    std::uniform_int_distribution<std::size_t> wd(1, max_w);
    cfl::Matrix a = random_invertible(wd(rng), p, rng);
    return cfl::companion(cfl::elementary_divisors(a).front(), p);
}

inline cfl::SnakeDescriptor random_snake(std::mt19937& rng, cfl::u32 p, cfl::Grading anchor) {
    std::uniform_int_distribution<int> kind(0, 2), half(0, 2);
    cfl::SnakeDescriptor d;
    d.kind = static_cast<cfl::SnakeKind>(kind(rng));
    std::size_t n = 2 * half(rng) + (d.kind == cfl::SnakeKind::Standard ? 0 : 1);
    for (std::size_t i = 0; i < n; ++i) d.seq.push_back(random_letter(rng, 3));
    d.anchor = anchor;
    if (d.kind != cfl::SnakeKind::Standard && cfl::compare_words(rev_neg(d.seq), d.seq) > 0) {
        cfl::Complex c = cfl::realize(d, p);
        d.anchor = c.gens.back().gr();
        d.seq = rev_neg(d.seq);
    }
    return d;
}

// Direct sum of random snakes, indecomposable local systems and zero
// complexes of total rank at most max_rank, with the expected decomposition.
struct RandomSum {
    cfl::Complex complex;
    cfl::Decomposition expected;
};

inline RandomSum random_descriptor_sum(std::mt19937& rng, cfl::u32 p, std::size_t max_rank, std::size_t max_w = 2) {
    RandomSum out;
    out.expected.p = p;
    std::vector<cfl::Complex> parts;
    std::size_t rank = 0;
    std::uniform_int_distribution<int> count(1, 4), coin(0, 2), shift(-2, 2);
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
        cfl::Grading anchor{shift(rng), shift(rng)};
        const int pick = coin(rng);
        if (pick == 0) {
            cfl::LocalSystemDescriptor l{random_shape(rng, 2), anchor, 1, random_indecomposable_holonomy(rng, p, max_w)};
            l.w = l.holonomy.rows();
            if (rank + l.w * l.shape.size() > max_rank) continue;
            rank += l.w * l.shape.size();
            parts.push_back(cfl::realize(l, p));
            out.expected.systems.push_back(l);
        } else if (pick == 1 && coin(rng) == 0) {
            if (rank + 2 > max_rank) continue;
            rank += 2;
            parts.push_back(cfl::realize_zero(p, anchor));
            ++out.expected.zeros;
        } else {
            cfl::SnakeDescriptor s = random_snake(rng, p, anchor);
            if (rank + s.seq.size() + 1 > max_rank) continue;
            rank += s.seq.size() + 1;
            parts.push_back(cfl::realize(s, p));
            out.expected.snakes.push_back(s);
        }
    }
    if (parts.empty()) {
        cfl::SnakeDescriptor s{cfl::SnakeKind::Standard, {}, {0, 0}};
        parts.push_back(cfl::realize(s, p));
        out.expected.snakes.push_back(s);
    }
    out.complex = cfl::direct_sum(parts);
    out.complex = cfl::apply_basis_change(out.complex, random_change(out.complex, rng));
    out.complex = shuffle(out.complex, rng);
    return out;
}

#ifdef CFL_CORPUS_DIR
inline cfl::Complex load_corpus(const std::string& name) {
    std::ifstream in(std::string(CFL_CORPUS_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return cfl::parse_complex(ss.str());
}
#endif

}  // namespace testutil
