#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cfl/invariants.hpp"
#include "cfl/oracle.hpp"
#include "cfl/twostory.hpp"
#include "test_util.hpp"

using namespace cfl;
using namespace testutil;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

Complex reduced(const Complex& c) { return c.ring == Ring::FUV ? reduce_mod_uv(c) : c; }

struct Named {
    std::string name;
    Complex complex;
};

const char* kCorpus[] = {"trefoil_f2.cfl", "figure_eight_f3.cfl", "example_t.cfl",      "example_d.cfl",
                         "example_p.cfl",  "swap_square.cfl",     "example_e_mod2.cfl", "example_e_mod3.cfl"};

std::vector<Named> corpus_suite() {
    std::vector<Named> out;
    for (const char* n : kCorpus) out.push_back({n, load_corpus(n)});
    return out;
}

// A random valid complex: random gradings in a small box and random
// coefficients on the allowed arrows, retried until d^2 = 0.
Complex random_valid(std::mt19937& rng, u32 p, std::size_t max_rank, int spread) {
    std::uniform_int_distribution<std::size_t> rank_d(1, max_rank);
    std::uniform_int_distribution<int> coord(0, spread);
    std::uniform_int_distribution<u32> coef(0, p - 1);
    while (true) {
        Complex c(Ring::R1, p);
        const std::size_t n = rank_d(rng);
        for (std::size_t k = 0; k < n; ++k) c.add_generator("g" + std::to_string(k), coord(rng), coord(rng));
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t) {
                int eu, ev;
                if (!entry_exponents(c.gens[s].gr(), c.gens[t].gr(), {1, 1}, Ring::R1, eu, ev)) continue;
                if (u32 a = coef(rng)) c.add_term(s, t, a, eu, ev);
            }
        if (is_valid(c)) return c;
    }
}

std::string count(std::size_t n, const char* what) { return std::to_string(n) + " " + what; }

// ---------------------------------------------------------------------------

Outcome corpus_reproduction() {
    Outcome o;
    auto timed = [&](const char* name, const std::function<void(const Complex&)>& f) {
        Complex c = load_corpus(name);
        Timer t;
        f(c);
        if (t.seconds() >= 1.0) o.fail(std::string(name) + " took " + std::to_string(t.seconds()) + " s");
    };
    timed("trefoil_f2.cfl", [&](const Complex& c) {
        Decomposition d = decompose(c);
        bool ok = d.snakes.size() == 1 && d.systems.empty() && d.zeros == 0 && c.rank() == 3 &&
                  d.snakes[0].seq.size() == 2 && std::abs(d.snakes[0].seq[0]) == 1 && std::abs(d.snakes[0].seq[1]) == 1;
        if (!ok) o.fail("trefoil: " + render(d));
    });
    timed("figure_eight_f3.cfl", [&](const Complex& c) {
        Decomposition d = decompose(c);
        bool ok = d.snakes.size() == 1 && d.snakes[0].kind == SnakeKind::Standard && d.snakes[0].seq.empty() &&
                  d.systems.size() == 1 && d.systems[0].w == 1 && d.systems[0].shape.size() == 4 &&
                  !d.systems[0].holonomy.is_identity() && d.zeros == 0;
        if (!ok) o.fail("figure-eight: " + render(d));
    });
    timed("example_e_mod2.cfl", [&](const Complex& c) {
        Decomposition d = decompose(c);
        bool ok = d.snakes.empty() && d.zeros == 0 && d.systems.size() == 2;
        for (const auto& l : d.systems) ok = ok && l.shape.size() == 4 && l.w == 1 && l.holonomy.is_identity();
        if (!ok) o.fail("E over F2: " + render(d));
    });
    timed("example_e_mod3.cfl", [&](const Complex& c) {
        Decomposition d = decompose(c);
        if (!(d.snakes.empty() && d.systems.empty() && d.zeros == 4)) o.fail("E over F3: " + render(d));
    });
    for (const char* name : {"example_t.cfl", "example_d.cfl"})
        timed(name, [&](const Complex& c) {
            Decomposition d = decompose(reduce_mod_uv(c));
            bool drift = false;
            for (const auto& l : d.systems) drift = drift || shape_drift(l.shape) != 0;
            if (!drift || !essentially_infinite(c)) o.fail(std::string(name) + ": no local system with drift");
        });
    timed("example_p.cfl", [&](const Complex& c) {
        if (admits_simplified_basis(c).verdict != Verdict::No) o.fail("P: verdict is not no");
    });
    timed("swap_square.cfl", [&](const Complex& c) {
        if (admits_simplified_basis(c).verdict != Verdict::Yes) o.fail("swap square: verdict is not yes");
    });
    if (o.ok) o.detail = "8 corpus files, each under 1 s";
    return o;
}

struct OracleSuite {
    std::vector<Complex> exhaustive;
    std::vector<Complex> sampled;
    std::size_t resampled = 0;
};

Outcome oracle_equivalence(OracleSuite& suite) {
    Outcome o;
    Timer timer;
    for (std::size_t n = 1; n <= 3; ++n)
        for (auto& c : all_complexes(n, 4, 2)) suite.exhaustive.push_back(std::move(c));
    for (const Complex& c : suite.exhaustive) {
        SearchBudget b;
        if (!decomposition_equal(brute_force_decompose(c, b), decompose(c)))
            o.fail("exhaustive disagreement:\n" + print_complex(c));
    }
    std::mt19937 rng(2024);
    while (suite.sampled.size() < 500) {
        const u32 p = suite.sampled.size() % 2 ? 3 : 2;
        Complex c = suite.sampled.size() % 4 < 2 ? random_descriptor_sum(rng, p, 5).complex : random_valid(rng, p, 5, 4);
        SearchBudget b;
        b.p = p;
        b.max_rank = 5;
        Decomposition oracle;
        try {
            oracle = brute_force_decompose(c, b);
        } catch (const BudgetExceeded&) {
            ++suite.resampled;
            continue;
        }
        if (!decomposition_equal(oracle, decompose(c))) o.fail("sampled disagreement:\n" + print_complex(c));
        suite.sampled.push_back(c);
    }
    if (o.ok)
        o.detail = count(suite.exhaustive.size(), "exhaustive") + " + " + count(suite.sampled.size(), "sampled") +
                   " (" + count(suite.resampled, "resampled over budget") + "), " +
                   std::to_string(static_cast<int>(timer.seconds())) + " s";
    return o;
}

Outcome uniqueness(std::vector<Complex>& suite) {
    Outcome o;
    std::mt19937 rng(3033);
    for (int it = 0; it < 1000; ++it) {
        const u32 p = it % 2 ? 3 : 2;
        RandomSum r = random_descriptor_sum(rng, p, 6);
        suite.push_back(r.complex);
        Decomposition base = decompose(r.complex);
        Complex moved = shuffle(apply_basis_change(r.complex, random_change(r.complex, rng)), rng);
        if (!decomposition_equal(base, decompose(moved)) || !decomposition_equal(base, r.expected))
            o.fail("decomposition moved under a basis change:\n" + print_complex(r.complex));
    }
    if (o.ok) o.detail = "1000 complexes of rank <= 6";
    return o;
}

Outcome round_trip() {
    Outcome o;
    std::mt19937 rng(4044);
    for (int it = 0; it < 1000; ++it) {
        const u32 p = it % 2 ? 3 : 2;
        Decomposition d = random_descriptor_sum(rng, p, 10, 3).expected;
        if (!decomposition_equal(decompose(realize(d)), d)) o.fail("round trip failed for\n" + render(d));
    }
    if (o.ok) o.detail = "1000 descriptor multisets of rank <= 10";
    return o;
}

Outcome termination(const std::vector<const Complex*>& all) {
    Outcome o;
    std::size_t worst = 0;
    for (const Complex* c : all) {
        StripResult st = strip_zero_complexes(reduced(*c));
        const std::size_t n = st.reduced.rank();
        if (n == 0) continue;
        try {
            DepthRun run = run_to_depth_infinity(build(st.reduced));
            worst = std::max(worst, run.rounds);
            if (run.rounds > n * (n - 1)) o.fail("bound exceeded at rank " + std::to_string(n));
        } catch (const BoundExceeded& e) {
            o.fail(e.what());
        }
    }
    if (o.ok) o.detail = count(all.size(), "inputs") + ", at most " + std::to_string(worst) + " rounds";
    return o;
}

Outcome torsion_cross_check(const std::vector<const Complex*>& all, const OracleSuite& small) {
    Outcome o;
    for (const Complex* c : all)
        if (ord_u(*c) != ord_u_from_homology(*c)) o.fail("ord_u disagrees:\n" + print_complex(*c));
    // The dense truncated-homology count as a second witness on small inputs.
    for (const auto* s : {&small.exhaustive, &small.sampled})
        for (const Complex& c : *s)
            if (ord_u(c) != dense_torsion_order_u(c)) o.fail("dense ord_u disagrees:\n" + print_complex(c));
    if (o.ok) o.detail = count(all.size(), "inputs");
    return o;
}

Outcome symmetry(const std::vector<const Complex*>& random) {
    Outcome o;
    if (!is_symmetric(load_corpus("example_d.cfl"))) o.fail("D is not symmetric");
    if (!is_symmetric(load_corpus("example_p.cfl"))) o.fail("P is not symmetric");
    if (is_symmetric(load_corpus("example_t.cfl"))) o.fail("T is symmetric");
    for (const Complex* c : random) {
        Decomposition d = decompose(*c);
        std::vector<Complex> parts;
        for (const auto& s : d.snakes) parts.push_back(bar(realize(s, d.p)));
        for (const auto& l : d.systems) parts.push_back(bar(realize(l, d.p)));
        for (std::size_t k = 0; k < d.zeros; ++k) parts.push_back(bar(realize_zero(d.p)));
        if (!decomposition_equal(decompose(bar(*c)), decompose(direct_sum(parts))))
            o.fail("bar does not act summand by summand:\n" + print_complex(*c));
    }
    if (o.ok) o.detail = "D, P symmetric; T not; " + count(random.size(), "random inputs");
    return o;
}

// Both floors simplified after every step; every logged change inverts back
// to the input.
void check_step(const Complex& c, const TransitionData& st, const std::string& where, Outcome& o) {
    if (!check_simplified(c, st.x)) o.fail(where + ": bottom floor not vertically simplified");
    if (!check_simplified(c, st.y)) o.fail(where + ": top floor not horizontally simplified");
    for (const BasisChange* ch : {&st.x.change, &st.y.change}) {
        GMat b = basis_matrix(*ch, c.gens, c.ring);
        GMat inv = ginverse(b);
        Complex there = apply_basis_change(c, *ch);
        Complex back = apply_basis_change(there, {c.gens, inv.a});
        if (!(differential_matrix(back).a == differential_matrix(c).a)) o.fail(where + ": replayed change does not invert");
    }
}

Outcome floor_discipline() {
    Outcome o;
    std::size_t steps = 0;
    for (const Named& n : corpus_suite()) {
        StripResult st = strip_zero_complexes(reduced(n.complex));
        if (st.reduced.rank() == 0) continue;
        std::vector<EngineStep> trace;
        normal_form(st.reduced, &trace);
        for (const auto& s : trace) check_step(st.reduced, s.state, n.name + " / " + s.name, o);
        steps += trace.size();
        std::vector<EngineStep> trace2;
        DepthRun run = run_to_depth_infinity(build(st.reduced), &trace2);
        for (const auto& s : trace2) check_step(st.reduced, s.state, n.name + " / " + s.name, o);
        steps += trace2.size();
        for (const auto& problem : check_two_story(run.result)) o.fail(n.name + ": " + problem);
    }
    if (o.ok) o.detail = count(steps, "traced steps");
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int k, const char* title, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("criterion %d %s: %s (%s)\n", k, title, o.ok ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failures += !o.ok;
    };

    OracleSuite oracle;
    std::vector<Complex> random;
    std::vector<Named> corpus = corpus_suite();

    report(1, "corpus reproduction", corpus_reproduction);
    report(2, "oracle equivalence", [&] { return oracle_equivalence(oracle); });
    report(3, "uniqueness", [&] { return uniqueness(random); });
    report(4, "round trip", round_trip);

    std::vector<const Complex*> all, randoms;
    for (const auto& n : corpus) all.push_back(&n.complex);
    for (const auto* s : {&oracle.exhaustive, &oracle.sampled, &random})
        for (const Complex& c : *s) {
            all.push_back(&c);
            randoms.push_back(&c);
        }
    report(5, "termination bound", [&] { return termination(all); });
    report(6, "torsion order cross-check", [&] { return torsion_cross_check(all, oracle); });
    report(7, "symmetry", [&] { return symmetry(randoms); });
    report(8, "floor discipline", floor_discipline);
    return failures ? 1 : 0;
}
