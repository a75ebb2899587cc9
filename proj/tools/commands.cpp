#include "commands.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "cfl/invariants.hpp"
#include "cfl/oracle.hpp"
#include "picture.hpp"

namespace cfl::tools {

using nlohmann::json;

namespace {

json grading_json(Grading g) { return json::array({g.u, g.v}); }

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    return rows;
}

std::string kind_name(SnakeKind k) {
    return k == SnakeKind::Standard ? "standard" : k == SnakeKind::Horizontal ? "horizontal" : "vertical";
}

Complex load(const std::string& text, const Options& opt) {
    Complex c = parse_complex(text, opt.characteristic);
    if (!opt.ring) return c;
    if (*opt.ring == "r1") {
        if (c.ring == Ring::FUV) c = reduce_mod_uv(c);
    } else if (*opt.ring == "fuv") {
        c.ring = Ring::FUV;
        auto problems = validate(c);
        if (!problems.empty()) throw ValidationError(problems.front());
    } else {
        throw SyntaxError("unknown ring '" + *opt.ring + "'");
    }
    return c;
}

json decomposition_json(const Decomposition& d) {
    json out = json::array();
    for (const auto& s : d.snakes)
        out.push_back({{"kind", "snake"},
                       {"snake_kind", kind_name(s.kind)},
                       {"sequence", s.seq},
                       {"anchor", grading_json(s.anchor)},
                       {"descriptor", render(s)}});
    for (const auto& l : d.systems)
        out.push_back({{"kind", "local_system"},
                       {"shape", l.shape},
                       {"w", l.w},
                       {"holonomy", matrix_json(l.holonomy)},
                       {"anchor", grading_json(l.anchor)},
                       {"drift", shape_drift(l.shape)},
                       {"descriptor", render(l)}});
    for (std::size_t k = 0; k < d.zeros; ++k) out.push_back({{"kind", "zero"}, {"descriptor", "Z"}});
    return out;
}

Report do_validate(const Complex& c) {
    Report r;
    r.data = {{"valid", true}, {"rank", c.rank()}, {"terms", c.term_count()}, {"char", c.p}, {"ring", ring_name(c.ring)}};
    r.text = "valid: rank " + std::to_string(c.rank()) + ", " + std::to_string(c.term_count()) + " terms over " +
             ring_name(c.ring) + ", characteristic " + std::to_string(c.p) + "\n";
    return r;
}

Report do_decompose(const Complex& c, const Options& opt) {
    Report r;
    Decomposition d = decompose(c);
    r.data = {{"rank", c.rank()}, {"char", d.p}, {"summands", decomposition_json(d)}, {"rounds", d.rounds}};
    r.text = render(d);
    if (opt.curves) {
        auto lines = curve_lines(d);
        r.data["curves"] = lines;
        for (const auto& l : lines) r.text += l + "\n";
    }
    return r;
}

Report do_invariants(const Complex& c) {
    Report r;
    HomologyType h = homology_type(c);
    SimplifiedBasisVerdict sb = admits_simplified_basis(c);
    const int ou = ord_u(c), ov = ord_v(c);
    const bool sym = is_symmetric(c), inf = essentially_infinite(c);
    r.data = {{"homology_type", to_string(h)},
              {"ord_u", ou},
              {"ord_v", ov},
              {"symmetric", sym},
              {"essentially_infinite", inf},
              {"simplified_basis",
               {{"verdict", to_string(sb.verdict)},
                {"constructive_converse", sb.constructive_converse},
                {"reason", sb.reason}}}};
    r.text = "homology type: " + to_string(h) + "\nord_u: " + std::to_string(ou) + "\nord_v: " + std::to_string(ov) +
             "\nsymmetric: " + (sym ? "yes" : "no") + "\nessentially infinite: " + (inf ? "yes" : "no") +
             "\nsimplified basis: " + to_string(sb.verdict) + (sb.constructive_converse ? " (constructive)" : "") +
             " - " + sb.reason + "\n";
    return r;
}

Report do_render(const Complex& c, const Options& opt) {
    Report r;
    if (opt.render_format != "txt" && opt.render_format != "svg")
        throw SyntaxError("unknown render format '" + opt.render_format + "'");
    r.text = opt.render_format == "svg" ? picture_svg(c) : picture_text(c);
    r.data = {{"format", opt.render_format}, {"picture", r.text}};
    if (opt.curves) {
        auto lines = curve_lines(decompose(c));
        r.data["curves"] = lines;
        r.text += "\n";
        for (const auto& l : lines) r.text += l + "\n";
    }
    return r;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = {"validate", "decompose", "invariants", "bar",
                                                   "realize",  "render",    "selftest"};
    return names;
}

Report run(const std::string& command, const std::string& input, const Options& opt) {
    try {
        if (command == "realize") {
            Complex c = realize(parse_decomposition(input, opt.characteristic.value_or(2)));
            Report r;
            r.text = print_complex(c);
            r.data = {{"complex", r.text}, {"rank", c.rank()}};
            return r;
        }
        Complex c = load(input, opt);
        if (command == "validate") return do_validate(c);
        if (command == "decompose") return do_decompose(c, opt);
        if (command == "invariants") return do_invariants(c);
        if (command == "render") return do_render(c, opt);
        if (command == "bar") {
            Report r;
            r.text = print_complex(bar(c));
            r.data = {{"complex", r.text}};
            return r;
        }
        throw SyntaxError("unknown command '" + command + "'");
    } catch (const Error& e) {
        Report r;
        r.ok = false;
        r.data = {{"error", e.name()}, {"message", e.what()}};
        r.text = std::string(e.what()) + "\n";
        return r;
    }
}

Report selftest(const Options& opt) {
    std::mt19937_64 rng(opt.seed);
    const std::size_t max_rank = std::min<std::size_t>(opt.budget, 4);
    std::size_t checked = 0, failed = 0, over_budget = 0;
    std::vector<std::string> failures;
    for (u32 p : {2u, 3u}) {
        std::vector<Complex> pool;
        for (std::size_t n = 1; n <= max_rank; ++n)
            for (auto& c : all_complexes(n, n <= 3 ? 3 : 2, p)) pool.push_back(std::move(c));
        if (pool.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::uniform_int_distribution<u32> coef(0, p - 1);
        for (int it = 0; it < 100; ++it) {
            Complex c = pool[pick(rng)];
            // Random invertible homogeneous change of basis, then a shuffle.
            GMat b = gidentity(gradings_of(c), c.ring, p);
            do {
                for (std::size_t i = 0; i < c.rank(); ++i)
                    for (std::size_t j = 0; j < c.rank(); ++j)
                        if (b.allowed(i, j)) b.a(i, j) = coef(rng);
            } while (!is_invertible([&] {
                Matrix m(c.rank(), c.rank(), p);
                for (std::size_t i = 0; i < c.rank(); ++i)
                    for (std::size_t j = 0; j < c.rank(); ++j)
                        if (b.rows[i] == b.cols[j]) m(i, j) = b.a(i, j);
                return m;
            }()));
            std::vector<std::size_t> perm(c.rank());
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            Complex moved = permute(apply_basis_change(c, {c.gens, b.a}), perm);

            Decomposition d = decompose(c);
            std::string problem;
            if (!decomposition_equal(d, decompose(moved))) problem = "basis change moved the decomposition";
            else if (!decomposition_equal(d, decompose(realize(d)))) problem = "round trip failed";
            else if (ord_u(c) != ord_u_from_homology(c)) problem = "ord_u disagrees with homology";
            else {
                SearchBudget budget;
                budget.p = p;
                budget.max_rank = opt.budget;
                try {
                    if (!decomposition_equal(d, brute_force_decompose(moved, budget))) problem = "oracle disagrees";
                } catch (const BudgetExceeded&) {
                    ++over_budget;
                }
            }
            ++checked;
            if (!problem.empty()) {
                ++failed;
                failures.push_back(problem + ":\n" + print_complex(c));
            }
        }
    }
    Report r;
    r.ok = failed == 0;
    r.data = {{"seed", opt.seed},
              {"checked", checked},
              {"failed", failed},
              {"over_budget", over_budget},
              {"failures", failures}};
    r.text = "selftest seed " + std::to_string(opt.seed) + ": " + std::to_string(checked) + " complexes, " +
             std::to_string(failed) + " failures, " + std::to_string(over_budget) + " over the oracle budget\n";
    for (const auto& f : failures) r.text += f;
    return r;
}

}  // namespace cfl::tools
