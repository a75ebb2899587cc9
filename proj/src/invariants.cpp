#include "cfl/invariants.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

namespace cfl {

namespace {

Decomposition decompose_any(const Complex& c) { return decompose(c.ring == Ring::FUV ? reduce_mod_uv(c) : c); }

Complex reduced(const Complex& c) { return c.ring == Ring::FUV ? reduce_mod_uv(c) : c; }

}  // namespace

PidHomology homology_over_pid(const Complex& q) {
    if (q.ring == Ring::FU) {
        PidHomology h = homology_over_pid(bar(q));
        for (auto& g : h.free) std::swap(g.u, g.v);
        std::sort(h.free.begin(), h.free.end());
        return h;
    }
    if (q.ring != Ring::FV) throw ValidationError("homology_over_pid expects a one-variable quotient");
    const std::size_t n = q.rank();
    const u32 p = q.p;
    GMat d = differential_matrix(q);
    std::vector<bool> used(n, false);
    PidHomology out;
    auto length = [&](std::size_t s, std::size_t t) { return (d.cols[t].v - d.rows[s].v + 1) / 2; };
    auto conjugate = [&](const GMat& b) { d = gmul(gmul(b, d), ginverse(b)); };
    while (true) {
        std::optional<std::tuple<int, std::size_t, std::size_t>> best;
        for (std::size_t s = 0; s < n; ++s) {
            if (used[s]) continue;
            for (std::size_t t = 0; t < n; ++t) {
                if (used[t] || !d.a(s, t)) continue;
                std::tuple<int, std::size_t, std::size_t> cand{length(s, t), s, t};
                if (!best || cand < *best) best = cand;
            }
        }
        if (!best) break;
        auto [len, s, t] = *best;
        const u32 inv = finv(d.a(s, t), p);
        for (std::size_t s2 = 0; s2 < n; ++s2) {
            if (s2 == s || !d.a(s2, t)) continue;
            GMat b = gidentity(d.rows, Ring::FV, p);
            b.a(s2, s) = fneg(fmul(d.a(s2, t), inv, p), p);
            conjugate(b);
        }
        // Replace t by the differential of s divided by V^len.
        GMat b = gidentity(d.rows, Ring::FV, p);
        for (std::size_t t2 = 0; t2 < n; ++t2)
            if (t2 != t && d.a(s, t2)) b.a(t, t2) = d.a(s, t2);
        b.a(t, t) = d.a(s, t);
        conjugate(b);
        used[s] = used[t] = true;
        if (len > 0) out.torsion.push_back(len);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (used[k]) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (d.a(k, j) || d.a(j, k)) throw InternalError("homology reduction left a stray entry");
        out.free.push_back(q.gens[k].gr());
    }
    std::sort(out.torsion.begin(), out.torsion.end());
    std::sort(out.free.begin(), out.free.end());
    return out;
}

HomologyType homology_type(const Complex& c) {
    HomologyType h;
    h.free_u = homology_over_pid(quotient_u(c)).free;
    h.free_v = homology_over_pid(quotient_v(c)).free;
    const std::size_t ru = h.free_u.size(), rv = h.free_v.size();
    if (ru == 0 && rv == 0) {
        h.kind = HomologyKind::Torsion;
    } else if (ru == 1 && rv == 1 && h.free_u[0].u == 0 && h.free_v[0].v == 0) {
        h.kind = HomologyKind::Knot;
    } else if (ru == rv && (ru & (ru - 1)) == 0) {
        h.kind = HomologyKind::Link;
        h.components = 1;
        for (std::size_t r = ru; r > 1; r /= 2) ++h.components;
    }
    return h;
}

std::string to_string(const HomologyType& h) {
    auto list = [](const std::vector<Grading>& gs) {
        std::string s = "[";
        for (std::size_t i = 0; i < gs.size(); ++i)
            s += (i ? "," : "") + std::string("(") + std::to_string(gs[i].u) + "," + std::to_string(gs[i].v) + ")";
        return s + "]";
    };
    switch (h.kind) {
        case HomologyKind::Torsion: return "torsion";
        case HomologyKind::Knot: return "knot";
        case HomologyKind::Link: return "link(" + std::to_string(h.components) + ")";
        case HomologyKind::Other: break;
    }
    return "other(u=" + list(h.free_u) + "; v=" + list(h.free_v) + ")";
}

int ord_u(const Decomposition& d) {
    int m = 0;
    for (const auto& s : d.snakes)
        for (std::size_t i = 0; i < s.seq.size(); ++i) {
            const bool horizontal = (i % 2 == 0) != (s.kind == SnakeKind::Vertical);
            if (horizontal) m = std::max(m, std::abs(s.seq[i]));
        }
    for (const auto& l : d.systems)
        for (std::size_t i = 0; i < l.shape.size(); i += 2) m = std::max(m, std::abs(l.shape[i]));
    return m;
}

int ord_v(const Decomposition& d) {
    int m = 0;
    for (const auto& s : d.snakes)
        for (std::size_t i = 0; i < s.seq.size(); ++i) {
            const bool horizontal = (i % 2 == 0) != (s.kind == SnakeKind::Vertical);
            if (!horizontal) m = std::max(m, std::abs(s.seq[i]));
        }
    for (const auto& l : d.systems)
        for (std::size_t i = 1; i < l.shape.size(); i += 2) m = std::max(m, std::abs(l.shape[i]));
    return m;
}

int ord_u(const Complex& c) { return ord_u(decompose_any(c)); }
int ord_v(const Complex& c) { return ord_v(decompose_any(c)); }

int ord_u_from_homology(const Complex& c) {
    auto h = homology_over_pid(quotient_v(reduced(c)));
    return h.torsion.empty() ? 0 : h.torsion.back();
}

int ord_v_from_homology(const Complex& c) {
    auto h = homology_over_pid(quotient_u(reduced(c)));
    return h.torsion.empty() ? 0 : h.torsion.back();
}

bool is_symmetric(const Complex& c) {
    Complex r = reduced(c);
    Decomposition a = decompose(r), b = decompose(bar(r));
    a.zeros = b.zeros = 0;
    return decomposition_equal(a, b);
}

bool essentially_infinite(const Decomposition& d) {
    for (const auto& l : d.systems)
        if (shape_drift(l.shape) != 0) return true;
    return false;
}

bool essentially_infinite(const Complex& c) { return essentially_infinite(decompose_any(c)); }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        case Verdict::Unknown: break;
    }
    return "unknown";
}

SimplifiedBasisVerdict admits_simplified_basis(const Decomposition& d) {
    std::map<std::pair<std::vector<int>, Grading>, std::vector<const LocalSystemDescriptor*>> groups;
    for (const auto& l : d.systems) groups[{l.shape, l.anchor}].push_back(&l);
    SimplifiedBasisVerdict out;
    bool unknown = false;
    for (const auto& [key, members] : groups) {
        std::size_t w = 0;
        for (auto* l : members) w += l->w;
        if (w > kPermutationSearchLimit) {
            unknown = true;
            continue;
        }
        Matrix a(w, w, d.p);
        std::size_t at = 0;
        for (auto* l : members) {
            a.set_block(at, at, l->holonomy);
            at += l->w;
        }
        if (!class_contains_permutation(a)) {
            out.verdict = Verdict::No;
            out.reason = "local system " + render(*members.front()) + " has a holonomy class without a permutation matrix";
            return out;
        }
    }
    if (unknown) {
        out.verdict = Verdict::Unknown;
        out.reason = "a local system is wider than the permutation search limit";
        return out;
    }
    out.verdict = Verdict::Yes;
    out.constructive_converse = !d.systems.empty();
    out.reason = d.systems.empty() ? "snakes and zero complexes only"
                                   : "every holonomy class contains a permutation matrix";
    return out;
}

SimplifiedBasisVerdict admits_simplified_basis(const Complex& c) { return admits_simplified_basis(decompose_any(c)); }

}  // namespace cfl
