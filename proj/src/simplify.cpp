#include "cfl/simplify.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace cfl {

std::optional<std::size_t> SimplifiedBasis::arrow_from(std::size_t k) const {
    for (std::size_t a = 0; a < arrows.size(); ++a)
        if (arrows[a].source == k) return a;
    return std::nullopt;
}

std::optional<std::size_t> SimplifiedBasis::arrow_to(std::size_t k) const {
    for (std::size_t a = 0; a < arrows.size(); ++a)
        if (arrows[a].target == k) return a;
    return std::nullopt;
}

std::optional<std::vector<Arrow>> read_arrows(const Complex& c, Direction dir) {
    std::vector<Arrow> out;
    std::vector<int> touched(c.rank(), 0);  // 1 source, 2 target
    for (std::size_t s = 0; s < c.rank(); ++s) {
        std::vector<const Term*> part;
        for (const auto& t : c.d[s])
            if ((dir == Direction::Vertical ? t.m.u : t.m.v) == 0) part.push_back(&t);
        if (part.empty()) continue;
        if (part.size() > 1 || part[0]->m.coef != 1) return std::nullopt;
        std::size_t t = part[0]->target;
        if (touched[s] || touched[t]) return std::nullopt;
        touched[s] = 1;
        touched[t] = 2;
        out.push_back({s, t, dir == Direction::Vertical ? part[0]->m.v : part[0]->m.u});
    }
    return out;
}

bool check_simplified(const Complex& c, const SimplifiedBasis& b) {
    Complex in = apply_basis_change(c, b.change);
    auto arrows = read_arrows(in, b.dir);
    if (!arrows) return false;
    auto key = [](std::vector<Arrow> v) {
        std::sort(v.begin(), v.end(), [](const Arrow& x, const Arrow& y) {
            return std::tie(x.source, x.target, x.length) < std::tie(y.source, y.target, y.length);
        });
        return v;
    };
    return key(*arrows) == key(b.arrows);
}

namespace {

// Conjugates d by the elementary change b and accumulates it into total.
void apply_step(GMat& d, GMat& total, const GMat& b) {
    d = gmul(gmul(b, d), ginverse(b));
    total = gmul(b, total);
}

}  // namespace

SimplifiedBasis vertical_simplify(const Complex& c) {
    if (has_length_zero_arrow(c)) throw ValidationError("complex has a length zero arrow; strip it first");
    Complex q = quotient_u(c);
    const std::size_t n = q.rank();
    const u32 p = q.p;
    GMat d = differential_matrix(q);
    GMat total = gidentity(d.rows, Ring::FV, p);
    std::vector<bool> used(n, false);
    SimplifiedBasis out;
    out.dir = Direction::Vertical;
    auto length = [&](std::size_t s, std::size_t t) { return (d.cols[t].v - d.rows[s].v + 1) / 2; };
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
        const u32 pivot_inv = finv(d.a(s, t), p);
        // Clear the rest of column t with changes s2 -> s2 - a V^k s.
        for (std::size_t s2 = 0; s2 < n; ++s2) {
            if (s2 == s || !d.a(s2, t)) continue;
            GMat b = gidentity(d.rows, Ring::FV, p);
            b.a(s2, s) = fneg(fmul(d.a(s2, t), pivot_inv, p), p);
            apply_step(d, total, b);
        }
        // Replace t by the whole differential of s divided by V^len.
        GMat b = gidentity(d.rows, Ring::FV, p);
        for (std::size_t t2 = 0; t2 < n; ++t2)
            if (t2 != t && d.a(s, t2)) b.a(t, t2) = d.a(s, t2);
        b.a(t, t) = d.a(s, t);
        apply_step(d, total, b);
        used[s] = used[t] = true;
        out.arrows.push_back({s, t, len});
    }
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            bool expected = false;
            for (const auto& a : out.arrows)
                if (a.source == s && a.target == t) expected = true;
            if ((d.a(s, t) != 0) != expected || (expected && d.a(s, t) != 1))
                throw InternalError("vertical simplification left a stray entry at " + std::to_string(s) + "," + std::to_string(t) + " " + d.a.to_string());
        }
    out.gens = c.gens;
    out.change = {c.gens, total.a};
    return out;
}

SimplifiedBasis horizontal_simplify(const Complex& c) {
    SimplifiedBasis b = vertical_simplify(bar(c));
    b.dir = Direction::Horizontal;
    b.gens = c.gens;
    b.change.new_gens = c.gens;
    return b;
}

void align_gradings(const SimplifiedBasis& xb, SimplifiedBasis& yb) {
    if (xb.gens.size() != yb.gens.size()) throw CountMismatch("bases have different sizes");
    std::map<Grading, std::deque<std::size_t>> pool;
    for (std::size_t k = 0; k < yb.gens.size(); ++k) pool[yb.gens[k].gr()].push_back(k);
    std::vector<std::size_t> order;  // new position i holds old y index order[i]
    for (const auto& g : xb.gens) {
        auto& q = pool[g.gr()];
        if (q.empty()) throw CountMismatch("no horizontal basis element in grading of " + g.id);
        order.push_back(q.front());
        q.pop_front();
    }
    std::vector<std::size_t> where(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) where[order[i]] = i;
    SimplifiedBasis r;
    r.dir = yb.dir;
    r.change.m = Matrix(yb.change.m.rows(), yb.change.m.cols(), yb.change.m.prime());
    for (std::size_t i = 0; i < order.size(); ++i) {
        r.gens.push_back(yb.gens[order[i]]);
        r.change.new_gens.push_back(yb.change.new_gens[order[i]]);
        r.change.m.set_row(i, yb.change.m.row(order[i]));
    }
    for (const auto& a : yb.arrows) r.arrows.push_back({where[a.source], where[a.target], a.length});
    yb = r;
}

TransitionData normalize_transition(const Complex& c, SimplifiedBasis xb, SimplifiedBasis yb) {
    const u32 p = c.p;
    GMat bx = basis_matrix(xb.change, c.gens, c.ring);
    GMat by = basis_matrix(yb.change, c.gens, c.ring);
    GMat pm = gmul(bx, ginverse(by));
    GMat p0 = pm, pu = pm, pv = pm;
    for (std::size_t i = 0; i < pm.a.rows(); ++i)
        for (std::size_t j = 0; j < pm.a.cols(); ++j) {
            if (!pm.a(i, j)) continue;
            int eu = 0, ev = 0;
            entry_exponents(pm.rows[i], pm.cols[j], pm.shift, pm.ring, eu, ev);
            if (eu > 0) p0.a(i, j) = pv.a(i, j) = 0;
            else if (ev > 0) p0.a(i, j) = pu.a(i, j) = 0;
            else pu.a(i, j) = pv.a(i, j) = 0;
        }
    // x' = x - P_U y keeps x modulo U; y' = (I + P0^-1 P_V) y keeps y modulo V.
    GMat pu_y = gmul(pu, by);
    bx.a = bx.a - pu_y.a;
    GMat p0inv{invert(p0.a), pm.cols, pm.rows, {0, 0}, c.ring};
    GMat corr = gmul(p0inv, pv);
    corr.a = corr.a + Matrix::identity(corr.a.rows(), p);
    by = gmul(corr, by);
    xb.change.m = bx.a;
    yb.change.m = by.a;
    GMat check = gmul(bx, ginverse(by));
    if (check.a != p0.a) throw InternalError("transition matrix still has U or V entries");
    return {xb, yb, p0.a, invert(p0.a)};
}

TransitionData simplify_both(const Complex& c) {
    SimplifiedBasis xb = vertical_simplify(c);
    SimplifiedBasis yb = horizontal_simplify(c);
    align_gradings(xb, yb);
    return normalize_transition(c, xb, yb);
}

}  // namespace cfl
