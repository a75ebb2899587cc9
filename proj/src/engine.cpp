#include "cfl/engine.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>

namespace cfl {

long letter_key(int c) {
    if (c < 0) return -c;
    if (c == 0) return 1000000;
    return 2000000 - c;
}

int compare_words(const std::vector<int>& s, const std::vector<int>& t, std::size_t limit) {
    std::size_t n = std::min(std::max(s.size(), t.size()), limit);
    for (std::size_t k = 0; k < n; ++k) {
        long a = letter_key(k < s.size() ? s[k] : 0), b = letter_key(k < t.size() ? t[k] : 0);
        if (a != b) return a < b ? -1 : 1;
    }
    return 0;
}

Grading letter_shift(Direction dir, int c) {
    int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
    int l = c > 0 ? c : -c;
    if (dir == Direction::Vertical) return {s, s * (1 - 2 * l)};
    return {s * (1 - 2 * l), s};
}

namespace {

using Spaces = std::pair<Matrix, Matrix>;  // (F>=, F>)

constexpr int kV = 0, kH = 1;

Direction dir_of(int d) { return d == kV ? Direction::Vertical : Direction::Horizontal; }

bool terminated(const std::vector<int>& w) { return !w.empty() && w.back() == 0; }

struct Layer {
    Grading g;
    std::vector<std::size_t> idx;
    std::vector<int> let[2];
    std::vector<std::size_t> part[2];  // partner local index in the neighbouring layer
    Matrix P, Q;
};

// The two floors seen grading by grading.  Subspaces live in local
// coordinates with respect to the bottom floor basis.
struct Floors {
    u32 p = 2;
    std::size_t n = 0;
    std::vector<Layer> layers;
    std::map<Grading, std::size_t> layer_of;
    std::vector<std::size_t> layer_idx, local_idx;
    std::vector<int> letter[2];
    std::vector<std::size_t> partner[2];

    explicit Floors(const TransitionData& td) {
        p = td.x.change.m.prime();
        n = td.x.gens.size();
        layer_idx.resize(n);
        local_idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            Grading g = td.x.gens[i].gr();
            if (td.y.gens[i].gr() != g) throw InternalError("floors are not aligned");
            auto it = layer_of.find(g);
            if (it == layer_of.end()) {
                it = layer_of.emplace(g, layers.size()).first;
                layers.push_back({});
                layers.back().g = g;
            }
            layer_idx[i] = it->second;
            local_idx[i] = layers[it->second].idx.size();
            layers[it->second].idx.push_back(i);
        }
        const std::vector<Arrow>* arrows[2] = {&td.x.arrows, &td.y.arrows};
        for (int d = 0; d < 2; ++d) {
            letter[d].assign(n, 0);
            partner[d].assign(n, 0);
            for (const auto& a : *arrows[d]) {
                letter[d][a.source] = -a.length;
                letter[d][a.target] = a.length;
                partner[d][a.source] = a.target;
                partner[d][a.target] = a.source;
            }
        }
        for (auto& L : layers) {
            for (int d = 0; d < 2; ++d)
                for (std::size_t i : L.idx) {
                    L.let[d].push_back(letter[d][i]);
                    L.part[d].push_back(letter[d][i] ? local_idx[partner[d][i]] : 0);
                }
            L.P = td.P.select_rows(L.idx).select_cols(L.idx);
            L.Q = invert(L.P);
        }
    }

    std::size_t dim(std::size_t L) const { return layers[L].idx.size(); }

    std::size_t next(int d, std::size_t L, int c) const {
        return layer_of.at(layers[L].g + letter_shift(dir_of(d), c));
    }

    // Span of the floor-d basis elements whose letter is >= c (or > c).
    Matrix low(int d, std::size_t L, int c, bool strict) const {
        const Layer& ly = layers[L];
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < ly.idx.size(); ++k) {
            long a = letter_key(ly.let[d][k]), b = letter_key(c);
            if (strict ? a > b : a >= b) keep.push_back(k);
        }
        if (keep.empty()) return zero_space(ly.idx.size(), p);
        if (d == kH) return span(ly.Q.select_rows(keep));
        Matrix m(keep.size(), ly.idx.size(), p);
        for (std::size_t r = 0; r < keep.size(); ++r) m(r, keep[r]) = 1;
        return m;
    }

    // Partner map for letter c in floor-d coordinates.
    Matrix partner_map(int d, std::size_t L, int c) const {
        const Layer& ly = layers[L];
        Matrix f(ly.idx.size(), dim(next(d, L, c)), p);
        for (std::size_t k = 0; k < ly.idx.size(); ++k)
            if (ly.let[d][k] == c) f(k, ly.part[d][k]) = 1;
        return f;
    }

    // The same map in bottom floor coordinates.
    Matrix phi(int d, std::size_t L, int c) const {
        Matrix f = partner_map(d, L, c);
        if (d == kV) return f;
        return layers[L].P * f * layers[next(d, L, c)].Q;
    }

    Spaces pull(int d, std::size_t L, int c, const Spaces& nxt) const {
        if (c == 0) return {low(d, L, 0, false), low(d, L, 0, true)};
        std::size_t L1 = next(d, L, c);
        Matrix extra = low(d, L1, -c, true);
        Matrix f = phi(d, L, c);
        Matrix ge0 = low(d, L, c, false), gt0 = low(d, L, c, true);
        auto one = [&](const Matrix& s) {
            Matrix pre = subspace_preimage(f, subspace_sum(s, extra));
            return subspace_sum(gt0, subspace_intersection(pre, ge0));
        };
        return {one(nxt.first), one(nxt.second)};
    }

    std::vector<int> letters(int d, std::size_t L) const {
        std::set<int> s(layers[L].let[d].begin(), layers[L].let[d].end());
        return {s.begin(), s.end()};
    }
};

struct PositionData {
    WordPosition w;
    std::size_t layer = 0;
    Matrix M, N;
};

std::vector<PositionData> compute_positions(const Floors& F, std::size_t trunc) {
    using Key = std::pair<int, std::size_t>;
    std::map<Key, std::vector<std::pair<std::vector<int>, Spaces>>> cur, family;
    for (int d = 0; d < 2; ++d)
        for (std::size_t L = 0; L < F.layers.size(); ++L)
            cur[{d, L}].push_back({{}, {full_space(F.dim(L), F.p), zero_space(F.dim(L), F.p)}});
    for (std::size_t k = 1; k <= trunc; ++k) {
        std::map<Key, std::vector<std::pair<std::vector<int>, Spaces>>> nxt;
        for (int d = 0; d < 2; ++d)
            for (std::size_t L = 0; L < F.layers.size(); ++L)
                for (int c : F.letters(d, L)) {
                    auto consider = [&](std::vector<int> word, const Spaces& s) {
                        if (s.first.rows() <= s.second.rows()) return;
                        if (terminated(word)) family[{d, L}].push_back({word, s});
                        nxt[{d, L}].push_back({std::move(word), s});
                    };
                    if (c == 0) {
                        if (k == 1) consider({0}, F.pull(d, L, 0, {}));
                        continue;
                    }
                    std::size_t L1 = F.next(d, L, c);
                    for (const auto& [w, s] : cur[{1 - d, L1}]) {
                        if (w.size() != k - 1) continue;
                        std::vector<int> word{c};
                        word.insert(word.end(), w.begin(), w.end());
                        consider(std::move(word), F.pull(d, L, c, s));
                    }
                }
        cur = std::move(nxt);
    }
    for (auto& [key, ws] : cur)
        for (auto& w : ws)
            if (!terminated(w.first)) family[key].push_back(w);

    std::vector<PositionData> out;
    for (std::size_t L = 0; L < F.layers.size(); ++L) {
        std::size_t total = 0;
        for (const auto& [a, sa] : family[{kV, L}])
            for (const auto& [b, sb] : family[{kH, L}]) {
                Matrix M = subspace_intersection(sa.first, sb.first);
                if (M.rows() == 0) continue;
                Matrix N = subspace_sum(subspace_intersection(sa.second, sb.first),
                                        subspace_intersection(sa.first, sb.second));
                if (M.rows() == N.rows()) continue;
                out.push_back({{F.layers[L].g, a, b, M.rows() - N.rows()}, L, M, N});
                total += M.rows() - N.rows();
            }
        if (total != F.dim(L)) throw InternalError("word multiplicities do not add up in a grading");
    }
    return out;
}

std::vector<int> truncate_word(std::vector<int> w, std::size_t trunc) {
    if (w.size() > trunc) w.resize(trunc);
    return w;
}

bool word_starts_with(const std::vector<int>& w, const std::vector<int>& prefix) {
    if (terminated(prefix)) return w == prefix;
    return w.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

// Index of the unique position with a-word `a` (prefix match when `a_prefix`)
// and b-word `b` (likewise).
std::optional<std::size_t> find_position(const std::vector<WordPosition>& pos, Grading g, const std::vector<int>& a,
                                         bool a_prefix, const std::vector<int>& b, bool b_prefix) {
    std::optional<std::size_t> hit;
    for (std::size_t k = 0; k < pos.size(); ++k) {
        const auto& q = pos[k];
        if (q.g != g) continue;
        bool ok_a = a_prefix ? word_starts_with(q.a, a) : q.a == a;
        bool ok_b = b_prefix ? word_starts_with(q.b, b) : q.b == b;
        if (!ok_a || !ok_b) continue;
        if (hit) throw InternalError("ambiguous neighbouring position");
        hit = k;
    }
    return hit;
}

}  // namespace

std::vector<WordPosition> word_positions(const TransitionData& td, std::size_t truncation) {
    Floors F(td);
    std::vector<WordPosition> out;
    for (auto& pd : compute_positions(F, truncation)) out.push_back(pd.w);
    return out;
}

std::vector<Orbit> link_positions(const std::vector<WordPosition>& pos, std::size_t trunc) {
    const std::size_t n = pos.size();
    std::vector<std::optional<std::size_t>> nb[2];
    nb[kV].resize(n);
    nb[kH].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& q = pos[k];
        if (q.a[0] != 0) {
            std::vector<int> a{-q.a[0]};
            a.insert(a.end(), q.b.begin(), q.b.end());
            std::vector<int> b(q.a.begin() + 1, q.a.end());
            nb[kV][k] = find_position(pos, q.g + letter_shift(Direction::Vertical, q.a[0]), truncate_word(a, trunc),
                                      false, b, true);
            if (!nb[kV][k]) throw InternalError("missing vertical neighbour position");
        }
        if (q.b[0] != 0) {
            std::vector<int> b{-q.b[0]};
            b.insert(b.end(), q.a.begin(), q.a.end());
            std::vector<int> a(q.b.begin() + 1, q.b.end());
            nb[kH][k] = find_position(pos, q.g + letter_shift(Direction::Horizontal, q.b[0]), a, true,
                                      truncate_word(b, trunc), false);
            if (!nb[kH][k]) throw InternalError("missing horizontal neighbour position");
        }
    }
    std::vector<bool> seen(n, false);
    std::vector<Orbit> out;
    auto walk = [&](std::size_t start, int first_dir, bool band) {
        Orbit o;
        o.band = band;
        o.mult = pos[start].mult;
        std::size_t cur = start;
        int d = first_dir;
        o.positions.push_back(cur);
        seen[cur] = true;
        while (true) {
            auto nx = nb[d][cur];
            if (!nx) break;
            if (*nx == start) {
                o.links.push_back(dir_of(d));
                break;
            }
            if (seen[*nx]) throw InternalError("orbit revisits a position");
            o.links.push_back(dir_of(d));
            cur = *nx;
            o.positions.push_back(cur);
            seen[cur] = true;
            if (pos[cur].mult != o.mult) throw InternalError("multiplicity changes along an orbit");
            d = 1 - d;
        }
        if (band && o.links.size() != o.positions.size()) throw InternalError("band orbit does not close");
        out.push_back(o);
    };
    // Strings first, started from an end; then the remaining cycles.
    for (std::size_t k = 0; k < n; ++k) {
        if (seen[k]) continue;
        bool hv = nb[kV][k].has_value(), hh = nb[kH][k].has_value();
        if (hv && hh) continue;
        walk(k, hv ? kV : kH, false);
    }
    for (std::size_t k = 0; k < n; ++k)
        if (!seen[k]) walk(k, kV, true);
    return out;
}

namespace {

// Linear constraints on concatenated row-vector unknowns.
class LinSys {
public:
    LinSys(std::size_t nvars, u32 p) : nvars_(nvars), p_(p) {}

    // Require sum_t z_t * F_t + konst to lie in the row space S.
    void member(const std::vector<std::pair<std::size_t, Matrix>>& terms, const std::vector<u32>& konst,
                const Matrix& S) {
        std::size_t dim = konst.size();
        Matrix ann = S.rows() == 0 ? Matrix::identity(dim, p_) : left_kernel(S.transpose());
        for (std::size_t r = 0; r < ann.rows(); ++r) {
            std::vector<u32> eq(nvars_, 0);
            for (const auto& [off, f] : terms)
                for (std::size_t i = 0; i < f.rows(); ++i) {
                    u32 acc = 0;
                    for (std::size_t j = 0; j < dim; ++j) acc = fadd(acc, fmul(f(i, j), ann(r, j), p_), p_);
                    eq[off + i] = fadd(eq[off + i], acc, p_);
                }
            u32 rhs = 0;
            for (std::size_t j = 0; j < dim; ++j) rhs = fadd(rhs, fmul(konst[j], ann(r, j), p_), p_);
            eqs_.push_back(std::move(eq));
            rhs_.push_back(fneg(rhs, p_));
        }
    }

    std::vector<u32> solve() const {
        std::vector<u32> x(nvars_, 0);
        if (eqs_.empty()) return x;
        Matrix a(nvars_, eqs_.size(), p_);
        for (std::size_t e = 0; e < eqs_.size(); ++e)
            for (std::size_t v = 0; v < nvars_; ++v) a(v, e) = eqs_[e][v];
        if (!solve_left(a, rhs_, x)) throw InternalError("orbit basis system has no solution");
        return x;
    }

private:
    std::size_t nvars_;
    u32 p_;
    std::vector<std::vector<u32>> eqs_;
    std::vector<u32> rhs_;
};

struct OrbitSlots {
    std::vector<std::size_t> layer;
    std::vector<const Matrix*> M, N;
    std::vector<int> link_dir;     // link i joins slot i and slot i+1
    std::vector<int> link_letter;  // letter of slot i along link i
};

// Vectors z[s][r] for each slot and copy.  `slots` may exceed the number of
// orbit positions by one, in which case the extra slot is an open end in the
// layer of slot 0.  With `closure`, the last link ends at closure * z[0].
std::vector<std::vector<std::vector<u32>>> solve_slots(const Floors& F, const OrbitSlots& o, const Matrix& E,
                                                       std::size_t slots, const Matrix* closure) {
    const std::size_t m = E.rows();
    const u32 p = F.p;
    auto layer = [&](std::size_t s) { return o.layer[s % o.layer.size()]; };
    std::vector<std::size_t> off(slots + 1, 0);
    for (std::size_t s = 0; s < slots; ++s) off[s + 1] = off[s] + m * F.dim(layer(s));
    auto var = [&](std::size_t s, std::size_t r) { return off[s] + r * F.dim(layer(s)); };
    LinSys sys(off[slots], p);
    for (std::size_t s = 0; s < slots; ++s)
        for (std::size_t r = 0; r < m; ++r) {
            std::size_t dim = F.dim(layer(s));
            sys.member({{var(s, r), Matrix::identity(dim, p)}}, std::vector<u32>(dim, 0), *o.M[s % o.M.size()]);
        }
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<u32> e = E.row(r);
        for (auto& x : e) x = fneg(x, p);
        sys.member({{var(0, r), Matrix::identity(F.dim(layer(0)), p)}}, e, *o.N[0]);
    }
    for (std::size_t i = 0; i < o.link_dir.size(); ++i) {
        const int d = o.link_dir[i];
        const int c = o.link_letter[i];
        const std::size_t s1 = i, s2 = i + 1;
        const bool virt = closure && s2 == slots;
        if (!virt && s2 >= slots) continue;
        const std::size_t src = c < 0 ? s1 : s2, tgt = c < 0 ? s2 : s1;
        const int l = c < 0 ? -c : c;
        Matrix phi = F.phi(d, layer(src), -l);
        Matrix T = F.low(d, layer(tgt), l, true);
        const std::size_t n_src = F.dim(layer(src)), n_tgt = F.dim(layer(tgt));
        for (std::size_t r = 0; r < m; ++r) {
            std::vector<std::pair<std::size_t, Matrix>> terms;
            // Slot s2 may stand for the closure combination of slot 0.
            auto add_slot = [&](std::size_t s, const Matrix& f) {
                if (virt && s == s2) {
                    for (std::size_t r2 = 0; r2 < m; ++r2)
                        if ((*closure)(r, r2)) terms.push_back({var(0, r2), f.scaled((*closure)(r, r2))});
                } else {
                    terms.push_back({var(s, r), f});
                }
            };
            add_slot(tgt, Matrix::identity(n_tgt, p));
            add_slot(src, phi.scaled(fneg(1, p)));
            (void)n_src;
            sys.member(terms, std::vector<u32>(n_tgt, 0), T);
        }
    }
    std::vector<u32> x = sys.solve();
    std::vector<std::vector<std::vector<u32>>> z(slots, std::vector<std::vector<u32>>(m));
    for (std::size_t s = 0; s < slots; ++s)
        for (std::size_t r = 0; r < m; ++r)
            z[s][r].assign(x.begin() + var(s, r), x.begin() + var(s, r) + F.dim(layer(s)));
    return z;
}

std::vector<u32> row_times(const std::vector<u32>& v, const Matrix& m) {
    std::vector<u32> out(m.cols(), 0);
    const u32 p = m.prime();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i])
            for (std::size_t j = 0; j < m.cols(); ++j) out[j] = fadd(out[j], fmul(v[i], m(i, j), p), p);
    return out;
}

std::vector<u32> combine(const Matrix& coef, std::size_t r, const std::vector<std::vector<u32>>& vs, u32 p) {
    std::vector<u32> out(vs[0].size(), 0);
    for (std::size_t r2 = 0; r2 < vs.size(); ++r2)
        if (coef(r, r2))
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = fadd(out[k], fmul(coef(r, r2), vs[r2][k], p), p);
    return out;
}

}  // namespace

NormalForm normal_form(const Complex& c, std::vector<EngineStep>* trace) {
    NormalForm nf;
    if (has_length_zero_arrow(c)) throw ValidationError("complex has a length zero arrow; strip it first");
    TransitionData td = simplify_both(c);
    if (trace) trace->push_back({"simplify", td});
    const std::size_t n = c.rank();
    const u32 p = c.p;
    if (n == 0) {
        nf.floors = td;
        return nf;
    }
    nf.rounds = td.P.is_identity() ? 0 : 1;
    const std::size_t trunc = 2 * n + 2;
    Floors F(td);
    std::vector<PositionData> pd = compute_positions(F, trunc);
    for (const auto& q : pd) nf.positions.push_back(q.w);
    nf.orbits = link_positions(nf.positions, trunc);

    Matrix X(n, n, p), Y(n, n, p);  // rows: new elements in the floor bases
    std::vector<Generator> gens;
    std::vector<Arrow> xarrows, yarrows;
    Matrix phiV(n, n, p), phiH(n, n, p);
    for (std::size_t i = 0; i < n; ++i) {
        if (F.letter[kV][i] < 0) phiV(i, F.partner[kV][i]) = 1;
        if (F.letter[kH][i] < 0) phiH(i, F.partner[kH][i]) = 1;
    }

    for (std::size_t oi = 0; oi < nf.orbits.size(); ++oi) {
        const Orbit& orb = nf.orbits[oi];
        const std::size_t K = orb.positions.size(), m = orb.mult;
        OrbitSlots os;
        for (std::size_t s = 0; s < K; ++s) {
            const auto& q = pd[orb.positions[s]];
            os.layer.push_back(q.layer);
            os.M.push_back(&q.M);
            os.N.push_back(&q.N);
        }
        for (std::size_t i = 0; i < orb.links.size(); ++i) {
            int d = orb.links[i] == Direction::Vertical ? kV : kH;
            const auto& q = pd[orb.positions[i]].w;
            os.link_dir.push_back(d);
            os.link_letter.push_back(d == kV ? q.a[0] : q.b[0]);
        }
        Matrix E = complement_in(*os.N[0], *os.M[0]);
        if (E.rows() != m) throw InternalError("complement has the wrong dimension");
        std::vector<std::vector<std::vector<u32>>> z;
        Matrix closure;
        std::vector<std::size_t> block_sizes(m, 1);
        std::vector<Matrix> blocks;
        if (!orb.band) {
            z = solve_slots(F, os, E, K, nullptr);
        } else {
            // Transport once around to read the holonomy on the subquotient.
            auto open = solve_slots(F, os, E, K + 1, nullptr);
            Matrix A(m, m, p);
            Matrix basis = Matrix::stack(E, *os.N[0]);
            for (std::size_t r = 0; r < m; ++r) {
                std::vector<u32> coef;
                if (!solve_left(basis, open[K][r], coef)) throw InternalError("holonomy transport left the subquotient");
                for (std::size_t r2 = 0; r2 < m; ++r2) A(r, r2) = coef[r2];
            }
            auto dec = primary_decomposition(A);
            Matrix G = invert(dec.change);
            E = G * E;
            closure = G * A * dec.change;
            block_sizes = dec.sizes;
            for (const auto& dv : dec.divisors) blocks.push_back(companion(dv, p));
            if (closure != Matrix::block_diagonal(blocks, p)) throw InternalError("holonomy did not split");
            z = solve_slots(F, os, E, K, &closure);
        }

        const std::size_t base = gens.size();
        auto gid = [&](std::size_t s, std::size_t r) { return base + r * K + s; };
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t s = 0; s < K; ++s)
                gens.push_back({"z" + std::to_string(base + r * K + s), F.layers[os.layer[s]].g.u,
                                F.layers[os.layer[s]].g.v});
        // Scalar part of each generator in floor-d coordinates, placed globally.
        auto place = [&](std::size_t s, const std::vector<u32>& loc, int d) {
            const Layer& ly = F.layers[os.layer[s]];
            std::vector<u32> v = d == kV ? loc : row_times(loc, ly.P);
            std::vector<u32> g(n, 0);
            for (std::size_t k = 0; k < v.size(); ++k) g[ly.idx[k]] = v[k];
            return g;
        };
        std::vector<std::vector<bool>> done(2, std::vector<bool>(m * K, false));
        Matrix* rows[2] = {&X, &Y};
        std::vector<Arrow>* arrows[2] = {&xarrows, &yarrows};
        Matrix* phis[2] = {&phiV, &phiH};
        for (std::size_t i = 0; i < os.link_dir.size(); ++i) {
            const int d = os.link_dir[i];
            const int cl = os.link_letter[i];
            const std::size_t s1 = i, s2 = (i + 1) % K;
            const bool virt = orb.band && i + 1 == K;
            const std::size_t src = cl < 0 ? s1 : s2, tgt = cl < 0 ? s2 : s1;
            const bool src_virt = virt && src == s2, tgt_virt = virt && tgt == s2;
            const int l = cl < 0 ? -cl : cl;
            for (std::size_t r = 0; r < m; ++r) {
                auto vec = [&](std::size_t s, bool is_virt) {
                    std::vector<u32> loc = is_virt ? combine(closure, r, z[0], p) : z[s][r];
                    return place(s, loc, d);
                };
                std::vector<u32> sv = vec(src, src_virt), tv = vec(tgt, tgt_virt);
                std::vector<u32> hit = row_times(sv, *phis[d]);
                std::vector<u32> src_row = sv;
                // Components in other gradings are V- or U-tails of longer arrows.
                for (std::size_t k : F.layers[os.layer[tgt]].idx) {
                    u32 diff = fsub(tv[k], hit[k], p);
                    if (!diff) continue;
                    int lk = F.letter[d][k];
                    if (lk <= 0 || lk >= l) throw InternalError("target correction outside shorter arrows");
                    std::size_t sk = F.partner[d][k];
                    src_row[sk] = fadd(src_row[sk], diff, p);
                }
                std::vector<u32> tgt_row = row_times(src_row, *phis[d]);
                rows[d]->set_row(gid(src, r), src_row);
                rows[d]->set_row(gid(tgt, r), tgt_row);
                done[d][r * K + src] = done[d][r * K + tgt] = true;
                arrows[d]->push_back({gid(src, r), gid(tgt, r), l});
            }
        }
        for (int d = 0; d < 2; ++d)
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t s = 0; s < K; ++s)
                    if (!done[d][r * K + s]) rows[d]->set_row(gid(s, r), place(s, z[s][r], d));
        if (!orb.band) {
            for (std::size_t r = 0; r < m; ++r) nf.pieces.push_back({oi, gid(0, r), K, false, Matrix()});
        } else {
            std::size_t r0 = 0;
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                nf.pieces.push_back({oi, gid(0, r0), K * block_sizes[b], true, blocks[b]});
                r0 += block_sizes[b];
            }
        }
    }
    if (gens.size() != n) throw InternalError("orbits do not cover the complex");

    SimplifiedBasis xb, yb;
    xb.dir = Direction::Vertical;
    yb.dir = Direction::Horizontal;
    xb.gens = yb.gens = gens;
    xb.arrows = xarrows;
    yb.arrows = yarrows;
    xb.change = compose(td.x.change, {gens, X}, c.gens, c.ring);
    yb.change = compose(td.y.change, {gens, Y}, c.gens, c.ring);
    nf.floors = normalize_transition(c, xb, yb);
    if (trace) trace->push_back({"depth infinity", nf.floors});

    // The bottom floor basis must split the complex along the pieces.
    Complex split = apply_basis_change(c, nf.floors.x.change);
    std::vector<std::size_t> piece_of(n);
    for (std::size_t k = 0; k < nf.pieces.size(); ++k)
        for (std::size_t i = 0; i < nf.pieces[k].size; ++i) piece_of[nf.pieces[k].first + i] = k;
    for (std::size_t s = 0; s < n; ++s)
        for (const auto& t : split.d[s])
            if (piece_of[t.target] != piece_of[s]) throw InternalError("normal form does not split the complex");
    return nf;
}

}  // namespace cfl
