#include "cfl/complex.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

namespace cfl {

std::string ring_name(Ring r) {
    switch (r) {
        case Ring::R1: return "r1";
        case Ring::FUV: return "fuv";
        case Ring::FV: return "fv";
        case Ring::FU: return "fu";
    }
    return "?";
}

std::size_t Complex::add_generator(const std::string& id, int gu, int gv) {
    if (index_of(id)) throw ValidationError("duplicate generator id " + id);
    gens.push_back({id, gu, gv});
    d.emplace_back();
    return gens.size() - 1;
}

std::optional<std::size_t> Complex::index_of(const std::string& id) const {
    for (std::size_t k = 0; k < gens.size(); ++k)
        if (gens[k].id == id) return k;
    return std::nullopt;
}

void Complex::add_term(std::size_t source, std::size_t target, long long coef, int u, int v) {
    u32 c = freduce(coef, p);
    if (c == 0) return;
    for (auto it = d[source].begin(); it != d[source].end(); ++it)
        if (it->target == target && it->m.u == u && it->m.v == v) {
            it->m.coef = fadd(it->m.coef, c, p);
            if (it->m.coef == 0) d[source].erase(it);
            return;
        }
    d[source].push_back({target, {c, u, v}});
}

void Complex::add_term(const std::string& source, const std::string& target, long long coef, int u, int v) {
    auto s = index_of(source), t = index_of(target);
    if (!s || !t) throw ValidationError("unknown generator in term " + source + " -> " + target);
    add_term(*s, *t, coef, u, v);
}

std::size_t Complex::term_count() const {
    std::size_t n = 0;
    for (const auto& ts : d) n += ts.size();
    return n;
}

// ---------------------------------------------------------------------------

bool entry_exponents(Grading row, Grading col, Grading shift, Ring ring, int& eu, int& ev) {
    int du = col.u - row.u + shift.u, dv = col.v - row.v + shift.v;
    if (du < 0 || dv < 0 || du % 2 || dv % 2) return false;
    eu = du / 2;
    ev = dv / 2;
    switch (ring) {
        case Ring::R1: return eu == 0 || ev == 0;
        case Ring::FV: return eu == 0;
        case Ring::FU: return ev == 0;
        case Ring::FUV: return true;
    }
    return false;
}

bool GMat::allowed(std::size_t i, std::size_t j) const {
    int eu, ev;
    return entry_exponents(rows[i], cols[j], shift, ring, eu, ev);
}

void GMat::mask() {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) && !allowed(i, j)) a(i, j) = 0;
}

GMat gmul(const GMat& x, const GMat& y) {
    if (x.cols.size() != y.rows.size()) throw DimensionMismatch("graded product shape");
    GMat r{x.a * y.a, x.rows, y.cols, x.shift + y.shift, x.ring};
    r.mask();
    return r;
}

GMat gidentity(const std::vector<Grading>& gr, Ring ring, u32 p) {
    return GMat{Matrix::identity(gr.size(), p), gr, gr, {0, 0}, ring};
}

GMat ginverse(const GMat& b) {
    if (b.rows.size() != b.cols.size()) throw NotInvertible("basis change is not square");
    const u32 p = b.a.prime();
    const std::size_t n = b.rows.size();
    Matrix b0(n, n, p), nil(n, n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!b.a(i, j)) continue;
            int eu, ev;
            if (!entry_exponents(b.rows[i], b.cols[j], b.shift, b.ring, eu, ev))
                throw GradingViolation("basis change entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not homogeneous");
            if (eu == 0 && ev == 0) b0(i, j) = b.a(i, j);
            else nil(i, j) = b.a(i, j);
        }
    Matrix b0inv;
    try {
        b0inv = invert(b0);
    } catch (const Singular&) {
        throw NotInvertible("scalar part of the basis change is singular");
    }
    // B^-1 = sum_k (-B0^-1 N)^k B0^-1, a finite sum because N raises degree.
    GMat step{b0inv * nil, b.cols, b.cols, {0, 0}, b.ring};
    step.a = step.a.scaled(fneg(1 % p, p));
    step.mask();
    GMat term{b0inv, b.cols, b.rows, {0, 0}, b.ring};
    GMat total = term;
    for (std::size_t guard = 0; guard < 4 * n + 64; ++guard) {
        term = gmul(step, term);
        if (term.a.is_zero()) return total;
        total.a = total.a + term.a;
    }
    throw InternalError("inverse series did not terminate");
}

std::vector<Grading> gradings_of(const Complex& c) {
    std::vector<Grading> g;
    for (const auto& x : c.gens) g.push_back(x.gr());
    return g;
}

static std::vector<Grading> gradings_of(const std::vector<Generator>& gens) {
    std::vector<Grading> g;
    for (const auto& x : gens) g.push_back(x.gr());
    return g;
}

GMat differential_matrix(const Complex& c) {
    auto g = gradings_of(c);
    GMat m{Matrix(c.rank(), c.rank(), c.p), g, g, {1, 1}, c.ring};
    for (std::size_t s = 0; s < c.rank(); ++s)
        for (const auto& t : c.d[s]) {
            int eu, ev;
            if (!entry_exponents(g[s], g[t.target], {1, 1}, c.ring, eu, ev) || eu != t.m.u || ev != t.m.v)
                throw GradingViolation("term " + c.gens[s].id + " -> " + c.gens[t.target].id + " breaks the bigrading");
            m.a(s, t.target) = fadd(m.a(s, t.target), t.m.coef, c.p);
        }
    return m;
}

Complex complex_from_matrix(const GMat& d, const std::vector<Generator>& gens, u32 p) {
    Complex c(d.ring, p);
    for (const auto& g : gens) c.add_generator(g.id, g.gu, g.gv);
    for (std::size_t s = 0; s < gens.size(); ++s)
        for (std::size_t t = 0; t < gens.size(); ++t) {
            if (!d.a(s, t)) continue;
            int eu, ev;
            if (!entry_exponents(d.rows[s], d.cols[t], d.shift, d.ring, eu, ev))
                throw InternalError("differential entry without a monomial");
            c.d[s].push_back({t, {d.a(s, t), eu, ev}});
        }
    return c;
}

GMat basis_matrix(const BasisChange& b, const std::vector<Generator>& old_gens, Ring ring) {
    GMat m{b.m, gradings_of(b.new_gens), gradings_of(old_gens), {0, 0}, ring};
    for (std::size_t i = 0; i < m.a.rows(); ++i)
        for (std::size_t j = 0; j < m.a.cols(); ++j)
            if (m.a(i, j) && !m.allowed(i, j))
                throw GradingViolation("basis change entry for " + b.new_gens[i].id + " / " + old_gens[j].id);
    return m;
}

BasisChange identity_change(const Complex& c) { return {c.gens, Matrix::identity(c.rank(), c.p)}; }

BasisChange compose(const BasisChange& first, const BasisChange& second, const std::vector<Generator>& old_gens,
                    Ring ring) {
    GMat a = basis_matrix(first, old_gens, ring);
    GMat b = basis_matrix(second, first.new_gens, ring);
    return {second.new_gens, gmul(b, a).a};
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const Complex& c) {
    std::vector<std::string> out;
    if (!is_prime(c.p)) out.push_back("characteristic " + std::to_string(c.p) + " is not prime");
    if (c.d.size() != c.gens.size()) {
        out.push_back("differential table size does not match generator count");
        return out;
    }
    std::map<std::string, int> ids;
    for (const auto& g : c.gens)
        if (++ids[g.id] == 2) out.push_back("duplicate generator id " + g.id);
    for (std::size_t s = 0; s < c.rank(); ++s) {
        std::map<std::tuple<std::size_t, int, int>, int> seen;
        for (const auto& t : c.d[s]) {
            const std::string pair = c.gens[s].id + " -> " + (t.target < c.rank() ? c.gens[t.target].id : "?");
            if (t.target >= c.rank()) { out.push_back("term target out of range at " + c.gens[s].id); continue; }
            if (t.m.coef == 0 || t.m.coef >= c.p) out.push_back("coefficient out of range at " + pair);
            if (t.m.u < 0 || t.m.v < 0) out.push_back("negative exponent at " + pair);
            if (++seen[{t.target, t.m.u, t.m.v}] == 2) out.push_back("duplicate term at " + pair);
            if (c.ring == Ring::R1 && t.m.u > 0 && t.m.v > 0) out.push_back("UV term over R1 at " + pair);
            if (c.ring == Ring::FV && t.m.u > 0) out.push_back("U term over F[V] at " + pair);
            if (c.ring == Ring::FU && t.m.v > 0) out.push_back("V term over F[U] at " + pair);
            const Generator& a = c.gens[s];
            const Generator& b = c.gens[t.target];
            if (b.gu - 2 * t.m.u != a.gu - 1 || b.gv - 2 * t.m.v != a.gv - 1)
                out.push_back("grading violation at " + pair);
        }
    }
    // d^2 with explicit monomials.
    for (std::size_t s = 0; s < c.rank(); ++s) {
        std::map<std::tuple<std::size_t, int, int>, u32> acc;
        for (const auto& t : c.d[s]) {
            if (t.target >= c.rank()) continue;
            for (const auto& t2 : c.d[t.target]) {
                int u = t.m.u + t2.m.u, v = t.m.v + t2.m.v;
                if (c.ring == Ring::R1 && u > 0 && v > 0) continue;
                auto& x = acc[{t2.target, u, v}];
                x = fadd(x, fmul(t.m.coef % c.p, t2.m.coef % c.p, c.p), c.p);
            }
        }
        for (const auto& [k, v] : acc)
            if (v) {
                out.push_back("d^2 != 0 at " + c.gens[s].id);
                break;
            }
    }
    return out;
}

bool is_valid(const Complex& c) { return validate(c).empty(); }

static Complex filter_terms(const Complex& c, Ring ring, bool drop_u, bool drop_v, bool drop_uv) {
    Complex r = c;
    r.ring = ring;
    for (auto& ts : r.d)
        ts.erase(std::remove_if(ts.begin(), ts.end(),
                                [&](const Term& t) {
                                    return (drop_u && t.m.u > 0) || (drop_v && t.m.v > 0) ||
                                           (drop_uv && t.m.u > 0 && t.m.v > 0);
                                }),
                 ts.end());
    return r;
}

Complex reduce_mod_uv(const Complex& c) {
    Complex r = filter_terms(c, Ring::R1, false, false, true);
    if (!is_valid(r)) throw ResultNotAComplex("reduction modulo UV is not a complex");
    return r;
}

Complex quotient_u(const Complex& c) { return filter_terms(c, Ring::FV, true, false, false); }
Complex quotient_v(const Complex& c) { return filter_terms(c, Ring::FU, false, true, false); }

Complex apply_basis_change(const Complex& c, const BasisChange& b) {
    if (b.m.rows() != c.rank() || b.m.cols() != c.rank() || b.new_gens.size() != c.rank())
        throw NotInvertible("basis change has the wrong size");
    GMat bm = basis_matrix(b, c.gens, c.ring);
    GMat binv = ginverse(bm);
    GMat d = differential_matrix(c);
    GMat nd = gmul(gmul(bm, d), binv);
    return complex_from_matrix(nd, b.new_gens, c.p);
}

Complex bar(const Complex& c) {
    Complex r = c;
    if (c.ring == Ring::FU) r.ring = Ring::FV;
    if (c.ring == Ring::FV) r.ring = Ring::FU;
    for (auto& g : r.gens) std::swap(g.gu, g.gv);
    for (auto& ts : r.d)
        for (auto& t : ts) std::swap(t.m.u, t.m.v);
    return r;
}

Complex direct_sum(const std::vector<Complex>& cs) {
    if (cs.empty()) return Complex();
    Complex r(cs[0].ring, cs[0].p);
    std::map<std::string, int> count;
    for (const auto& c : cs) {
        if (c.p != r.p) throw FieldMismatch("direct sum over different fields");
        if (c.ring != r.ring) throw FieldMismatch("direct sum over different rings");
        for (const auto& g : c.gens) ++count[g.id];
    }
    bool clash = std::any_of(count.begin(), count.end(), [](const auto& kv) { return kv.second > 1; });
    for (std::size_t k = 0; k < cs.size(); ++k) {
        std::size_t off = r.rank();
        for (const auto& g : cs[k].gens)
            r.add_generator(clash ? std::to_string(k + 1) + "." + g.id : g.id, g.gu, g.gv);
        for (std::size_t s = 0; s < cs[k].rank(); ++s)
            for (const auto& t : cs[k].d[s]) r.d[off + s].push_back({off + t.target, t.m});
    }
    return r;
}

bool has_length_zero_arrow(const Complex& c) {
    for (const auto& ts : c.d)
        for (const auto& t : ts)
            if (t.m.u == 0 && t.m.v == 0) return true;
    return false;
}

StripResult strip_zero_complexes(const Complex& c0) {
    const u32 p = c0.p;
    const Ring ring = c0.ring;
    Complex cur = c0;
    BasisChange total = identity_change(c0);
    std::vector<std::pair<Generator, Generator>> pairs;
    std::vector<BasisChange> pair_rows;  // rows of the final change for split pairs
    // Each round splits one zero complex off the current complex.
    while (true) {
        std::size_t s = cur.rank(), t = cur.rank();
        for (std::size_t a = 0; a < cur.rank() && s == cur.rank(); ++a)
            for (const auto& term : cur.d[a])
                if (term.m.u == 0 && term.m.v == 0) {
                    s = a;
                    t = term.target;
                    break;
                }
        if (s == cur.rank()) break;
        const std::size_t n = cur.rank();
        GMat d = differential_matrix(cur);
        // Step 1: replace t by the differential of s.
        BasisChange b1{cur.gens, Matrix::identity(n, p)};
        for (std::size_t j = 0; j < n; ++j) b1.m(t, j) = d.a(s, j);
        Complex c1 = apply_basis_change(cur, b1);
        GMat d1 = differential_matrix(c1);
        // Step 2: clear every other component along the new t.
        BasisChange b2{cur.gens, Matrix::identity(n, p)};
        for (std::size_t e = 0; e < n; ++e)
            if (e != s && e != t && d1.a(e, t)) b2.m(e, s) = fneg(d1.a(e, t), p);
        Complex c2 = apply_basis_change(c1, b2);
        BasisChange step = compose(b1, b2, cur.gens, ring);
        // Step 3: move s and t to the end and drop them from the working complex.
        std::vector<std::size_t> order;
        for (std::size_t e = 0; e < n; ++e)
            if (e != s && e != t) order.push_back(e);
        order.push_back(s);
        order.push_back(t);
        BasisChange perm{{}, Matrix(n, n, p)};
        for (std::size_t k = 0; k < n; ++k) {
            perm.new_gens.push_back(c2.gens[order[k]]);
            perm.m(k, order[k]) = 1;
        }
        Complex c3 = apply_basis_change(c2, perm);
        BasisChange full = compose(step, perm, cur.gens, ring);
        // Extend to the whole original basis: the earlier pairs stay fixed.
        const std::size_t total_n = c0.rank();
        BasisChange ext{{}, Matrix::identity(total_n, p)};
        ext.m.set_block(0, 0, full.m);
        ext.new_gens = full.new_gens;
        for (const auto& pr : pairs) {
            ext.new_gens.push_back(pr.first);
            ext.new_gens.push_back(pr.second);
        }
        // The current total maps the input to (cur gens, earlier pairs); the two
        // freshly split generators move right before the earlier pairs.
        total = compose(total, ext, c0.gens, ring);
        pairs.insert(pairs.begin(), {c3.gens[n - 2], c3.gens[n - 1]});
        Complex next(ring, p);
        for (std::size_t k = 0; k + 2 < n; ++k) next.add_generator(c3.gens[k].id, c3.gens[k].gu, c3.gens[k].gv);
        for (std::size_t k = 0; k + 2 < n; ++k)
            for (const auto& term : c3.d[k]) {
                if (term.target >= n - 2) throw InternalError("zero complex did not split");
                next.d[k].push_back(term);
            }
        for (std::size_t k = n - 2; k < n; ++k)
            for (const auto& term : c3.d[k])
                if (term.target < n - 2) throw InternalError("zero complex did not split");
        cur = next;
    }
    return {cur, pairs.size(), total};
}

void infer_gradings(Complex& c, const std::vector<std::pair<std::string, Grading>>& anchors) {
    const std::size_t n = c.rank();
    std::vector<std::optional<Grading>> g(n);
    std::vector<std::vector<std::pair<std::size_t, Grading>>> adj(n);
    for (std::size_t s = 0; s < n; ++s)
        for (const auto& t : c.d[s]) {
            // gr(t) = gr(s) + (2u - 1, 2v - 1)
            Grading delta{2 * t.m.u - 1, 2 * t.m.v - 1};
            adj[s].push_back({t.target, delta});
            adj[t.target].push_back({s, Grading{-delta.u, -delta.v}});
        }
    std::queue<std::size_t> q;
    for (const auto& [id, gr] : anchors) {
        auto k = c.index_of(id);
        if (!k) throw GradingViolation("anchor names unknown generator " + id);
        if (g[*k] && *g[*k] != gr) throw GradingViolation("conflicting anchors at " + id);
        g[*k] = gr;
        q.push(*k);
    }
    while (!q.empty()) {
        std::size_t s = q.front();
        q.pop();
        for (const auto& [t, delta] : adj[s]) {
            Grading want = *g[s] + delta;
            if (!g[t]) {
                g[t] = want;
                q.push(t);
            } else if (*g[t] != want) {
                throw GradingViolation("inconsistent gradings around " + c.gens[t].id);
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!g[k]) throw GradingViolation("no anchor reaches generator " + c.gens[k].id);
        c.gens[k].gu = g[k]->u;
        c.gens[k].gv = g[k]->v;
    }
}

Complex permute(const Complex& c, const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
    Complex r(c.ring, c.p);
    for (std::size_t k = 0; k < perm.size(); ++k) r.add_generator(c.gens[perm[k]].id, c.gens[perm[k]].gu, c.gens[perm[k]].gv);
    for (std::size_t k = 0; k < perm.size(); ++k)
        for (const auto& t : c.d[perm[k]]) r.d[k].push_back({inv[t.target], t.m});
    return r;
}

// ---------------------------------------------------------------------------

Complex parse_complex(const std::string& text, std::optional<u32> char_override) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    u32 p = 0;
    Ring ring = Ring::R1;
    std::vector<std::pair<std::string, Grading>> anchors;
    struct GenLine { std::string id; std::optional<Grading> gr; int line; };
    struct DLine { std::string s, t; long long coef; int u, v; int line; };
    std::vector<GenLine> gens;
    std::vector<DLine> terms;
    auto fail = [&](const std::string& what) { throw SyntaxError("line " + std::to_string(lineno) + ": " + what); };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        std::vector<std::string> rest;
        for (std::string w; ls >> w;) rest.push_back(w);
        auto to_int = [&](const std::string& w) -> long long {
            try {
                std::size_t pos = 0;
                long long v = std::stoll(w, &pos);
                if (pos != w.size()) fail("bad integer '" + w + "'");
                return v;
            } catch (const std::logic_error&) {
                fail("bad integer '" + w + "'");
            }
            return 0;
        };
        if (kw == "char") {
            if (rest.size() != 1) fail("char takes one value");
            long long v = to_int(rest[0]);
            if (v < 2 || !is_prime(static_cast<u32>(v))) fail("characteristic must be prime");
            p = static_cast<u32>(v);
        } else if (kw == "ring") {
            if (rest.size() != 1) fail("ring takes one value");
            if (rest[0] == "r1") ring = Ring::R1;
            else if (rest[0] == "fuv") ring = Ring::FUV;
            else fail("unknown ring '" + rest[0] + "'");
        } else if (kw == "anchor") {
            if (rest.size() != 3) fail("anchor takes id gu gv");
            anchors.push_back({rest[0], {static_cast<int>(to_int(rest[1])), static_cast<int>(to_int(rest[2]))}});
        } else if (kw == "gen") {
            if (rest.size() == 1) gens.push_back({rest[0], std::nullopt, lineno});
            else if (rest.size() == 3)
                gens.push_back({rest[0], Grading{static_cast<int>(to_int(rest[1])), static_cast<int>(to_int(rest[2]))}, lineno});
            else fail("gen takes id [gu gv]");
        } else if (kw == "d") {
            if (rest.size() != 5) fail("d takes source target coef u v");
            DLine t{rest[0], rest[1], to_int(rest[2]), static_cast<int>(to_int(rest[3])), static_cast<int>(to_int(rest[4])), lineno};
            if (t.u < 0 || t.v < 0) fail("negative exponent");
            terms.push_back(t);
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
    if (char_override) {
        if (*char_override < 2 || !is_prime(*char_override)) throw NotPrime(std::to_string(*char_override));
        p = *char_override;
    }
    if (p == 0) throw SyntaxError("missing 'char' header");
    Complex c(ring, p);
    bool need_infer = false;
    for (const auto& g : gens) {
        lineno = g.line;
        if (c.index_of(g.id)) fail("duplicate generator " + g.id);
        c.add_generator(g.id, g.gr ? g.gr->u : 0, g.gr ? g.gr->v : 0);
        if (!g.gr) need_infer = true;
    }
    std::map<std::tuple<std::string, std::string, int, int>, int> seen;
    for (const auto& t : terms) {
        lineno = t.line;
        auto s = c.index_of(t.s), g = c.index_of(t.t);
        if (!s || !g) fail("unknown generator in differential line");
        if (++seen[{t.s, t.t, t.u, t.v}] > 1) fail("duplicate differential line " + t.s + " " + t.t);
        if (t.coef == 0 || (!char_override && freduce(t.coef, p) == 0)) fail("zero coefficient");
        if (freduce(t.coef, p) == 0) continue;  // vanishes in the overriding characteristic
        c.d[*s].push_back({*g, {freduce(t.coef, p), t.u, t.v}});
    }
    if (need_infer) {
        if (anchors.empty()) throw SyntaxError("generators without gradings need an anchor");
        std::vector<std::pair<std::string, Grading>> explicit_anchors = anchors;
        for (const auto& g : gens)
            if (g.gr) explicit_anchors.push_back({g.id, *g.gr});
        try {
            infer_gradings(c, explicit_anchors);
        } catch (const GradingViolation& e) {
            throw ValidationError(e.what());
        }
    }
    auto problems = validate(c);
    if (!problems.empty()) throw ValidationError(problems.front());
    return c;
}

std::string print_complex(const Complex& c) {
    std::ostringstream os;
    os << "char " << c.p << "\n";
    os << "ring " << (c.ring == Ring::FUV ? "fuv" : "r1") << "\n";
    for (const auto& g : c.gens) os << "gen " << g.id << " " << g.gu << " " << g.gv << "\n";
    for (std::size_t s = 0; s < c.rank(); ++s)
        for (const auto& t : c.d[s])
            os << "d " << c.gens[s].id << " " << c.gens[t.target].id << " " << t.m.coef << " " << t.m.u << " " << t.m.v << "\n";
    return os.str();
}

}  // namespace cfl
