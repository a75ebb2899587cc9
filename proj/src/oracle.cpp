#include "cfl/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

namespace cfl {

namespace {

void check_budget(const Complex& c, const SearchBudget& budget) {
    if (c.p != budget.p) throw FieldMismatch("search budget is set for characteristic " + std::to_string(budget.p));
    if (c.rank() > budget.max_rank)
        throw BudgetExceeded("rank " + std::to_string(c.rank()) + " is above the search limit " +
                             std::to_string(budget.max_rank));
}

// p^dim, or throws when it passes the candidate limit.
std::size_t search_size(u32 p, std::size_t dim, const SearchBudget& budget) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) {
        total *= p;
        if (total > budget.max_candidates)
            throw BudgetExceeded("search space p^" + std::to_string(dim) + " is above the candidate limit");
    }
    return total;
}

// Homogeneous degree-zero maps from the generators of c to those of d that
// commute with the differentials, as a basis over the allowed entries.
struct MapSpace {
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    Matrix basis;  // rows are solutions, one column per entry
    std::vector<Grading> rows, cols;
    Ring ring = Ring::R1;
};

MapSpace chain_maps(const Complex& c, const Complex& d) {
    MapSpace s;
    s.rows = gradings_of(d);
    s.cols = gradings_of(c);
    s.ring = c.ring;
    GMat probe{Matrix(d.rank(), c.rank(), c.p), s.rows, s.cols, {0, 0}, c.ring};
    for (std::size_t i = 0; i < d.rank(); ++i)
        for (std::size_t j = 0; j < c.rank(); ++j)
            if (probe.allowed(i, j)) s.entries.push_back({i, j});
    const GMat dc = differential_matrix(c), dd = differential_matrix(d);
    const std::size_t cells = d.rank() * c.rank();
    Matrix eq(s.entries.size(), cells, c.p);
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
        GMat e = probe;
        e.a(s.entries[k].first, s.entries[k].second) = 1;
        Matrix diff = gmul(e, dc).a - gmul(dd, e).a;
        for (std::size_t i = 0; i < d.rank(); ++i)
            for (std::size_t j = 0; j < c.rank(); ++j) eq(k, i * c.rank() + j) = diff(i, j);
    }
    s.basis = cells ? left_kernel(eq) : Matrix::identity(s.entries.size(), c.p);
    return s;
}

// Calls f on every element of the space until it returns true.
bool for_each_map(const MapSpace& s, u32 p, const SearchBudget& budget, const std::function<bool(const GMat&)>& f) {
    const std::size_t dim = s.basis.rows();
    const std::size_t total = search_size(p, dim, budget);
    std::vector<u32> coef(dim, 0);
    for (std::size_t it = 0; it < total; ++it) {
        GMat m{Matrix(s.rows.size(), s.cols.size(), p), s.rows, s.cols, {0, 0}, s.ring};
        for (std::size_t k = 0; k < dim; ++k) {
            if (!coef[k]) continue;
            for (std::size_t e = 0; e < s.entries.size(); ++e) {
                auto [i, j] = s.entries[e];
                m.a(i, j) = fadd(m.a(i, j), fmul(coef[k], s.basis(k, e), p), p);
            }
        }
        if (f(m)) return true;
        for (std::size_t k = 0; k < dim; ++k) {
            if (++coef[k] < p) break;
            coef[k] = 0;
        }
    }
    return false;
}

// A degree-zero homogeneous matrix is invertible iff its scalar part is.
bool invertible(const GMat& m) {
    if (m.rows.size() != m.cols.size()) return false;
    const std::size_t n = m.rows.size();
    Matrix b0(n, n, m.a.prime());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m.rows[i] == m.cols[j]) b0(i, j) = m.a(i, j);
    return is_invertible(b0);
}

std::vector<Grading> sorted_gradings(const Complex& c) {
    auto g = gradings_of(c);
    std::sort(g.begin(), g.end());
    return g;
}

Complex restrict_to(const Complex& c, std::size_t first, std::size_t size) {
    Complex out(c.ring, c.p);
    for (std::size_t k = 0; k < size; ++k) {
        const auto& g = c.gens[first + k];
        out.add_generator(g.id, g.gu, g.gv);
    }
    for (std::size_t k = 0; k < size; ++k)
        for (const auto& t : c.d[first + k]) {
            if (t.target < first || t.target >= first + size) throw InternalError("idempotent split is not a direct sum");
            out.add_term(k, t.target - first, t.m.coef, t.m.u, t.m.v);
        }
    return out;
}

void split_into(const Complex& c, const SearchBudget& budget, std::vector<Complex>& out) {
    const std::size_t n = c.rank();
    const u32 p = c.p;
    if (n <= 1) {
        out.push_back(c);
        return;
    }
    const MapSpace ends = chain_maps(c, c);
    const GMat id = gidentity(ends.rows, Ring::R1, p);
    std::optional<GMat> idem;
    for_each_map(ends, p, budget, [&](const GMat& e) {
        if (e.a.is_zero() || e.a == id.a) return false;
        if (!(gmul(e, e).a == e.a)) return false;
        idem = e;
        return true;
    });
    if (!idem) {
        out.push_back(c);
        return;
    }
    // Rows of e span im(e) and rows of 1 - e span im(1 - e); pick n of them
    // forming a basis.
    GMat f = id;
    f.a = id.a - idem->a;
    std::vector<std::pair<const GMat*, std::size_t>> pool;
    for (std::size_t i = 0; i < n; ++i) pool.push_back({&*idem, i});
    for (std::size_t i = 0; i < n; ++i) pool.push_back({&f, i});
    std::vector<bool> pick(2 * n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(n), true);
    do {
        GMat b{Matrix(n, n, p), {}, ends.cols, {0, 0}, Ring::R1};
        std::size_t row = 0, from_e = 0;
        for (std::size_t k = 0; k < 2 * n; ++k) {
            if (!pick[k]) continue;
            auto [src, i] = pool[k];
            b.rows.push_back(ends.rows[i]);
            b.a.set_row(row++, src->a.row(i));
            from_e += k < n;
        }
        if (!invertible(b)) continue;
        BasisChange change{{}, b.a};
        for (std::size_t k = 0; k < n; ++k)
            change.new_gens.push_back({"y" + std::to_string(k), b.rows[k].u, b.rows[k].v});
        Complex moved = apply_basis_change(c, change);
        split_into(restrict_to(moved, 0, from_e), budget, out);
        split_into(restrict_to(moved, from_e, n - from_e), budget, out);
        return;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    throw InternalError("no basis adapted to an idempotent");
}

// Grading of x_i from x_{i-1} across a letter.
Grading step(Grading g, int letter, Direction dir) {
    const int s = letter > 0 ? 1 : -1;
    const int a = std::abs(letter);
    if (dir == Direction::Horizontal) return {g.u + s * (1 - 2 * a), g.v + s};
    return {g.u + s, g.v + s * (1 - 2 * a)};
}

using Counts = std::map<Grading, int>;

// All letter sequences of length len starting at `start` whose visited
// gradings (start included) stay within counts.  dir_of(i) gives the
// direction of the 0-based letter i.
void walk(Grading at, std::size_t len, int bound, Counts& counts, const std::function<Direction(std::size_t)>& dir_of,
          std::vector<int>& seq, const std::function<void(const std::vector<int>&, Grading)>& emit) {
    if (seq.size() == len) {
        emit(seq, at);
        return;
    }
    for (int a = -bound; a <= bound; ++a) {
        if (!a) continue;
        Grading next = step(at, a, dir_of(seq.size()));
        auto it = counts.find(next);
        if (it == counts.end() || it->second == 0) continue;
        --it->second;
        seq.push_back(a);
        walk(next, len, bound, counts, dir_of, seq, emit);
        seq.pop_back();
        ++it->second;
    }
}

int spread_of(const Complex& c) {
    int lo_u = 0, hi_u = 0, lo_v = 0, hi_v = 0;
    for (std::size_t k = 0; k < c.rank(); ++k) {
        const auto& g = c.gens[k];
        if (!k || g.gu < lo_u) lo_u = g.gu;
        if (!k || g.gu > hi_u) hi_u = g.gu;
        if (!k || g.gv < lo_v) lo_v = g.gv;
        if (!k || g.gv > hi_v) hi_v = g.gv;
    }
    return std::max(hi_u - lo_u, hi_v - lo_v);
}

std::vector<Matrix> indecomposable_classes(std::size_t w, u32 p, const SearchBudget& budget) {
    const std::size_t total = search_size(p, w * w, budget);
    std::map<std::vector<u32>, Matrix> seen;
    for (std::size_t code = 0; code < total; ++code) {
        Matrix m(w, w, p);
        std::size_t x = code;
        for (std::size_t i = 0; i < w; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                m(i, j) = static_cast<u32>(x % p);
                x /= p;
            }
        if (!is_invertible(m) || elementary_divisors(m).size() != 1) continue;
        Matrix r = rational_canonical_form(m);
        std::vector<u32> key;
        for (std::size_t i = 0; i < w; ++i)
            for (std::size_t j = 0; j < w; ++j) key.push_back(r(i, j));
        seen.emplace(key, r);
    }
    std::vector<Matrix> out;
    for (auto& [k, m] : seen) out.push_back(m);
    return out;
}

struct Named {
    enum Kind { Zero, Snake, System } kind = Zero;
    SnakeDescriptor snake;
    LocalSystemDescriptor system;
};

// Names an indecomposable piece by testing every candidate descriptor with
// the same generator gradings for isomorphism.
Named name_piece(const Complex& piece, const SearchBudget& budget) {
    const std::size_t n = piece.rank();
    const u32 p = piece.p;
    const auto target = sorted_gradings(piece);
    Counts counts;
    for (const auto& g : target) ++counts[g];
    const int bound = budget.max_exponent ? budget.max_exponent : spread_of(piece) / 2 + 1;
    std::vector<Named> found;
    auto test = [&](const Complex& cand, const Named& name) {
        if (sorted_gradings(cand) != target) return;
        if (brute_force_isomorphic(piece, cand, budget).isomorphic) found.push_back(name);
    };

    for (const auto& [a, k] : counts) {
        Named z;
        test(realize_zero(p, a), z);
    }

    const SnakeKind kinds[] = {SnakeKind::Standard, SnakeKind::Horizontal, SnakeKind::Vertical};
    for (SnakeKind kind : kinds) {
        const std::size_t len = n - 1;
        if ((kind == SnakeKind::Standard) != (len % 2 == 0)) continue;
        auto dir_of = [kind](std::size_t i) {
            const bool h = (i % 2 == 0) != (kind == SnakeKind::Vertical);
            return h ? Direction::Horizontal : Direction::Vertical;
        };
        for (auto& [a, k] : counts) {
            --k;
            std::vector<int> seq;
            walk(a, len, bound, counts, dir_of, seq, [&](const std::vector<int>& s, Grading) {
                if (kind != SnakeKind::Standard) {
                    std::vector<int> r(s.rbegin(), s.rend());
                    for (auto& x : r) x = -x;
                    if (compare_words(s, r) < 0) return;
                }
                Named name;
                name.kind = Named::Snake;
                name.snake = {kind, s, a};
                test(realize(name.snake, p), name);
            });
            ++k;
        }
    }

    for (std::size_t w = 1; w <= n; ++w) {
        if (n % w || (n / w) % 2) continue;
        Counts slots;
        bool fits = true;
        for (const auto& [g, k] : counts) {
            if (k % static_cast<int>(w)) fits = false;
            slots[g] = k / static_cast<int>(w);
        }
        if (!fits) continue;
        const auto classes = indecomposable_classes(w, p, budget);
        auto dir_of = [](std::size_t i) { return i % 2 == 0 ? Direction::Horizontal : Direction::Vertical; };
        for (auto& [a, k] : slots) {
            std::vector<int> seq;
            // The last letter returns to the anchor, whose slot is still free.
            walk(a, n / w, bound, slots, dir_of, seq, [&](const std::vector<int>& s, Grading end) {
                if (end != a || slots[a] != 0) return;
                try {
                    if (minimal_even_period(s) != s || canonical_shape(s) != s) return;
                } catch (const BadPeriod&) {
                    return;
                }
                for (const auto& h : classes) {
                    Named name;
                    name.kind = Named::System;
                    name.system = {s, a, w, h};
                    test(realize(name.system, p), name);
                }
            });
        }
    }
    if (found.empty()) throw InternalError("indecomposable piece matches no descriptor");
    if (found.size() > 1) throw InternalError("indecomposable piece matches several descriptors");
    return found.front();
}

std::vector<u32> entries(const Matrix& m) {
    std::vector<u32> k;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) k.push_back(m(i, j));
    return k;
}

int dense_torsion_order(const Complex& q, bool u_side) {
    // q is a one-variable quotient; the kept variable has exponent e.
    auto exponent = [&](const Monomial& m) { return u_side ? m.u : m.v; };
    int total = 0;
    for (const auto& ts : q.d)
        for (const auto& t : ts) total += exponent(t.m);
    const int top = total + 2;
    const std::size_t n = q.rank();
    auto homology_dim = [&](int N) {
        const std::size_t dim = n * static_cast<std::size_t>(N);
        Matrix m(dim, dim, q.p);
        for (std::size_t s = 0; s < n; ++s)
            for (const auto& t : q.d[s])
                for (int k = 0; k + exponent(t.m) < N; ++k)
                    m(s * N + k, t.target * N + k + exponent(t.m)) = t.m.coef;
        return static_cast<int>(dim) - 2 * static_cast<int>(rank(m));
    };
    // dim H(N) = r N + 2 sum_i min(d_i, N), so the increments settle at r
    // exactly from N = max d_i on.
    std::vector<int> h(top + 2, 0);
    for (int N = 1; N <= top + 1; ++N) h[N] = homology_dim(N);
    const int free_rank = h[top + 1] - h[top];
    for (int N = 0; N <= top; ++N)
        if (h[N + 1] - h[N] == free_rank) return N;
    throw InternalError("torsion order beyond the truncation bound");
}

Complex reduced(const Complex& c) { return c.ring == Ring::FUV ? reduce_mod_uv(c) : c; }

}  // namespace

IsoResult brute_force_isomorphic(const Complex& c, const Complex& d, const SearchBudget& budget) {
    if (c.p != d.p) throw FieldMismatch("complexes over different fields");
    if (c.ring != d.ring) throw ValidationError("complexes over different rings");
    check_budget(c, budget);
    check_budget(d, budget);
    IsoResult out;
    if (c.rank() != d.rank() || sorted_gradings(c) != sorted_gradings(d)) return out;
    if (gradings_of(c) == gradings_of(d) && differential_matrix(c).a == differential_matrix(d).a) {
        out.isomorphic = true;
        out.witness = BasisChange{d.gens, Matrix::identity(c.rank(), c.p)};
        return out;
    }
    const MapSpace maps = chain_maps(c, d);
    for_each_map(maps, c.p, budget, [&](const GMat& b) {
        if (!invertible(b)) return false;
        BasisChange w{d.gens, b.a};
        if (!(differential_matrix(apply_basis_change(c, w)).a == differential_matrix(d).a))
            throw InternalError("chain isomorphism does not carry the differential");
        out.isomorphic = true;
        out.witness = w;
        return true;
    });
    return out;
}

std::vector<Complex> brute_force_split(const Complex& c, const SearchBudget& budget) {
    Complex r = reduced(c);
    check_budget(r, budget);
    auto problems = validate(r);
    if (!problems.empty()) throw ValidationError(problems.front());
    std::vector<Complex> out;
    split_into(r, budget, out);
    return out;
}

Decomposition brute_force_decompose(const Complex& c, const SearchBudget& budget) {
    Decomposition out;
    out.p = c.p;
    for (const Complex& piece : brute_force_split(c, budget)) {
        Named name = name_piece(piece, budget);
        if (name.kind == Named::Zero) ++out.zeros;
        else if (name.kind == Named::Snake) out.snakes.push_back(name.snake);
        else out.systems.push_back(name.system);
    }
    std::sort(out.snakes.begin(), out.snakes.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(static_cast<int>(a.kind), a.seq, a.anchor) <
               std::make_tuple(static_cast<int>(b.kind), b.seq, b.anchor);
    });
    std::sort(out.systems.begin(), out.systems.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(a.shape, a.anchor, a.w, entries(a.holonomy)) <
               std::make_tuple(b.shape, b.anchor, b.w, entries(b.holonomy));
    });
    return out;
}

int dense_torsion_order_u(const Complex& c) { return dense_torsion_order(quotient_v(reduced(c)), true); }
int dense_torsion_order_v(const Complex& c) { return dense_torsion_order(quotient_u(reduced(c)), false); }

std::vector<Complex> all_complexes(std::size_t rank, int spread, u32 p) {
    std::vector<Complex> out;
    std::vector<Grading> points;
    for (int u = 0; u <= spread; ++u)
        for (int v = 0; v <= spread; ++v) points.push_back({u, v});
    std::vector<std::size_t> pick(rank, 0);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t k, std::size_t from) {
        if (k < rank) {
            for (std::size_t i = from; i < points.size(); ++i) {
                pick[k] = i;
                choose(k + 1, i);
            }
            return;
        }
        int min_u = spread, min_v = spread;
        for (std::size_t i : pick) {
            min_u = std::min(min_u, points[i].u);
            min_v = std::min(min_v, points[i].v);
        }
        if (rank && (min_u || min_v)) return;
        Complex base(Ring::R1, p);
        for (std::size_t k2 = 0; k2 < rank; ++k2)
            base.add_generator("x" + std::to_string(k2), points[pick[k2]].u, points[pick[k2]].v);
        struct Slot {
            std::size_t s, t;
            int u, v;
        };
        std::vector<Slot> slots;
        for (std::size_t s = 0; s < rank; ++s)
            for (std::size_t t = 0; t < rank; ++t) {
                int eu, ev;
                if (entry_exponents(base.gens[s].gr(), base.gens[t].gr(), {1, 1}, Ring::R1, eu, ev))
                    slots.push_back({s, t, eu, ev});
            }
        std::size_t total = 1;
        for (std::size_t i = 0; i < slots.size(); ++i) total *= p;
        for (std::size_t code = 0; code < total; ++code) {
            Complex c = base;
            std::size_t x = code;
            for (const auto& sl : slots) {
                const u32 coef = static_cast<u32>(x % p);
                x /= p;
                if (coef) c.add_term(sl.s, sl.t, coef, sl.u, sl.v);
            }
            if (is_valid(c)) out.push_back(c);
        }
    };
    choose(0, 0);
    return out;
}

}  // namespace cfl
