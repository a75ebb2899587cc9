#include "cfl/classify.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <regex>
#include <sstream>
#include <tuple>

namespace cfl {

namespace {

Direction letter_direction(SnakeKind kind, std::size_t i) {
    // i is 1-based; odd letters are horizontal unless the snake starts vertically.
    bool odd = i % 2 == 1;
    if (kind == SnakeKind::Vertical) odd = !odd;
    return odd ? Direction::Horizontal : Direction::Vertical;
}

void add_arrow(Complex& c, std::size_t src, std::size_t tgt, u32 coef, Direction d, int len) {
    if (d == Direction::Horizontal) c.add_term(src, tgt, coef, len, 0);
    else c.add_term(src, tgt, coef, 0, len);
}

std::vector<u32> matrix_key(const Matrix& m) {
    std::vector<u32> k = {static_cast<u32>(m.rows()), static_cast<u32>(m.cols())};
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) k.push_back(m(i, j));
    return k;
}

std::vector<int> reversed_negated(const std::vector<int>& s) {
    std::vector<int> r(s.rbegin(), s.rend());
    for (auto& x : r) x = -x;
    return r;
}

bool higher(const std::vector<int>& a, const std::vector<int>& b) { return compare_words(a, b) > 0; }

// Block of the direction-d part of the differential from slot a to slot b.
Matrix link_block(const Complex& c, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                  Direction d, int& len) {
    Matrix m(a.size(), b.size(), c.p);
    std::map<std::size_t, std::size_t> col;
    for (std::size_t k = 0; k < b.size(); ++k) col[b[k]] = k;
    for (std::size_t r = 0; r < a.size(); ++r)
        for (const auto& t : c.d[a[r]]) {
            auto it = col.find(t.target);
            if (it == col.end()) continue;
            bool pure = d == Direction::Vertical ? (t.m.u == 0 && t.m.v > 0) : (t.m.v == 0 && t.m.u > 0);
            if (!pure) continue;
            m(r, it->second) = t.m.coef;
            len = d == Direction::Vertical ? t.m.v : t.m.u;
        }
    return m;
}

// Reads a chain of slots joined by links.  For strings there are K - 1 links.
Band read_slots(const Complex& split, const std::vector<std::vector<std::size_t>>& slots,
                const std::vector<Direction>& dirs) {
    Band b;
    const std::size_t K = slots.size();
    b.w = slots[0].size();
    std::size_t nnz = 0;
    for (std::size_t k = 0; k < K; ++k) b.grading.push_back(split.gens[slots[k][0]].gr());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const auto& s1 = slots[k];
        const auto& s2 = slots[(k + 1) % K];
        int l1 = 0, l2 = 0;
        Matrix fwd = link_block(split, s1, s2, dirs[k], l1);
        Matrix bwd = link_block(split, s2, s1, dirs[k], l2);
        if (fwd.is_zero() == bwd.is_zero()) throw InternalError("slot link has no unique arrow");
        const Matrix& blk = fwd.is_zero() ? bwd : fwd;
        if (!is_invertible(blk)) throw InternalError("slot link is not an isomorphism");
        b.letter.push_back(fwd.is_zero() ? l2 : -l1);
        b.dir.push_back(dirs[k]);
        b.block.push_back(blk);
        for (std::size_t i = 0; i < blk.rows(); ++i)
            for (std::size_t j = 0; j < blk.cols(); ++j) nnz += blk(i, j) != 0;
    }
    std::size_t terms = 0;
    for (const auto& s : slots)
        for (std::size_t g : s) terms += split.d[g].size();
    if (terms != nnz) throw InternalError("summand has arrows outside its slot chain");
    return b;
}

SnakeDescriptor read_snake(const Band& b) {
    SnakeDescriptor d;
    const std::size_t K = b.grading.size();
    if (K == 1) {
        d.anchor = b.grading[0];
        return d;
    }
    std::vector<int> fwd = b.letter, bwd = reversed_negated(b.letter);
    const Direction first = b.dir.front(), last = b.dir.back();
    bool use_fwd = true;
    if (first == Direction::Horizontal && last == Direction::Vertical) {
        d.kind = SnakeKind::Standard;
    } else if (first == Direction::Vertical && last == Direction::Horizontal) {
        d.kind = SnakeKind::Standard;
        use_fwd = false;
    } else {
        d.kind = first == Direction::Horizontal ? SnakeKind::Horizontal : SnakeKind::Vertical;
        use_fwd = !higher(bwd, fwd);
    }
    d.seq = use_fwd ? fwd : bwd;
    d.anchor = use_fwd ? b.grading.front() : b.grading.back();
    return d;
}

}  // namespace

std::vector<int> minimal_even_period(const std::vector<int>& period) {
    const std::size_t n = period.size();
    if (n == 0 || n % 2) throw BadPeriod("a period must have positive even length");
    for (std::size_t q = 2; q <= n; q += 2) {
        if (n % q) continue;
        bool ok = true;
        for (std::size_t i = q; i < n && ok; ++i) ok = period[i] == period[i - q];
        if (ok) return std::vector<int>(period.begin(), period.begin() + static_cast<long>(q));
    }
    return period;
}

int shape_drift(const std::vector<int>& period) {
    int s = 0;
    for (std::size_t i = 0; i < period.size(); i += 2) s += period[i];
    return s;
}

std::vector<int> canonical_shape(const std::vector<int>& period) {
    std::vector<int> s = minimal_even_period(period);
    int odd = 0, even = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == 0) throw BadPeriod("shape letters must be nonzero");
        (i % 2 == 0 ? odd : even) += s[i];
    }
    if (odd != even) throw BadPeriod("horizontal and vertical letters do not balance");
    const std::size_t n = s.size();
    std::vector<int> best;
    auto consider = [&](const std::vector<int>& cand) {
        if (best.empty() || higher(cand, best)) best = cand;
    };
    for (std::size_t k = 0; k < n; k += 2) {
        std::vector<int> shift(n), rev(n);
        for (std::size_t i = 0; i < n; ++i) {
            shift[i] = s[(i + k) % n];
            // 1-based s'_i = -s_{2p+2k-i}; here i is 0-based.
            rev[i] = -s[(2 * n + k - i - 2) % n];
        }
        consider(shift);
        consider(rev);
    }
    return best;
}

LocalSystemDescriptor local_system_triple(const Band& band, u32 p) {
    const std::size_t K = band.letter.size();
    if (K == 0 || K % 2 || band.block.size() != K || band.grading.size() != K)
        throw InvalidDescriptor("a band needs an even number of links");
    struct Reading {
        std::vector<int> letters;
        std::vector<std::size_t> slots;
    };
    std::optional<Reading> best;
    for (std::size_t s = 0; s < K; ++s) {
        // Forward from slot s.
        if (band.dir[s] == Direction::Horizontal) {
            Reading r;
            for (std::size_t k = 0; k < K; ++k) {
                r.slots.push_back((s + k) % K);
                r.letters.push_back(band.letter[(s + k) % K]);
            }
            if (!best || higher(r.letters, best->letters)) best = r;
        }
        // Backward from slot s: the first link crossed is link s - 1.
        const std::size_t prev = (s + K - 1) % K;
        if (band.dir[prev] == Direction::Horizontal) {
            Reading r;
            for (std::size_t k = 0; k < K; ++k) {
                r.slots.push_back((s + K - k) % K);
                r.letters.push_back(-band.letter[(s + 2 * K - 1 - k) % K]);
            }
            if (!best || higher(r.letters, best->letters)) best = r;
        }
    }
    if (!best) throw InvalidDescriptor("band has no horizontal link");
    // Link joining reading positions k and k + 1 in the band's own numbering.
    auto link_of = [&](std::size_t a, std::size_t b) {
        if ((a + 1) % K == b) return a;
        return b;
    };
    auto source_is = [&](std::size_t a, std::size_t b) {
        // The letter read from a towards b is negative exactly when a is the source.
        std::size_t l = link_of(a, b);
        int letter = (l == a) ? band.letter[l] : -band.letter[l];
        return letter < 0;
    };
    const auto& q = best->slots;
    Matrix N = Matrix::identity(band.w, p);
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const Matrix& B = band.block[link_of(q[k], q[k + 1])];
        N = source_is(q[k], q[k + 1]) ? N * B : N * invert(B);
    }
    const Matrix& B = band.block[link_of(q[K - 1], q[0])];
    Matrix A = source_is(q[K - 1], q[0]) ? N * B : B * invert(N);
    LocalSystemDescriptor d;
    d.shape = best->letters;
    d.anchor = band.grading[q[0]];
    d.w = band.w;
    d.holonomy = rational_canonical_form(A);
    if (canonical_shape(d.shape) != d.shape) throw InternalError("highest reading is not the canonical shape");
    return d;
}

Complex realize(const SnakeDescriptor& d, u32 p) {
    const std::size_t m = d.seq.size();
    const bool even = m % 2 == 0;
    if ((d.kind == SnakeKind::Standard) != even) throw InvalidDescriptor("sequence length does not fit the snake kind");
    for (int b : d.seq)
        if (b == 0) throw InvalidDescriptor("snake letters must be nonzero");
    Complex c(Ring::R1, p);
    Grading g = d.anchor;
    c.add_generator("x0", g.u, g.v);
    for (std::size_t i = 1; i <= m; ++i) {
        Direction dir = letter_direction(d.kind, i);
        g = g + letter_shift(dir, d.seq[i - 1]);
        c.add_generator("x" + std::to_string(i), g.u, g.v);
        const int b = d.seq[i - 1];
        if (b > 0) add_arrow(c, i, i - 1, 1, dir, b);
        else add_arrow(c, i - 1, i, 1, dir, -b);
    }
    return c;
}

Complex realize(const LocalSystemDescriptor& d, u32 p) {
    const std::size_t K = d.shape.size();
    if (K == 0 || K % 2) throw InvalidDescriptor("shape period must have positive even length");
    for (int b : d.shape)
        if (b == 0) throw InvalidDescriptor("shape letters must be nonzero");
    if (d.holonomy.rows() != d.w || d.holonomy.cols() != d.w || d.w == 0 || d.holonomy.prime() != p ||
        !is_invertible(d.holonomy))
        throw InvalidDescriptor("holonomy must be an invertible w x w matrix over the field");
    std::vector<Grading> g(K + 1);
    g[0] = d.anchor;
    for (std::size_t i = 1; i <= K; ++i) g[i] = g[i - 1] + letter_shift(letter_direction(SnakeKind::Horizontal, i), d.shape[i - 1]);
    if (g[K] != g[0]) throw InvalidDescriptor("shape does not close up in the plane");
    Complex c(Ring::R1, p);
    auto id = [&](std::size_t k, std::size_t r) { return k * d.w + r; };
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t r = 0; r < d.w; ++r)
            c.add_generator(d.w == 1 ? "x" + std::to_string(k) : "x" + std::to_string(k) + "_" + std::to_string(r),
                            g[k].u, g[k].v);
    for (std::size_t i = 1; i < K; ++i) {
        Direction dir = letter_direction(SnakeKind::Horizontal, i);
        const int b = d.shape[i - 1];
        for (std::size_t r = 0; r < d.w; ++r) {
            if (b > 0) add_arrow(c, id(i, r), id(i - 1, r), 1, dir, b);
            else add_arrow(c, id(i - 1, r), id(i, r), 1, dir, -b);
        }
    }
    const int b = d.shape[K - 1];
    for (std::size_t r = 0; r < d.w; ++r)
        for (std::size_t s = 0; s < d.w; ++s) {
            if (!d.holonomy(r, s)) continue;
            if (b > 0) add_arrow(c, id(0, r), id(K - 1, s), d.holonomy(r, s), Direction::Vertical, b);
            else add_arrow(c, id(K - 1, r), id(0, s), d.holonomy(r, s), Direction::Vertical, -b);
        }
    return c;
}

Complex realize_zero(u32 p, Grading anchor) {
    Complex c(Ring::R1, p);
    c.add_generator("x", anchor.u, anchor.v);
    c.add_generator("y", anchor.u - 1, anchor.v - 1);
    c.add_term(0, 1, 1, 0, 0);
    return c;
}

Complex realize(const Decomposition& d) {
    std::vector<Complex> parts;
    for (const auto& s : d.snakes) parts.push_back(realize(s, d.p));
    for (const auto& l : d.systems) parts.push_back(realize(l, d.p));
    for (std::size_t k = 0; k < d.zeros; ++k) parts.push_back(realize_zero(d.p));
    if (parts.empty()) return Complex(Ring::R1, d.p);
    return direct_sum(parts);
}

Decomposition decompose(const Complex& input, std::vector<EngineStep>* trace) {
    Complex c = input.ring == Ring::FUV ? reduce_mod_uv(input) : input;
    if (c.ring != Ring::R1) throw ValidationError("decompose needs a complex over R1 or F[U,V]");
    auto problems = validate(c);
    if (!problems.empty()) throw ValidationError(problems.front());
    StripResult st = strip_zero_complexes(c);
    NormalForm nf = normal_form(st.reduced, trace);
    Complex split = apply_basis_change(st.reduced, nf.floors.x.change);

    Decomposition out;
    out.p = c.p;
    out.zeros = st.zero_count;
    out.rounds = nf.rounds;
    std::vector<Summand> summands;
    std::vector<SnakeDescriptor> snakes;
    std::vector<LocalSystemDescriptor> systems;
    for (const auto& pc : nf.pieces) {
        const Orbit& orb = nf.orbits[pc.orbit];
        const std::size_t K = orb.positions.size();
        const std::size_t w = pc.size / K;
        std::vector<std::vector<std::size_t>> slots(K);
        for (std::size_t r = 0; r < w; ++r)
            for (std::size_t s = 0; s < K; ++s) slots[s].push_back(pc.first + r * K + s);
        Band b = read_slots(split, slots, orb.links);
        if (pc.band) {
            summands.push_back({SummandKind::LocalSystem, systems.size(), pc.first, pc.size});
            systems.push_back(local_system_triple(b, c.p));
        } else {
            summands.push_back({SummandKind::Snake, snakes.size(), pc.first, pc.size});
            snakes.push_back(read_snake(b));
        }
    }
    // Canonical order, remapping summand indices.
    std::vector<std::size_t> so(snakes.size()), lo(systems.size());
    std::iota(so.begin(), so.end(), 0);
    std::iota(lo.begin(), lo.end(), 0);
    auto skey = [&](std::size_t i) {
        const auto& s = snakes[i];
        return std::make_tuple(static_cast<int>(s.kind), s.seq, s.anchor);
    };
    auto lkey = [&](std::size_t i) {
        const auto& l = systems[i];
        return std::make_tuple(l.shape, l.anchor, l.w, matrix_key(l.holonomy));
    };
    std::stable_sort(so.begin(), so.end(), [&](std::size_t a, std::size_t b) { return skey(a) < skey(b); });
    std::stable_sort(lo.begin(), lo.end(), [&](std::size_t a, std::size_t b) { return lkey(a) < lkey(b); });
    std::vector<std::size_t> s_rank(so.size()), l_rank(lo.size());
    for (std::size_t i = 0; i < so.size(); ++i) {
        out.snakes.push_back(snakes[so[i]]);
        s_rank[so[i]] = i;
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
        out.systems.push_back(systems[lo[i]]);
        l_rank[lo[i]] = i;
    }
    for (auto& s : summands) s.index = s.kind == SummandKind::Snake ? s_rank[s.index] : l_rank[s.index];
    const std::size_t nr = st.reduced.rank();
    for (std::size_t k = 0; k < st.zero_count; ++k) summands.push_back({SummandKind::Zero, k, nr + 2 * k, 2});
    out.summands = summands;

    // Total change: strip, then the split basis on the reduced part.
    const std::size_t n = c.rank();
    Matrix m = Matrix::identity(n, c.p);
    m.set_block(0, 0, nf.floors.x.change.m);
    std::vector<Generator> gens = nf.floors.x.gens;
    for (std::size_t k = nr; k < n; ++k) gens.push_back(st.change.new_gens[k]);
    out.change = compose(st.change, {gens, m}, c.gens, c.ring);
    return out;
}

bool decomposition_equal(const Decomposition& a, const Decomposition& b) {
    if (a.p != b.p || a.zeros != b.zeros || a.snakes.size() != b.snakes.size() || a.systems.size() != b.systems.size())
        return false;
    // Multiset comparison: descriptors built by hand need not be in canonical order.
    auto skey = [](const SnakeDescriptor& s) { return std::make_tuple(static_cast<int>(s.kind), s.seq, s.anchor); };
    auto lkey = [](const LocalSystemDescriptor& l) {
        return std::make_tuple(l.shape, l.anchor, l.w, matrix_key(l.holonomy));
    };
    auto sorted = [](auto v, auto key) {
        std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
        return v;
    };
    return sorted(a.snakes, skey) == sorted(b.snakes, skey) && sorted(a.systems, lkey) == sorted(b.systems, lkey);
}

namespace {

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string render_matrix(const Matrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ",[" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? "," : "") + std::to_string(m(i, j));
        s += "]";
    }
    return s + "]";
}

std::string render_grading(Grading g) { return "(" + std::to_string(g.u) + "," + std::to_string(g.v) + ")"; }

}  // namespace

std::string render(const SnakeDescriptor& d) {
    const char* name = d.kind == SnakeKind::Standard ? "C" : d.kind == SnakeKind::Horizontal ? "S_h" : "S_v";
    return std::string(name) + "(" + join(d.seq) + ")";
}

std::string render(const LocalSystemDescriptor& d) {
    return "LS(shape=[" + join(d.shape) + "]; w=" + std::to_string(d.w) + "; A=rcf" + render_matrix(d.holonomy) +
           "; anchor=" + render_grading(d.anchor) + ")";
}

std::string render(const Decomposition& d) {
    std::ostringstream os;
    for (const auto& s : d.snakes) os << render(s) << " anchor=" << render_grading(s.anchor) << "\n";
    for (const auto& l : d.systems) os << render(l) << "\n";
    for (std::size_t k = 0; k < d.zeros; ++k) os << "Z\n";
    return os.str();
}

namespace {

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    for (std::string w; std::getline(in, w, ',');) out.push_back(std::stoi(w));
    return out;
}

}  // namespace

Decomposition parse_decomposition(const std::string& text, u32 p) {
    static const std::regex snake_re(R"(^(C|S_h|S_v)\(([-0-9,]*)\)(anchor=\((-?[0-9]+),(-?[0-9]+)\))?$)");
    static const std::regex ls_re(
        R"(^LS\(shape=\[([-0-9,]+)\];w=([0-9]+);A=rcf\[(.*)\];anchor=\((-?[0-9]+),(-?[0-9]+)\)\)$)");
    Decomposition d;
    d.p = p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }),
                   line.end());
        if (line.empty()) continue;
        std::smatch m;
        if (line == "Z") {
            ++d.zeros;
        } else if (std::regex_match(line, m, snake_re)) {
            SnakeDescriptor s;
            s.kind = m[1] == "C" ? SnakeKind::Standard : m[1] == "S_h" ? SnakeKind::Horizontal : SnakeKind::Vertical;
            s.seq = split_ints(m[2]);
            if (m[3].matched) s.anchor = {std::stoi(m[4]), std::stoi(m[5])};
            d.snakes.push_back(s);
        } else if (std::regex_match(line, m, ls_re)) {
            LocalSystemDescriptor l;
            l.shape = split_ints(m[1]);
            l.w = std::stoul(m[2]);
            l.anchor = {std::stoi(m[4]), std::stoi(m[5])};
            // Rows look like [a,b],[c,d].
            std::vector<std::vector<long long>> rows;
            static const std::regex row_re(R"(\[([-0-9,]+)\])");
            const std::string body = m[3];
            for (auto it = std::sregex_iterator(body.begin(), body.end(), row_re); it != std::sregex_iterator(); ++it) {
                std::vector<long long> row;
                for (int x : split_ints((*it)[1])) row.push_back(x);
                rows.push_back(row);
            }
            if (rows.size() != l.w)
                throw SyntaxError("line " + std::to_string(lineno) + ": holonomy must have w rows");
            for (const auto& r : rows)
                if (r.size() != l.w) throw SyntaxError("line " + std::to_string(lineno) + ": holonomy must be w by w");
            l.holonomy = Matrix::from_rows(rows, p);
            d.systems.push_back(l);
        } else {
            throw SyntaxError("line " + std::to_string(lineno) + ": not a descriptor");
        }
    }
    return d;
}

}  // namespace cfl
