#include "cfl/twostory.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace cfl {

Token Token::crossing(std::size_t i, std::size_t j) { return {TokenKind::Crossing, i, j, 1}; }
Token Token::arrow(std::size_t i, std::size_t j, u32 lambda) { return {TokenKind::CrossoverArrow, i, j, lambda}; }
Token Token::dot(std::size_t i, u32 lambda) { return {TokenKind::BlackDot, i, i, lambda}; }

Matrix Token::matrix(std::size_t n, u32 p) const {
    Matrix m = Matrix::identity(n, p);
    switch (kind) {
        case TokenKind::Crossing:
            m(i, i) = m(j, j) = 0;
            m(i, j) = m(j, i) = 1 % p;
            break;
        case TokenKind::CrossoverArrow:
            m(i, j) = lambda % p;
            break;
        case TokenKind::BlackDot:
            m(i, i) = lambda % p;
            break;
    }
    return m;
}

std::string to_string(const Token& t) {
    switch (t.kind) {
        case TokenKind::Crossing: return "X(" + std::to_string(t.i) + "," + std::to_string(t.j) + ")";
        case TokenKind::CrossoverArrow:
            return "A(" + std::to_string(t.i) + "," + std::to_string(t.j) + ";" + std::to_string(t.lambda) + ")";
        case TokenKind::BlackDot: return "D(" + std::to_string(t.i) + ";" + std::to_string(t.lambda) + ")";
    }
    return "?";
}

std::vector<Token> tokens_from_factors(const std::vector<ElementaryFactor>& fs, u32 p) {
    std::vector<Token> out;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        const auto& f = fs[k];
        if (f.kind == FactorKind::Scale && k + 2 < fs.size() && fs[k + 1].kind == FactorKind::AddUnit &&
            fs[k + 1].i == f.i && fs[k + 2].kind == FactorKind::Scale && fs[k + 2].i == f.i &&
            fmul(f.lambda, fs[k + 2].lambda, p) == 1) {
            out.push_back(Token::arrow(f.i, fs[k + 1].j, f.lambda));
            k += 2;
            continue;
        }
        switch (f.kind) {
            case FactorKind::Transposition: out.push_back(Token::crossing(f.i, f.j)); break;
            case FactorKind::AddUnit: out.push_back(Token::arrow(f.i, f.j, 1)); break;
            case FactorKind::Scale: out.push_back(Token::dot(f.i, f.lambda)); break;
        }
    }
    return out;
}

std::size_t Shaft::local(std::size_t floor_index) const {
    for (std::size_t q = 0; q < strands.size(); ++q)
        if (strands[q] == floor_index) return q;
    throw InternalError("floor index " + std::to_string(floor_index) + " is not in this shaft");
}

Matrix Shaft::product(u32 p) const {
    Matrix m = Matrix::identity(size(), p);
    for (const auto& t : tokens) m = m * t.matrix(size(), p);
    return m;
}

std::vector<std::size_t> Shaft::permutation(std::size_t from, std::size_t to) const {
    // Track which top position each bottom strand occupies.
    std::vector<std::size_t> at(size());
    std::iota(at.begin(), at.end(), 0);
    for (std::size_t k = from; k < to && k < tokens.size(); ++k) {
        const auto& t = tokens[k];
        if (t.kind != TokenKind::Crossing) continue;
        for (auto& a : at) {
            if (a == t.i) a = t.j;
            else if (a == t.j) a = t.i;
        }
    }
    return at;
}

std::size_t TwoStoryComplex::shaft_of(std::size_t floor_index) const {
    for (std::size_t s = 0; s < shafts.size(); ++s)
        for (std::size_t k : shafts[s].strands)
            if (k == floor_index) return s;
    throw InternalError("floor index " + std::to_string(floor_index) + " has no shaft");
}

namespace {

std::vector<Grading> floor_gradings(const SimplifiedBasis& b) {
    std::vector<Grading> g;
    for (const auto& x : b.gens) g.push_back(x.gr());
    return g;
}

GMat floor_matrix(const TwoStoryComplex& t, Floor f) {
    return basis_matrix(t.floor(f).change, t.base.gens, t.base.ring);
}

GMat scalar_gmat(const Matrix& m, const std::vector<Grading>& g, Ring ring) { return {m, g, g, {0, 0}, ring}; }

// Applies new = B * old on one floor, records it and keeps the transition
// matrix equal to the (already updated) shaft products by a compensating
// change on the other floor.
void change_floor(TwoStoryComplex& t, Floor f, const GMat& b, const Matrix& p_old, const std::string& note) {
    const Ring ring = t.base.ring;
    const auto g = floor_gradings(t.bottom);
    SimplifiedBasis& fb = f == Floor::Bottom ? t.bottom : t.top;
    SimplifiedBasis& ob = f == Floor::Bottom ? t.top : t.bottom;
    GMat old_mat = floor_matrix(t, f);
    fb.change.m = gmul(b, old_mat).a;
    t.log.push_back({f, {fb.gens, b.a}, note});
    GMat pn = scalar_gmat(transition_matrix(t), g, ring);
    GMat po = scalar_gmat(p_old, g, ring);
    // Bottom change B: top gets P_new^-1 B P_old.  Top change B: bottom gets P_new B P_old^-1.
    GMat comp = f == Floor::Bottom ? gmul(gmul(ginverse(pn), b), po) : gmul(gmul(pn, b), ginverse(po));
    if (comp.a.is_identity()) return;
    GMat other = floor_matrix(t, f == Floor::Bottom ? Floor::Top : Floor::Bottom);
    ob.change.m = gmul(comp, other).a;
    t.log.push_back({f == Floor::Bottom ? Floor::Top : Floor::Bottom, {ob.gens, comp.a}, note + " (compensation)"});
}

struct FloorArrow {
    std::size_t partner = 0;
    int length = 0;
    bool source = false;
};

std::optional<FloorArrow> floor_arrow(const SimplifiedBasis& b, std::size_t k) {
    for (const auto& a : b.arrows) {
        if (a.source == k) return FloorArrow{a.target, a.length, true};
        if (a.target == k) return FloorArrow{a.source, a.length, false};
    }
    return std::nullopt;
}

// Recorded term when leaving k along its floor arrow: sources sit above or to
// the right of their targets.
int first_term(const SimplifiedBasis& b, std::size_t k) {
    auto fa = floor_arrow(b, k);
    if (!fa) return 0;
    return fa->source ? -fa->length : fa->length;
}

Floor other(Floor f) { return f == Floor::Bottom ? Floor::Top : Floor::Bottom; }

// Moves from floor f at index k up or down the elevator arrow.
std::size_t ride(const TwoStoryComplex& t, Floor f, std::size_t k) {
    const Shaft& sh = t.shafts[t.shaft_of(k)];
    auto perm = sh.permutation(0, sh.tokens.size());
    std::size_t q = sh.local(k);
    if (f == Floor::Bottom) return sh.strands[perm[q]];
    for (std::size_t b = 0; b < perm.size(); ++b)
        if (perm[b] == q) return sh.strands[b];
    throw InternalError("permutation is not a bijection");
}

GMat identity_on_floors(const TwoStoryComplex& t) {
    return gidentity(floor_gradings(t.bottom), t.base.ring, t.prime());
}

}  // namespace

Matrix transition_matrix(const TwoStoryComplex& t) {
    const u32 p = t.prime();
    Matrix m(t.rank(), t.rank(), p);
    for (const auto& sh : t.shafts) {
        Matrix b = sh.product(p);
        for (std::size_t i = 0; i < sh.size(); ++i)
            for (std::size_t j = 0; j < sh.size(); ++j) m(sh.strands[i], sh.strands[j]) = b(i, j);
    }
    return m;
}

TwoStoryComplex from_transition(const Complex& c, const TransitionData& td, const std::string& note) {
    TwoStoryComplex t;
    t.base = c;
    t.bottom = td.x;
    t.top = td.y;
    std::map<Grading, std::vector<std::size_t>> by_grading;
    for (std::size_t k = 0; k < td.x.gens.size(); ++k) by_grading[td.x.gens[k].gr()].push_back(k);
    for (const auto& [g, idx] : by_grading) {
        Shaft sh;
        sh.g = g;
        sh.strands = idx;
        sh.tokens = tokens_from_factors(elementary_factorize(td.P.select_rows(idx).select_cols(idx)), c.p);
        t.shafts.push_back(sh);
    }
    t.log.push_back({Floor::Bottom, td.x.change, note});
    t.log.push_back({Floor::Top, td.y.change, note});
    return t;
}

TwoStoryComplex build(const Complex& c) {
    if (has_length_zero_arrow(c)) throw ValidationError("complex has a length zero arrow; strip it first");
    return from_transition(c, simplify_both(c), "simplify");
}

int Sequence::at(std::size_t k) const {
    if (k < terms.size()) return terms[k];
    if (!periodic || terms.empty()) return 0;
    return terms[k % terms.size()];
}

Sequence traversal_sequence(const TwoStoryComplex& t, Floor f, std::size_t index, bool floor_first) {
    Sequence s;
    Floor cf = f;
    std::size_t k = index;
    bool on_floor = floor_first;
    const std::size_t limit = 4 * t.rank() + 4;
    for (std::size_t step = 0; step < limit; ++step) {
        if (step > 0 && cf == f && k == index && on_floor == floor_first) {
            s.periodic = true;
            return s;
        }
        if (on_floor) {
            auto fa = floor_arrow(t.floor(cf), k);
            if (!fa) return s;
            s.terms.push_back(fa->source ? -fa->length : fa->length);
            k = fa->partner;
        } else {
            k = ride(t, cf, k);
            cf = other(cf);
        }
        on_floor = !on_floor;
    }
    throw InternalError("traversal did not close up");
}

std::size_t first_difference(const Sequence& s, const Sequence& t) {
    std::size_t ps = s.periodic ? s.terms.size() : 1, pt = t.periodic ? t.terms.size() : 1;
    std::size_t bound = std::max(s.terms.size(), t.terms.size()) + std::lcm(ps, pt);
    for (std::size_t k = 0; k < bound; ++k)
        if (s.at(k) != t.at(k)) return k + 1;
    return 0;
}

int unusual_compare(const Sequence& s, const Sequence& t, std::size_t limit) {
    std::size_t d = first_difference(s, t);
    if (d == 0 || d > limit) return 0;
    long a = letter_key(s.at(d - 1)), b = letter_key(t.at(d - 1));
    return a < b ? -1 : 1;
}

Weight weight_of(const TwoStoryComplex& t, std::size_t s, std::size_t pos) {
    const Shaft& sh = t.shafts.at(s);
    const Token& tok = sh.tokens.at(pos);
    if (tok.kind != TokenKind::CrossoverArrow) throw PatternMismatch("token is not a crossover arrow");
    bool crossing_below = false;
    for (std::size_t k = 0; k < pos; ++k)
        if (sh.tokens[k].kind == TokenKind::Crossing) crossing_below = true;
    Floor f = Floor::Bottom;
    std::size_t zi = sh.strands[tok.i], zj = sh.strands[tok.j];
    if (crossing_below) {
        auto perm = sh.permutation(pos + 1, sh.tokens.size());
        f = Floor::Top;
        zi = sh.strands[perm[tok.i]];
        zj = sh.strands[perm[tok.j]];
    }
    auto component = [&](bool floor_first) {
        Sequence a = traversal_sequence(t, f, zi, floor_first), b = traversal_sequence(t, f, zj, floor_first);
        std::size_t d = first_difference(a, b);
        if (d == 0) return kInfiniteWeight;
        return unusual_compare(a, b) < 0 ? static_cast<long>(d) : -static_cast<long>(d);
    };
    return {component(true), component(false)};
}

long depth(const TwoStoryComplex& t) {
    long best = kInfiniteWeight;
    for (std::size_t s = 0; s < t.shafts.size(); ++s)
        for (std::size_t k = 0; k < t.shafts[s].tokens.size(); ++k) {
            if (t.shafts[s].tokens[k].kind != TokenKind::CrossoverArrow) continue;
            Weight w = weight_of(t, s, k);
            if (w.hat != kInfiniteWeight) best = std::min(best, std::labs(w.hat));
            if (w.check != kInfiniteWeight) best = std::min(best, std::labs(w.check));
        }
    return best;
}

void apply_local_move(Shaft& shaft, std::size_t pos, LocalMove move, u32 p) {
    if (pos + 1 >= shaft.tokens.size()) throw PatternMismatch("move needs two tokens");
    const Token a = shaft.tokens[pos], b = shaft.tokens[pos + 1];
    const Matrix before = shaft.product(p);
    std::vector<Token> repl;
    switch (move) {
        case LocalMove::MergeDots: {
            if (a.kind != TokenKind::BlackDot || b.kind != TokenKind::BlackDot || a.i != b.i)
                throw PatternMismatch("expected two black dots on one strand");
            u32 c = fmul(a.lambda, b.lambda, p);
            if (c != 1) repl.push_back(Token::dot(a.i, c));
            break;
        }
        case LocalMove::MergeArrows: {
            if (a.kind != TokenKind::CrossoverArrow || b.kind != TokenKind::CrossoverArrow || a.i != b.i ||
                a.j != b.j)
                throw PatternMismatch("expected two parallel crossover arrows");
            u32 c = fadd(a.lambda, b.lambda, p);
            if (c != 0) repl.push_back(Token::arrow(a.i, a.j, c));
            break;
        }
        case LocalMove::ArrowCrossing: {
            if (a.kind != TokenKind::CrossoverArrow || b.kind != TokenKind::Crossing ||
                !((b.i == a.i && b.j == a.j) || (b.i == a.j && b.j == a.i)))
                throw PatternMismatch("expected a crossover arrow followed by a crossing on the same strands");
            u32 inv = finv(a.lambda, p);
            repl.push_back(Token::arrow(a.j, a.i, inv));
            if (a.lambda != 1) repl.push_back(Token::dot(a.i, a.lambda));
            if (fneg(inv, p) != 1) repl.push_back(Token::dot(a.j, fneg(inv, p)));
            repl.push_back(Token::arrow(a.i, a.j, inv));
            break;
        }
        case LocalMove::Commute: {
            const std::size_t n = shaft.size();
            if (a.matrix(n, p) * b.matrix(n, p) != b.matrix(n, p) * a.matrix(n, p))
                throw PatternMismatch("tokens do not commute");
            repl = {b, a};
            break;
        }
    }
    shaft.tokens.erase(shaft.tokens.begin() + static_cast<long>(pos), shaft.tokens.begin() + static_cast<long>(pos) + 2);
    shaft.tokens.insert(shaft.tokens.begin() + static_cast<long>(pos), repl.begin(), repl.end());
    if (shaft.product(p) != before) throw InternalError("local move changed the shaft matrix");
}

namespace {

// Moves the edge token of a shaft to its other edge by conjugating it past
// every token.  Falls back to refactoring the rest of the shaft when the
// token does not commute with a crossover arrow on its way.
void pass_through(Shaft& sh, Floor from, u32 p) {
    const std::size_t n = sh.size();
    if (sh.tokens.size() <= 1) return;
    const Matrix before = sh.product(p);
    Token t = from == Floor::Bottom ? sh.tokens.front() : sh.tokens.back();
    std::vector<Token> rest(sh.tokens.begin() + (from == Floor::Bottom ? 1 : 0),
                            sh.tokens.end() - (from == Floor::Bottom ? 0 : 1));
    Matrix cur = t.matrix(n, p);
    bool ok = true;
    auto conj = [&](const Token& u, bool up) {
        Matrix um = u.matrix(n, p);
        // Moving up past u: t u = u (u^-1 t u).  Moving down: u t = (u t u^-1) u.
        return up ? invert(um) * cur * um : um * cur * invert(um);
    };
    if (from == Floor::Bottom) {
        for (const auto& u : rest) cur = conj(u, true);
    } else {
        for (auto it = rest.rbegin(); it != rest.rend(); ++it) cur = conj(*it, false);
    }
    // cur must be a single arrow or dot.
    std::optional<Token> moved;
    std::size_t off = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !cur(i, j)) continue;
            ++off;
            moved = Token::arrow(i, j, cur(i, j));
        }
    if (t.kind == TokenKind::BlackDot) {
        for (std::size_t i = 0; i < n; ++i)
            if (cur(i, i) != 1) {
                ++off;
                moved = Token::dot(i, cur(i, i));
            }
        if (off != 1) ok = false;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            if (cur(i, i) != 1) ok = false;
        if (off != 1) ok = false;
    }
    if (!ok) {
        // Choose the arrow on the strands the elevator carries the token to and
        // refactor what remains.
        auto perm = sh.permutation(0, sh.tokens.size());
        std::vector<std::size_t> inv(n);
        for (std::size_t q = 0; q < n; ++q) inv[perm[q]] = q;
        Token m2 = t;
        if (from == Floor::Bottom) {
            m2.i = perm[t.i];
            m2.j = perm[t.j];
        } else {
            m2.i = inv[t.i];
            m2.j = inv[t.j];
        }
        Matrix mm = m2.matrix(n, p);
        Matrix r = from == Floor::Bottom ? before * invert(mm) : invert(mm) * before;
        moved = m2;
        rest = tokens_from_factors(elementary_factorize(r), p);
    }
    if (from == Floor::Bottom) {
        rest.push_back(*moved);
    } else {
        rest.insert(rest.begin(), *moved);
    }
    sh.tokens = rest;
    if (sh.product(p) != before) throw InternalError("passing a token through a shaft changed its matrix");
}

}  // namespace

std::optional<std::size_t> slide_arrow_step(TwoStoryComplex& t, std::size_t s, Floor toward) {
    const u32 p = t.prime();
    Shaft& sh = t.shafts.at(s);
    if (sh.tokens.empty()) throw PatternMismatch("shaft has no tokens");
    const Token tok = toward == Floor::Bottom ? sh.tokens.front() : sh.tokens.back();
    if (tok.kind == TokenKind::Crossing) throw PatternMismatch("crossings do not slide");
    const SimplifiedBasis& fb = t.floor(toward);
    const std::size_t ki = sh.strands[tok.i], kj = sh.strands[tok.j];
    auto ai = floor_arrow(fb, ki);
    std::optional<FloorArrow> aj;
    if (tok.kind == TokenKind::CrossoverArrow) {
        aj = floor_arrow(fb, kj);
        if (first_term(fb, ki) != first_term(fb, kj)) throw StrandsDiverge("floor arrows at the two strands differ");
    }
    const Matrix p_old = transition_matrix(t);
    GMat b = identity_on_floors(t);
    // Bottom: x_new = M^-1 x.  Top: y_new = M y.  The partner shaft takes the
    // inverse token on the same side.
    const bool bottom = toward == Floor::Bottom;
    std::optional<Token> partner_tok;
    std::size_t ps = 0;
    if (tok.kind == TokenKind::BlackDot) {
        u32 c = bottom ? finv(tok.lambda, p) : tok.lambda;
        b.a(ki, ki) = c;
        if (ai) {
            b.a(ai->partner, ai->partner) = c;
            ps = t.shaft_of(ai->partner);
            partner_tok = Token::dot(t.shafts[ps].local(ai->partner), finv(tok.lambda, p));
        }
    } else {
        u32 c = bottom ? fneg(tok.lambda, p) : tok.lambda;
        b.a(ki, kj) = c;
        if (ai) {
            b.a(ai->partner, aj->partner) = c;
            ps = t.shaft_of(ai->partner);
            partner_tok = Token::arrow(t.shafts[ps].local(ai->partner), t.shafts[ps].local(aj->partner),
                                       fneg(tok.lambda, p));
        }
    }
    if (bottom) sh.tokens.erase(sh.tokens.begin());
    else sh.tokens.pop_back();
    if (partner_tok) {
        auto& pt = t.shafts[ps].tokens;
        if (bottom) pt.insert(pt.begin(), *partner_tok);
        else pt.push_back(*partner_tok);
    }
    change_floor(t, toward, b, p_old, "slide " + to_string(tok));
    if (!partner_tok) return std::nullopt;
    return ps;
}

void remove_diverging_arrow(TwoStoryComplex& t, std::size_t s, Floor toward) {
    const u32 p = t.prime();
    auto edge = [&]() -> const Token& {
        const Shaft& sh = t.shafts.at(s);
        if (sh.tokens.empty()) throw PatternMismatch("shaft has no tokens");
        const Token& tok = toward == Floor::Bottom ? sh.tokens.front() : sh.tokens.back();
        if (tok.kind != TokenKind::CrossoverArrow) throw PatternMismatch("edge token is not a crossover arrow");
        return tok;
    };
    std::size_t m = 0;
    {
        const Token& tok = edge();
        Sequence a = traversal_sequence(t, toward, t.shafts[s].strands[tok.i], true);
        Sequence b = traversal_sequence(t, toward, t.shafts[s].strands[tok.j], true);
        m = first_difference(a, b);
        if (m == 0) throw Parallel("the arrow joins parallel strands");
        if (unusual_compare(a, b) > 0) throw WrongOrientation("the arrow points against the order");
    }
    // Slide while the strands stay parallel, passing each shaft on the way.
    for (std::size_t step = 1; step < m; ++step) {
        auto next = slide_arrow_step(t, s, toward);
        if (!next) throw InternalError("arrow vanished before its strands diverged");
        s = *next;
        pass_through(t.shafts[s], toward, p);
        toward = other(toward);
    }
    const Token tok = edge();
    Shaft& sh = t.shafts[s];
    const SimplifiedBasis& fb = t.floor(toward);
    const std::size_t ki = sh.strands[tok.i], kj = sh.strands[tok.j];
    const int ti = first_term(fb, ki), tj = first_term(fb, kj);
    if (letter_key(ti) >= letter_key(tj)) throw InternalError("strands diverge the wrong way");
    const Matrix p_old = transition_matrix(t);
    GMat b = identity_on_floors(t);
    // Bottom: x_i -> x_i - c x_j.  Top: y_i -> y_i + c y_j.  When both ends are
    // sources (or both targets) the partners need the same change with a power
    // of V (resp. U) to keep the floor simplified.
    const u32 c = toward == Floor::Bottom ? fneg(tok.lambda, p) : tok.lambda;
    b.a(ki, kj) = c;
    if ((ti < 0 && tj < 0) || (ti > 0 && tj > 0)) {
        std::size_t pi = floor_arrow(fb, ki)->partner, pj = floor_arrow(fb, kj)->partner;
        if (!b.allowed(pi, pj)) throw InternalError("partner change is not homogeneous");
        b.a(pi, pj) = c;
    }
    if (toward == Floor::Bottom) sh.tokens.erase(sh.tokens.begin());
    else sh.tokens.pop_back();
    change_floor(t, toward, b, p_old, "remove " + to_string(tok));
}

void straighten(Shaft& shaft, const std::vector<std::size_t>& order, u32 p) {
    const std::size_t n = shaft.size();
    if (order.size() != n) throw DimensionMismatch("order must list every strand");
    Matrix m = shaft.product(p);
    Matrix mo(n, n, p);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) mo(r, c) = m(order[r], order[c]);
    auto fs = elementary_factorize(mo);
    for (auto& f : fs) {
        f.i = order[f.i];
        f.j = order[f.j];
    }
    shaft.tokens = tokens_from_factors(fs, p);
    if (shaft.product(p) != m) throw InternalError("straightening changed the shaft matrix");
}

TwoStoryComplex increase_depth(const TwoStoryComplex& t, long m, std::vector<EngineStep>* trace) {
    if (depth(t) > m) return t;
    NormalForm nf = normal_form(t.base, trace);
    TwoStoryComplex r = from_transition(t.base, nf.floors, "depth infinity");
    if (depth(r) != kInfiniteWeight) throw InternalError("normal form left an arrow of finite weight");
    return r;
}

DepthRun run_to_depth_infinity(const TwoStoryComplex& t, std::vector<EngineStep>* trace) {
    DepthRun run{t, 0};
    const std::size_t n = t.rank();
    const std::size_t bound = n * (n - (n > 0 ? 1 : 0));
    long d = depth(run.result);
    while (d != kInfiniteWeight) {
        if (run.rounds >= bound) throw BoundExceeded("depth did not reach infinity within 2 * C(n, 2) rounds");
        run.result = increase_depth(run.result, d, trace);
        ++run.rounds;
        long nd = depth(run.result);
        if (nd < d) throw InternalError("depth decreased");
        d = nd;
    }
    return run;
}

std::vector<std::string> check_two_story(const TwoStoryComplex& t) {
    std::vector<std::string> out;
    const Complex& c = t.base;
    for (Floor f : {Floor::Bottom, Floor::Top}) {
        const SimplifiedBasis& b = t.floor(f);
        const std::string name = f == Floor::Bottom ? "bottom" : "top";
        try {
            if (!check_simplified(c, b)) out.push_back(name + " floor is not simplified");
        } catch (const Error& e) {
            out.push_back(name + " floor change is invalid: " + e.what());
        }
    }
    // Replay the log floor by floor.
    BasisChange bx, by;
    bool have_x = false, have_y = false;
    for (const auto& e : t.log) {
        BasisChange& acc = e.floor == Floor::Bottom ? bx : by;
        bool& have = e.floor == Floor::Bottom ? have_x : have_y;
        acc = have ? compose(acc, e.step, c.gens, c.ring) : e.step;
        have = true;
    }
    if (!have_x || bx.m != t.bottom.change.m) out.push_back("replayed log does not reproduce the bottom floor");
    if (!have_y || by.m != t.top.change.m) out.push_back("replayed log does not reproduce the top floor");
    try {
        GMat px = gmul(floor_matrix(t, Floor::Bottom), ginverse(floor_matrix(t, Floor::Top)));
        if (px.a != transition_matrix(t)) out.push_back("shaft products do not match the transition matrix");
    } catch (const Error& e) {
        out.push_back(std::string("transition matrix failed: ") + e.what());
    }
    return out;
}

std::string dump(const TwoStoryComplex& t) {
    std::ostringstream os;
    os << "two-story complex over F" << t.prime() << " rank " << t.rank() << "\n";
    for (Floor f : {Floor::Bottom, Floor::Top}) {
        const SimplifiedBasis& b = t.floor(f);
        os << (f == Floor::Bottom ? "bottom" : "top") << ":";
        for (std::size_t k = 0; k < b.gens.size(); ++k) os << " " << k << "(" << b.gens[k].gu << "," << b.gens[k].gv << ")";
        os << "\n";
        for (const auto& a : b.arrows)
            os << "  " << a.source << " -> " << a.target << " " << (f == Floor::Bottom ? "V" : "U") << "^" << a.length
               << "\n";
    }
    for (const auto& sh : t.shafts) {
        os << "shaft (" << sh.g.u << "," << sh.g.v << ") strands";
        for (auto k : sh.strands) os << " " << k;
        os << " tokens";
        if (sh.tokens.empty()) os << " none";
        for (const auto& tok : sh.tokens) os << " " << to_string(tok);
        os << "\n";
    }
    os << "log " << t.log.size() << " entries\n";
    return os.str();
}

}  // namespace cfl
