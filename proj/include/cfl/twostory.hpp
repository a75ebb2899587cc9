#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cfl/complex.hpp"
#include "cfl/engine.hpp"
#include "cfl/simplify.hpp"

namespace cfl {

// Graphical elements of an elevator shaft.  Indices are strand positions
// inside the shaft.  CrossoverArrow(i, j, c) is the matrix I + c e_ij, which
// adds c times column i into column j; BlackDot(i, c) scales strand i;
// Crossing(i, j) swaps two strands.
enum class TokenKind { Crossing, CrossoverArrow, BlackDot };

struct Token {
    TokenKind kind = TokenKind::Crossing;
    std::size_t i = 0;
    std::size_t j = 0;
    u32 lambda = 1;

    static Token crossing(std::size_t i, std::size_t j);
    static Token arrow(std::size_t i, std::size_t j, u32 lambda);
    static Token dot(std::size_t i, u32 lambda);

    Matrix matrix(std::size_t n, u32 p) const;
    bool operator==(const Token&) const = default;
};

std::string to_string(const Token& t);

// Converts elementary factors, fusing D_i(c) E_ij D_i(1/c) into one arrow.
std::vector<Token> tokens_from_factors(const std::vector<ElementaryFactor>& fs, u32 p);

struct Shaft {
    Grading g;
    std::vector<std::size_t> strands;  // floor indices in this grading, ascending
    std::vector<Token> tokens;         // bottom to top

    std::size_t size() const { return strands.size(); }
    std::size_t local(std::size_t floor_index) const;
    // Product of the token matrices, bottom first.  Equals the block of the
    // transition matrix P (x = P y) in this grading.
    Matrix product(u32 p) const;
    // perm[q] is the top position reached by the bottom position q when only
    // the crossings among tokens [from, to) are followed.
    std::vector<std::size_t> permutation(std::size_t from, std::size_t to) const;
};

enum class Floor { Bottom, Top };

struct LogEntry {
    Floor floor = Floor::Bottom;
    BasisChange step;  // relative to the previous basis of that floor
    std::string note;
};

// Bottom floor: vertically simplified basis x.  Top floor: horizontally
// simplified basis y with gr(x_k) = gr(y_k).  Both changes are cumulative
// from the generators of `base`.
struct TwoStoryComplex {
    Complex base;
    SimplifiedBasis bottom;
    SimplifiedBasis top;
    std::vector<Shaft> shafts;
    std::vector<LogEntry> log;

    std::size_t rank() const { return base.rank(); }
    u32 prime() const { return base.p; }
    std::size_t shaft_of(std::size_t floor_index) const;
    const SimplifiedBasis& floor(Floor f) const { return f == Floor::Bottom ? bottom : top; }
};

TwoStoryComplex build(const Complex& c);
TwoStoryComplex from_transition(const Complex& c, const TransitionData& td, const std::string& note);

// The full transition matrix assembled from the shaft products.
Matrix transition_matrix(const TwoStoryComplex& t);

// A traversal sequence: the recorded terms, then either a repetition of all
// of them (periodic) or zeros forever.
struct Sequence {
    std::vector<int> terms;
    bool periodic = false;
    int at(std::size_t k) const;  // 0-based
};

// a(z) when floor_first is true, b(z) otherwise.
Sequence traversal_sequence(const TwoStoryComplex& t, Floor f, std::size_t index, bool floor_first);

// 1-based index of the first differing term, or 0 when the sequences agree.
std::size_t first_difference(const Sequence& s, const Sequence& t);
// Comparison under the unusual order on the first `limit` terms.
int unusual_compare(const Sequence& s, const Sequence& t, std::size_t limit = std::size_t(-1));

constexpr long kInfiniteWeight = std::numeric_limits<long>::max();

struct Weight {
    long hat = kInfiniteWeight;
    long check = kInfiniteWeight;
    bool operator==(const Weight&) const = default;
};

// Weight of the crossover arrow at tokens[pos] of shaft s.  Arrows without
// crossings below them are read from the bottom floor, others from the top.
Weight weight_of(const TwoStoryComplex& t, std::size_t s, std::size_t pos);
// Least |weight| component over all crossover arrows, kInfiniteWeight if none.
long depth(const TwoStoryComplex& t);

enum class LocalMove {
    MergeDots,       // D_i(a) D_i(b) -> D_i(ab)
    MergeArrows,     // E_ij(a) E_ij(b) -> E_ij(a + b), removed when zero
    ArrowCrossing,   // E_ij(a) T_ij -> E_ji(1/a) D_i(a) D_j(-1/a) E_ij(1/a)
    Commute,         // swap two adjacent tokens that commute
};

// Rewrites tokens[pos] and tokens[pos + 1]; the shaft product is unchanged.
void apply_local_move(Shaft& shaft, std::size_t pos, LocalMove move, u32 p);

// Moves the token at the edge of shaft s facing `toward` across that floor
// into the neighbouring shaft.  Throws StrandsDiverge when the floor arrows
// at the two strands differ and PatternMismatch when the edge token is a
// crossing.  Returns the shaft the token moved into, if any.
std::optional<std::size_t> slide_arrow_step(TwoStoryComplex& t, std::size_t s, Floor toward);

// Removes the crossover arrow at the edge of shaft s facing `toward` by
// sliding it until its strands diverge and then changing bases on both
// floors.  Throws Parallel for parallel strands and WrongOrientation when
// the arrow points the wrong way.
void remove_diverging_arrow(TwoStoryComplex& t, std::size_t s, Floor toward);

// Refactors the shaft as lower arrows, crossings, upper arrows with respect
// to the strand order `order` (order[0] is least).
void straighten(Shaft& shaft, const std::vector<std::size_t>& order, u32 p);

// Returns a two-story complex of depth at least m + 1 for the same complex.
TwoStoryComplex increase_depth(const TwoStoryComplex& t, long m, std::vector<EngineStep>* trace = nullptr);

struct DepthRun {
    TwoStoryComplex result;
    std::size_t rounds = 0;
};

// Calls increase_depth until no arrow of finite weight remains.  Throws
// BoundExceeded after 2 * C(n, 2) rounds.
DepthRun run_to_depth_infinity(const TwoStoryComplex& t, std::vector<EngineStep>* trace = nullptr);

// Both floors are simplified, the replayed log reproduces them and the
// transition matrix matches the shaft products.  Returns problems found.
std::vector<std::string> check_two_story(const TwoStoryComplex& t);

std::string dump(const TwoStoryComplex& t);

}  // namespace cfl
