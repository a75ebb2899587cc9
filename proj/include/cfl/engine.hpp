#pragma once

#include <string>
#include <vector>

#include "cfl/complex.hpp"
#include "cfl/simplify.hpp"

namespace cfl {

// Rank of a letter in the order -1 < -2 < -3 < ... < 0 < ... < 3 < 2 < 1.
long letter_key(int c);
// Lexicographic comparison in that order; a finite word is padded with zeros.
// Returns -1, 0 or 1.  Only the first `limit` letters are compared.
int compare_words(const std::vector<int>& s, const std::vector<int>& t, std::size_t limit = std::size_t(-1));

// Grading change when following a letter: a vertical letter +l moves from the
// target of a length l arrow up to its source.
Grading letter_shift(Direction dir, int c);

// One class of basis elements in a grading, identified by the word read when
// leaving along the bottom floor first (a) and along the top floor first (b).
// Finite words end in 0; periodic ones are truncated.
struct WordPosition {
    Grading g;
    std::vector<int> a;
    std::vector<int> b;
    std::size_t mult = 0;
};

struct Orbit {
    bool band = false;
    std::vector<std::size_t> positions;  // in walking order
    std::vector<Direction> links;        // link i joins positions i and i+1 (cyclically for bands)
    std::size_t mult = 0;
};

struct EngineStep {
    std::string name;
    TransitionData state;
};

struct NormalForm {
    TransitionData floors;  // bottom and top floor bases; P is the identity away from band closures
    std::vector<WordPosition> positions;
    std::vector<Orbit> orbits;
    // Generator ranges of the summands in the bottom floor basis.
    struct Piece {
        std::size_t orbit = 0;
        std::size_t first = 0;
        std::size_t size = 0;
        bool band = false;
        Matrix holonomy;  // companion block for bands
    };
    std::vector<Piece> pieces;
    std::size_t rounds = 0;
};

// Word classes and their multiplicities for aligned, normalized floors.
std::vector<WordPosition> word_positions(const TransitionData& td, std::size_t truncation);
std::vector<Orbit> link_positions(const std::vector<WordPosition>& pos, std::size_t truncation);

// Brings a stripped complex to depth infinity in one round: afterwards the
// bottom floor basis splits the complex into snakes and indecomposable local
// systems.  Each intermediate state is appended to `trace` when given.
NormalForm normal_form(const Complex& c, std::vector<EngineStep>* trace = nullptr);

}  // namespace cfl
