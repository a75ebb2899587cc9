#pragma once

#include <string>
#include <vector>

#include "cfl/complex.hpp"
#include "cfl/engine.hpp"
#include "cfl/simplify.hpp"

namespace cfl {

enum class SnakeKind { Standard, Horizontal, Vertical };

// A snake complex.  Letter i joins x_{i-1} and x_i; a positive letter means
// the arrow points from x_i to x_{i-1}.  Standard complexes and horizontal
// snakes start with a horizontal letter, vertical snakes with a vertical one.
// The anchor is the grading of x_0.
struct SnakeDescriptor {
    SnakeKind kind = SnakeKind::Standard;
    std::vector<int> seq;
    Grading anchor;
    bool operator==(const SnakeDescriptor&) const = default;
};

// An indecomposable local system: one minimal period of the shape (starting
// with a horizontal letter), the grading of its first corner, the width and
// the rational canonical form of the holonomy.
struct LocalSystemDescriptor {
    std::vector<int> shape;
    Grading anchor;
    std::size_t w = 1;
    Matrix holonomy;
    bool operator==(const LocalSystemDescriptor&) const = default;
};

enum class SummandKind { Snake, LocalSystem, Zero };

// Generator range of one summand in the basis reached by Decomposition::change.
struct Summand {
    SummandKind kind = SummandKind::Snake;
    std::size_t index = 0;  // into snakes or systems; zero complexes count up
    std::size_t first = 0;
    std::size_t size = 0;
};

struct Decomposition {
    u32 p = 2;
    std::vector<SnakeDescriptor> snakes;          // canonical order
    std::vector<LocalSystemDescriptor> systems;   // canonical order
    std::size_t zeros = 0;
    BasisChange change;  // from the input generators to a split basis
    std::vector<Summand> summands;
    std::size_t rounds = 0;
};

// One minimal even period of a periodic sequence given by any period.
std::vector<int> minimal_even_period(const std::vector<int>& period);
// Sum of the horizontal (odd position) letters of one period.
int shape_drift(const std::vector<int>& period);
// Highest representative under even cyclic shifts and reversal with sign
// change.  Throws BadPeriod for an odd or empty period, a zero letter or a
// violated closure condition.
std::vector<int> canonical_shape(const std::vector<int>& period);

// A cyclic chain of w-dimensional slots.  Link k joins slot k and slot k + 1
// (cyclically); letter[k] is read when moving from slot k to slot k + 1 and
// block[k] is the matrix of the arrow from its source slot to its target slot.
struct Band {
    std::vector<int> letter;
    std::vector<Direction> dir;
    std::vector<Grading> grading;  // of each slot
    std::vector<Matrix> block;
    std::size_t w = 1;
};

// Reads the triple from the highest reading of the band.
LocalSystemDescriptor local_system_triple(const Band& band, u32 p);

Complex realize(const SnakeDescriptor& d, u32 p);
Complex realize(const LocalSystemDescriptor& d, u32 p);
// The two-generator complex dx = y with x in grading `anchor`.
Complex realize_zero(u32 p, Grading anchor = {0, 0});
Complex realize(const Decomposition& d);

// Decomposes a valid complex over R1 (complexes over F[U,V] are reduced
// first).  Each intermediate engine state is appended to `trace`.
Decomposition decompose(const Complex& c, std::vector<EngineStep>* trace = nullptr);

bool decomposition_equal(const Decomposition& a, const Decomposition& b);

std::string render(const SnakeDescriptor& d);
std::string render(const LocalSystemDescriptor& d);
// One line per summand; snakes carry their anchor.
std::string render(const Decomposition& d);
// Reads the output of render back; a snake without an anchor sits at (0, 0).
// '#' starts a comment.  Throws SyntaxError with the line number.
Decomposition parse_decomposition(const std::string& text, u32 p);

}  // namespace cfl
