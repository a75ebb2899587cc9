#pragma once

#include <string>
#include <vector>

#include "cfl/classify.hpp"
#include "cfl/complex.hpp"

namespace cfl::tools {

// Plane positions for drawing: an arrow carrying U^a V^b runs from its source
// a steps left and b steps down to its target; length zero arrows get a small
// diagonal offset.  Positions follow a spanning forest of the arrows, so an
// arrow closing a cycle with drift is drawn as a long edge.
struct Layout {
    std::vector<double> x, y;
};

Layout layout(const Complex& c);

// A text grid of generator labels followed by the arrow list.
std::string picture_text(const Complex& c);
std::string picture_svg(const Complex& c);

// Curve descriptors: one arc per snake, one closed curve with holonomy per
// local system.  Zero complexes give nothing.
std::vector<std::string> curve_lines(const Decomposition& d);

}  // namespace cfl::tools
