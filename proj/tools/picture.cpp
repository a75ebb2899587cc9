#include "picture.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace cfl::tools {

namespace {

constexpr double kZeroOffset = 0.2;

std::string monomial(const Monomial& m) {
    std::string s = m.coef == 1 ? "" : std::to_string(m.coef);
    if (m.u) s += "U" + (m.u > 1 ? "^" + std::to_string(m.u) : "");
    if (m.v) s += "V" + (m.v > 1 ? "^" + std::to_string(m.v) : "");
    return s.empty() ? "1" : s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

Layout layout(const Complex& c) {
    const std::size_t n = c.rank();
    Layout l{std::vector<double>(n, 0), std::vector<double>(n, 0)};
    // Undirected adjacency with the offset from each end to the other.
    std::vector<std::vector<std::tuple<std::size_t, double, double>>> adj(n);
    for (std::size_t s = 0; s < n; ++s)
        for (const auto& t : c.d[s]) {
            double dx = -t.m.u, dy = -t.m.v;
            if (!t.m.u && !t.m.v) dx = dy = -kZeroOffset;
            adj[s].push_back({t.target, dx, dy});
            adj[t.target].push_back({s, -dx, -dy});
        }
    std::vector<bool> placed(n, false);
    double next_diag = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (placed[root]) continue;
        // x - y is fixed by the Alexander grading; components are spread
        // along the diagonal so they do not overlap.
        const double alex = (c.gens[root].gu - c.gens[root].gv) / 2.0;
        std::vector<std::size_t> members;
        std::deque<std::size_t> queue{root};
        placed[root] = true;
        l.x[root] = -alex / 2;
        l.y[root] = alex / 2;
        while (!queue.empty()) {
            std::size_t s = queue.front();
            queue.pop_front();
            members.push_back(s);
            for (auto [t, dx, dy] : adj[s]) {
                if (placed[t]) continue;
                placed[t] = true;
                l.x[t] = l.x[s] + dx;
                l.y[t] = l.y[s] + dy;
                queue.push_back(t);
            }
        }
        double lo = 0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const double diag = l.x[members[k]] + l.y[members[k]];
            lo = k ? std::min(lo, diag) : diag;
        }
        const double shift = (next_diag - lo) / 2;
        double hi = next_diag;
        for (std::size_t m : members) {
            l.x[m] += shift;
            l.y[m] += shift;
            hi = std::max(hi, l.x[m] + l.y[m]);
        }
        next_diag = std::ceil(hi) + 2;
    }
    return l;
}

std::string picture_text(const Complex& c) {
    const Layout l = layout(c);
    // Cells on the half-integer lattice; length zero offsets round away.
    std::map<std::pair<long, long>, std::vector<std::string>> cells;
    long x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    for (std::size_t k = 0; k < c.rank(); ++k) {
        const long cx = std::lround(2 * l.x[k]), cy = std::lround(2 * l.y[k]);
        cells[{cx, cy}].push_back(c.gens[k].id);
        x0 = k ? std::min(x0, cx) : cx;
        x1 = k ? std::max(x1, cx) : cx;
        y0 = k ? std::min(y0, cy) : cy;
        y1 = k ? std::max(y1, cy) : cy;
    }
    bool half = false;
    for (const auto& [pos, ids] : cells) half = half || (pos.first % 2) || (pos.second % 2);
    const long step = half ? 1 : 2;
    std::size_t width = 1;
    for (auto& [pos, ids] : cells) {
        std::string s;
        for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + ids[i];
        ids = {s};
        width = std::max(width, s.size());
    }
    std::ostringstream os;
    for (long y = y1; y >= y0; y -= step) {
        std::string row;
        for (long x = x0; x <= x1; x += step) {
            auto it = cells.find({x, y});
            std::string cell = it == cells.end() ? "." : it->second[0];
            row += cell + std::string(width + 1 - cell.size(), ' ');
        }
        while (!row.empty() && row.back() == ' ') row.pop_back();
        os << row << "\n";
    }
    os << "\n";
    for (std::size_t s = 0; s < c.rank(); ++s)
        for (const auto& t : c.d[s]) os << c.gens[s].id << " -> " << c.gens[t.target].id << "  " << monomial(t.m) << "\n";
    return os.str();
}

std::string picture_svg(const Complex& c) {
    const Layout l = layout(c);
    const double scale = 60, margin = 40;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    for (std::size_t k = 0; k < c.rank(); ++k) {
        x0 = k ? std::min(x0, l.x[k]) : l.x[k];
        x1 = k ? std::max(x1, l.x[k]) : l.x[k];
        y0 = k ? std::min(y0, l.y[k]) : l.y[k];
        y1 = k ? std::max(y1, l.y[k]) : l.y[k];
    }
    auto px = [&](double x) { return margin + (x - x0) * scale; };
    auto py = [&](double y) { return margin + (y1 - y) * scale; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * margin + (x1 - x0) * scale << "\" height=\""
       << 2 * margin + (y1 - y0) * scale << "\">\n";
    os << "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" "
          "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n";
    for (std::size_t s = 0; s < c.rank(); ++s)
        for (const auto& t : c.d[s]) {
            os << "<line x1=\"" << px(l.x[s]) << "\" y1=\"" << py(l.y[s]) << "\" x2=\"" << px(l.x[t.target])
               << "\" y2=\"" << py(l.y[t.target]) << "\" stroke=\"black\" marker-end=\"url(#head)\"/>\n";
            os << "<text x=\"" << (px(l.x[s]) + px(l.x[t.target])) / 2 + 4 << "\" y=\""
               << (py(l.y[s]) + py(l.y[t.target])) / 2 - 4 << "\" font-size=\"10\">" << monomial(t.m) << "</text>\n";
        }
    for (std::size_t k = 0; k < c.rank(); ++k) {
        os << "<circle cx=\"" << px(l.x[k]) << "\" cy=\"" << py(l.y[k]) << "\" r=\"4\"/>\n";
        os << "<text x=\"" << px(l.x[k]) + 6 << "\" y=\"" << py(l.y[k]) - 6 << "\" font-size=\"12\">" << c.gens[k].id
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<std::string> curve_lines(const Decomposition& d) {
    std::vector<std::string> out;
    for (const auto& s : d.snakes)
        out.push_back("arc " + render(s) + " anchor=(" + std::to_string(s.anchor.u) + "," +
                      std::to_string(s.anchor.v) + ")");
    for (const auto& l : d.systems) {
        std::string m = "[";
        for (std::size_t i = 0; i < l.holonomy.rows(); ++i) {
            m += i ? ",[" : "[";
            for (std::size_t j = 0; j < l.holonomy.cols(); ++j) m += (j ? "," : "") + std::to_string(l.holonomy(i, j));
            m += "]";
        }
        out.push_back("closed curve [" + join(l.shape) + "] w=" + std::to_string(l.w) + " holonomy=" + m + "] anchor=(" +
                      std::to_string(l.anchor.u) + "," + std::to_string(l.anchor.v) + ")");
    }
    return out;
}

}  // namespace cfl::tools
