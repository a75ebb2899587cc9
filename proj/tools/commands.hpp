#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cfl::tools {

struct Options {
    std::optional<std::uint32_t> characteristic;  // overrides the file header
    std::optional<std::string> ring;              // "r1" or "fuv"
    std::string render_format = "txt";            // "txt" or "svg"
    bool curves = false;
    std::uint64_t seed = 1;
    std::size_t budget = 4;  // oracle rank limit for selftest
};

struct Report {
    bool ok = true;
    nlohmann::json data;  // machine-readable result
    std::string text;     // human summary
};

const std::vector<std::string>& commands();

// Runs a command on one input: the text of a complex file, or for realize a
// list of descriptors.  Errors are caught and reported with their tag.
Report run(const std::string& command, const std::string& input, const Options& opt);

// Random consistency checks of the pipeline against itself and the oracle.
Report selftest(const Options& opt);

}  // namespace cfl::tools
