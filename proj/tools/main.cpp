#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace cfl::tools;

namespace {

// A path, "-" for standard input, or the name of a bundled example.
bool read_input(const std::string& name, std::string& text, std::string& error) {
    std::ostringstream ss;
    if (name == "-") {
        ss << std::cin.rdbuf();
        text = ss.str();
        return true;
    }
    fs::path path = name;
    if (!fs::exists(path)) {
        std::string lower = name;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
        fs::path bundled = fs::path(CFL_CORPUS_DIR) / (lower + ".cfl");
        if (fs::exists(bundled)) path = bundled;
    }
    std::ifstream in(path);
    if (!in) {
        error = "cannot read " + name;
        return false;
    }
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decompose bigraded complexes over F[U,V]/(UV) into snakes, local systems and zero complexes"};
    std::string command;
    std::vector<std::string> inputs;
    Options opt;
    bool json_out = false;
    std::uint32_t characteristic = 0;
    std::string ring;

    app.add_option("command", command, "validate, decompose, invariants, bar, realize, render or selftest")
        ->required()
        ->check(CLI::IsMember(commands()));
    app.add_option("inputs", inputs, "complex files (descriptor files for realize), bundled example names or -");
    app.add_option("--char", characteristic, "read coefficients modulo this prime");
    app.add_option("--ring", ring, "r1 reduces F[U,V] input modulo UV; fuv reads the input over F[U,V]")
        ->check(CLI::IsMember({"r1", "fuv"}));
    app.add_flag("--json", json_out, "machine-readable output");
    app.add_option("--render", opt.render_format, "picture format for render")->check(CLI::IsMember({"txt", "svg"}));
    app.add_flag("--curves", opt.curves, "append curve descriptors to decompose and render");
    app.add_option("--seed", opt.seed, "random seed for selftest");
    app.add_option("--budget", opt.budget, "largest rank the oracle searches in selftest");
    CLI11_PARSE(app, argc, argv);
    if (characteristic) opt.characteristic = characteristic;
    if (!ring.empty()) opt.ring = ring;

    if (command == "selftest") {
        Report r = selftest(opt);
        std::cout << (json_out ? r.data.dump(2) + "\n" : r.text);
        return r.ok ? 0 : 1;
    }
    if (inputs.empty()) {
        std::cerr << command << ": no input given\n";
        return 2;
    }

    bool ok = true;
    nlohmann::json all = nlohmann::json::array();
    for (const auto& name : inputs) {
        std::string text, error;
        Report r;
        if (read_input(name, text, error)) {
            r = run(command, text, opt);
        } else {
            r.ok = false;
            r.data = {{"error", "IOError"}, {"message", error}};
            r.text = error + "\n";
        }
        ok = ok && r.ok;
        if (json_out) {
            all.push_back({{"input", name}, {"command", command}, {"ok", r.ok}, {"result", r.data}});
        } else {
            if (inputs.size() > 1) std::cout << "== " << name << " ==\n";
            (r.ok ? std::cout : std::cerr) << r.text;
        }
    }
    if (json_out) std::cout << (inputs.size() == 1 ? all[0] : all).dump(2) << "\n";
    return ok ? 0 : 1;
}
