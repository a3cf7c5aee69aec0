// Command line front end: parse equation specs, dispatch to the engine
// layers, and emit JSON artifacts. Exit codes: 0 success, 2 argument or
// schema errors, 3 violated mathematical preconditions, 4 numerical or
// truncation failures.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>

#include "summa/formal.hpp"
#include "summa/json_io.hpp"
#include "summa/singular.hpp"

namespace {

using namespace summa;

constexpr int kExitArgs = 2;
constexpr int kExitNumeric = 4;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write output file '" + path + "'");
    out << text;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot read input file '" + path + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw ArgumentError("invalid JSON in '" + path + "': " + e.what());
    }
}

CQ parse_coeff_flag(const std::string& text, const std::string& flag) {
    try {
        return parse_cq(text);
    } catch (const std::exception& e) {
        throw ArgumentError(flag + ": " + e.what());
    }
}

struct SolveOptions {
    std::string input;
    std::string out = "-";
    std::string trunc;
    std::string mode;
    bool allow_resonance = false;
};

int run_solve(const SolveOptions& opt) {
    ParsedSpec parsed = parse_spec(read_json_file(opt.input), opt.allow_resonance);
    if (!opt.mode.empty()) parsed.mode = opt.mode;
    if (!opt.trunc.empty()) {
        int nt = 0, nx = 0;
        char tail = '\0';
        if (std::sscanf(opt.trunc.c_str(), "%d,%d%c", &nt, &nx, &tail) != 2)
            throw ArgumentError("--trunc expects two integers Nt,Nx");
        parsed.spec.trunc_t = nt;
        parsed.spec.trunc_x = nx;
        validate_spec(parsed.spec);
    }

    json out;
    if (parsed.mode == "float") {
        FormalSolution<CD> sol = solve_formal(parsed.to_float());
        out["solution"] = series_to_json(sol.series);
        out["order_t"] = sol.order_t;
        out["order_x"] = sol.order_x;
        out["residual_order"] = sol.residual_order;
    } else {
        FormalSolution<CQ> sol = solve_formal(parsed.spec);
        out["solution"] = series_to_json(sol.series);
        out["order_t"] = sol.order_t;
        out["order_x"] = sol.order_x;
        out["residual_order"] = sol.residual_order;
    }
    out["mode"] = parsed.mode;
    write_text(opt.out, out.dump(2) + "\n");
    return 0;
}

struct DirectionsOptions {
    std::string b = "0";
    std::string c = "1";
    int k = 1;
    int n = 12;
    std::string out = "-";
};

int run_directions(const DirectionsOptions& opt) {
    CQ b = parse_coeff_flag(opt.b, "--b");
    CQ c = parse_coeff_flag(opt.c, "--c");
    SingularData<CQ> data = singular_scan(b, c, opt.k, opt.n);
    write_text(opt.out, singular_to_json(data).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"summability engine for singular first-order PDEs"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand("solve", "compute the formal power series solution");
    solve->add_option("input", solve_opt.input, "equation spec JSON file")->required();
    solve->add_option("--trunc", solve_opt.trunc, "truncation orders Nt,Nx (overrides the spec)");
    solve->add_option("--mode", solve_opt.mode, "coefficient arithmetic")
        ->check(CLI::IsMember({"exact", "float"}));
    solve->add_option("-o,--out", solve_opt.out, "output path (default stdout)");
    solve->add_flag("--allow-resonance", solve_opt.allow_resonance,
                    "defer the resonance check to the first failing order");

    DirectionsOptions dir_opt;
    CLI::App* directions =
        app.add_subcommand("directions", "list singular points and ray directions");
    directions->add_option("--b", dir_opt.b, "constant coefficient b(0)");
    directions->add_option("--c", dir_opt.c, "constant coefficient c(0)");
    directions->add_option("--k", dir_opt.k, "level of the equation");
    directions->add_option("--n", dir_opt.n, "number of singular points to list");
    directions->add_option("-o,--out", dir_opt.out, "output path (default stdout)");

    CLI::App* borel = app.add_subcommand("borel", "transform a solution to the Borel plane");
    CLI::App* sum = app.add_subcommand("sum", "Borel-Laplace sum of a solution on a grid");
    CLI::App* norms = app.add_subcommand("norms", "weighted norms and inequality margins");
    CLI::App* verify = app.add_subcommand("verify", "residual checks for a solution artifact");
    CLI::App* newton = app.add_subcommand("newton", "Newton polygon of an operator");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitArgs;
    }

    try {
        if (solve->parsed()) return run_solve(solve_opt);
        if (directions->parsed()) return run_directions(dir_opt);
        for (CLI::App* pending : {borel, sum, norms, verify, newton})
            if (pending->parsed())
                throw ArgumentError("verb not yet wired: " + pending->get_name());
        return kExitArgs;
    } catch (const EngineError& e) {
        std::fprintf(stderr, "summa: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "summa: internal error: %s\n", e.what());
        return kExitNumeric;
    }
}
