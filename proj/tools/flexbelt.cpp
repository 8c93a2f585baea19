// flexbelt command-line interface.
//
//   flexbelt solve-vhedra problem.json [-o report.json] [--sign upper|lower] [--branch list]
//   flexbelt closure      problem.json [-o report.json]
//   flexbelt flex         problem.json [-o report.json] [--samples N] [--out-dir DIR]
//   flexbelt reciprocal   problem.json [-o report.json] [--samples N] [--out-dir DIR]
//   flexbelt verify       report.json
//
// Exit codes: 0 success, 1 error or failed check, 2 only non-real solutions.

#include "flexbelt/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace flexbelt;

namespace {

struct Options {
    std::string problem;
    std::string output;
    std::string out_dir = "flexbelt_out";
    std::optional<double> tol;
    std::optional<int> samples;
    std::string sign;
    std::string branch;
    std::string format = "obj";
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << content;
}

std::vector<Branch> parse_branch_list(const std::string& s) {
    std::vector<Branch> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(branch_from_string(item));
    if (out.empty()) throw InvalidInput("--branch needs at least one entry");
    return out;
}

int run_command(io::Command command, const Options& opt) {
    const auto problem = io::read_json_file(opt.problem);
    io::Overrides ov;
    ov.tol = opt.tol;
    ov.samples = opt.samples;
    if (!opt.sign.empty()) ov.sign = solution_sign_from_string(opt.sign);
    if (!opt.branch.empty()) ov.branch = parse_branch_list(opt.branch);

    const auto tol = io::resolve_tolerances(problem, std::getenv("FLEXBELT_TOL"), opt.tol);
    const auto input = io::effective_input(problem, command, ov);
    const auto result = io::run(command, input, tol);

    for (const auto& f : result.files) write_file(fs::path(opt.out_dir) / f.name, f.content);
    const auto text = io::dump(result.report);
    if (opt.output.empty()) std::cout << text;
    else write_file(opt.output, text);
    for (const auto& w : result.report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    return result.exit_code;
}

int run_verify(const std::string& path) {
    const auto report = io::read_json_file(path);
    const auto v = io::verify_report(report);
    if (v.ok) {
        std::cout << "verified: " << path << "\n";
        return 0;
    }
    std::cerr << "mismatch: " << v.divergence << " (" << v.detail << ")\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flexbelt: flexible belts of spherical four-bars and V-hedra blocks"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("problem", opt.problem, "problem file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", opt.output, "report path (stdout when omitted)");
        sub->add_option("--tol", opt.tol, "algebraic tolerance tol_alg");
    };
    auto* solve = app.add_subcommand("solve-vhedra", "solve the offsets of a (3x3) V-hedra block");
    add_common(solve);
    solve->add_option("--sign", opt.sign, "solution sign")->check(CLI::IsMember({"upper", "lower"}));
    solve->add_option("--branch", opt.branch, "plus|minus, or a comma-separated per-vertex list");

    auto* closure = app.add_subcommand("closure", "closure polynomial and offset solver for given f, e");
    add_common(closure);

    auto* flex = app.add_subcommand("flex", "flexion sweep with invariant checks and OBJ frames");
    auto* recip = app.add_subcommand("reciprocal", "reciprocal-parallel mesh of a flexible block");
    for (auto* sub : {flex, recip}) {
        add_common(sub);
        sub->add_option("--samples", opt.samples, "number of sweep samples")->check(CLI::PositiveNumber);
        sub->add_option("--out-dir", opt.out_dir, "directory for OBJ files");
        sub->add_option("--sign", opt.sign, "solution sign")->check(CLI::IsMember({"upper", "lower"}));
        sub->add_option("--branch", opt.branch, "plus|minus, or a comma-separated per-vertex list");
        sub->add_option("--format", opt.format, "frame format")->check(CLI::IsMember({"obj"}));
    }

    std::string report_path;
    auto* verify = app.add_subcommand("verify", "recompute a report and compare");
    verify->add_option("report", report_path, "report file (JSON)")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*verify) return run_verify(report_path);
        if (*solve) return run_command(io::Command::SolveVhedra, opt);
        if (*closure) return run_command(io::Command::Closure, opt);
        if (*flex) return run_command(io::Command::Flex, opt);
        if (*recip) return run_command(io::Command::Reciprocal, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
