#pragma once

// JSON problem files in, JSON reports and OBJ frames out. Everything here is
// deterministic: the same effective input gives byte-identical output.

#include "flexbelt/flexion.hpp"
#include "flexbelt/reciprocal.hpp"
#include "flexbelt/vhedra.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace flexbelt::io {

using Json = nlohmann::json;

enum class Command { SolveVhedra, Closure, Flex, Reciprocal };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

// Parses JSON text; syntax errors become SchemaError with line and column.
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);

// Command-line settings that override the problem file.
struct Overrides {
    std::optional<double> tol;  // tol_alg
    std::optional<int> samples;
    std::optional<SolutionSign> sign;
    std::optional<std::vector<Branch>> branch;
};

// Applies flags to the problem (sign, branch, sweep samples) and validates it
// for the command. The result is what reports echo as "input".
Json effective_input(const Json& problem, Command command, const Overrides& overrides = {});

// default < FLEXBELT_TOL < problem "tolerances" < --tol. Only tol_alg is
// affected by the environment variable and the flag.
Tolerances resolve_tolerances(const Json& problem, const char* env_value, std::optional<double> flag);

// Library inputs from a validated problem.
VHedraInput vhedra_input(const Json& input);
BlockParameters block_from_input(const Json& input, const Tolerances& tol);
SweepOptions sweep_options(const Json& input);

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    Json report;
    int exit_code = 0;  // 0 success, 1 failure, 2 only non-real solutions
    std::vector<OutputFile> files;
};

RunResult run(Command command, const Json& input, const Tolerances& tol);

// Canonical text: sorted keys, two-space indent, doubles with 17 significant
// digits, non-finite numbers as null.
std::string dump(const Json& value);

std::string obj_frame(const Block3D& block, const std::string& header);
std::string obj_reciprocal(const ReciprocalMesh& mesh, const std::string& header);

struct VerifyResult {
    bool ok = true;
    std::string divergence;  // first divergent quantity
    std::string detail;
};

// Recomputes the closure residual from the reported f and e ("q-residual"),
// then re-runs the echoed input and compares every reported value.
VerifyResult verify_report(const Json& report);

} // namespace flexbelt::io
