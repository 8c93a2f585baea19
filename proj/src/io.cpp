#include "flexbelt/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace flexbelt::io {

std::string to_string(Command c) {
    switch (c) {
    case Command::SolveVhedra: return "solve-vhedra";
    case Command::Closure: return "closure";
    case Command::Flex: return "flex";
    case Command::Reciprocal: return "reciprocal";
    }
    return "";
}

Command command_from_string(const std::string& s) {
    if (s == "solve-vhedra" || s == "vhedra-solve") return Command::SolveVhedra;
    if (s == "closure") return Command::Closure;
    if (s == "flex") return Command::Flex;
    if (s == "reciprocal") return Command::Reciprocal;
    throw SchemaError("unknown command '" + s + "'");
}

// --- parsing helpers ---------------------------------------------------------

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::ostringstream os;
        os << source << ":" << line << ":" << column << ": malformed JSON";
        throw SchemaError(os.str());
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& msg) {
    throw SchemaError("field '" + path + "': " + msg);
}

double number_at(const Json& j, const std::string& path) {
    if (!j.is_number()) field_error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) field_error(path, "number is not finite");
    return v;
}

Complex complex_at(const Json& j, const std::string& path) {
    if (j.is_number()) return {number_at(j, path), 0.0};
    if (j.is_array() && j.size() == 2) return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
    field_error(path, "expected a number or a [re, im] pair");
}

const Json& require(const Json& obj, const std::string& key) {
    if (!obj.contains(key)) field_error(key, "missing");
    return obj.at(key);
}

std::vector<double> numbers_at(const Json& j, const std::string& path, std::optional<std::size_t> count = {}) {
    if (!j.is_array()) field_error(path, "expected an array of numbers");
    if (count && j.size() != *count) field_error(path, "expected " + std::to_string(*count) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Vec3> polygon_at(const Json& input) {
    const Json& p = require(input, "polygon");
    if (!p.is_array() || p.size() < 3) field_error("polygon", "expected an array of at least 3 points");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto xyz = numbers_at(p[i], "polygon[" + std::to_string(i) + "]", 3);
        out.emplace_back(xyz[0], xyz[1], xyz[2]);
    }
    return out;
}

std::vector<Branch> branches_at(const Json& input, std::size_t n) {
    if (!input.contains("branch")) return std::vector<Branch>(n, Branch::Minus);
    const Json& b = input.at("branch");
    auto parse = [](const Json& s, const std::string& path) {
        if (!s.is_string()) field_error(path, "expected \"plus\" or \"minus\"");
        try {
            return branch_from_string(s.get<std::string>());
        } catch (const InvalidInput&) {
            field_error(path, "expected \"plus\" or \"minus\"");
        }
    };
    if (b.is_string()) return std::vector<Branch>(n, parse(b, "branch"));
    if (!b.is_array() || b.size() != n) field_error("branch", "expected " + std::to_string(n) + " entries");
    std::vector<Branch> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(parse(b[i], "branch[" + std::to_string(i) + "]"));
    return out;
}

HalfTangent<double> e0_at(const Json& input) {
    const Json& e0 = require(input, "e0");
    if (e0.is_object()) {
        return {number_at(require(e0, "p"), "e0.p"), number_at(require(e0, "q"), "e0.q")};
    }
    return HalfTangent<double>::affine(number_at(e0, "e0"));
}

Json complex_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return Json::array({z.real(), z.imag()});
}

std::vector<Complex> complex_list(const Json& j, const std::string& path) {
    if (!j.is_array()) field_error(path, "expected an array");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_at(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Json residual_json(const std::vector<Complex>& f, const std::vector<Complex>& e) {
    const auto r = is_flexible(BeltSpec<Complex>{f, e});
    Json j;
    j["q2"] = r.scaled[0];
    j["q1"] = r.scaled[1];
    j["q0"] = r.scaled[2];
    j["scale"] = r.scale;
    j["max"] = r.residual;
    return j;
}

std::vector<Complex> as_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

Json tolerances_json(const Tolerances& t) { return {{"geom", t.geom}, {"alg", t.alg}, {"rigid", t.rigid}}; }

Json branch_names(const std::vector<Branch>& b) {
    Json j = Json::array();
    for (auto x : b) j.push_back(flexbelt::to_string(x));
    return j;
}

const std::set<std::string> kProblemKeys{"mode",   "polygon",       "e0",         "d",      "f",
                                         "e",      "branch",        "solution_sign", "sweep", "outer_lengths",
                                         "tolerances", "comment"};

} // namespace

// --- effective input ---------------------------------------------------------

Tolerances resolve_tolerances(const Json& problem, const char* env_value, std::optional<double> flag) {
    Tolerances t;
    if (env_value && *env_value) {
        char* end = nullptr;
        const double v = std::strtod(env_value, &end);
        if (end == env_value || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
            throw InvalidInput(std::string("FLEXBELT_TOL is not a positive number: '") + env_value + "'");
        t.alg = v;
    }
    if (problem.contains("tolerances")) {
        const Json& j = problem.at("tolerances");
        if (!j.is_object()) field_error("tolerances", "expected an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string path = "tolerances." + it.key();
            const double v = number_at(it.value(), path);
            if (!(v > 0.0)) field_error(path, "must be positive");
            if (it.key() == "geom") t.geom = v;
            else if (it.key() == "alg") t.alg = v;
            else if (it.key() == "rigid") t.rigid = v;
            else field_error(path, "unknown tolerance");
        }
    }
    if (flag) {
        if (!(*flag > 0.0) || !std::isfinite(*flag)) throw InvalidInput("--tol must be positive");
        t.alg = *flag;
    }
    return t;
}

VHedraInput vhedra_input(const Json& input) {
    VHedraInput v;
    v.polygon = polygon_at(input);
    if (v.polygon.size() != 4) field_error("polygon", "a V-hedra block needs exactly 4 vertices");
    v.e0 = e0_at(input);
    const bool has_d = input.contains("d"), has_f = input.contains("f");
    if (has_d == has_f) field_error(has_d ? "f" : "d", "provide exactly one of d and f");
    std::array<double, 4> values{};
    const auto list = numbers_at(input.at(has_d ? "d" : "f"), has_d ? "d" : "f", 4);
    std::copy(list.begin(), list.end(), values.begin());
    if (has_d) v.d = values;
    else v.f = values;
    const auto br = branches_at(input, 4);
    std::copy(br.begin(), br.end(), v.branch.begin());
    if (input.contains("solution_sign")) {
        const Json& s = input.at("solution_sign");
        if (!s.is_string() || (s != "upper" && s != "lower"))
            field_error("solution_sign", "expected \"upper\" or \"lower\"");
        v.sign = solution_sign_from_string(s.get<std::string>());
    }
    return v;
}

BlockParameters block_from_input(const Json& input, const Tolerances& tol) {
    if (!input.contains("e")) return build_block(vhedra_input(input), tol);

    // explicit offsets: any n, flexibility is checked by the caller
    const auto polygon = polygon_at(input);
    const std::size_t n = polygon.size();
    const auto e = numbers_at(input.at("e"), "e", n);
    const auto branch = branches_at(input, n);
    const bool has_d = input.contains("d"), has_f = input.contains("f");
    if (has_d == has_f) field_error(has_d ? "f" : "d", "provide exactly one of d and f");
    const auto values = numbers_at(input.at(has_d ? "d" : "f"), has_d ? "d" : "f", n);
    const SpatialPolygon poly(polygon);
    const auto lambda = bar_lengths(poly, tol.geom);
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (has_d) {
            if (!(values[i] > 0.0)) field_error("d[" + std::to_string(i) + "]", "must be positive");
            delta[i] = 2.0 * std::atan(values[i]);
        } else {
            delta[i] = recover_delta(values[i], lambda[i], branch[i]);
        }
    }
    return assemble_block(poly, delta, branch, e, tol);
}

SweepOptions sweep_options(const Json& input) {
    SweepOptions o;
    if (input.contains("sweep")) {
        const Json& s = input.at("sweep");
        if (!s.is_object()) field_error("sweep", "expected an object");
        for (auto it = s.begin(); it != s.end(); ++it)
            if (it.key() != "samples" && it.key() != "range") field_error("sweep." + it.key(), "unknown key");
        if (s.contains("samples")) {
            const Json& k = s.at("samples");
            if (!k.is_number_integer() || k.get<long long>() < 1)
                field_error("sweep.samples", "expected a positive integer");
            o.samples = static_cast<int>(k.get<long long>());
        }
        if (s.contains("range")) {
            const Json& r = s.at("range");
            if (r.is_string()) {
                if (r != "auto") field_error("sweep.range", "expected \"auto\" or [lo, hi]");
            } else {
                const auto lohi = numbers_at(r, "sweep.range", 2);
                o.range = std::pair{lohi[0], lohi[1]};
            }
        }
    }
    if (input.contains("outer_lengths")) {
        const Json& l = input.at("outer_lengths");
        const std::size_t n = polygon_at(input).size();
        if (l.is_number()) {
            o.lengths = OuterLengths::uniform(n, number_at(l, "outer_lengths"));
        } else if (l.is_object()) {
            o.lengths = OuterLengths{numbers_at(require(l, "a"), "outer_lengths.a", n),
                                     numbers_at(require(l, "b"), "outer_lengths.b", n)};
        } else {
            field_error("outer_lengths", "expected a number or {\"a\": [...], \"b\": [...]}");
        }
    }
    return o;
}

Json effective_input(const Json& problem, Command command, const Overrides& overrides) {
    if (!problem.is_object()) throw SchemaError("problem must be a JSON object");
    for (auto it = problem.begin(); it != problem.end(); ++it)
        if (!kProblemKeys.count(it.key())) field_error(it.key(), "unknown key");
    if (problem.contains("mode")) {
        const Json& m = problem.at("mode");
        static const std::set<std::string> modes{"vhedra-solve", "closure", "flex", "reciprocal", "verify"};
        if (!m.is_string() || !modes.count(m.get<std::string>()))
            field_error("mode", "expected one of vhedra-solve, closure, flex, reciprocal, verify");
    }

    Json in = problem;
    in.erase("tolerances");  // reported separately as effective values
    if (command == Command::Closure) {
        const auto f = complex_list(require(in, "f"), "f");
        if (f.size() < 3) field_error("f", "need at least 3 entries");
        const Json& e = require(in, "e");
        if (!e.is_array() || e.size() != f.size()) field_error("e", "expected " + std::to_string(f.size()) + " entries");
        for (std::size_t i = 0; i < e.size(); ++i)
            if (!e[i].is_null()) complex_at(e[i], "e[" + std::to_string(i) + "]");
        return in;
    }

    const std::size_t n = polygon_at(in).size();
    if (overrides.branch) {
        auto b = *overrides.branch;
        if (b.size() == 1) b.assign(n, b.front());
        if (b.size() != n) throw InvalidInput("--branch needs 1 or " + std::to_string(n) + " entries");
        in["branch"] = branch_names(b);
    } else {
        in["branch"] = branch_names(branches_at(in, n));
    }
    if (!in.contains("e")) {
        if (overrides.sign) in["solution_sign"] = to_string(*overrides.sign);
        else if (!in.contains("solution_sign")) in["solution_sign"] = "upper";
        vhedra_input(in);
    } else if (command == Command::SolveVhedra) {
        field_error("e", "solve-vhedra solves for the offsets; remove 'e'");
    }
    if (command == Command::Flex || command == Command::Reciprocal) {
        Json sweep = in.contains("sweep") ? in.at("sweep") : Json::object();
        if (overrides.samples) sweep["samples"] = *overrides.samples;
        if (!sweep.contains("samples")) sweep["samples"] = 20;
        if (!sweep.contains("range")) sweep["range"] = "auto";
        in["sweep"] = sweep;
        sweep_options(in);
    }
    return in;
}

// --- reports -----------------------------------------------------------------

namespace {

Json block_json(const BlockParameters& b, const Tolerances& tol) {
    Json j;
    j["lambda"] = b.lambda;
    j["tau"] = b.tau;
    j["delta"] = b.delta;
    j["gamma"] = b.gamma;
    j["mu"] = b.mu;
    std::vector<double> d;
    for (double x : b.delta) d.push_back(std::tan(0.5 * x));
    j["d"] = d;
    j["f"] = b.f;
    j["e"] = b.e;
    j["epsilon"] = b.epsilon;
    j["zeta"] = b.zeta;
    j["branch"] = branch_names(b.branch);
    j["residuals"] = residual_json(as_complex(b.f), as_complex(b.e));
    j["flexible"] = j["residuals"]["max"].get<double>() < tol.alg;
    double prod = 1.0;
    for (double x : b.f) prod *= x;
    j["product_f"] = prod;
    return j;
}

RunResult run_solve_vhedra(const Json& input, const Tolerances& tol) {
    RunResult out;
    const auto vin = vhedra_input(input);
    const auto sol = solve_vhedra(vin, tol);
    Json r;
    r["lambda"] = sol.lambda;
    r["tau"] = sol.tau;
    r["delta"] = sol.delta;
    r["d"] = sol.d;
    r["f"] = sol.f;
    r["branch"] = branch_names({vin.branch.begin(), vin.branch.end()});
    r["solution_sign"] = to_string(vin.sign);
    r["radicands"] = {{"R1_squared", complex_json(sol.offsets.r1_squared)},
                      {"R2_squared", complex_json(sol.offsets.r2_squared)}};
    r["real"] = sol.offsets.real;
    double prod = 1.0;
    for (double x : sol.f) prod *= x;
    r["product_f"] = prod;

    std::vector<Complex> e{vin.e0.value()};
    for (const auto& z : sol.offsets.e) e.push_back(sol.offsets.real ? Complex(z.real(), 0.0) : z);
    Json ej = Json::array();
    for (const auto& z : e) ej.push_back(complex_json(z));
    r["e"] = ej;
    r["residuals"] = residual_json(as_complex({sol.f.begin(), sol.f.end()}), e);
    const bool flexible = r["residuals"]["max"].get<double>() < tol.alg;
    r["flexible"] = flexible;
    Json warnings = Json::array();
    if (sol.block) {
        r["epsilon"] = sol.block->epsilon;
        r["zeta"] = sol.block->zeta;
        out.exit_code = flexible ? 0 : 1;
        if (!flexible) warnings.push_back("closure residual exceeds tol_alg");
    } else {
        warnings.push_back("offsets are not real; no physical block exists for this input");
        out.exit_code = 2;
    }
    out.report["result"] = r;
    out.report["warnings"] = warnings;
    return out;
}

RunResult run_closure(const Json& input, const Tolerances& tol) {
    RunResult out;
    const auto f = complex_list(input.at("f"), "f");
    const Json& ej = input.at("e");
    std::vector<std::optional<Complex>> known;
    for (std::size_t i = 0; i < ej.size(); ++i)
        known.push_back(ej[i].is_null() ? std::nullopt : std::optional<Complex>(complex_at(ej[i], "e")));

    Json r;
    Json fj = Json::array();
    Complex prod = 1.0;
    for (const auto& z : f) {
        fj.push_back(complex_json(z));
        prod *= z;
    }
    r["f"] = fj;
    r["product_f"] = complex_json(prod);
    Json warnings = Json::array();

    const bool all_known = std::all_of(known.begin(), known.end(), [](const auto& x) { return x.has_value(); });
    if (all_known) {
        std::vector<Complex> e;
        for (const auto& x : known) e.push_back(*x);
        const auto q = closure_polynomial(BeltSpec<Complex>{f, e});
        r["e"] = input.at("e");
        r["q"] = {{"q2", complex_json(q.q2)}, {"q1", complex_json(q.q1)}, {"q0", complex_json(q.q0)}};
        r["residuals"] = residual_json(f, e);
        const bool flexible = r["residuals"]["max"].get<double>() < tol.alg;
        r["flexible"] = flexible;
        out.exit_code = flexible ? 0 : 1;
    } else {
        const auto solved = solve_offsets(f, known, tol.alg);
        Json sols = Json::array();
        std::size_t real_count = 0;
        for (const auto& s : solved.solutions) {
            Json sj;
            Json e = Json::array();
            for (const auto& z : s.e) e.push_back(complex_json(z));
            sj["e"] = e;
            sj["residuals"] = residual_json(f, s.e);
            sj["real"] = s.real;
            sj["start"] = s.start;
            real_count += s.real;
            sols.push_back(sj);
        }
        r["solutions"] = sols;
        r["real_solutions"] = real_count;
        out.exit_code = real_count > 0 ? 0 : 2;
        if (real_count == 0) warnings.push_back("only non-real offset solutions were found");
    }
    out.report["result"] = r;
    out.report["warnings"] = warnings;
    return out;
}

std::string frame_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu.obj", k);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FlexionTrace sweep_with_fallback(const BlockParameters& block, SweepOptions opts, const Tolerances& tol,
                                 Json& warnings) {
    try {
        return flex_sweep(block, opts, tol);
    } catch (const RangeExceeded& e) {
        std::ostringstream os;
        os << "requested range exceeds the admissible interval [" << fmt(e.lower()) << ", " << fmt(e.upper())
           << "]; sweeping the admissible interval instead";
        warnings.push_back(os.str());
        opts.range.reset();
        return flex_sweep(block, opts, tol);
    }
}

Json sweep_json(const FlexionTrace& trace) {
    Json s;
    s["interval"] = {trace.interval.first, trace.interval.second};
    s["samples"] = trace.samples.size();
    Json checks = Json::object();
    for (const auto& c : trace.checks)
        checks[c.name] = {{"pass", c.pass}, {"worst", c.worst}, {"tolerance", c.tolerance}, {"advisory", c.advisory}};
    s["checks"] = checks;
    s["all_pass"] = trace.all_pass();
    Json per = Json::array();
    for (const auto& smp : trace.samples) {
        Json p;
        p["alpha0"] = smp.alpha0;
        p["closure_residual"] = smp.spherical.closure_residual;
        double arc = 0.0, zeta = 0.0;
        for (double x : smp.spherical.arc_residual) arc = std::max(arc, x);
        for (double x : smp.spherical.zeta_residual) zeta = std::max(zeta, std::abs(x));
        p["arc_residual"] = arc;
        p["zeta_residual"] = zeta;
        Json rot = Json::object();
        for (std::size_t h = 0; h < smp.rotation.size(); ++h) rot[smp.block.hinges[h].name] = smp.rotation[h];
        p["rotation"] = rot;
        per.push_back(p);
    }
    s["per_sample"] = per;
    return s;
}

RunResult run_flex(const Json& input, const Tolerances& tol) {
    RunResult out;
    Json warnings = Json::array();
    const auto block = block_from_input(input, tol);
    const auto trace = sweep_with_fallback(block, sweep_options(input), tol, warnings);
    Json r;
    r["block"] = block_json(block, tol);
    r["sweep"] = sweep_json(trace);
    Json frames = Json::array();
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        const auto name = frame_name(k);
        frames.push_back(name);
        out.files.push_back({name, obj_frame(trace.samples[k].block,
                                             "flexbelt frame " + std::to_string(k) + " alpha0 " +
                                                 fmt(trace.samples[k].alpha0))});
    }
    r["frames"] = frames;
    out.exit_code = trace.all_pass() ? 0 : 1;
    if (!trace.all_pass()) warnings.push_back("some sweep invariants failed");
    if (const auto* c = trace.check("continuity"); c && !c->pass)
        warnings.push_back("samples too sparse to unwrap hinge rotations reliably");
    out.report["result"] = r;
    out.report["warnings"] = warnings;
    return out;
}

Json reciprocal_json(const ReciprocalMesh& m) {
    Json j;
    j["dimension"] = m.nullspace.dimension;
    j["unknowns"] = m.nullspace.unknowns;
    j["interior_edges"] = m.nullspace.interior_edges;
    Json verts = Json::array();
    for (const auto& v : m.vertices) verts.push_back({v.x(), v.y(), v.z()});
    j["vertices"] = verts;
    Json edges = Json::array();
    for (const auto& e : m.edges)
        edges.push_back({{"faces", {e.face_f, e.face_g}}, {"edge", {e.p, e.q}}, {"t", e.t}});
    j["edges"] = edges;
    j["designated"] = m.designated;
    j["max_parallel_angle"] = m.max_parallel_angle;
    return j;
}

RunResult run_reciprocal(const Json& input, const Tolerances& tol) {
    RunResult out;
    Json warnings = Json::array();
    const auto block = block_from_input(input, tol);
    const auto trace = sweep_with_fallback(block, sweep_options(input), tol, warnings);
    const auto& first = trace.samples.front();
    const auto mesh = to_mesh(first.block);

    Json r;
    r["block"] = block_json(block, tol);
    r["alpha0"] = first.alpha0;
    const auto ns = nullspace_dimension(mesh);
    r["dimension"] = ns.dimension;
    try {
        const auto rec = reciprocal_parallel(first.block);
        r["status"] = "unique";
        r["reciprocal"] = reciprocal_json(rec);
        r["reciprocal_of_reciprocal_dimension"] = nullspace_dimension(rec.as_mesh()).dimension;
        out.files.push_back({"reciprocal.obj", obj_reciprocal(rec, "flexbelt reciprocal-parallel mesh alpha0 " +
                                                                      fmt(first.alpha0))});
        if (trace.samples.size() > 1) {
            const auto cyl = verify_cylindrical_deformation(trace);
            Json c;
            c["samples"] = cyl.samples;
            c["star_angle_variation"] = cyl.star_angle_variation;
            c["max_parallel_angle"] = cyl.max_parallel_angle;
            c["stars_rigid"] = cyl.stars_rigid;
            c["parallel"] = cyl.parallel;
            Json ranges = Json::array();
            for (const auto& [lo, hi] : cyl.length_range) ranges.push_back({lo, hi});
            c["length_range"] = ranges;
            r["cylindrical"] = c;
            out.exit_code = cyl.pass() ? 0 : 1;
            if (!cyl.pass()) warnings.push_back("reciprocal deformation checks failed");
        }
    } catch (const AmbiguousSolution& e) {
        r["status"] = "AmbiguousSolution";
        warnings.push_back(e.what());
        out.exit_code = 1;
    } catch (const NoNontrivialSolution& e) {
        r["status"] = "NoNontrivialSolution";
        warnings.push_back(e.what());
        out.exit_code = 1;
    }
    out.report["result"] = r;
    out.report["warnings"] = warnings;
    return out;
}

} // namespace

RunResult run(Command command, const Json& input, const Tolerances& tol) {
    RunResult out;
    switch (command) {
    case Command::SolveVhedra: out = run_solve_vhedra(input, tol); break;
    case Command::Closure: out = run_closure(input, tol); break;
    case Command::Flex: out = run_flex(input, tol); break;
    case Command::Reciprocal: out = run_reciprocal(input, tol); break;
    }
    out.report["format"] = "flexbelt-report";
    out.report["version"] = 1;
    out.report["command"] = to_string(command);
    out.report["input"] = input;
    out.report["tolerances"] = tolerances_json(tol);
    out.report["exit_code"] = out.exit_code;
    return out;
}

// --- output formats ----------------------------------------------------------

namespace {

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write_json(const Json& j, std::string& out, int indent) {
    const std::string pad(indent, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + "  " + Json(it.key()).dump() + ": ";
            write_json(it.value(), out, indent + 2);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        if (std::all_of(j.begin(), j.end(), is_scalar)) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write_json(j[i], out, indent);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad + "  ";
            write_json(j[i], out, indent + 2);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? fmt(v) : "null";
        return;
    }
    default: out += j.dump(); return;
    }
}

} // namespace

std::string dump(const Json& value) {
    std::string out;
    write_json(value, out, 0);
    out += "\n";
    return out;
}

std::string obj_frame(const Block3D& block, const std::string& header) {
    std::string out = "# " + header + "\n";
    for (const auto& p : block.points) out += "v " + fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(p.z()) + "\n";
    for (const auto& f : block.faces) {
        out += "g " + f.name + "\n";
        // fan from the lowest-index vertex
        const auto& v = f.vertices;
        const std::size_t low = std::min_element(v.begin(), v.end()) - v.begin();
        for (std::size_t k = 1; k + 1 < v.size(); ++k) {
            out += "f " + std::to_string(v[low] + 1) + " " + std::to_string(v[(low + k) % v.size()] + 1) + " " +
                   std::to_string(v[(low + k + 1) % v.size()] + 1) + "\n";
        }
    }
    return out;
}

std::string obj_reciprocal(const ReciprocalMesh& mesh, const std::string& header) {
    std::string out = "# " + header + "\n";
    for (const auto& p : mesh.vertices) out += "v " + fmt(p.x()) + " " + fmt(p.y()) + " " + fmt(p.z()) + "\n";
    for (const auto& e : mesh.edges) out += "l " + std::to_string(e.face_f + 1) + " " + std::to_string(e.face_g + 1) + "\n";
    for (const auto& f : mesh.faces) {
        out += "f";
        for (int v : f) out += " " + std::to_string(v + 1);
        out += "\n";
    }
    return out;
}

// --- verify ------------------------------------------------------------------

namespace {

bool numbers_close(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// First path at which two JSON trees differ, empty if none.
std::string first_difference(const Json& a, const Json& b, const std::string& path) {
    if (a.is_number() && b.is_number())
        return numbers_close(a.get<double>(), b.get<double>()) ? "" : path;
    if (a.type() != b.type()) return path;
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return path + "." + it.key();
            auto d = first_difference(it.value(), b.at(it.key()), path + "." + it.key());
            if (!d.empty()) return d;
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) return path + "." + it.key();
        return "";
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return path;
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto d = first_difference(a[i], b[i], path + "[" + std::to_string(i) + "]");
            if (!d.empty()) return d;
        }
        return "";
    }
    return a == b ? "" : path;
}

// Residual claims found in the result: (f, e, residuals) triples.
std::optional<std::string> check_residual(const std::vector<Complex>& f, const Json& e, const Json& residuals,
                                          const std::string& path) {
    const auto values = complex_list(e, path + ".e");
    if (values.size() != f.size()) return path + ".e";
    const Json fresh = residual_json(f, values);
    for (const char* key : {"q2", "q1", "q0", "max"}) {
        const double claimed = number_at(require(residuals, key), path + ".residuals." + key);
        const double actual = fresh[key].get<double>();
        if (std::abs(claimed - actual) > 1e-15 + 1e-12 * std::abs(claimed)) return path + ".residuals." + key;
    }
    return std::nullopt;
}

} // namespace

VerifyResult verify_report(const Json& report) {
    VerifyResult v;
    if (!report.is_object()) throw SchemaError("report must be a JSON object");
    const Command command = command_from_string(require(report, "command").get<std::string>());
    const Json& input = require(report, "input");
    const Json& result = require(report, "result");
    const Json& tj = require(report, "tolerances");
    Tolerances tol;
    tol.geom = number_at(require(tj, "geom"), "tolerances.geom");
    tol.alg = number_at(require(tj, "alg"), "tolerances.alg");
    tol.rigid = number_at(require(tj, "rigid"), "tolerances.rigid");

    // 1. residual claims against the reported parameters
    std::vector<std::pair<const Json*, std::string>> holders{{&result, "result"}};
    if (result.contains("block")) holders.push_back({&result.at("block"), "result.block"});
    for (const auto& [h, path] : holders) {
        if (!h->contains("f")) continue;
        const auto f = complex_list(h->at("f"), path + ".f");
        std::optional<std::string> bad;
        if (h->contains("e") && h->contains("residuals")) bad = check_residual(f, h->at("e"), h->at("residuals"), path);
        if (!bad && h->contains("solutions")) {
            const Json& sols = h->at("solutions");
            for (std::size_t i = 0; i < sols.size() && !bad; ++i) {
                const std::string sp = path + ".solutions[" + std::to_string(i) + "]";
                bad = check_residual(f, require(sols[i], "e"), require(sols[i], "residuals"), sp);
            }
        }
        if (bad) {
            v.ok = false;
            v.divergence = "q-residual";
            v.detail = "closure residual recomputed from the reported f and e disagrees at " + *bad;
            return v;
        }
    }

    // 2. full recomputation from the echoed input
    const auto fresh = run(command, input, tol);
    auto diff = first_difference(result, fresh.report["result"], "result");
    if (diff.empty() && report.contains("exit_code") && report.at("exit_code") != fresh.exit_code) diff = "exit_code";
    if (!diff.empty()) {
        v.ok = false;
        v.divergence = diff;
        v.detail = "recomputed value differs at " + diff;
    }
    return v;
}

} // namespace flexbelt::io
