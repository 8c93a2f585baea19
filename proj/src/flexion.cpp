#include "flexbelt/flexion.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <map>
#include <sstream>

namespace flexbelt {

// --- spherical configuration -------------------------------------------------

SphericalConfig configure_spherical(const BlockParameters& block, const HalfTangent<double>& a0,
                                    const Tolerances& tol, bool require_closure) {
    const std::size_t n = block.size();
    if (n < 3) throw InvalidInput("block needs n >= 3 vertices");
    const auto chain = propagate(block.belt(), a0);

    SphericalConfig cfg;
    cfg.alpha0 = halftangent_to_angle(a0);
    cfg.C = block.directions;
    cfg.a = chain.a;
    cfg.b = chain.b;
    cfg.A.resize(n);
    cfg.B.resize(n);
    cfg.alpha.resize(n);
    cfg.beta.resize(n);
    cfg.arc_residual.resize(n);
    cfg.zeta_residual.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& ci = cfg.C[i];
        const Vec3& cj = cfg.C[(i + 1) % n];
        cfg.alpha[i] = halftangent_to_angle(cfg.a[i]);
        cfg.beta[i] = halftangent_to_angle(cfg.b[i]);
        cfg.A[i] = input_point(ci, cj, block.gamma[i], cfg.a[i]);
        cfg.B[i] = output_point(ci, cj, block.delta[i], cfg.b[i]);
        cfg.arc_residual[i] = std::max({std::abs(arc_length(ci, cj) - block.lambda[i]),
                                        std::abs(arc_length(ci, cfg.A[i]) - block.gamma[i]),
                                        std::abs(arc_length(cj, cfg.B[i]) - block.delta[i]),
                                        std::abs(arc_length(cfg.A[i], cfg.B[i]) - block.mu[i])});
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t prev = (k + n - 1) % n;
        const double measured = signed_angle_about(cfg.B[prev], cfg.A[k], cfg.C[k]);
        cfg.zeta_residual[k] = wrap_angle(measured - block.zeta[k]);
    }
    cfg.closure_residual = projective_distance(cfg.a[n], cfg.a[0]);

    const double arc_tol = 1e2 * tol.geom;
    for (std::size_t i = 0; i < n; ++i) {
        if (cfg.arc_residual[i] > arc_tol) {
            std::ostringstream os;
            os << "arc residual " << cfg.arc_residual[i] << " at vertex " << i << " (alpha0 = " << cfg.alpha0 << ")";
            throw ClosureViolation(os.str());
        }
    }
    if (require_closure) {
        if (cfg.closure_residual > tol.alg) {
            std::ostringstream os;
            os << "a_n differs from a_0 by " << cfg.closure_residual << " (alpha0 = " << cfg.alpha0 << ")";
            throw ClosureViolation(os.str());
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(cfg.zeta_residual[k]) > arc_tol) {
                std::ostringstream os;
                os << "zeta at junction " << k << " off by " << cfg.zeta_residual[k];
                throw ClosureViolation(os.str());
            }
        }
    }
    return cfg;
}

SphericalConfig configure_spherical(const BlockParameters& block, double alpha0, const Tolerances& tol,
                                    bool require_closure) {
    return configure_spherical(block, angle_to_halftangent(alpha0), tol, require_closure);
}

// --- 3D lift ---------------------------------------------------------------

namespace {

struct EdgeFrame {
    Vec3 x, y, z;
};

EdgeFrame corner_frame(const Vec3& along_a, const Vec3& along_b) {
    EdgeFrame fr;
    fr.x = along_a.normalized();
    fr.y = (along_b - along_b.dot(fr.x) * fr.x).normalized();
    fr.z = fr.x.cross(fr.y);
    return fr;
}

} // namespace

CornerTemplate CornerTemplate::capture(const Vec3& v, const Vec3& pa, const Vec3& pb, const Vec3& x) {
    const Vec3 ea = pa - v, eb = pb - v, d = x - v;
    const auto fr = corner_frame(ea, eb);
    CornerTemplate t;
    t.length_a = ea.norm();
    t.length_b = eb.norm();
    t.angle = arc_length(ea.normalized(), eb.normalized());
    t.local = Vec3(d.dot(fr.x), d.dot(fr.y), d.dot(fr.z));
    return t;
}

std::vector<CornerTemplate> parallelogram_templates(const BlockParameters& block, const OuterLengths& lengths) {
    const std::size_t n = block.size();
    if (lengths.a.size() != n || lengths.b.size() != n)
        throw InvalidInput("outer lengths need one entry per vertex");
    std::vector<CornerTemplate> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = kPi - block.mu[i];
        auto& t = out[i];
        t.length_a = lengths.a[i];
        t.length_b = lengths.b[i];
        t.angle = theta;
        t.local = Vec3(lengths.a[i] + lengths.b[i] * std::cos(theta), lengths.b[i] * std::sin(theta), 0.0);
    }
    return out;
}

double Block3D::dihedral(const Hinge& h) const {
    const Vec3& p = points[h.p];
    return signed_angle_about(points[h.wing_f] - p, points[h.wing_g] - p, points[h.q] - p);
}

double Block3D::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, (points[i] - points[j]).norm());
    return d;
}

Block3D lift_to_3d(const BlockParameters& block, const SphericalConfig& cfg, const OuterLengths& lengths,
                   const std::vector<CornerTemplate>& templates, const Tolerances& tol) {
    const std::size_t n = block.size();
    if (cfg.A.size() != n || cfg.B.size() != n) throw InvalidInput("configuration does not match the block");
    if (lengths.a.size() != n || lengths.b.size() != n)
        throw InvalidInput("outer lengths need one entry per vertex");
    if (templates.size() != n) throw InvalidInput("need one corner template per vertex");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lengths.a[i] > 0.0) || !(lengths.b[i] > 0.0) || !std::isfinite(lengths.a[i]) ||
            !std::isfinite(lengths.b[i]))
            throw InvalidInput("outer lengths must be positive and finite (vertex " + std::to_string(i) + ")");
        const auto& t = templates[i];
        const double angle_expected = kPi - block.mu[i];
        if (std::abs(t.length_a - lengths.a[i]) > 1e-9 * std::max(1.0, lengths.a[i]) ||
            std::abs(t.length_b - lengths.b[i]) > 1e-9 * std::max(1.0, lengths.b[i]) ||
            std::abs(t.angle - angle_expected) > 1e2 * tol.geom) {
            std::ostringstream os;
            os << "corner " << i << " template has lengths (" << t.length_a << ", " << t.length_b << ") and angle "
               << t.angle << "; expected (" << lengths.a[i] << ", " << lengths.b[i] << ") and " << angle_expected;
            throw InconsistentTemplate(os.str());
        }
    }

    const int m = static_cast<int>(n);
    auto V = [](int i) { return i; };
    auto Pa = [m](int i) { return m + (i % m + m) % m; };
    auto Pb = [m](int i) { return 2 * m + (i % m + m) % m; };
    auto X = [m](int i) { return 3 * m + i; };
    auto Vm = [m](int i) { return (i % m + m) % m; };

    Block3D out;
    out.points.resize(4 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& v = block.polygon[i];
        const Vec3 ea = lengths.a[i] * cfg.A[i];
        const Vec3 eb = -lengths.b[i] * cfg.B[i];
        out.points[i] = v;
        out.points[n + i] = v + ea;
        out.points[2 * n + i] = v + eb;
        const auto fr = corner_frame(ea, eb);
        const Vec3& l = templates[i].local;
        out.points[3 * n + i] = v + l.x() * fr.x + l.y() * fr.y + l.z() * fr.z;
    }

    Face central{"central", {}};
    for (int i = 0; i < m; ++i) central.vertices.push_back(V(i));
    out.faces.push_back(central);
    for (int i = 0; i < m; ++i)
        out.faces.push_back({"side" + std::to_string(i), {Vm(i + 1), V(i), Pb(i), Pa(i + 1)}});
    for (int i = 0; i < m; ++i) out.faces.push_back({"corner" + std::to_string(i), {V(i), Pa(i), X(i), Pb(i)}});

    auto side = [m](int i) { return 1 + (i % m + m) % m; };
    auto corner = [m](int i) { return 1 + m + i; };
    for (int i = 0; i < m; ++i) {
        const std::string s = std::to_string(i);
        out.hinges.push_back({"c" + s, V(i), Vm(i + 1), 0, side(i), Vm(i - 1), Pb(i)});
        out.hinges.push_back({"a" + s, V(i), Pa(i), side(i - 1), corner(i), Vm(i - 1), Pb(i)});
        out.hinges.push_back({"b" + s, V(i), Pb(i), side(i), corner(i), Vm(i + 1), Pa(i)});
    }

    if (n == 4) {
        // 4 x 4 grid of the block, central quad at (1..2, 1..2)
        const std::array<std::array<int, 2>, 16> g{{{1, 1}, {1, 2}, {2, 2}, {2, 1},   // V
                                                    {1, 0}, {0, 2}, {2, 3}, {3, 1},   // Pa
                                                    {0, 1}, {1, 3}, {3, 2}, {2, 0},   // Pb
                                                    {0, 0}, {0, 3}, {3, 3}, {3, 0}}}; // X
        out.grid.assign(g.begin(), g.end());
    }
    return out;
}

// --- sweeps ----------------------------------------------------------------

bool FlexionTrace::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.pass || c.advisory; });
}

const InvariantCheck* FlexionTrace::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<double> sweep_samples(const std::pair<double, double>& interval, int count, bool explicit_range) {
    if (count < 1) throw InvalidInput("sweep needs at least one sample");
    const auto [lo, hi] = interval;
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k) {
        if (explicit_range)
            out[k] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
        else
            out[k] = lo + (hi - lo) * (k + 0.5) / count;
    }
    return out;
}

namespace {

bool admissible(const BlockParameters& block, double alpha, const Tolerances& tol) {
    try {
        configure_spherical(block, alpha, tol);
        return true;
    } catch (const ClosureViolation&) {
        return false;
    }
}

} // namespace

std::pair<double, double> admissible_interval(const BlockParameters& block, const Tolerances& tol) {
    constexpr int kScan = 72;
    std::vector<double> grid(kScan);
    std::vector<char> ok(kScan);
    for (int j = 0; j < kScan; ++j) {
        grid[j] = -kPi + 2.0 * kPi * (j + 0.5) / kScan;
        ok[j] = admissible(block, grid[j], tol);
    }
    if (std::all_of(ok.begin(), ok.end(), [](char c) { return c; })) return {-kPi, kPi};
    if (std::none_of(ok.begin(), ok.end(), [](char c) { return c; }))
        throw NoAdmissibleSolution("no driving angle gives a closed configuration");

    // longest cyclic run of admissible scan points
    int best_start = 0, best_len = 0;
    for (int s = 0; s < kScan; ++s) {
        if (!ok[s] || ok[(s + kScan - 1) % kScan]) continue;
        int len = 0;
        while (len < kScan && ok[(s + len) % kScan]) ++len;
        if (len > best_len) {
            best_len = len;
            best_start = s;
        }
    }
    const double step = 2.0 * kPi / kScan;
    auto refine = [&](double good, double bad) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (good + bad);
            (admissible(block, mid, tol) ? good : bad) = mid;
        }
        return good;
    };
    const double first = grid[best_start];
    const double last = first + (best_len - 1) * step;
    return {refine(first, first - step), refine(last, last + step)};
}

namespace {

Eigen::Isometry3d hinge_rotation(const Block3D& initial, const Hinge& h, double angle) {
    const Vec3& p = initial.points[h.p];
    const Vec3 axis = (initial.points[h.q] - p).normalized();
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.translate(p);
    t.rotate(Eigen::AngleAxisd(angle, axis));
    t.translate(-p);
    return t;
}

std::vector<double> pairwise_distances(const Block3D& b, const Face& f) {
    std::vector<double> d;
    for (std::size_t i = 0; i < f.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < f.vertices.size(); ++j)
            d.push_back((b.points[f.vertices[i]] - b.points[f.vertices[j]]).norm());
    return d;
}

InvariantCheck spread_check(const std::string& name, const std::vector<std::vector<int>>& groups,
                            const std::vector<FlexionSample>& samples, double tolerance) {
    InvariantCheck c{name, true, 0.0, tolerance};
    for (const auto& s : samples) {
        for (const auto& g : groups) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int h : g) {
                lo = std::min(lo, std::abs(s.rotation[h]));
                hi = std::max(hi, std::abs(s.rotation[h]));
            }
            c.worst = std::max(c.worst, hi - lo);
        }
    }
    c.pass = c.worst <= tolerance;
    return c;
}

} // namespace

FlexionTrace flex_sweep(const BlockParameters& block, const SweepOptions& options, const Tolerances& tol) {
    const std::size_t n = block.size();
    if (!block.flexibility.flexible) {
        std::ostringstream os;
        os << "block is not flexible (closure residual " << block.flexibility.residual << ")";
        throw ClosureViolation(os.str());
    }
    FlexionTrace trace;
    trace.interval = admissible_interval(block, tol);
    std::vector<double> alphas;
    if (options.range) {
        const auto [lo, hi] = *options.range;
        const double slack = 1e-12;
        if (!(lo < hi) || lo < trace.interval.first - slack || hi > trace.interval.second + slack) {
            std::ostringstream os;
            os << "driving range [" << lo << ", " << hi << "] leaves the admissible interval ["
               << trace.interval.first << ", " << trace.interval.second << "]";
            throw RangeExceeded(os.str(), trace.interval.first, trace.interval.second);
        }
        alphas = sweep_samples(*options.range, options.samples, true);
    } else {
        alphas = sweep_samples(trace.interval, options.samples, false);
    }

    const OuterLengths lengths = options.lengths.value_or(OuterLengths::uniform(n));
    const auto templates = options.templates.value_or(parallelogram_templates(block, lengths));

    for (double alpha : alphas) {
        FlexionSample s;
        s.alpha0 = alpha;
        s.spherical = configure_spherical(block, alpha, tol);
        s.block = lift_to_3d(block, s.spherical, lengths, templates, tol);
        trace.samples.push_back(std::move(s));
    }

    // rotation angles relative to the first sample, unwrapped along the sweep
    const auto& first = trace.samples.front().block;
    const std::size_t nh = first.hinges.size();
    std::vector<double> raw0(nh), prev_raw(nh);
    for (std::size_t h = 0; h < nh; ++h) raw0[h] = prev_raw[h] = first.dihedral(first.hinges[h]);
    double max_step = 0.0;
    std::vector<double> prev_rot(nh, 0.0);
    for (auto& s : trace.samples) {
        s.rotation.resize(nh);
        for (std::size_t h = 0; h < nh; ++h) {
            const double raw = s.block.dihedral(s.block.hinges[h]);
            const double step = wrap_angle(raw - prev_raw[h]);
            max_step = std::max(max_step, std::abs(step));
            s.rotation[h] = prev_rot[h] + step;
            prev_rot[h] = s.rotation[h];
            prev_raw[h] = raw;
        }
    }

    const double diameter = first.diameter();
    {
        InvariantCheck c{"rigidity", true, 0.0, tol.rigid * diameter};
        std::vector<std::vector<double>> ref;
        for (const auto& f : first.faces) ref.push_back(pairwise_distances(first, f));
        for (const auto& s : trace.samples)
            for (std::size_t fi = 0; fi < first.faces.size(); ++fi) {
                const auto d = pairwise_distances(s.block, s.block.faces[fi]);
                for (std::size_t j = 0; j < d.size(); ++j) c.worst = std::max(c.worst, std::abs(d[j] - ref[fi][j]));
            }
        c.pass = c.worst <= c.tolerance;
        trace.checks.push_back(c);
    }
    {
        InvariantCheck c{"loop-closure", true, 0.0, 1e-9};
        const double scale = std::max(diameter, 1e-300);
        for (const auto& s : trace.samples) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t prev = (i + n - 1) % n;
                const auto& H = first.hinges;
                const Eigen::Isometry3d t = hinge_rotation(first, H[3 * prev], s.rotation[3 * prev]) *
                                            hinge_rotation(first, H[3 * i + 1], s.rotation[3 * i + 1]) *
                                            hinge_rotation(first, H[3 * i + 2], -s.rotation[3 * i + 2]) *
                                            hinge_rotation(first, H[3 * i], -s.rotation[3 * i]);
                const double rot_dev = (t.linear() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
                const double trans_dev = t.translation().norm() / scale;
                c.worst = std::max({c.worst, rot_dev, trans_dev});
            }
        }
        c.pass = c.worst <= c.tolerance;
        trace.checks.push_back(c);
    }
    {
        InvariantCheck c{"a_n=a_0", true, 0.0, tol.alg};
        for (const auto& s : trace.samples) c.worst = std::max(c.worst, s.spherical.closure_residual);
        c.pass = c.worst <= c.tolerance;
        trace.checks.push_back(c);
    }
    {
        InvariantCheck c{"arcs", true, 0.0, 1e2 * tol.geom};
        for (const auto& s : trace.samples)
            for (double r : s.spherical.arc_residual) c.worst = std::max(c.worst, r);
        c.pass = c.worst <= c.tolerance;
        trace.checks.push_back(c);
    }
    {
        std::vector<std::vector<int>> triples;
        for (std::size_t i = 0; i < n; ++i)
            triples.push_back({static_cast<int>(3 * i + 1), static_cast<int>(3 * i),
                               static_cast<int>(3 * ((i + 1) % n) + 2)});
        trace.checks.push_back(spread_check("triple-edge", triples, trace.samples, tol.rigid));
    }
    if (!first.grid.empty()) {
        // hinges grouped by the grid line they lie on
        std::map<std::pair<int, int>, std::vector<int>> lines;
        for (std::size_t h = 0; h < nh; ++h) {
            const auto& gp = first.grid[first.hinges[h].p];
            const auto& gq = first.grid[first.hinges[h].q];
            if (gp[0] == gq[0]) lines[{0, gp[0]}].push_back(static_cast<int>(h));
            else lines[{1, gp[1]}].push_back(static_cast<int>(h));
        }
        std::vector<std::vector<int>> groups;
        for (auto& [key, g] : lines) groups.push_back(g);
        trace.checks.push_back(spread_check("uv-polylines", groups, trace.samples, tol.rigid));
    }
    {
        InvariantCheck c{"spherical-3d", true, 0.0, 1e2 * tol.geom};
        for (const auto& s : trace.samples)
            for (std::size_t i = 0; i < n; ++i) {
                const double dihedral = s.block.dihedral(s.block.hinges[3 * i]);
                c.worst = std::max(c.worst, std::abs(wrap_angle(dihedral - kPi - s.spherical.beta[i])));
            }
        c.pass = c.worst <= c.tolerance;
        trace.checks.push_back(c);
    }
    {
        // only says whether rotations could be unwrapped reliably
        InvariantCheck c{"continuity", true, max_step, kPi / 2, true};
        c.pass = max_step <= c.tolerance;
        trace.checks.push_back(c);
    }
    return trace;
}

// --- n = 3 -----------------------------------------------------------------

std::vector<Vec3> triangle_from_bar_lengths(const std::array<double, 3>& gamma, double tol_geom) {
    double sum = 0.0;
    for (double g : gamma) {
        if (!(g > 0.0 && g < kPi)) throw InvalidInput("triangle bar lengths must lie in (0, pi)");
        sum += g;
    }
    if (std::abs(sum - 2.0 * kPi) > tol_geom) {
        std::ostringstream os;
        os << "bar lengths of the central triangle sum to " << sum << ", not 2 pi";
        throw InvalidInput(os.str());
    }
    // interior angles and law of sines
    const double t0 = kPi - gamma[0], t1 = kPi - gamma[1], t2 = kPi - gamma[2];
    return {Vec3::Zero(), Vec3(std::sin(t2), 0.0, 0.0),
            std::sin(t1) * Vec3(std::cos(t0), std::sin(t0), 0.0)};
}

SixRReport sixR_from_n3(const SixRInput& input, const Tolerances& tol) {
    SixRReport r;
    r.triangle = triangle_from_bar_lengths(input.gamma, tol.geom);
    const SpatialPolygon polygon(r.triangle);
    const auto lambda = bar_lengths(polygon, tol.geom);
    r.f.resize(3);
    for (std::size_t i = 0; i < 3; ++i)
        r.f[i] = transmission_ratio({input.delta[i], lambda[i], input.branch[i]}, tol.geom);

    if (input.e) {
        auto block = assemble_block(polygon, input.delta, input.branch, *input.e, tol);
        OffsetSolution sol;
        sol.e.assign(input.e->begin(), input.e->end());
        sol.residual = block.flexibility.residual;
        sol.real = true;
        r.solutions.push_back(sol);
        r.residual = sol.residual;
        r.flexible = block.flexibility.flexible;
        r.block = std::move(block);
        return r;
    }

    const std::vector<Complex> f(r.f.begin(), r.f.end());
    const auto solved = solve_offsets(f, std::vector<std::optional<Complex>>(3), tol.alg);
    r.solutions = solved.solutions;
    r.residual = std::numeric_limits<double>::infinity();
    for (const auto& s : r.solutions) r.residual = std::min(r.residual, s.residual);
    r.flexible = r.residual < tol.alg;
    for (const auto& s : r.solutions) {
        if (!s.real) continue;
        const std::array<double, 3> e{s.e[0].real(), s.e[1].real(), s.e[2].real()};
        r.block = assemble_block(polygon, input.delta, input.branch, e, tol);
        break;
    }
    return r;
}

} // namespace flexbelt
