#include "flexbelt/closure.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <sstream>

namespace flexbelt {

double offset_from_zeta(double zeta, double tau, double tol_geom) {
    const double eps = wrap_angle(zeta - tau);
    if (std::abs(eps - kPi) <= tol_geom || std::abs(eps + kPi) <= tol_geom)
        throw PoleNotRepresentable("offset angle epsilon = pi has no finite half-tangent");
    return std::tan(0.5 * eps);
}

// --- normalization ----------------------------------------------------------

namespace {

constexpr double kTypeTol = 1e-9;

bool near_angle(double a, double target, double tol) {
    return std::abs(wrap_angle(a - target)) <= tol;
}

void check_vertex_type(const VertexGeometry& v, std::size_t i) {
    const bool ok = v.type == IsogramType::One
                        ? std::abs(v.gamma - v.delta) <= kTypeTol && std::abs(v.mu - v.lambda) <= kTypeTol
                        : std::abs(v.gamma + v.delta - kPi) <= kTypeTol &&
                              std::abs(v.mu + v.lambda - kPi) <= kTypeTol;
    if (!ok)
        throw InvalidInput("vertex " + std::to_string(i) + " does not satisfy its declared isogram type");
}

} // namespace

NormalizedBelt normalize_to_type1(const SphericalBeltData& data, double tol_geom) {
    const std::size_t n = data.vertices.size();
    if (n < 3) throw InvalidInput("belt needs n >= 3 vertices");
    if (data.zeta.size() != n || data.tau.size() != n)
        throw InvalidInput("zeta/tau must have one entry per junction");
    for (std::size_t i = 0; i < n; ++i) check_vertex_type(data.vertices[i], i);

    const double snap = std::max(tol_geom, 1e-12);
    NormalizedBelt out;
    out.flip_a.assign(n, false);
    out.flip_b.assign(n, false);
    out.forced.assign(n, false);

    out.flip_b[0] = data.vertices[0].type == IsogramType::Two;
    std::optional<std::size_t> last_arbitrary;
    bool flip_an = false;

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (i + 1) % n;
        const double eps_unflipped =
            wrap_angle(data.zeta[k] + (out.flip_b[i] ? kPi : 0.0) - data.tau[k]);
        bool flip = false;
        if (near_angle(eps_unflipped, 0.0, snap) || near_angle(eps_unflipped, kPi, snap)) {
            // candidates are {0, pi}: take the one giving eps = 0
            flip = near_angle(eps_unflipped, kPi, snap);
            out.forced[k] = true;
        } else {
            last_arbitrary = i;
        }
        if (i + 1 < n) {
            out.flip_a[k] = flip;
            out.flip_b[k] = (data.vertices[k].type == IsogramType::Two) != flip;
        } else {
            flip_an = flip;
        }
    }

    if (flip_an) {
        // A_n came out antipodal to A_0
        if (!last_arbitrary)
            throw NormalizationFailed("A_n is antipodal to A_0 although every offset choice was forced");
        const std::size_t j = *last_arbitrary;
        for (std::size_t k = j + 1; k < n; ++k) {
            out.flip_a[k] = !out.flip_a[k];
            out.flip_b[k] = !out.flip_b[k];
        }
        out.reflip_index = j;
    }

    out.vertices.resize(n);
    out.belt.f.resize(n);
    out.belt.e.resize(n);
    out.epsilon.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = data.vertices[i];
        VertexGeometry w = v;
        if (out.flip_a[i]) w.gamma = kPi - v.gamma;
        if (out.flip_b[i]) w.delta = kPi - v.delta;
        if (out.flip_a[i] != out.flip_b[i]) w.mu = kPi - v.mu;
        w.type = IsogramType::One;
        if (out.flip_a[i]) w.branch = flipped(v.branch);
        if (std::abs(w.gamma - w.delta) > kTypeTol || std::abs(w.mu - w.lambda) > kTypeTol)
            throw NormalizationFailed("vertex " + std::to_string(i) + " is not type (1) after the flips");
        out.vertices[i] = w;
        out.belt.f[i] = transmission_ratio({w.delta, w.lambda, w.branch}, tol_geom);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t prev = (k + n - 1) % n;
        double eps = data.zeta[k] - data.tau[k];
        if (out.flip_b[prev]) eps += kPi;
        if (out.flip_a[k]) eps += kPi;
        eps = wrap_angle(eps);
        if (near_angle(eps, 0.0, snap)) eps = 0.0;
        if (near_angle(eps, kPi, snap))
            throw NormalizationFailed("junction " + std::to_string(k) + " ended with epsilon = pi");
        out.epsilon[k] = eps;
        out.belt.e[k] = std::tan(0.5 * eps);
    }
    return out;
}

// --- Newton solver ----------------------------------------------------------

bool is_real(const std::vector<Complex>& values) {
    for (const auto& v : values)
        if (std::abs(v.imag()) >= 1e-9 * (1.0 + std::abs(v.real()))) return false;
    return true;
}

namespace {

struct Evaluation {
    Eigen::Vector3cd q;
    Eigen::Matrix3cd jacobian;
    double scale = 1.0;
};

MobiusMap<Complex> step_derivative(Complex f_prev) {
    return {Complex(0), Complex(1), -f_prev, Complex(0)};
}

Evaluation evaluate(const std::vector<Complex>& f, const std::vector<Complex>& e,
                    const std::array<std::size_t, 3>& unknowns) {
    const std::size_t n = f.size();
    // prefix[i] = S_i ... S_1, suffix[i] = S_n ... S_{i+1}
    std::vector<MobiusMap<Complex>> steps(n + 1), prefix(n + 1), suffix(n + 2);
    for (std::size_t i = 1; i <= n; ++i) steps[i] = step_map(f[i - 1], e[i % n]);
    prefix[0] = MobiusMap<Complex>{};
    for (std::size_t i = 1; i <= n; ++i) prefix[i] = steps[i] * prefix[i - 1];
    suffix[n] = MobiusMap<Complex>{};
    for (std::size_t i = n; i >= 1; --i) suffix[i - 1] = suffix[i] * steps[i];

    const auto& m = prefix[n];
    Evaluation ev;
    ev.q << m.m21, m.m22 - m.m11, -m.m12;
    ev.scale = m.max_abs();
    for (int c = 0; c < 3; ++c) {
        const std::size_t k = unknowns[c];
        const std::size_t i = k == 0 ? n : k;  // e_k lives in step S_i
        const auto dm = suffix[i] * step_derivative(f[i - 1]) * prefix[i - 1];
        ev.jacobian(0, c) = dm.m21;
        ev.jacobian(1, c) = dm.m22 - dm.m11;
        ev.jacobian(2, c) = -dm.m12;
    }
    return ev;
}

double scaled_norm(const Evaluation& ev) { return ev.q.cwiseAbs().maxCoeff() / ev.scale; }

} // namespace

namespace {

using Unknowns = std::array<std::size_t, 3>;

// Damped Newton from e; returns the final scaled residual, or +inf on blow-up.
double newton(const std::vector<Complex>& f, std::vector<Complex>& e, const Unknowns& unknowns, double tol_alg,
              int max_iter) {
    Evaluation ev = evaluate(f, e, unknowns);
    double res = scaled_norm(ev);
    for (int iter = 0; iter < max_iter && res > 1e-15; ++iter) {
        Eigen::FullPivLU<Eigen::Matrix3cd> lu(ev.jacobian);
        if (!lu.isInvertible()) break;
        const Eigen::Vector3cd step = lu.solve(-ev.q);
        const double qnorm = ev.q.norm();
        double damping = 1.0;
        std::vector<Complex> trial = e;
        Evaluation tev;
        for (int h = 0; h < 30; ++h) {
            for (int c = 0; c < 3; ++c) trial[unknowns[c]] = e[unknowns[c]] + damping * step(c);
            tev = evaluate(f, trial, unknowns);
            if (tev.q.norm() < qnorm) break;
            damping *= 0.5;
        }
        const double moved = damping * step.cwiseAbs().maxCoeff();
        e = trial;
        ev = tev;
        res = scaled_norm(ev);
        double biggest = 0.0;
        for (int c = 0; c < 3; ++c) biggest = std::max(biggest, std::abs(e[unknowns[c]]));
        if (!std::isfinite(res) || biggest > 1e8) return std::numeric_limits<double>::infinity();
        if (moved <= 1e-15 * (1.0 + biggest) && res < tol_alg) break;
    }
    return res;
}

// q is affine in each unknown separately. For fixed z = e[u2] the three
// equations are linear in the monomials (1, x, y, xy), x = e[u0], y = e[u1];
// the cofactor vector of that 3x4 system must itself have the form
// (1, x, y, xy), which leaves one polynomial of degree <= 6 in z.
struct Eliminant {
    std::vector<Complex> e;
    Unknowns unknowns;
    const std::vector<Complex>* f;

    Eigen::Vector3cd q_at(Complex x, Complex y, Complex z) {
        e[unknowns[0]] = x;
        e[unknowns[1]] = y;
        e[unknowns[2]] = z;
        const auto m = loop_map(BeltSpec<Complex>{*f, e});
        return {m.m21, m.m22 - m.m11, -m.m12};
    }

    Eigen::Vector4cd cofactors(Complex z) {
        const Eigen::Vector3cd a = q_at(0.0, 0.0, z), b = q_at(1.0, 0.0, z), c = q_at(0.0, 1.0, z),
                               d = q_at(1.0, 1.0, z);
        Eigen::Matrix<Complex, 3, 4> n;
        n << a, b - a, c - a, d - b - c + a;
        Eigen::Vector4cd v;
        for (int k = 0; k < 4; ++k) {
            Eigen::Matrix3cd minor;
            for (int j = 0, col = 0; j < 4; ++j)
                if (j != k) minor.col(col++) = n.col(j);
            v(k) = (k % 2 ? -1.0 : 1.0) * minor.determinant();
        }
        return v;
    }

    Complex value(Complex z) {
        const auto v = cofactors(z);
        return v(0) * v(3) - v(1) * v(2);
    }
};

// Roots of the eliminant; empty when it vanishes identically.
std::vector<Complex> eliminant_roots(Eliminant& el) {
    constexpr int kPoints = 7;
    std::array<Complex, kPoints> vals;
    for (int k = 0; k < kPoints; ++k) vals[k] = el.value(std::polar(1.0, 2.0 * kPi * k / kPoints));
    std::array<Complex, kPoints> coeff{};
    double biggest = 0.0;
    for (int j = 0; j < kPoints; ++j) {
        for (int k = 0; k < kPoints; ++k) coeff[j] += vals[k] * std::polar(1.0, -2.0 * kPi * j * k / kPoints);
        coeff[j] /= double(kPoints);
        biggest = std::max(biggest, std::abs(coeff[j]));
    }
    int degree = kPoints - 1;
    while (degree > 0 && std::abs(coeff[degree]) <= 1e-12 * biggest) --degree;
    if (biggest == 0.0 || degree == 0) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeff[i] / coeff[degree];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool add_solution(OffsetSolveReport& report, const std::vector<Complex>& e, const Unknowns& unknowns, double res,
                  int start) {
    for (const auto& s : report.solutions) {
        double sep = 0.0, mag = 1.0;
        for (int c = 0; c < 3; ++c) {
            sep = std::max(sep, std::abs(s.e[unknowns[c]] - e[unknowns[c]]));
            mag = std::max(mag, std::abs(e[unknowns[c]]));
        }
        if (sep < 1e-6 * mag) return false;
    }
    OffsetSolution sol;
    sol.e = e;
    sol.residual = res;
    sol.real = is_real(e);
    sol.start = start;
    report.solutions.push_back(std::move(sol));
    return true;
}

} // namespace

OffsetSolveReport solve_offsets(const std::vector<Complex>& f,
                                const std::vector<std::optional<Complex>>& known_e, double tol_alg) {
    const std::size_t n = f.size();
    if (n < 3) throw InvalidInput("belt needs n >= 3 vertices");
    if (known_e.size() != n) throw InvalidInput("offset assignment must have one entry per vertex");
    for (const auto& x : f)
        if (x == Complex(0)) throw InvalidInput("transmission ratios must be nonzero");

    Unknowns unknowns{};
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (known_e[k]) continue;
        if (count == 3) throw InvalidInput("exactly three offsets must be unknown");
        unknowns[count++] = k;
    }
    if (count != 3) throw InvalidInput("exactly three offsets must be unknown");

    OffsetSolveReport report;
    std::vector<Complex> base(n);
    for (std::size_t k = 0; k < n; ++k) base[k] = known_e[k].value_or(Complex(0));

    Eliminant el{base, unknowns, &f};
    const auto roots = eliminant_roots(el);
    for (std::size_t r = 0; r < roots.size(); ++r) {
        const auto v = el.cofactors(roots[r]);
        if (std::abs(v(0)) <= 1e-12 * v.cwiseAbs().maxCoeff()) continue;  // x, y at infinity
        std::vector<Complex> e = base;
        e[unknowns[0]] = v(1) / v(0);
        e[unknowns[1]] = v(2) / v(0);
        e[unknowns[2]] = roots[r];
        const double res = newton(f, e, unknowns, tol_alg, 20);
        if (res < tol_alg) add_solution(report, e, unknowns, res, static_cast<int>(r));
    }
    report.eliminant_degree = roots.size();

    if (report.solutions.empty()) {
        // degenerate eliminant: fall back to a fixed grid of Newton starts
        static constexpr std::array<double, 3> kMagnitude{0.1, 1.0, 10.0};
        static constexpr std::array<double, 3> kPhase{0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
        for (int seed = 0; seed < 27; ++seed) {
            const std::array<int, 3> digit{seed % 3, (seed / 3) % 3, seed / 9};
            std::vector<Complex> e = base;
            for (int c = 0; c < 3; ++c)
                e[unknowns[c]] = std::polar(kMagnitude[digit[c]], kPhase[digit[(c + 1) % 3]]);
            const double res = newton(f, e, unknowns, tol_alg, 200);
            report.seed_residuals.push_back(res);
            if (res < tol_alg) add_solution(report, e, unknowns, res, kSeedStart + seed);
        }
    }

    if (report.solutions.empty()) {
        std::ostringstream os;
        os << "no solution found (eliminant degree " << report.eliminant_degree << "); best Newton residual ";
        double best = std::numeric_limits<double>::infinity();
        for (double r : report.seed_residuals) best = std::min(best, r);
        os << best;
        throw NoConvergence(os.str());
    }
    return report;
}

} // namespace flexbelt
