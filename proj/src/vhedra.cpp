#include "flexbelt/vhedra.hpp"

#include <sstream>

namespace flexbelt {

std::string to_string(SolutionSign s) { return s == SolutionSign::Upper ? "upper" : "lower"; }

SolutionSign solution_sign_from_string(const std::string& s) {
    if (s == "upper" || s == "+") return SolutionSign::Upper;
    if (s == "lower" || s == "-") return SolutionSign::Lower;
    throw InvalidInput("unknown solution sign '" + s + "' (expected upper|lower)");
}

namespace {

// A sum of terms counts as zero when it cancels to rounding level.
void require_nonzero(Complex value, double magnitude, const std::string& which) {
    if (std::abs(value) <= 1e-13 * std::max(magnitude, 1e-300) || !std::isfinite(std::abs(value)))
        throw DegenerateDenominator(which + " vanishes");
}

void require_nonzero(Complex value, const std::string& which) { require_nonzero(value, 1.0, which); }

double residual_of(const std::array<Complex, 4>& f, const std::array<Complex, 4>& e) {
    return is_flexible(BeltSpec<Complex>{{f.begin(), f.end()}, {e.begin(), e.end()}}).residual;
}

} // namespace

OffsetsN4 solve_e(const std::array<Complex, 4>& f, Complex e0, SolutionSign sign) {
    const Complex &f0 = f[0], &f1 = f[1], &f2 = f[2], &f3 = f[3];
    for (std::size_t i = 0; i < 4; ++i)
        if (f[i] == Complex(0)) throw InvalidInput("transmission ratios must be nonzero");
    const Complex e0s = e0 * e0;

    OffsetsN4 out;
    out.r1_squared = e0s * (f0 * f1 - f2 * f3) * (f0 * f2 - f1 * f3) + (f0 * f1 * f3 - f2) * (f0 * f2 * f3 - f1);
    out.r2_squared = e0s * (f0 * f1 * f2 - f3) * (f1 * f2 * f3 - f0) + (f0 * f1 * f2 * f3 - 1.0) * (f1 * f2 - f0 * f3);
    const Complex rr = std::sqrt(out.r1_squared) * std::sqrt(out.r2_squared);
    const double s = sign == SolutionSign::Upper ? 1.0 : -1.0;

    const Complex a1 = e0s * (f0 * f2 - f1 * f3) * (f0 - f1 * f2 * f3);
    const Complex b1 = (f0 * f3 - f1 * f2) * (f0 * f2 * f3 - f1);
    const Complex a2 = e0s * (f0 * f1 - f2 * f3) * (f0 * f2 - f1 * f3);
    const Complex b2 = (f0 * f1 * f3 - f2) * (f0 * f2 * f3 - f1);
    const Complex a3 = e0s * (f0 * f2 - f1 * f3) * (f0 * f1 * f2 - f3);
    const Complex b3 = (f0 * f3 - f1 * f2) * (f0 * f1 * f3 - f2);
    require_nonzero(a1 + b1, std::abs(a1) + std::abs(b1), "denominator of e1");
    require_nonzero(a2 + b2, std::abs(a2) + std::abs(b2), "denominator of e2");
    require_nonzero(a3 + b3, std::abs(a3) + std::abs(b3), "denominator of e3");

    out.e[0] = (e0 * f0 * f2 * (f1 * f1 - 1.0) * (f3 * f3 - 1.0) + s * rr) / (a1 + b1);
    out.e[1] = (-s * rr) / (a2 + b2);
    out.e[2] = (e0 * f1 * f3 * (f0 * f0 - 1.0) * (f2 * f2 - 1.0) + s * rr) / (a3 + b3);

    out.real = is_real({out.e.begin(), out.e.end()}) && std::abs(e0.imag()) < 1e-9 * (1.0 + std::abs(e0.real()));
    out.residual = residual_of(f, {e0, out.e[0], out.e[1], out.e[2]});
    return out;
}

RatiosN4 solve_f(Complex f0, const std::array<Complex, 4>& e, SolutionSign sign) {
    const Complex &e0 = e[0], &e1 = e[1], &e2 = e[2], &e3 = e[3];
    const Complex e0s = e0 * e0, e1s = e1 * e1, e2s = e2 * e2, e3s = e3 * e3;
    const Complex g = f0 * f0 + 1.0;

    require_nonzero(f0, "f0");
    require_nonzero(e2, "e2");
    require_nonzero(e3, "e3");
    require_nonzero(e0 * f0 + e1, std::abs(e0 * f0) + std::abs(e1), "factor e0 f0 + e1");
    require_nonzero(e0 * e1 - f0, std::abs(e0 * e1) + std::abs(f0), "factor e0 e1 - f0");
    require_nonzero(e1 * f0 + e0, std::abs(e1 * f0) + std::abs(e0), "factor e1 f0 + e0");
    require_nonzero(e0s + 1.0, std::abs(e0s) + 1.0, "factor e0^2 + 1");
    require_nonzero(e1s + 1.0, std::abs(e1s) + 1.0, "factor e1^2 + 1");
    require_nonzero(e2s + 1.0, std::abs(e2s) + 1.0, "factor e2^2 + 1");
    require_nonzero(e3s + 1.0, std::abs(e3s) + 1.0, "factor e3^2 + 1");

    const Complex base = f0 * (e0s * e1s * e2s + e0s * e1s * e3s - e0s * e2s * e3s - e1s * e2s * e3s - e0s - e1s +
                               e2s + e3s) -
                         g * e0 * e1 * (e3s + 1.0) * (e2s + 1.0);
    const Complex cross = 2.0 * f0 * e2 * e3 * (e1s + 1.0) * (e0s + 1.0);

    RatiosN4 out;
    out.r3_squared = base + cross;
    out.r4_squared = base - cross;
    const Complex rr = std::sqrt(out.r3_squared) * std::sqrt(out.r4_squared);
    const double s = sign == SolutionSign::Upper ? 1.0 : -1.0;

    out.f[0] = (-g * e0 * e1 * (e3s + 1.0) * (e2s - 1.0) +
                f0 * (e0s * e1s * e2s - e0s * e1s * e3s - e0s * e2s * e3s - e1s * e2s * e3s + e0s + e1s + e2s - e3s) +
                s * rr) /
               (2.0 * e2 * (e3s + 1.0) * (e0 * f0 + e1) * (e0 * e1 - f0));
    out.f[1] = (g * e0 * e1 * (e3s + 1.0) * (e2s + 1.0) -
                f0 * (e0s * e1s * e2s + e0s * e1s * e3s - e0s * e2s * e3s - e1s * e2s * e3s - e0s - e1s + e2s + e3s) -
                s * rr) /
               (2.0 * e2 * e3 * f0 * (e1s + 1.0) * (e0s + 1.0));
    // the e1^2 term of the second group enters with a minus sign
    out.f[2] = (-g * e0 * e1 * (e3s - 1.0) * (e2s + 1.0) -
                f0 * (e0s * e1s * e2s - e0s * e1s * e3s + e0s * e2s * e3s + e1s * e2s * e3s - e0s - e1s + e2s - e3s) +
                s * rr) /
               (2.0 * e3 * (e2s + 1.0) * (e1 * f0 + e0) * (e0 * e1 - f0));

    out.real = is_real({out.f.begin(), out.f.end()});
    std::array<Complex, 4> all{f0, out.f[0], out.f[1], out.f[2]};
    for (const auto& x : all)
        if (x == Complex(0)) throw DegenerateDenominator("solution has a vanishing ratio");
    out.residual = residual_of(all, e);
    return out;
}

VHedraSolution solve_vhedra(const VHedraInput& input, const Tolerances& tol) {
    if (input.polygon.size() != 4)
        throw InvalidInput("V-hedra blocks need a central quad (n = 4), got n = " +
                           std::to_string(input.polygon.size()));
    if (input.d.has_value() == input.f.has_value()) throw InvalidInput("provide exactly one of d and f");
    if (input.e0.is_pole(0.0) || !std::isfinite(input.e0.value()))
        throw PoleNotRepresentable("e0 encodes epsilon_0 = pi");

    const SpatialPolygon polygon(input.polygon);
    const auto lambda = bar_lengths(polygon, tol.geom);
    const auto tau = torsion_angles(polygon, tol.geom);

    VHedraSolution sol;
    for (std::size_t i = 0; i < 4; ++i) {
        sol.lambda[i] = lambda[i];
        sol.tau[i] = tau[i];
        if (input.d) {
            const double d = (*input.d)[i];
            if (!(d > 0.0) || !std::isfinite(d))
                throw InvalidInput("d" + std::to_string(i) + " must be positive and finite");
            sol.d[i] = d;
            sol.delta[i] = 2.0 * std::atan(d);
            sol.f[i] = transmission_ratio({sol.delta[i], lambda[i], input.branch[i]}, tol.geom);
        } else {
            sol.f[i] = (*input.f)[i];
            sol.delta[i] = recover_delta(sol.f[i], lambda[i], input.branch[i]);
            sol.d[i] = std::tan(0.5 * sol.delta[i]);
            transmission_ratio({sol.delta[i], lambda[i], input.branch[i]}, tol.geom);
        }
    }

    const double e0 = input.e0.value();
    sol.offsets = solve_e({sol.f[0], sol.f[1], sol.f[2], sol.f[3]}, e0, input.sign);
    if (!sol.offsets.real) return sol;

    const std::array<double, 4> e{e0, sol.offsets.e[0].real(), sol.offsets.e[1].real(),
                                  sol.offsets.e[2].real()};
    sol.block = assemble_block(polygon, sol.delta, input.branch, e, tol);
    return sol;
}

BlockParameters build_block(const VHedraInput& input, const Tolerances& tol) {
    auto sol = solve_vhedra(input, tol);
    if (!sol.block) {
        std::ostringstream os;
        os << "offsets are not real (R1^2 = " << sol.offsets.r1_squared << ", R2^2 = " << sol.offsets.r2_squared
           << ")";
        throw NonRealSolution(os.str());
    }
    if (!sol.block->flexibility.flexible) {
        std::ostringstream os;
        os << "closure residual " << sol.block->flexibility.residual << " exceeds tol_alg " << tol.alg;
        throw ClosureViolation(os.str());
    }
    return std::move(*sol.block);
}

} // namespace flexbelt
