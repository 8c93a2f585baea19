#pragma once

// n = 4 specialization: the closed-form closure polynomials, the explicit
// offset solutions e1, e2, e3 and ratio solutions f1, f2, f3, and the
// constructor of a (3x3) V-hedra block with a skew central quad.

#include "flexbelt/block.hpp"
#include "flexbelt/closure.hpp"

#include <array>
#include <optional>

namespace flexbelt {

enum class SolutionSign { Upper, Lower };

std::string to_string(SolutionSign s);
SolutionSign solution_sign_from_string(const std::string& s);

// Closed-form q2, q1, q0 for n = 4, transcribed term by term.
template <typename T>
ClosureQuadratic<T> closure_coeffs_n4(const std::array<T, 4>& f, const std::array<T, 4>& e) {
    const T &f0 = f[0], &f1 = f[1], &f2 = f[2], &f3 = f[3];
    const T &e0 = e[0], &e1 = e[1], &e2 = e[2], &e3 = e[3];
    const T one(1);
    ClosureQuadratic<T> q;
    q.q2 = f0 * (e0 * f3 * (e1 * e2 * f2 + e2 * e3 * f1 + e1 * e3 - f1 * f2) + e1 * e2 * e3 * f2 -
                 e3 * f1 * f2 - e2 * f1 - e1);
    q.q1 = e1 * e2 * f0 * f2 * f3 + e2 * e3 * f0 * f1 * f3 + e1 * e3 * f0 * f3 - e1 * e3 * f1 * f2 -
           f0 * f1 * f2 * f3 - e1 * e2 * f1 - e2 * e3 * f2 + one +
           e0 * (e1 * e2 * e3 * f1 * f3 - e1 * e2 * e3 * f0 * f2 - e1 * f1 * f2 * f3 + e3 * f0 * f1 * f2 +
                 e2 * f0 * f1 - e2 * f2 * f3 + e1 * f0 - e3 * f3);
    q.q0 = e0 * (e1 * e3 * f1 * f2 + e1 * e2 * f1 + e2 * e3 * f2 - one) +
           f3 * (e1 * e2 * e3 * f1 - e1 * f1 * f2 - e2 * f2 - e3);
    return q;
}

struct OffsetsN4 {
    std::array<Complex, 3> e{};  // e1, e2, e3
    Complex r1_squared{};
    Complex r2_squared{};
    bool real = false;
    double residual = 0.0;  // scaled closure residual of (f, e0, e1, e2, e3)
};

// e1, e2, e3 from (f0..f3, e0). Upper takes +R1R2 in e1, e3 and -R1R2 in e2.
OffsetsN4 solve_e(const std::array<Complex, 4>& f, Complex e0, SolutionSign sign);

struct RatiosN4 {
    std::array<Complex, 3> f{};  // f1, f2, f3
    Complex r3_squared{};
    Complex r4_squared{};
    bool real = false;
    double residual = 0.0;
};

// f1, f2, f3 from (f0, e0..e3). Upper takes +R3R4 in f1, f3 and -R3R4 in f2.
RatiosN4 solve_f(Complex f0, const std::array<Complex, 4>& e, SolutionSign sign);

struct VHedraInput {
    std::vector<Vec3> polygon;  // skew central quad, n = 4
    HalfTangent<double> e0{0.0, 1.0};
    std::optional<std::array<double, 4>> d;  // tan(delta_i / 2)
    std::optional<std::array<double, 4>> f;
    std::array<Branch, 4> branch{Branch::Minus, Branch::Minus, Branch::Minus, Branch::Minus};
    SolutionSign sign = SolutionSign::Upper;
};

struct VHedraSolution {
    std::array<double, 4> lambda{};
    std::array<double, 4> tau{};
    std::array<double, 4> delta{};
    std::array<double, 4> d{};
    std::array<double, 4> f{};
    OffsetsN4 offsets;
    std::optional<BlockParameters> block;  // present iff the offsets are real
};

// Runs the whole pipeline and keeps non-real offsets for reporting.
VHedraSolution solve_vhedra(const VHedraInput& input, const Tolerances& tol = {});

// As solve_vhedra, but requires a real flexible block.
BlockParameters build_block(const VHedraInput& input, const Tolerances& tol = {});

} // namespace flexbelt
