#pragma once

// Belt-level closure algebra. One step around the belt is the Moebius map
//
//     a_i = (a_{i-1} f_{i-1} + e_i) / (1 - a_{i-1} f_{i-1} e_i),
//
// applied for i = 1..n with e_n = e_0, i.e. the loop closes through the
// offset stored at index 0. The belt is continuously flexible iff the
// composed map is a multiple of the identity.

#include "flexbelt/isogram.hpp"
#include "flexbelt/sphkin.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace flexbelt {

using Complex = std::complex<double>;

template <typename T>
struct BeltSpec {
    std::vector<T> f;  // transmission ratios, f_i != 0
    std::vector<T> e;  // offset half-tangents e_i = tan(eps_i / 2)

    std::size_t size() const noexcept { return f.size(); }

    void validate() const {
        if (f.size() < 3) throw InvalidInput("belt needs n >= 3 vertices");
        if (e.size() != f.size()) throw InvalidInput("belt has mismatched f/e counts");
        for (const auto& x : f)
            if (x == T(0)) throw InvalidInput("transmission ratios must be nonzero");
    }
};

template <typename T>
struct ClosureQuadratic {
    T q2{0};
    T q1{0};
    T q0{0};
};

template <typename T>
struct MobiusMap {
    T m11{1}, m12{0}, m21{0}, m22{1};

    MobiusMap operator*(const MobiusMap& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }

    HalfTangent<T> apply(const HalfTangent<T>& a) const {
        return {m11 * a.p + m12 * a.q, m21 * a.p + m22 * a.q};
    }

    T det() const { return m11 * m22 - m12 * m21; }

    double max_abs() const {
        return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
    }
};

// [[f_prev, e_cur], [-f_prev e_cur, 1]]
template <typename T>
MobiusMap<T> step_map(T f_prev, T e_cur) {
    return {f_prev, e_cur, -f_prev * e_cur, T(1)};
}

// M = step(f_{n-1}, e_0) * ... * step(f_1, e_2) * step(f_0, e_1).
template <typename T>
MobiusMap<T> loop_map(const BeltSpec<T>& belt) {
    belt.validate();
    const std::size_t n = belt.size();
    MobiusMap<T> m;
    for (std::size_t i = 1; i <= n; ++i) m = step_map(belt.f[i - 1], belt.e[i % n]) * m;
    return m;
}

// a_0 - a_n = 0  <=>  q2 a_0^2 + q1 a_0 + q0 = 0.
template <typename T>
ClosureQuadratic<T> closure_polynomial(const BeltSpec<T>& belt) {
    const auto m = loop_map(belt);
    return {m.m21, m.m22 - m.m11, -m.m12};
}

struct FlexibilityReport {
    bool flexible = false;
    double residual = 0.0;               // max of the scaled residuals
    std::array<double, 3> scaled{};      // |q2|, |q1|, |q0| over scale
    double scale = 0.0;                  // max |m_ij| of the loop map
};

template <typename T>
FlexibilityReport is_flexible(const BeltSpec<T>& belt, double tol_alg = Tolerances{}.alg) {
    const auto m = loop_map(belt);
    const ClosureQuadratic<T> q{m.m21, m.m22 - m.m11, -m.m12};
    FlexibilityReport r;
    r.scale = m.max_abs();
    r.scaled = {std::abs(q.q2) / r.scale, std::abs(q.q1) / r.scale, std::abs(q.q0) / r.scale};
    r.residual = std::max({r.scaled[0], r.scaled[1], r.scaled[2]});
    r.flexible = r.residual < tol_alg;
    return r;
}

// a_i and b_i = f_i a_i around the loop; a has n + 1 entries (a_n last).
template <typename T>
struct ChainValues {
    std::vector<HalfTangent<T>> a;
    std::vector<HalfTangent<T>> b;
};

template <typename T>
ChainValues<T> propagate(const BeltSpec<T>& belt, const HalfTangent<T>& a0) {
    belt.validate();
    const std::size_t n = belt.size();
    ChainValues<T> c;
    c.a.reserve(n + 1);
    c.b.reserve(n);
    c.a.push_back(a0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = transmit(belt.f[i], c.a.back());
        c.b.push_back(b);
        auto next = step_map(T(1), belt.e[(i + 1) % n]).apply(b);
        // keep the pair at unit scale so long chains do not overflow
        const double s = next.norm();
        next.p /= s;
        next.q /= s;
        c.a.push_back(next);
    }
    return c;
}

// e = tan((zeta - tau) / 2); rejects the pole zeta - tau = pi.
double offset_from_zeta(double zeta, double tau, double tol_geom = Tolerances{}.geom);

// --- normalization to type (1) --------------------------------------------

enum class IsogramType { One, Two };

// Spherical data at one polygon vertex. For type (1): gamma = delta and
// mu = lambda; for type (2): gamma + delta = pi and mu + lambda = pi. The
// branch of a type-(2) vertex refers to the type-(1) isogram obtained by
// replacing B_i with its antipode.
struct VertexGeometry {
    double lambda = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double mu = 0.0;
    IsogramType type = IsogramType::One;
    Branch branch = Branch::Minus;
};

// Vertex data plus the junction twists. zeta[k] and tau[k] belong to the
// junction at C_k between B_{k-1} and A_k (zeta[0] closes the loop).
struct SphericalBeltData {
    std::vector<VertexGeometry> vertices;
    std::vector<double> zeta;
    std::vector<double> tau;
};

struct NormalizedBelt {
    BeltSpec<double> belt;
    std::vector<VertexGeometry> vertices;  // all type (1) after the flips
    std::vector<double> epsilon;           // offset angles, epsilon[k] at junction k
    std::vector<bool> flip_a;              // A_i replaced by its antipode
    std::vector<bool> flip_b;              // B_i replaced by its antipode
    std::vector<bool> forced;              // junction k+1 choice forced by eps in {0, pi}
    std::optional<std::size_t> reflip_index;  // j of the re-flip step, if it ran
};

NormalizedBelt normalize_to_type1(const SphericalBeltData& data, double tol_geom = Tolerances{}.geom);

// --- numerical offset solver ----------------------------------------------

struct OffsetSolution {
    std::vector<Complex> e;  // full offset vector, known entries included
    double residual = 0.0;   // scaled closure residual
    bool real = false;
    int start = 0;           // eliminant root index, or kSeedStart + seed
};

inline constexpr int kSeedStart = 100;

struct OffsetSolveReport {
    std::vector<OffsetSolution> solutions;
    std::size_t eliminant_degree = 0;
    std::vector<double> seed_residuals;  // only filled when the fallback grid ran
};

// Solves q2 = q1 = q0 = 0 for exactly three unknown offsets. Eliminates two
// unknowns to a polynomial of degree <= 6 in the third, polishes each root by
// Newton and keeps those under tol_alg. If that yields nothing, damped Newton
// runs from a fixed grid of 27 starts. Throws NoConvergence if both fail.
OffsetSolveReport solve_offsets(const std::vector<Complex>& f,
                                const std::vector<std::optional<Complex>>& known_e,
                                double tol_alg = Tolerances{}.alg);

// |Im| < 1e-9 (1 + |Re|) for every entry.
bool is_real(const std::vector<Complex>& values);

} // namespace flexbelt
