#pragma once

// Full per-vertex parameter set of a type-(1) belt around a rigid polygon.
// Shared by the n = 4 V-hedra constructor and the n = 3 pipeline.

#include "flexbelt/closure.hpp"
#include "flexbelt/isogram.hpp"
#include "flexbelt/sphkin.hpp"

#include <span>
#include <vector>

namespace flexbelt {

struct BlockParameters {
    std::vector<Vec3> polygon;     // V_i
    std::vector<Vec3> directions;  // C_i
    std::vector<double> lambda;    // arc C_i C_{i+1}
    std::vector<double> tau;       // tau[k] at junction C_k
    std::vector<double> delta;     // arc C_{i+1} B_i
    std::vector<double> gamma;     // arc C_i A_i (= delta)
    std::vector<double> mu;        // arc A_i B_i (= lambda)
    std::vector<Branch> branch;
    std::vector<double> f;
    std::vector<double> e;         // e[k] at junction C_k
    std::vector<double> epsilon;
    std::vector<double> zeta;      // wrap(epsilon + tau)
    FlexibilityReport flexibility;

    std::size_t size() const noexcept { return polygon.size(); }
    BeltSpec<double> belt() const { return {f, e}; }
};

// Derives lambda and tau from the polygon, f from (delta, branch), and
// epsilon, zeta from the offsets. Flexibility is evaluated, not required.
BlockParameters assemble_block(const SpatialPolygon& polygon, std::span<const double> delta,
                               std::span<const Branch> branch, std::span<const double> e,
                               const Tolerances& tol = {});

} // namespace flexbelt
