#include "flexbelt/block.hpp"

namespace flexbelt {

BlockParameters assemble_block(const SpatialPolygon& polygon, std::span<const double> delta,
                               std::span<const Branch> branch, std::span<const double> e,
                               const Tolerances& tol) {
    const std::size_t n = polygon.size();
    if (delta.size() != n || branch.size() != n || e.size() != n)
        throw InvalidInput("per-vertex data must have " + std::to_string(n) + " entries");

    BlockParameters b;
    b.polygon = polygon.vertices();
    b.directions = edge_directions(polygon, tol.geom);
    b.lambda = bar_lengths(polygon, tol.geom);
    b.tau = torsion_angles(polygon, tol.geom);
    b.delta.assign(delta.begin(), delta.end());
    b.gamma = b.delta;
    b.mu = b.lambda;
    b.branch.assign(branch.begin(), branch.end());
    b.e.assign(e.begin(), e.end());
    b.f.resize(n);
    b.epsilon.resize(n);
    b.zeta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(b.e[i])) throw InvalidInput("offset e" + std::to_string(i) + " is not finite");
        b.f[i] = transmission_ratio({b.delta[i], b.lambda[i], b.branch[i]}, tol.geom);
        b.epsilon[i] = 2.0 * std::atan(b.e[i]);
        b.zeta[i] = wrap_angle(b.epsilon[i] + b.tau[i]);
    }
    b.flexibility = is_flexible(b.belt(), tol.alg);
    return b;
}

} // namespace flexbelt
