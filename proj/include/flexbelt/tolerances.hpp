#pragma once

namespace flexbelt {

struct Tolerances {
    double geom = 1e-10;  // geometric predicates on unit-scale data
    double alg = 1e-9;    // scale-invariant closure residuals
    double rigid = 1e-8;  // face congruence, relative to block diameter
};

} // namespace flexbelt
