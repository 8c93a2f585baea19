#pragma once

// Kinematics of a flexible belt: spherical configuration at a driving angle,
// the lift to a 3D block of rigid faces, sweeps with invariant checks, and
// the n = 3 (6R) pipeline.
//
// 3D conventions. With C, A, B from the spherical configuration:
//   outer point along A_i:  Pa_i = V_i + la_i A_i
//   outer point along B_i:  Pb_i = V_i - lb_i B_i   (B is the image of the
//                                                   edge oriented toward V_i)
//   side face i   (V_{i+1}, V_i, Pb_i, Pa_{i+1})
//   corner face i (V_i, Pa_i, X_i, Pb_i), X_i from the corner template.
// Hinges per vertex: c_i = V_i V_{i+1} (central | side i),
// a_i = V_i Pa_i (side i-1 | corner i), b_i = V_i Pb_i (side i | corner i).

#include "flexbelt/block.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flexbelt {

struct SphericalConfig {
    double alpha0 = 0.0;
    std::vector<Vec3> C, A, B;
    std::vector<HalfTangent<double>> a;  // n + 1 entries, a[n] after one loop
    std::vector<HalfTangent<double>> b;
    std::vector<double> alpha, beta;
    std::vector<double> arc_residual;    // worst of the four arc checks per vertex
    std::vector<double> zeta_residual;   // measured minus stored zeta per junction
    double closure_residual = 0.0;       // projective distance of a[n] and a[0]
};

// Places A_i, B_i for driving angle alpha0 (or half-tangent a0). Throws
// ClosureViolation when an arc or the loop closure is off; with
// require_closure = false only the per-vertex arcs are checked, which allows
// building single configurations of non-flexible belts.
SphericalConfig configure_spherical(const BlockParameters& block, const HalfTangent<double>& a0,
                                    const Tolerances& tol = {}, bool require_closure = true);
SphericalConfig configure_spherical(const BlockParameters& block, double alpha0,
                                    const Tolerances& tol = {}, bool require_closure = true);

struct OuterLengths {
    std::vector<double> a;  // along A_i
    std::vector<double> b;  // along B_i

    static OuterLengths uniform(std::size_t n, double length = 1.0) {
        return {std::vector<double>(n, length), std::vector<double>(n, length)};
    }
};

// Shape of corner face i in the frame of its two edges at V_i: x along the
// Pa edge, y toward the Pb edge, z = x cross y.
struct CornerTemplate {
    double length_a = 1.0;
    double length_b = 1.0;
    double angle = 0.0;  // planar angle at V_i between the two edges
    Vec3 local = Vec3::Zero();

    static CornerTemplate capture(const Vec3& v, const Vec3& pa, const Vec3& pb, const Vec3& x);
};

// Planar parallelogram completion X = Pa + Pb - V.
std::vector<CornerTemplate> parallelogram_templates(const BlockParameters& block, const OuterLengths& lengths);

struct Face {
    std::string name;
    std::vector<int> vertices;
};

struct Hinge {
    std::string name;
    int p = 0, q = 0;            // edge endpoints, oriented p -> q
    int face_f = 0, face_g = 0;  // dihedral measured from face_f to face_g
    int wing_f = 0, wing_g = 0;  // face vertices adjacent to p
};

struct Block3D {
    std::vector<Vec3> points;  // V_i, Pa_i, Pb_i, X_i, each block of n
    std::vector<Face> faces;   // central, side_0.., corner_0..
    std::vector<Hinge> hinges; // c_i, a_i, b_i per vertex
    std::vector<std::array<int, 2>> grid;  // (u, v) per point; n = 4 only

    double dihedral(const Hinge& h) const;
    double diameter() const;
};

Block3D lift_to_3d(const BlockParameters& block, const SphericalConfig& cfg, const OuterLengths& lengths,
                   const std::vector<CornerTemplate>& templates, const Tolerances& tol = {});

struct InvariantCheck {
    std::string name;
    bool pass = true;
    double worst = 0.0;
    double tolerance = 0.0;
    bool advisory = false;  // reported, but not part of all_pass()
};

struct FlexionSample {
    double alpha0 = 0.0;
    SphericalConfig spherical;
    Block3D block;
    std::vector<double> rotation;  // per hinge, unwrapped, relative to sample 0
};

struct FlexionTrace {
    std::vector<FlexionSample> samples;
    std::vector<InvariantCheck> checks;
    std::pair<double, double> interval{-kPi, kPi};

    bool all_pass() const;
    const InvariantCheck* check(const std::string& name) const;
};

struct SweepOptions {
    int samples = 20;
    std::optional<std::pair<double, double>> range;  // auto when empty
    std::optional<OuterLengths> lengths;             // uniform 1 when empty
    std::optional<std::vector<CornerTemplate>> templates;
};

// Driving angles used by flex_sweep. Auto: alpha_k = -pi + 2 pi (k + 1/2) / N
// over the admissible interval; an explicit range is sampled linearly and
// must lie inside the admissible interval.
std::vector<double> sweep_samples(const std::pair<double, double>& interval, int count, bool explicit_range);

// Admissible interval of the driving angle, by scanning and bisection on
// configure_spherical. A real flexible belt moves over the full circle.
std::pair<double, double> admissible_interval(const BlockParameters& block, const Tolerances& tol = {});

FlexionTrace flex_sweep(const BlockParameters& block, const SweepOptions& options, const Tolerances& tol = {});

// --- n = 3 -----------------------------------------------------------------

struct SixRInput {
    std::array<double, 3> gamma{};  // bar lengths of the central triangle, sum 2 pi
    std::array<double, 3> delta{};
    std::array<Branch, 3> branch{Branch::Minus, Branch::Minus, Branch::Minus};
    std::optional<std::array<double, 3>> e;  // solved over C when empty
};

struct SixRReport {
    std::vector<Vec3> triangle;
    std::vector<double> f;
    std::vector<OffsetSolution> solutions;  // all solutions (given e counts as one)
    double residual = 0.0;                  // best scaled residual over C
    bool flexible = false;
    std::optional<BlockParameters> block;   // first real solution, if any
};

// Planar triangle with interior angles pi - gamma_i at V_i.
std::vector<Vec3> triangle_from_bar_lengths(const std::array<double, 3>& gamma, double tol_geom = Tolerances{}.geom);

SixRReport sixR_from_n3(const SixRInput& input, const Tolerances& tol = {});

} // namespace flexbelt
