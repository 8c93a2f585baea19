#pragma once

// Vector and spherical-geometry primitives for the belt pipeline: edge
// directions of the rigid polygon, spherical bar lengths, torsion angles and
// the projective half-tangent parameterization of angles.

#include "flexbelt/errors.hpp"
#include "flexbelt/tolerances.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace flexbelt {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

// Maps an angle to (-pi, pi].
double wrap_angle(double a);

// Closed polygon V_0..V_{n-1}. Only the vertex count is validated here;
// degeneracies are reported by the operations that depend on them.
class SpatialPolygon {
public:
    explicit SpatialPolygon(std::vector<Vec3> vertices);

    std::size_t size() const noexcept { return vertices_.size(); }
    const Vec3& operator[](std::size_t i) const { return vertices_[i % vertices_.size()]; }
    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }

    // Largest pairwise vertex distance.
    double diameter() const;

    // c_i = V_i - V_{i-1}, indices mod n.
    Vec3 edge_vector(std::size_t i) const;

private:
    std::vector<Vec3> vertices_;
};

// Homogeneous pair (p, q) representing tan(theta/2) = p/q. q = 0 is the pole
// theta = pi. Works over double and std::complex<double>.
template <typename T>
struct HalfTangent {
    T p{0};
    T q{1};

    static HalfTangent affine(T value) { return {value, T(1)}; }

    bool is_pole(double tol) const { return std::abs(q) <= tol * std::abs(p); }

    // Affine value p/q; callers must exclude the pole.
    T value() const { return p / q; }

    double norm() const { return std::sqrt(std::norm(std::complex<double>(p)) +
                                           std::norm(std::complex<double>(q))); }
};

// |p1 q2 - p2 q1| normalized by the norms of both pairs.
template <typename T>
double projective_distance(const HalfTangent<T>& a, const HalfTangent<T>& b) {
    const double na = a.norm();
    const double nb = b.norm();
    return std::abs(a.p * b.q - b.p * a.q) / (na * nb);
}

template <typename T>
bool projectively_equal(const HalfTangent<T>& a, const HalfTangent<T>& b, double tol) {
    return projective_distance(a, b) <= tol;
}

HalfTangent<double> angle_to_halftangent(double theta);
double halftangent_to_angle(const HalfTangent<double>& h);

// cos/sin of the angle encoded by h, without passing through atan.
double halftangent_cos(const HalfTangent<double>& h);
double halftangent_sin(const HalfTangent<double>& h);

// Unit directions C_i of V_{i-1} -> V_i.
std::vector<Vec3> edge_directions(const SpatialPolygon& polygon, double tol_geom = Tolerances{}.geom);

// lambda_i = arccos(C_i . C_{i+1}), the spherical bar length at V_i.
std::vector<double> bar_lengths(const SpatialPolygon& polygon, double tol_geom = Tolerances{}.geom);

// Interior planar angles lambda_i^* = pi - lambda_i.
std::vector<double> interior_angles(const SpatialPolygon& polygon, double tol_geom = Tolerances{}.geom);

// Torsion angles indexed by vertex: result[k] = tau_k is the signed rotation
// about C_k taking the plane of (c_{k-1}, c_k) to the plane of (c_k, c_{k+1}).
std::vector<double> torsion_angles(const SpatialPolygon& polygon, double tol_geom = Tolerances{}.geom);

// Rebuilds C_2..C_{n-1} from C_0, C_1 and the (lambda, tau) sequence. Used to
// check that bar lengths and torsion angles carry the full direction data.
std::vector<Vec3> reconstruct_directions(const Vec3& c0, const Vec3& c1,
                                         std::span<const double> lambda,
                                         std::span<const double> tau);

// --- spherical helpers -----------------------------------------------------

// Great-circle distance between unit vectors.
double arc_length(const Vec3& a, const Vec3& b);

// Unit tangent at `from` pointing along the great circle toward `to`.
Vec3 tangent_toward(const Vec3& from, const Vec3& to);

// Point at arc distance `dist` from `base` along the unit tangent `dir`.
Vec3 arc_point(const Vec3& base, const Vec3& dir, double dist);

// Right-handed rotation of v about the unit axis.
Vec3 rotate_about(const Vec3& axis, double angle, const Vec3& v);

// Signed angle from u to v measured right-handed about axis, after
// projecting both onto the plane orthogonal to axis.
double signed_angle_about(const Vec3& u, const Vec3& v, const Vec3& axis);

} // namespace flexbelt
