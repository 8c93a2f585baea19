#include "flexbelt/sphkin.hpp"

#include <algorithm>
#include <string>

namespace flexbelt {

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

SpatialPolygon::SpatialPolygon(std::vector<Vec3> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3)
        throw InvalidInput("polygon needs at least 3 vertices, got " + std::to_string(vertices_.size()));
    for (const auto& v : vertices_)
        if (!v.allFinite()) throw InvalidInput("polygon vertex is not finite");
}

double SpatialPolygon::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
            d = std::max(d, (vertices_[i] - vertices_[j]).norm());
    return d;
}

Vec3 SpatialPolygon::edge_vector(std::size_t i) const {
    const std::size_t n = vertices_.size();
    return vertices_[i % n] - vertices_[(i + n - 1) % n];
}

HalfTangent<double> angle_to_halftangent(double theta) {
    const double w = wrap_angle(theta);
    if (std::abs(w - kPi) <= 1e-15 * kPi) return {1.0, 0.0};
    return {std::tan(0.5 * w), 1.0};
}

double halftangent_to_angle(const HalfTangent<double>& h) {
    double p = h.p, q = h.q;
    if (q < 0.0 || (q == 0.0 && p < 0.0)) {
        p = -p;
        q = -q;
    }
    return wrap_angle(2.0 * std::atan2(p, q));
}

double halftangent_cos(const HalfTangent<double>& h) {
    const double s = h.p * h.p + h.q * h.q;
    return (h.q * h.q - h.p * h.p) / s;
}

double halftangent_sin(const HalfTangent<double>& h) {
    const double s = h.p * h.p + h.q * h.q;
    return 2.0 * h.p * h.q / s;
}

std::vector<Vec3> edge_directions(const SpatialPolygon& polygon, double tol_geom) {
    const std::size_t n = polygon.size();
    const double scale = std::max(polygon.diameter(), 1e-300);
    std::vector<Vec3> dirs;
    dirs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 c = polygon.edge_vector(i);
        if (c.norm() <= tol_geom * scale)
            throw DegenerateEdge("edge V" + std::to_string((i + n - 1) % n) + "V" + std::to_string(i) +
                                 " has zero length");
        dirs.push_back(c.normalized());
    }
    return dirs;
}

namespace {

void require_nonparallel(const std::vector<Vec3>& dirs, double tol_geom) {
    const std::size_t n = dirs.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (dirs[i].cross(dirs[(i + 1) % n]).norm() <= tol_geom)
            throw DegenerateVertex("edges at vertex V" + std::to_string(i) + " are parallel");
    }
}

} // namespace

std::vector<double> bar_lengths(const SpatialPolygon& polygon, double tol_geom) {
    const auto dirs = edge_directions(polygon, tol_geom);
    require_nonparallel(dirs, tol_geom);
    const std::size_t n = dirs.size();
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = arc_length(dirs[i], dirs[(i + 1) % n]);
    return lambda;
}

std::vector<double> interior_angles(const SpatialPolygon& polygon, double tol_geom) {
    auto lambda = bar_lengths(polygon, tol_geom);
    for (auto& l : lambda) l = kPi - l;
    return lambda;
}

std::vector<double> torsion_angles(const SpatialPolygon& polygon, double tol_geom) {
    const auto dirs = edge_directions(polygon, tol_geom);
    require_nonparallel(dirs, tol_geom);
    const std::size_t n = dirs.size();
    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& c0 = dirs[i];
        const Vec3& c1 = dirs[(i + 1) % n];
        const Vec3& c2 = dirs[(i + 2) % n];
        const Vec3 n0 = c0.cross(c1);
        const Vec3 n1 = c1.cross(c2);
        const double cosine = std::clamp(n0.dot(n1) / (n0.norm() * n1.norm()), -1.0, 1.0);
        const double o = n0.dot(c2);
        double t;
        if (std::abs(o) <= tol_geom * n0.norm()) {
            // planar triple: exactly 0 or pi
            t = cosine >= 0.0 ? 0.0 : kPi;
        } else {
            t = (o > 0.0 ? 1.0 : -1.0) * std::acos(cosine);
        }
        tau[(i + 1) % n] = t;
    }
    return tau;
}

std::vector<Vec3> reconstruct_directions(const Vec3& c0, const Vec3& c1,
                                         std::span<const double> lambda,
                                         std::span<const double> tau) {
    const std::size_t n = lambda.size();
    std::vector<Vec3> dirs(n);
    dirs[0] = c0.normalized();
    dirs[1] = c1.normalized();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const Vec3& prev = dirs[k - 1];
        const Vec3& cur = dirs[k];
        // the extension of arc prev->cur, turned by tau_k
        const Vec3 ahead = -tangent_toward(cur, prev);
        const Vec3 dir = rotate_about(cur, tau[k], ahead);
        dirs[k + 1] = arc_point(cur, dir, lambda[k]);
    }
    return dirs;
}

double arc_length(const Vec3& a, const Vec3& b) {
    // atan2 form stays accurate near 0 and pi
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

Vec3 tangent_toward(const Vec3& from, const Vec3& to) {
    return (to - from.dot(to) * from).normalized();
}

Vec3 arc_point(const Vec3& base, const Vec3& dir, double dist) {
    return std::cos(dist) * base + std::sin(dist) * dir;
}

Vec3 rotate_about(const Vec3& axis, double angle, const Vec3& v) {
    const Vec3 k = axis.normalized();
    const double c = std::cos(angle), s = std::sin(angle);
    return v * c + k.cross(v) * s + k * k.dot(v) * (1.0 - c);
}

double signed_angle_about(const Vec3& u, const Vec3& v, const Vec3& axis) {
    const Vec3 k = axis.normalized();
    const Vec3 up = u - u.dot(k) * k;
    const Vec3 vp = v - v.dot(k) * k;
    return std::atan2(up.cross(vp).dot(k), up.dot(vp));
}

} // namespace flexbelt
