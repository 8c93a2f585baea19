#pragma once

// Fixtures and independent oracles shared by the unit tests and the
// acceptance runner. Nothing here calls into the library code under test
// except to build inputs.

#include "flexbelt/flexion.hpp"
#include "flexbelt/vhedra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace testsupport {

using flexbelt::Branch;
using flexbelt::Complex;
using flexbelt::Vec3;

inline std::vector<Vec3> example2_polygon() {
    return {Vec3(5, 0, 0), Vec3(4, 3, 0), Vec3(1, 2, 2), Vec3(0, 0, 0)};
}

inline constexpr std::array<double, 4> kExample2D{0.3, 0.15, 0.2, 0.25};
inline constexpr std::array<double, 3> kExample2E{-0.86081001, -5.06077939, 0.57043281};

inline flexbelt::VHedraInput example2_input() {
    flexbelt::VHedraInput in;
    in.polygon = example2_polygon();
    in.e0 = flexbelt::HalfTangent<double>::affine(100.0);
    in.d = kExample2D;
    return in;
}

inline std::vector<Vec3> planar_polygon() {
    return {Vec3(0, 0, 0), Vec3(4, 0, 0), Vec3(5, 3, 0), Vec3(-1, 2.5, 0)};
}

// Planar quad with no offsets and f0 f1 f2 f3 = 1.
inline flexbelt::VHedraInput planar_input() {
    flexbelt::VHedraInput in;
    in.polygon = planar_polygon();
    in.e0 = flexbelt::HalfTangent<double>::affine(0.0);
    in.f = std::array<double, 4>{0.5, 0.5, 0.5, 8.0};
    in.branch = {Branch::Minus, Branch::Minus, Branch::Minus, Branch::Plus};
    return in;
}

// --- spherical geometry, written from scratch ---------------------------

// Dihedral angle of the polyline c0, c1, c2 about c1 via atan2.
inline double torsion_oracle(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    const Vec3 n0 = c0.cross(c1);
    const Vec3 n1 = c1.cross(c2);
    const double y = c1.normalized().dot(n0.cross(n1));
    const double x = n0.dot(n1);
    return std::atan2(y, x);
}

inline Vec3 rodrigues(const Vec3& axis, double angle, const Vec3& v) {
    const Vec3 k = axis.normalized();
    return v * std::cos(angle) + k.cross(v) * std::sin(angle) + k * k.dot(v) * (1 - std::cos(angle));
}

inline double great_arc(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Input/output points of an isogram on the frame bar ci -> cj, built with
// rotations instead of tangent vectors.
inline Vec3 oracle_input_point(const Vec3& ci, const Vec3& cj, double dist, double alpha) {
    const Vec3 axis = ci.cross(cj).normalized();
    const Vec3 toward = rodrigues(axis, dist, ci);  // on the arc ci -> cj
    return rodrigues(ci, alpha, toward);
}

inline Vec3 oracle_output_point(const Vec3& ci, const Vec3& cj, double dist, double beta) {
    const Vec3 axis = ci.cross(cj).normalized();
    const Vec3 beyond = rodrigues(axis, dist, cj);  // continues past cj
    return rodrigues(cj, beta, beyond);
}

// All beta in (-pi, pi] with arc(A(alpha), B(beta)) = coupler, found by a
// dense scan with bisection refinement.
inline std::vector<double> fourbar_roots(const Vec3& ci, const Vec3& cj, double crank_a, double crank_b,
                                         double coupler, double alpha) {
    const Vec3 a = oracle_input_point(ci, cj, crank_a, alpha);
    auto g = [&](double beta) { return great_arc(a, oracle_output_point(ci, cj, crank_b, beta)) - coupler; };
    const double pi = std::numbers::pi;
    auto scan = [&](int m) {
        std::vector<double> roots;
        double x0 = -pi, g0 = g(x0);
        for (int k = 1; k <= m; ++k) {
            const double x1 = -pi + 2 * pi * k / m;
            const double g1 = g(x1);
            if (g0 == 0.0) {
                roots.push_back(x0);
            } else if (g0 * g1 < 0.0) {
                double lo = x0, hi = x1, glo = g0;
                for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if ((gm < 0) == (glo < 0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            x0 = x1;
            g0 = g1;
        }
        return roots;
    };
    auto roots = scan(720);
    if (roots.size() != 2) roots = scan(20000);
    return roots;
}

// Minus: the root with the smaller |tan(beta/2)|, Plus: the larger one.
inline double fourbar_branch(const std::vector<double>& roots, Branch branch) {
    auto mag = [](double b) { return std::abs(std::tan(b / 2)); };
    auto it = std::minmax_element(roots.begin(), roots.end(),
                                  [&](double x, double y) { return mag(x) < mag(y); });
    return branch == Branch::Minus ? *it.first : *it.second;
}

// Spherical frame bar of length lambda in a fixed orientation.
inline std::pair<Vec3, Vec3> frame_bar(double lambda) {
    return {Vec3(1, 0, 0), Vec3(std::cos(lambda), std::sin(lambda), 0)};
}

// --- closure algebra by polynomial substitution -------------------------

// Coefficients in ascending order.
template <typename T>
using Poly = std::vector<T>;

template <typename T>
Poly<T> padd(const Poly<T>& a, const Poly<T>& b) {
    Poly<T> r(std::max(a.size(), b.size()), T(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

template <typename T>
Poly<T> pscale(const Poly<T>& a, T s) {
    Poly<T> r = a;
    for (auto& c : r) c *= s;
    return r;
}

// a_n = N(x)/D(x) by substituting a_i = (a_{i-1} f_{i-1} + e_i)/(1 - a_{i-1} f_{i-1} e_i)
// with a_0 = x, e_n = e_0; returns the coefficients of x D(x) - N(x).
template <typename T>
std::array<T, 3> substitution_closure(const std::vector<T>& f, const std::vector<T>& e) {
    const std::size_t n = f.size();
    Poly<T> num{T(0), T(1)}, den{T(1)};
    for (std::size_t i = 1; i <= n; ++i) {
        const T fi = f[i - 1], ei = e[i % n];
        const Poly<T> fn = pscale(num, fi);
        const Poly<T> new_num = padd(fn, pscale(den, ei));
        const Poly<T> new_den = padd(den, pscale(fn, -ei));
        num = new_num;
        den = new_den;
    }
    Poly<T> xd{T(0)};
    for (const auto& c : den) xd.push_back(c);
    const Poly<T> q = padd(xd, pscale(num, T(-1)));
    std::array<T, 3> out{T(0), T(0), T(0)};
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i < 3) out[2 - i] = q[i];
    }
    return out;  // q2, q1, q0
}

// Relative deviation of two coefficient triples from proportionality.
template <typename T>
double proportional_deviation(const std::array<T, 3>& a, const std::array<T, 3>& b) {
    double na = 0, nb = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        na = std::max(na, std::abs(a[i]));
        nb = std::max(nb, std::abs(b[i]));
        if (std::abs(b[i]) > std::abs(b[k])) k = i;
    }
    if (na == 0 && nb == 0) return 0.0;
    if (nb == 0 || b[k] == T(0)) return 1.0;
    const T ratio = a[k] / b[k];
    double dev = 0;
    for (std::size_t i = 0; i < 3; ++i) dev = std::max(dev, std::abs(a[i] - ratio * b[i]));
    return dev / na;
}

// --- 3D oracles ---------------------------------------------------------

inline std::vector<double> face_distances(const flexbelt::Block3D& b, const flexbelt::Face& f) {
    std::vector<double> d;
    for (std::size_t i = 0; i < f.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < f.vertices.size(); ++j)
            d.push_back((b.points[f.vertices[i]] - b.points[f.vertices[j]]).norm());
    return d;
}

// Dihedral angle about the hinge from its two wing points, via atan2.
inline double hinge_angle(const flexbelt::Block3D& b, const flexbelt::Hinge& h) {
    const Vec3 p = b.points[h.p];
    const Vec3 axis = (b.points[h.q] - p).normalized();
    auto perp = [&](const Vec3& w) {
        const Vec3 d = w - p;
        return Vec3(d - axis * axis.dot(d));
    };
    const Vec3 u = perp(b.points[h.wing_f]);
    const Vec3 v = perp(b.points[h.wing_g]);
    return std::atan2(axis.dot(u.cross(v)), u.dot(v));
}

inline double wrap(double a) {
    const double pi = std::numbers::pi;
    a = std::fmod(a + pi, 2 * pi);
    if (a <= 0) a += 2 * pi;
    return a - pi;
}

// --- random draws --------------------------------------------------------

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Real ratio with |f| in [0.2, 5] and a random sign.
inline double random_ratio(std::mt19937_64& rng) {
    const double mag = std::exp(uniform(rng, std::log(0.2), std::log(5.0)));
    return uniform(rng, 0, 1) < 0.5 ? -mag : mag;
}

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
    return {uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

// --- sweep oracles --------------------------------------------------------

// Rotation of every hinge relative to the first sample, measured from the
// points with hinge_angle and unwrapped along the sweep. [sample][hinge]
inline std::vector<std::vector<double>> hinge_rotations(const flexbelt::FlexionTrace& trace) {
    std::vector<std::vector<double>> out;
    const auto& hinges = trace.samples.front().block.hinges;
    std::vector<double> prev, acc(hinges.size(), 0.0);
    for (const auto& s : trace.samples) {
        std::vector<double> raw;
        for (const auto& h : hinges) raw.push_back(hinge_angle(s.block, h));
        if (!prev.empty())
            for (std::size_t h = 0; h < raw.size(); ++h) acc[h] += wrap(raw[h] - prev[h]);
        prev = raw;
        out.push_back(acc);
    }
    return out;
}

// Largest difference of |rotation| inside any group at any sample.
inline double group_spread(const std::vector<std::vector<double>>& rot, const std::vector<std::vector<int>>& groups) {
    double worst = 0;
    for (const auto& r : rot)
        for (const auto& g : groups) {
            double lo = 1e300, hi = -1e300;
            for (int h : g) {
                lo = std::min(lo, std::abs(r[h]));
                hi = std::max(hi, std::abs(r[h]));
            }
            worst = std::max(worst, hi - lo);
        }
    return worst;
}

// (a_i, c_i, b_{i+1}) with hinges stored as c, a, b per vertex.
inline std::vector<std::vector<int>> triple_groups(std::size_t n) {
    std::vector<std::vector<int>> g;
    for (std::size_t i = 0; i < n; ++i)
        g.push_back({int(3 * i + 1), int(3 * i), int(3 * ((i + 1) % n) + 2)});
    return g;
}

// Hinges sharing a grid line of the 4 x 4 block.
inline std::vector<std::vector<int>> polyline_groups(const flexbelt::Block3D& b) {
    std::vector<std::vector<int>> rows(4), cols(4);
    for (std::size_t h = 0; h < b.hinges.size(); ++h) {
        const auto& p = b.grid[b.hinges[h].p];
        const auto& q = b.grid[b.hinges[h].q];
        if (p[0] == q[0]) rows[p[0]].push_back(int(h));
        else cols[p[1]].push_back(int(h));
    }
    std::vector<std::vector<int>> g;
    for (auto* family : {&rows, &cols})
        for (auto& line : *family)
            if (!line.empty()) g.push_back(line);
    return g;
}

// Largest change of any pairwise face-vertex distance against sample 0.
inline double rigidity_deviation(const flexbelt::FlexionTrace& trace) {
    const auto& first = trace.samples.front().block;
    double worst = 0;
    for (const auto& s : trace.samples)
        for (std::size_t f = 0; f < first.faces.size(); ++f) {
            const auto a = face_distances(first, first.faces[f]);
            const auto b = face_distances(s.block, first.faces[f]);
            for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
        }
    return worst;
}

} // namespace testsupport
