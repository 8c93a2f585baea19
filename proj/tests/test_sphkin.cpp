#include "flexbelt/sphkin.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace flexbelt;
using testsupport::example2_polygon;

namespace {

SpatialPolygon unit_square() {
    return SpatialPolygon({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
}

std::vector<Vec3> transformed(const std::vector<Vec3>& pts, const Eigen::Matrix3d& r, const Vec3& t) {
    std::vector<Vec3> out;
    for (const auto& p : pts) out.push_back(r * p + t);
    return out;
}

std::vector<Vec3> random_polygon(std::mt19937_64& rng, std::size_t n) {
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = 2 * kPi * i / n + testsupport::uniform(rng, -0.2, 0.2);
        pts.emplace_back(std::cos(phi) * 3, std::sin(phi) * 3, testsupport::uniform(rng, -1, 1));
    }
    return pts;
}

} // namespace

TEST(EdgeDirections, UnitSquareCyclesThroughAxes) {
    const auto c = edge_directions(unit_square());
    ASSERT_EQ(c.size(), 4u);
    // C_0 = V_0 - V_3 points down the y axis
    EXPECT_TRUE(c[0].isApprox(Vec3(0, -1, 0)));
    EXPECT_TRUE(c[1].isApprox(Vec3(1, 0, 0)));
    EXPECT_TRUE(c[2].isApprox(Vec3(0, 1, 0)));
    EXPECT_TRUE(c[3].isApprox(Vec3(-1, 0, 0)));
}

TEST(EdgeDirections, Example2) {
    const auto c = edge_directions(SpatialPolygon(example2_polygon()));
    EXPECT_LT((c[1] - Vec3(-1, 3, 0) / std::sqrt(10.0)).norm(), 1e-15);
    EXPECT_LT((c[2] - Vec3(-3, -1, 2) / std::sqrt(14.0)).norm(), 1e-15);
    EXPECT_LT((c[3] - Vec3(-1, -2, -2) / 3.0).norm(), 1e-15);
    EXPECT_LT((c[0] - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(EdgeDirections, CoincidentVerticesThrow) {
    SpatialPolygon p({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    EXPECT_THROW(edge_directions(p), DegenerateEdge);
}

TEST(SpatialPolygon, RejectsTooFewVertices) {
    EXPECT_THROW(SpatialPolygon({Vec3(0, 0, 0), Vec3(1, 0, 0)}), InvalidInput);
}

TEST(BarLengths, UnitSquareIsRightAngled) {
    for (double l : bar_lengths(unit_square())) EXPECT_NEAR(l, kPi / 2, 1e-15);
}

TEST(BarLengths, Example2MatchesDotProductsAndInteriorAngles) {
    const auto pts = example2_polygon();
    const auto lambda = bar_lengths(SpatialPolygon(pts));
    const auto inner = interior_angles(SpatialPolygon(pts));
    for (std::size_t i = 0; i < 4; ++i) {
        // interior angle at V_i between the two incident edges
        const Vec3 to_prev = (pts[(i + 3) % 4] - pts[i]).normalized();
        const Vec3 to_next = (pts[(i + 1) % 4] - pts[i]).normalized();
        const double interior = std::acos(to_prev.dot(to_next));
        EXPECT_NEAR(lambda[i], kPi - interior, 1e-14);
        EXPECT_NEAR(inner[i], interior, 1e-14);
    }
}

TEST(BarLengths, CollinearVerticesThrow) {
    SpatialPolygon p({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(1, 1, 0)});
    EXPECT_THROW(bar_lengths(p), DegenerateVertex);
}

TEST(TorsionAngles, PlanarPolygonGivesZeroOrPi) {
    for (const auto& pts : {testsupport::planar_polygon(), unit_square().vertices()}) {
        for (double t : torsion_angles(SpatialPolygon(pts))) EXPECT_TRUE(t == 0.0 || t == kPi) << t;
    }
}

TEST(TorsionAngles, Example2MatchesAtan2Oracle) {
    const auto pts = example2_polygon();
    const auto tau = torsion_angles(SpatialPolygon(pts));
    std::vector<Vec3> c;
    for (std::size_t i = 0; i < 4; ++i) c.push_back(pts[i] - pts[(i + 3) % 4]);
    for (std::size_t k = 0; k < 4; ++k) {
        const double expected = testsupport::torsion_oracle(c[(k + 3) % 4], c[k], c[(k + 1) % 4]);
        EXPECT_NEAR(tau[k], expected, 1e-13) << "k=" << k;
    }
    // V_2 is the only vertex off the z = 0 plane
    int skew = 0;
    for (double t : tau) skew += (std::abs(t) > 1e-6 && std::abs(t - kPi) > 1e-6);
    EXPECT_GE(skew, 2);
}

TEST(TorsionAngles, RandomPolygonsMatchOracle) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pts = random_polygon(rng, 4 + trial % 4);
        const auto tau = torsion_angles(SpatialPolygon(pts));
        const std::size_t n = pts.size();
        std::vector<Vec3> c;
        for (std::size_t i = 0; i < n; ++i) c.push_back(pts[i] - pts[(i + n - 1) % n]);
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_NEAR(testsupport::wrap(tau[k] - testsupport::torsion_oracle(c[(k + n - 1) % n], c[k], c[(k + 1) % n])),
                        0.0, 1e-12);
    }
}

TEST(TorsionAngles, MirrorImageNegates) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = random_polygon(rng, 5);
        auto mirrored = pts;
        for (auto& p : mirrored) p.z() = -p.z();
        const auto t0 = torsion_angles(SpatialPolygon(pts));
        const auto t1 = torsion_angles(SpatialPolygon(mirrored));
        for (std::size_t k = 0; k < t0.size(); ++k) EXPECT_NEAR(t1[k], -t0[k], 1e-12);
    }
    // 0 and pi are fixed
    const auto planar = testsupport::planar_polygon();
    auto mirrored = planar;
    for (auto& p : mirrored) p.y() = -p.y();
    const auto a = torsion_angles(SpatialPolygon(planar));
    const auto b = torsion_angles(SpatialPolygon(mirrored));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(Invariance, RigidMotionKeepsBarLengthsAndTorsion) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = random_polygon(rng, 4 + trial % 3);
        const Eigen::Matrix3d r =
            Eigen::AngleAxisd(testsupport::uniform(rng, -3, 3), Vec3::Random().normalized()).toRotationMatrix();
        const Vec3 t(testsupport::uniform(rng, -9, 9), testsupport::uniform(rng, -9, 9), 1.5);
        const auto moved = transformed(pts, r, t);
        const auto l0 = bar_lengths(SpatialPolygon(pts)), l1 = bar_lengths(SpatialPolygon(moved));
        const auto t0 = torsion_angles(SpatialPolygon(pts)), t1 = torsion_angles(SpatialPolygon(moved));
        for (std::size_t k = 0; k < pts.size(); ++k) {
            EXPECT_NEAR(l0[k], l1[k], 1e-10);
            EXPECT_NEAR(testsupport::wrap(t0[k] - t1[k]), 0.0, 1e-10);
        }
    }
}

TEST(ReconstructDirections, RebuildsInputDirections) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto pts = random_polygon(rng, 4 + trial % 4);
        const SpatialPolygon poly(pts);
        const auto c = edge_directions(poly);
        const auto rebuilt = reconstruct_directions(c[0], c[1], bar_lengths(poly), torsion_angles(poly));
        ASSERT_EQ(rebuilt.size(), c.size());
        for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT((rebuilt[i] - c[i]).norm(), 1e-10) << i;
    }
}

TEST(HalfTangent, SpecialAngles) {
    const auto zero = angle_to_halftangent(0.0);
    EXPECT_TRUE(projectively_equal(zero, HalfTangent<double>{0.0, 1.0}, 1e-15));
    const auto quarter = angle_to_halftangent(kPi / 2);
    EXPECT_TRUE(projectively_equal(quarter, HalfTangent<double>{1.0, 1.0}, 1e-15));
    const auto pole = angle_to_halftangent(kPi);
    EXPECT_TRUE(projectively_equal(pole, HalfTangent<double>{1.0, 0.0}, 1e-15));
    EXPECT_TRUE(pole.is_pole(1e-12));
    EXPECT_NEAR(halftangent_to_angle({1.0, 0.0}), kPi, 1e-15);
}

TEST(HalfTangent, RoundTripIsProjectiveIdentity) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const HalfTangent<double> h{testsupport::uniform(rng, -5, 5), testsupport::uniform(rng, -5, 5)};
        const auto back = angle_to_halftangent(halftangent_to_angle(h));
        EXPECT_TRUE(projectively_equal(h, back, 1e-12));
        const double theta = halftangent_to_angle(h);
        EXPECT_NEAR(halftangent_cos(h), std::cos(theta), 1e-12);
        EXPECT_NEAR(halftangent_sin(h), std::sin(theta), 1e-12);
    }
}

TEST(WrapAngle, MapsIntoHalfOpenInterval) {
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
    EXPECT_NEAR(wrap_angle(0.25), 0.25, 0.0);
}
