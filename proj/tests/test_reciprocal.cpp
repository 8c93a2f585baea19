#include "flexbelt/reciprocal.hpp"
#include "flexbelt/vhedra.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace flexbelt;

namespace {

Block3D lifted(const BlockParameters& b, double a0, bool require_closure = true) {
    const auto lengths = OuterLengths::uniform(b.size());
    const auto cfg = configure_spherical(b, a0, Tolerances{}, require_closure);
    return lift_to_3d(b, cfg, lengths, parallelogram_templates(b, lengths));
}

const BlockParameters& example2_block() {
    static const BlockParameters block = build_block(testsupport::example2_input());
    return block;
}

double parallel_angle(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

} // namespace

TEST(Reciprocal, SkewBlockIsUniqueUpToScaling) {
    const auto block = lifted(example2_block(), 0.3);
    const auto ns = nullspace_dimension(to_mesh(block));
    EXPECT_EQ(ns.dimension, 4u);
    EXPECT_EQ(ns.interior_edges, 12u);
    EXPECT_EQ(ns.unknowns, 3u * 9u + 12u);

    const auto rec = reciprocal_parallel(block);
    ASSERT_EQ(rec.vertices.size(), 9u);
    ASSERT_EQ(rec.edges.size(), 12u);
    EXPECT_LT(rec.max_parallel_angle, 1e-8);
    for (const auto& e : rec.edges) {
        const Vec3 dual = rec.vertices[e.face_g] - rec.vertices[e.face_f];
        const Vec3 primal = block.points[e.q] - block.points[e.p];
        EXPECT_LT(parallel_angle(dual, primal), 1e-8);
        EXPECT_NEAR(dual.norm(), std::abs(e.t), 1e-10 * (1 + std::abs(e.t)));
        EXPECT_GT(dual.norm(), 1e-6);  // no dual edge collapses
    }
    // designated edge is hinge c_3 = V_3 V_0
    const auto& d = rec.edges[rec.designated];
    EXPECT_EQ(d.p, 0);
    EXPECT_EQ(d.q, 3);
    EXPECT_DOUBLE_EQ(d.t, 1.0);
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : rec.vertices) centroid += v;
    EXPECT_LT(centroid.norm(), 1e-12);
}

TEST(Reciprocal, DualStructure) {
    const auto block = lifted(example2_block(), 0.3);
    const auto rec = reciprocal_parallel(block);
    // one dual face per central vertex: central, side_{i-1}, corner_i, side_i
    ASSERT_EQ(rec.faces.size(), 4u);
    for (std::size_t k = 0; k < rec.faces.size(); ++k) {
        const int v = rec.face_vertex[k];
        ASSERT_GE(v, 0);
        ASSERT_LT(v, 4);
        const std::set<int> got(rec.faces[k].begin(), rec.faces[k].end());
        const std::set<int> want{0, 1 + (v + 3) % 4, 5 + v, 1 + v};
        EXPECT_EQ(got, want);
        // consecutive dual vertices share a primal edge at v
        const auto& cyc = rec.faces[k];
        for (std::size_t j = 0; j < cyc.size(); ++j) {
            const int a = cyc[j], b = cyc[(j + 1) % cyc.size()];
            bool shared = false;
            for (const auto& e : rec.edges)
                shared = shared || ((e.face_f == a && e.face_g == b) || (e.face_f == b && e.face_g == a));
            EXPECT_TRUE(shared);
        }
    }
    // every interior primal edge of the block joins two of its nine faces
    std::set<std::pair<int, int>> keys;
    for (const auto& e : rec.edges) {
        EXPECT_LT(e.p, e.q);
        EXPECT_NE(e.face_f, e.face_g);
        keys.insert({e.p, e.q});
    }
    EXPECT_EQ(keys.size(), 12u);
}

TEST(Reciprocal, ScalingLeavesNormalizedMeshUnchanged) {
    const auto block = lifted(example2_block(), -0.8);
    auto scaled = block;
    for (auto& p : scaled.points) p = 3.7 * p + Vec3(1, -2, 0.5);
    const auto a = reciprocal_parallel(block);
    const auto b = reciprocal_parallel(scaled);
    for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_LT((a.vertices[i] - b.vertices[i]).norm(), 1e-10);
}

TEST(Reciprocal, RigidBlockHasOnlyTranslations) {
    const auto& b = example2_block();
    auto e = b.e;
    e[1] += 0.2;
    const auto rigid = assemble_block(SpatialPolygon(b.polygon), b.delta, b.branch, e);
    ASSERT_FALSE(rigid.flexibility.flexible);
    const auto block = lifted(rigid, 0.6, false);
    EXPECT_EQ(nullspace_dimension(to_mesh(block)).dimension, 3u);
    EXPECT_THROW(reciprocal_parallel(block), NoNontrivialSolution);
}

// Measured behaviour on a planar-quad V-hedra block: the parallelism system
// still has dimension 4, while the reciprocal of the reciprocal picks up an
// extra solution.
TEST(Reciprocal, PlanarBlockDimensions) {
    const auto block = lifted(build_block(testsupport::planar_input()), 0.5);
    EXPECT_EQ(nullspace_dimension(to_mesh(block)).dimension, 4u);
    const auto rec = reciprocal_parallel(block);
    EXPECT_LT(rec.max_parallel_angle, 1e-8);
    EXPECT_EQ(nullspace_dimension(rec.as_mesh()).dimension, 5u);
    EXPECT_THROW(reciprocal_parallel(rec.as_mesh()), AmbiguousSolution);
}

TEST(Reciprocal, SkewReciprocalOfReciprocal) {
    const auto rec = reciprocal_parallel(lifted(example2_block(), 0.3));
    EXPECT_EQ(nullspace_dimension(rec.as_mesh()).dimension, 4u);
}

TEST(Reciprocal, AmbiguityCarriesDimension) {
    // two unit squares sharing an edge: every edge factor of the single
    // interior edge works, and nothing pins the rest
    PolyMesh flat{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(2, 0, 0), Vec3(2, 1, 0)},
                  {{0, 1, 2, 3}, {1, 4, 5, 2}}};
    EXPECT_EQ(nullspace_dimension(flat).dimension, 4u);
    EXPECT_NO_THROW(reciprocal_parallel(flat));
    PolyMesh single{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0)}, {{0, 1, 2}}};
    EXPECT_THROW(reciprocal_parallel(single), NoNontrivialSolution);
}

TEST(Reciprocal, NonManifoldEdgeRejected) {
    PolyMesh m{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)},
               {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}};
    EXPECT_THROW(interior_edges(m), InvalidInput);
}

TEST(Cylindrical, Example2SweepHasRigidStars) {
    SweepOptions opt;
    opt.samples = 12;
    const auto trace = flex_sweep(example2_block(), opt);
    const auto r = verify_cylindrical_deformation(trace);
    EXPECT_EQ(r.samples, 12u);
    EXPECT_TRUE(r.pass());
    EXPECT_LT(r.star_angle_variation, 1e-7);
    EXPECT_LT(r.max_parallel_angle, 1e-8);
    // dual edges slide: some edge factor changes along the sweep
    double slide = 0;
    for (const auto& [lo, hi] : r.length_range) slide = std::max(slide, hi - lo);
    EXPECT_GT(slide, 1e-3);
}

TEST(Cylindrical, SingleSampleIsVacuous) {
    SweepOptions opt;
    opt.samples = 1;
    const auto r = verify_cylindrical_deformation(flex_sweep(example2_block(), opt));
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.star_angle_variation, 0.0);
}

TEST(Cylindrical, PlanarBlockSweep) {
    SweepOptions opt;
    opt.samples = 8;
    const auto trace = flex_sweep(build_block(testsupport::planar_input()), opt);
    const auto r = verify_cylindrical_deformation(trace);
    EXPECT_TRUE(r.pass()) << r.star_angle_variation << " " << r.max_parallel_angle;
}
