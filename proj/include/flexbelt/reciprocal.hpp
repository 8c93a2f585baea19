#pragma once

// Reciprocal-parallel meshes. For a face mesh with rigid faces, the dual
// points P_F (one per face) and edge factors t_e (one per interior edge) solve
//
//     P_G - P_F = t_e dir(e)      for every edge e shared by faces F and G.
//
// Translations always solve this system; a nullspace of dimension exactly 4
// means the mesh has a unique reciprocal-parallel partner up to scaling.

#include "flexbelt/flexion.hpp"

#include <optional>
#include <vector>

namespace flexbelt {

struct PolyMesh {
    std::vector<Vec3> points;
    std::vector<std::vector<int>> faces;
};

PolyMesh to_mesh(const Block3D& block);

struct DualEdge {
    int face_f = 0, face_g = 0;  // dual endpoints
    int p = 0, q = 0;            // primal edge, p < q
    double t = 0.0;              // P_G - P_F = t (x_q - x_p) / |x_q - x_p|
};

struct NullspaceReport {
    std::size_t dimension = 0;
    std::size_t unknowns = 0;
    std::size_t interior_edges = 0;
    std::vector<double> singular_values;  // ascending, smallest few
};

struct ReciprocalMesh {
    std::vector<Vec3> vertices;  // one per primal face
    std::vector<DualEdge> edges; // one per interior primal edge
    std::vector<std::vector<int>> faces;  // one per interior primal vertex, as cycles of dual vertices
    std::vector<int> face_vertex;         // the primal vertex of each dual face
    int designated = 0;                   // index into edges with t = 1
    NullspaceReport nullspace;
    double max_parallel_angle = 0.0;

    // The dual as a face mesh, for taking the reciprocal once more.
    PolyMesh as_mesh() const;
};

// Interior edges (p < q) with their two incident faces, in first-seen order.
std::vector<DualEdge> interior_edges(const PolyMesh& mesh);

// Dimension of the solution space of the parallelism system; never throws for
// degenerate dimensions.
NullspaceReport nullspace_dimension(const PolyMesh& mesh, double rel_threshold = 1e-9);

// Unique reciprocal-parallel mesh, normalized to t = 1 on the designated edge
// (the last interior edge when not given) and centered at the origin. Throws
// NoNontrivialSolution (dimension <= 3) or AmbiguousSolution (dimension > 4).
ReciprocalMesh reciprocal_parallel(const PolyMesh& mesh, std::optional<std::pair<int, int>> designated = {},
                                   double rel_threshold = 1e-9);

// Block version; the designated edge is hinge c_{n-1}.
ReciprocalMesh reciprocal_parallel(const Block3D& block, double rel_threshold = 1e-9);

struct CylindricalReport {
    std::size_t samples = 0;
    double star_angle_variation = 0.0;   // rigid vertex stars
    double max_parallel_angle = 0.0;     // dual edges vs moving primal edges
    std::vector<std::pair<double, double>> length_range;  // per dual edge, |t|
    bool stars_rigid = true;
    bool parallel = true;
    bool pass() const { return stars_rigid && parallel; }
};

CylindricalReport verify_cylindrical_deformation(const FlexionTrace& trace, double star_tol = 1e-7,
                                                 double parallel_tol = 1e-8);

} // namespace flexbelt
