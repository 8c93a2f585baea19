#include "flexbelt/reciprocal.hpp"

#include <Eigen/SVD>

#include <map>
#include <set>
#include <sstream>

namespace flexbelt {

PolyMesh to_mesh(const Block3D& block) {
    PolyMesh m;
    m.points = block.points;
    for (const auto& f : block.faces) m.faces.push_back(f.vertices);
    return m;
}

std::vector<DualEdge> interior_edges(const PolyMesh& mesh) {
    std::map<std::pair<int, int>, std::vector<int>> incident;
    std::vector<std::pair<int, int>> order;
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        if (f.size() < 3) throw InvalidInput("face " + std::to_string(fi) + " has fewer than 3 vertices");
        for (std::size_t k = 0; k < f.size(); ++k) {
            const int a = f[k], b = f[(k + 1) % f.size()];
            if (a < 0 || b < 0 || a >= static_cast<int>(mesh.points.size()) ||
                b >= static_cast<int>(mesh.points.size()))
                throw InvalidInput("face " + std::to_string(fi) + " references a missing point");
            const auto key = std::minmax(a, b);
            auto& list = incident[{key.first, key.second}];
            if (list.empty()) order.push_back({key.first, key.second});
            list.push_back(static_cast<int>(fi));
        }
    }
    std::vector<DualEdge> out;
    for (const auto& key : order) {
        const auto& list = incident[key];
        if (list.size() > 2)
            throw InvalidInput("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                               ") is shared by more than two faces");
        if (list.size() == 2) out.push_back({list[0], list[1], key.first, key.second, 0.0});
    }
    return out;
}

namespace {

struct System {
    Eigen::MatrixXd matrix;
    std::vector<DualEdge> edges;
    std::size_t faces = 0;
};

Vec3 edge_direction(const PolyMesh& mesh, const DualEdge& e) {
    return (mesh.points[e.q] - mesh.points[e.p]).normalized();
}

System build_system(const PolyMesh& mesh) {
    System s;
    s.edges = interior_edges(mesh);
    s.faces = mesh.faces.size();
    const std::size_t ne = s.edges.size();
    s.matrix = Eigen::MatrixXd::Zero(3 * ne, 3 * s.faces + ne);
    for (std::size_t k = 0; k < ne; ++k) {
        const auto& e = s.edges[k];
        const Vec3 d = edge_direction(mesh, e);
        for (int c = 0; c < 3; ++c) {
            s.matrix(3 * k + c, 3 * e.face_g + c) += 1.0;
            s.matrix(3 * k + c, 3 * e.face_f + c) -= 1.0;
            s.matrix(3 * k + c, 3 * s.faces + k) = -d[c];
        }
    }
    return s;
}

struct Decomposition {
    NullspaceReport report;
    Eigen::MatrixXd basis;  // columns span the nullspace
};

Decomposition decompose(const System& s, double rel_threshold) {
    const auto& a = s.matrix;
    Decomposition out;
    out.report.unknowns = a.cols();
    out.report.interior_edges = s.edges.size();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_threshold * top) ++rank;
    out.report.dimension = a.cols() - rank;
    for (Eigen::Index i = sv.size(); i-- > 0 && out.report.singular_values.size() < 8;)
        out.report.singular_values.push_back(sv(i));
    out.basis = svd.matrixV().rightCols(out.report.dimension);
    return out;
}

double parallel_angle(const Vec3& v, const Vec3& d) {
    if (v.norm() == 0.0) return 0.0;
    return std::atan2(v.cross(d).norm(), std::abs(v.dot(d)));
}

// Dual faces: the cycle of faces around each primal vertex whose incident
// edges are all interior.
void dual_faces(const PolyMesh& mesh, const std::vector<DualEdge>& edges, ReciprocalMesh& out) {
    std::map<std::pair<int, int>, const DualEdge*> by_key;
    for (const auto& e : edges) by_key[{e.p, e.q}] = &e;
    std::map<int, std::set<int>> faces_at;
    std::map<int, std::set<std::pair<int, int>>> edges_at;
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        for (std::size_t k = 0; k < f.size(); ++k) {
            const int a = f[k], b = f[(k + 1) % f.size()];
            const auto key = std::minmax(a, b);
            faces_at[a].insert(static_cast<int>(fi));
            edges_at[a].insert({key.first, key.second});
            edges_at[b].insert({key.first, key.second});
        }
    }
    for (const auto& [v, incident] : edges_at) {
        bool interior = true;
        for (const auto& key : incident) interior = interior && by_key.count(key);
        if (!interior) continue;
        std::vector<int> cycle;
        int face = *faces_at[v].begin();
        for (std::size_t guard = 0; guard <= faces_at[v].size(); ++guard) {
            cycle.push_back(face);
            const auto& f = mesh.faces[face];
            const auto pos = std::find(f.begin(), f.end(), v) - f.begin();
            const int w = f[(pos + 1) % f.size()];
            const auto key = std::minmax(v, w);
            const DualEdge* e = by_key.at({key.first, key.second});
            face = e->face_f == face ? e->face_g : e->face_f;
            if (face == cycle.front()) break;
        }
        if (face != cycle.front()) continue;  // not a simple fan
        out.faces.push_back(cycle);
        out.face_vertex.push_back(v);
    }
}

} // namespace

PolyMesh ReciprocalMesh::as_mesh() const { return {vertices, faces}; }

NullspaceReport nullspace_dimension(const PolyMesh& mesh, double rel_threshold) {
    return decompose(build_system(mesh), rel_threshold).report;
}

ReciprocalMesh reciprocal_parallel(const PolyMesh& mesh, std::optional<std::pair<int, int>> designated,
                                   double rel_threshold) {
    const System sys = build_system(mesh);
    if (sys.edges.empty()) throw NoNontrivialSolution("mesh has no interior edges");
    const auto dec = decompose(sys, rel_threshold);
    const std::size_t dim = dec.report.dimension;
    if (dim <= 3) throw NoNontrivialSolution("parallelism system only admits translations");
    if (dim > 4) {
        std::ostringstream os;
        os << "reciprocal-parallel mesh is not unique (nullspace dimension " << dim << ")";
        throw AmbiguousSolution(os.str(), dim);
    }

    ReciprocalMesh out;
    out.nullspace = dec.report;
    out.edges = sys.edges;
    const std::size_t nf = sys.faces, ne = sys.edges.size();

    out.designated = static_cast<int>(ne) - 1;
    if (designated) {
        const auto key = std::minmax(designated->first, designated->second);
        auto it = std::find_if(out.edges.begin(), out.edges.end(),
                               [&](const DualEdge& e) { return e.p == key.first && e.q == key.second; });
        if (it == out.edges.end()) throw InvalidInput("designated edge is not an interior edge");
        out.designated = static_cast<int>(it - out.edges.begin());
    }

    // remove the translations and keep the remaining direction
    Eigen::MatrixXd translations = Eigen::MatrixXd::Zero(3 * nf + ne, 3);
    for (std::size_t f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) translations(3 * f + c, c) = 1.0 / std::sqrt(double(nf));
    const Eigen::MatrixXd reduced = dec.basis - translations * (translations.transpose() * dec.basis);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeThinU);
    Eigen::VectorXd u = svd.matrixU().col(0);
    const double t_designated = u(3 * nf + out.designated);
    if (std::abs(t_designated) <= 1e-12 * u.norm())
        throw InvalidInput("designated edge collapses in the reciprocal mesh");
    u /= t_designated;

    out.vertices.resize(nf);
    Vec3 centroid = Vec3::Zero();
    for (std::size_t f = 0; f < nf; ++f) {
        out.vertices[f] = u.segment<3>(3 * f);
        centroid += out.vertices[f];
    }
    centroid /= double(nf);
    for (auto& v : out.vertices) v -= centroid;
    for (std::size_t k = 0; k < ne; ++k) {
        auto& e = out.edges[k];
        e.t = u(3 * nf + k);
        const Vec3 dual = out.vertices[e.face_g] - out.vertices[e.face_f];
        out.max_parallel_angle = std::max(out.max_parallel_angle, parallel_angle(dual, edge_direction(mesh, e)));
    }
    dual_faces(mesh, sys.edges, out);
    return out;
}

ReciprocalMesh reciprocal_parallel(const Block3D& block, double rel_threshold) {
    const int n = static_cast<int>(block.faces.front().vertices.size());
    return reciprocal_parallel(to_mesh(block), std::pair<int, int>{n - 1, 0}, rel_threshold);
}

CylindricalReport verify_cylindrical_deformation(const FlexionTrace& trace, double star_tol, double parallel_tol) {
    CylindricalReport r;
    r.samples = trace.samples.size();
    std::vector<std::vector<double>> ref_angles;
    for (std::size_t s = 0; s < trace.samples.size(); ++s) {
        const auto& block = trace.samples[s].block;
        const auto mesh = to_mesh(block);
        const auto rec = reciprocal_parallel(block);
        for (const auto& e : rec.edges) {
            const Vec3 dual = rec.vertices[e.face_g] - rec.vertices[e.face_f];
            r.max_parallel_angle = std::max(r.max_parallel_angle, parallel_angle(dual, edge_direction(mesh, e)));
        }
        if (r.length_range.empty())
            for (const auto& e : rec.edges) r.length_range.push_back({std::abs(e.t), std::abs(e.t)});
        for (std::size_t k = 0; k < rec.edges.size(); ++k) {
            r.length_range[k].first = std::min(r.length_range[k].first, std::abs(rec.edges[k].t));
            r.length_range[k].second = std::max(r.length_range[k].second, std::abs(rec.edges[k].t));
        }
        // angles between dual edges at each dual vertex
        std::vector<double> angles;
        for (std::size_t f = 0; f < rec.vertices.size(); ++f) {
            std::vector<Vec3> star;
            for (const auto& e : rec.edges) {
                if (e.face_f == static_cast<int>(f)) star.push_back(rec.vertices[e.face_g] - rec.vertices[f]);
                if (e.face_g == static_cast<int>(f)) star.push_back(rec.vertices[e.face_f] - rec.vertices[f]);
            }
            for (std::size_t i = 0; i < star.size(); ++i)
                for (std::size_t j = i + 1; j < star.size(); ++j)
                    angles.push_back(star[i].norm() > 0.0 && star[j].norm() > 0.0
                                         ? arc_length(star[i].normalized(), star[j].normalized())
                                         : 0.0);
        }
        if (ref_angles.empty()) ref_angles.push_back(angles);
        for (std::size_t k = 0; k < angles.size(); ++k)
            r.star_angle_variation = std::max(r.star_angle_variation, std::abs(angles[k] - ref_angles[0][k]));
    }
    r.stars_rigid = r.star_angle_variation <= star_tol;
    r.parallel = r.max_parallel_angle <= parallel_tol;
    return r;
}

} // namespace flexbelt
