#pragma once

// Reference quantities for the VAG stencils computed by other routes than
// the library: a conforming P1 stiffness assembled with explicit prolongation
// matrices, and boundary integrals of affine fields.

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "geovag/mesh/mesh.hpp"

namespace geovag::fixtures {

// Local unknowns of a cell: index 0 is the cell, then its nodes in cell order,
// then its fracture faces in face order.
struct CellBasis {
    std::vector<int> nodes;
    std::vector<int> fracture_faces;  // mesh face ids
    int size() const { return 1 + static_cast<int>(nodes.size() + fracture_faces.size()); }
};

inline CellBasis cell_basis(const DfmMesh& mesh, int k) {
    CellBasis b;
    b.nodes = mesh.cells()[k].nodes;
    for (int fi : mesh.cells()[k].faces)
        if (mesh.faces()[fi].fracture >= 0) b.fracture_faces.push_back(fi);
    return b;
}

// Row of the prolongation giving the value at face centre fi.
inline Eigen::RowVectorXd face_center_row(const DfmMesh& mesh, const CellBasis& b, int fi) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(b.size());
    const auto ff = std::find(b.fracture_faces.begin(), b.fracture_faces.end(), fi);
    if (ff != b.fracture_faces.end()) {
        r(1 + static_cast<int>(b.nodes.size()) + static_cast<int>(ff - b.fracture_faces.begin())) = 1.0;
        return r;
    }
    const Face& f = mesh.faces()[fi];
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        const auto at = std::find(b.nodes.begin(), b.nodes.end(), f.nodes[i]) - b.nodes.begin();
        r(1 + static_cast<int>(at)) += f.weights[i];
    }
    return r;
}

inline Eigen::RowVectorXd node_row(const CellBasis& b, int s) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(b.size());
    r(1 + static_cast<int>(std::find(b.nodes.begin(), b.nodes.end(), s) - b.nodes.begin())) = 1.0;
    return r;
}

// Full P1 stiffness over (cell, nodes, fracture faces), built tetrahedron by
// tetrahedron with the 4x4 barycentric system and A += P^T k P.
inline Eigen::MatrixXd fe_cell_stiffness(const DfmMesh& mesh, int k, const Eigen::Matrix3d& K) {
    const Cell& c = mesh.cells()[k];
    const CellBasis b = cell_basis(mesh, k);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(b.size(), b.size());
    for (int fi : c.faces) {
        const Face& f = mesh.faces()[fi];
        for (std::size_t i = 0; i < f.nodes.size(); ++i) {
            const int s1 = f.nodes[i], s2 = f.nodes[(i + 1) % f.nodes.size()];
            Eigen::Matrix4d M;
            const Vec3 v[4] = {c.center, f.center, mesh.nodes()[s1], mesh.nodes()[s2]};
            for (int j = 0; j < 4; ++j) M.col(j) << 1.0, v[j];
            const Eigen::Matrix4d Minv = M.inverse();
            const Eigen::Matrix<double, 4, 3> G = Minv.rightCols<3>();
            const double vol = std::abs(M.determinant()) / 6.0;
            const Eigen::Matrix4d kt = vol * G * K * G.transpose();
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(4, b.size());
            P(0, 0) = 1.0;
            P.row(1) = face_center_row(mesh, b, fi);
            P.row(2) = node_row(b, s1);
            P.row(3) = node_row(b, s2);
            A += P.transpose() * kt * P;
        }
    }
    return A;
}

// Flux F_{K,nu} = -int_{dK} eta_nu K grad(u).n for u affine with gradient g,
// evaluated with the exact triangle mean of the piecewise affine eta_nu.
inline Eigen::VectorXd boundary_flux_oracle(const DfmMesh& mesh, int k, const Eigen::Matrix3d& K, const Vec3& g) {
    const Cell& c = mesh.cells()[k];
    const CellBasis b = cell_basis(mesh, k);
    Eigen::VectorXd F = Eigen::VectorXd::Zero(b.size() - 1);
    const Vec3 q = K * g;
    for (int fi : c.faces) {
        const Face& f = mesh.faces()[fi];
        for (std::size_t i = 0; i < f.nodes.size(); ++i) {
            const int s1 = f.nodes[i], s2 = f.nodes[(i + 1) % f.nodes.size()];
            Vec3 an = 0.5 * (mesh.nodes()[s1] - f.center).cross(mesh.nodes()[s2] - f.center);
            if (an.dot(f.center - c.center) < 0) an = -an;
            const Eigen::RowVectorXd mean = (face_center_row(mesh, b, fi) + node_row(b, s1) + node_row(b, s2)) / 3.0;
            F -= q.dot(an) * mean.tail(b.size() - 1).transpose();
        }
    }
    return F;
}

// 2D P1 stiffness of a planar fracture face with isotropic k times width over
// (face unknown, nodes), using in-plane coordinates and the 3x3 barycentric
// system on each triangle.
inline Eigen::MatrixXd fe_face_stiffness(const DfmMesh& mesh, int face, double k_times_width) {
    const Face& f = mesh.faces()[face];
    const int m = static_cast<int>(f.nodes.size());
    Vec3 nrm = (mesh.nodes()[f.nodes[1]] - mesh.nodes()[f.nodes[0]]).cross(mesh.nodes()[f.nodes[2]] - mesh.nodes()[f.nodes[0]]);
    nrm.normalize();
    const Vec3 e1 = (mesh.nodes()[f.nodes[1]] - mesh.nodes()[f.nodes[0]]).normalized();
    const Vec3 e2 = nrm.cross(e1);
    auto uv = [&](const Vec3& x) { return Eigen::Vector2d((x - f.center).dot(e1), (x - f.center).dot(e2)); };
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int i = 0; i < m; ++i) {
        const int a = i, bb = (i + 1) % m;
        Eigen::Matrix3d M;
        M.col(0) << 1.0, uv(f.center);
        M.col(1) << 1.0, uv(mesh.nodes()[f.nodes[a]]);
        M.col(2) << 1.0, uv(mesh.nodes()[f.nodes[bb]]);
        const Eigen::Matrix3d Minv = M.inverse();
        const Eigen::Matrix<double, 3, 2> G = Minv.rightCols<2>();
        const double area = std::abs(M.determinant()) / 2.0;
        const Eigen::Matrix3d kt = area * k_times_width * G * G.transpose();
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, m + 1);
        P(0, 0) = 1.0;
        P(1, 1 + a) = 1.0;
        P(2, 1 + bb) = 1.0;
        A += P.transpose() * kt * P;
    }
    return A;
}

}  // namespace geovag::fixtures
