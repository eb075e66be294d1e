#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace geovag {

using Vec3 = Eigen::Vector3d;

/// Supported cell shapes; local node ordering follows the VTK convention.
enum class CellShape : std::uint8_t { Tetrahedron, Pyramid, Wedge, Hexahedron };

int node_count(CellShape shape);
CellShape shape_from_node_count(int n);
/// Local face loops of a shape (indices into the cell node list).
const std::vector<std::vector<int>>& local_faces(CellShape shape);
int vtk_cell_type(CellShape shape);

struct Cell {
    CellShape shape = CellShape::Hexahedron;
    std::vector<int> nodes;
    std::vector<int> faces;
    Vec3 center = Vec3::Zero();  // barycenter of the cell nodes
    double volume = 0.0;
};

struct Face {
    std::vector<int> nodes;       // closed loop
    std::vector<double> weights;  // barycentric weights of the face center
    Vec3 center = Vec3::Zero();
    double area = 0.0;
    std::array<int, 2> cells{-1, -1};
    int fracture = -1;  // index into fracture_faces, -1 for matrix faces

    int cell_count() const { return cells[1] >= 0 ? 2 : (cells[0] >= 0 ? 1 : 0); }
};

struct FractureFace {
    int face = -1;
    double width = 0.0;  // m
    int plane = 0;
};

/// Well as declared in a mesh file: parent -> child node pairs.
struct WellSpec {
    std::string name;
    double radius = 0.0;
    std::vector<std::array<int, 2>> edges;
};

/// Input description from which a DfmMesh is built.
struct MeshDescription {
    struct CellDef {
        CellShape shape;
        std::vector<int> nodes;
    };
    struct FractureDef {
        std::vector<int> nodes;  // any order; matched to a mesh face as a set
        double width = 0.0;
        int plane = 0;
    };
    struct WeightDef {
        std::vector<int> nodes;
        std::vector<double> weights;
    };

    std::vector<Vec3> nodes;
    std::vector<CellDef> cells;
    std::vector<FractureDef> fractures;
    std::vector<WeightDef> face_weights;
    std::map<std::string, std::vector<int>> node_sets;
    std::vector<WellSpec> wells;
};

/// Conforming polyhedral mesh with a fracture-face subset.
///
/// Faces and edges are derived from the cell definitions. Indices are dense
/// and 0-based. Immutable after construction.
class DfmMesh {
public:
    DfmMesh() = default;

    /// Builds and validates; throws ValidationError / GeometryError.
    static DfmMesh build(MeshDescription desc);

    const std::vector<Vec3>& nodes() const { return nodes_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::vector<FractureFace>& fracture_faces() const { return fracture_faces_; }
    const std::map<std::string, std::vector<int>>& node_sets() const { return node_sets_; }
    const std::vector<WellSpec>& wells() const { return wells_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_cells() const { return cells_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    std::size_t num_fracture_faces() const { return fracture_faces_.size(); }

    std::span<const int> node_cells(int s) const;
    std::span<const int> node_fracture_faces(int s) const;
    bool is_fracture_node(int s) const { return fracture_node_[s] != 0; }

    /// Edge index for an unordered node pair, -1 if the pair is not a mesh edge.
    int find_edge(int a, int b) const;
    /// Face index for a node set (any order), -1 if absent.
    int find_face(std::vector<int> nodes) const;

    const std::vector<int>& node_set(const std::string& tag) const;
    double total_volume() const;

private:
    void build_topology(const MeshDescription& desc);
    void compute_geometry();
    void build_adjacency();
    void check_convexity();

    std::vector<Vec3> nodes_;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<FractureFace> fracture_faces_;
    std::map<std::string, std::vector<int>> node_sets_;
    std::vector<WellSpec> wells_;
    std::vector<std::string> warnings_;

    std::vector<int> node_cells_offsets_, node_cells_;
    std::vector<int> node_ff_offsets_, node_ff_;
    std::vector<std::uint8_t> fracture_node_;
    std::unordered_map<std::uint64_t, int> edge_lookup_;
    std::map<std::vector<int>, int> face_lookup_;
};

struct Box {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();
};

/// Uniform hexahedral mesh of a box. Node sets "xmin", "xmax", "ymin",
/// "ymax", "zmin", "zmax" tag the box sides.
DfmMesh build_cartesian_mesh(int nx, int ny, int nz, const Box& box);

/// Reads the text `.dfm` format (see README).
DfmMesh load_dfm_mesh(const std::filesystem::path& path);
DfmMesh parse_dfm_mesh(const std::string& text);
void write_dfm_mesh(const DfmMesh& mesh, const std::filesystem::path& path);
std::string format_dfm_mesh(const DfmMesh& mesh);

/// Nodes on the vertical line (x, y), as parent -> child edges ordered from
/// the top node downwards.
std::vector<std::array<int, 2>> vertical_line_edges(const DfmMesh& mesh, double x, double y, double tol = 1e-6);

}  // namespace geovag
