#pragma once

#include "hhoea/common.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hhoea {

enum class Subdomain { Fluid, Solid };

enum class FaceClass { InteriorFluid, InteriorSolid, Interface, BoundaryFluid, BoundarySolid };

std::string to_string(FaceClass c);

struct Cell {
    std::vector<int> vertex_ids; // counterclockwise
    Subdomain subdomain = Subdomain::Fluid;
    std::vector<int> face_ids;   // face_ids[i] joins vertex i and i+1
    Point2 centroid = Point2::Zero();
    double area = 0.0;
    double diameter = 0.0;
};

struct Face {
    std::array<int, 2> vertex_ids{-1, -1};
    FaceClass cls = FaceClass::InteriorFluid;
    // cells[1] == -1 on the boundary. For interface faces cells[0] is the solid cell.
    std::array<int, 2> cells{-1, -1};
    // Unit normal leaving cells[0]; on the interface this is n_Gamma (solid to fluid).
    Point2 normal = Point2::Zero();
    Point2 midpoint = Point2::Zero();
    double length = 0.0;
};

struct FaceGeometry {
    Point2 midpoint;
    double length;
    Point2 normal; // outward from the queried cell
};

struct Rect {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

class Mesh {
public:
    Mesh() = default;
    // Builds faces, classification and geometric data from CCW vertex loops.
    Mesh(std::vector<Point2> points, std::vector<std::vector<int>> cell_vertices,
         std::vector<Subdomain> tags);

    const std::vector<Point2>& points() const { return points_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Cell& cell(int c) const { return cells_[c]; }
    const Face& face(int f) const { return faces_[f]; }
    int num_cells() const { return int(cells_.size()); }
    int num_faces() const { return int(faces_.size()); }
    int count_cells(Subdomain s) const;
    int count_faces(FaceClass c) const;

    double domain_diameter() const { return diameter_; }
    double h_tilde(int c) const { return cells_[c].diameter / diameter_; }
    double max_cell_diameter() const;

    FaceGeometry face_geometry(int f, int c) const;
    // Sign (+1/-1) turning the stored face normal into the outward normal of c.
    double normal_sign(int f, int c) const;
    // Unit tangent from vertex_ids[0] to vertex_ids[1].
    Point2 face_tangent(int f) const;

    bool contains(int c, const Point2& x, double tol = 1e-12) const;
    // Lowest-id cell containing x, optionally restricted to a subdomain.
    std::optional<int> locate(const Point2& x, std::optional<Subdomain> sub = {}) const;

    // Same geometry with every cell relabelled.
    Mesh retagged(Subdomain s) const;

private:
    std::vector<Point2> points_;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    double diameter_ = 0.0;
};

// Uniform quadrilaterals with h = 2^-level on two rectangles sharing one full edge.
Mesh build_cartesian_mesh(int level, const Rect& fluid, const Rect& solid);

Mesh read_polygonal_mesh(std::istream& in);
Mesh read_polygonal_mesh_file(const std::string& path);
void write_polygonal_mesh(std::ostream& out, const Mesh& mesh);

// Test-mesh generators built from the Cartesian mesh.
Mesh triangulate(const Mesh& mesh);
// Interior vertices move by up to `amplitude` times the local spacing; interface
// and boundary vertices stay fixed. Deterministic in `seed`.
Mesh perturb(const Mesh& mesh, double amplitude, unsigned seed);
// Cartesian cells are either kept, cut into two triangles, or merged with
// their right neighbour into a hexagon (with a midpoint vertex on the shared edge),
// giving triangles, quadrilaterals and polygons on one mesh.
Mesh mixed_polygonal(int level, const Rect& fluid, const Rect& solid);

} // namespace hhoea
