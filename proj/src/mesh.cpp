#include "hhoea/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace hhoea {

std::string to_string(FaceClass c)
{
    switch (c) {
    case FaceClass::InteriorFluid: return "InteriorFluid";
    case FaceClass::InteriorSolid: return "InteriorSolid";
    case FaceClass::Interface: return "Interface";
    case FaceClass::BoundaryFluid: return "BoundaryFluid";
    case FaceClass::BoundarySolid: return "BoundarySolid";
    }
    return "?";
}

namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace

Mesh::Mesh(std::vector<Point2> points, std::vector<std::vector<int>> cell_vertices,
           std::vector<Subdomain> tags)
    : points_(std::move(points))
{
    if (cell_vertices.size() != tags.size())
        throw GeometryError("mesh: one subdomain tag per cell required");
    if (cell_vertices.empty())
        throw GeometryError("mesh: no cells");
    for (const auto& p : points_)
        if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
            throw GeometryError("mesh: non-finite coordinate");

    const int np = int(points_.size());
    cells_.resize(cell_vertices.size());
    std::map<std::pair<int, int>, int> edge_to_face;

    for (size_t c = 0; c < cell_vertices.size(); ++c) {
        auto& cell = cells_[c];
        cell.vertex_ids = std::move(cell_vertices[c]);
        cell.subdomain = tags[c];
        const auto& v = cell.vertex_ids;
        const int n = int(v.size());
        if (n < 3)
            throw GeometryError("mesh: cell " + std::to_string(c) + " is not a closed polygon");
        for (int i = 0; i < n; ++i) {
            if (v[i] < 0 || v[i] >= np)
                throw GeometryError("mesh: cell " + std::to_string(c) + " references unknown vertex");
            for (int j = i + 1; j < n; ++j)
                if (v[i] == v[j])
                    throw GeometryError("mesh: cell " + std::to_string(c) + " repeats a vertex");
        }

        // shoelace area and centroid
        double a2 = 0;
        Point2 cen = Point2::Zero();
        for (int i = 0; i < n; ++i) {
            const Point2& p = points_[v[i]];
            const Point2& q = points_[v[(i + 1) % n]];
            const double w = cross(p, q);
            a2 += w;
            cen += w * (p + q);
        }
        if (!(a2 > 0))
            throw GeometryError("mesh: cell " + std::to_string(c) +
                                " has non-positive area (vertices must be counterclockwise)");
        cell.area = 0.5 * a2;
        cell.centroid = cen / (3.0 * a2);
        double d = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                d = std::max(d, (points_[v[i]] - points_[v[j]]).norm());
        cell.diameter = d;

        cell.face_ids.resize(n);
        for (int i = 0; i < n; ++i) {
            const int a = v[i], b = v[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                Face f;
                f.vertex_ids = {a, b};
                f.cells = {int(c), -1};
                const Point2 e = points_[b] - points_[a];
                f.length = e.norm();
                if (!(f.length > 0))
                    throw GeometryError("mesh: zero-length face");
                f.midpoint = 0.5 * (points_[a] + points_[b]);
                f.normal = Point2(e.y(), -e.x()) / f.length; // outward for a CCW loop
                edge_to_face.emplace(key, int(faces_.size()));
                cell.face_ids[i] = int(faces_.size());
                faces_.push_back(f);
            } else {
                Face& f = faces_[it->second];
                if (f.cells[1] != -1)
                    throw GeometryError("mesh: non-manifold edge shared by more than two cells");
                if (f.vertex_ids[0] != b)
                    throw GeometryError("mesh: inconsistent orientation across a shared edge");
                f.cells[1] = int(c);
                cell.face_ids[i] = it->second;
            }
        }
    }

    for (auto& f : faces_) {
        const Subdomain s0 = cells_[f.cells[0]].subdomain;
        if (f.cells[1] < 0) {
            f.cls = s0 == Subdomain::Fluid ? FaceClass::BoundaryFluid : FaceClass::BoundarySolid;
            continue;
        }
        const Subdomain s1 = cells_[f.cells[1]].subdomain;
        if (s0 == s1) {
            f.cls = s0 == Subdomain::Fluid ? FaceClass::InteriorFluid : FaceClass::InteriorSolid;
        } else {
            f.cls = FaceClass::Interface;
            if (s0 == Subdomain::Fluid) {
                std::swap(f.cells[0], f.cells[1]);
                std::swap(f.vertex_ids[0], f.vertex_ids[1]);
                f.normal = -f.normal;
            }
        }
    }

    // every face must appear in each adjacent cell's list
    for (int fi = 0; fi < int(faces_.size()); ++fi)
        for (int c : faces_[fi].cells)
            if (c >= 0 && std::find(cells_[c].face_ids.begin(), cells_[c].face_ids.end(), fi) ==
                              cells_[c].face_ids.end())
                throw GeometryError("mesh: face/cell connectivity mismatch");

    Point2 lo = points_[cells_[0].vertex_ids[0]], hi = lo;
    for (const auto& c : cells_)
        for (int v : c.vertex_ids) {
            lo = lo.cwiseMin(points_[v]);
            hi = hi.cwiseMax(points_[v]);
        }
    diameter_ = (hi - lo).norm();
}

int Mesh::count_cells(Subdomain s) const
{
    return int(std::count_if(cells_.begin(), cells_.end(), [s](const Cell& c) { return c.subdomain == s; }));
}

int Mesh::count_faces(FaceClass cls) const
{
    return int(std::count_if(faces_.begin(), faces_.end(), [cls](const Face& f) { return f.cls == cls; }));
}

double Mesh::max_cell_diameter() const
{
    double h = 0;
    for (const auto& c : cells_)
        h = std::max(h, c.diameter);
    return h;
}

double Mesh::normal_sign(int f, int c) const
{
    const Face& fc = faces_.at(f);
    if (fc.cells[0] == c)
        return 1.0;
    if (fc.cells[1] == c)
        return -1.0;
    throw GeometryError("face " + std::to_string(f) + " is not adjacent to cell " + std::to_string(c));
}

FaceGeometry Mesh::face_geometry(int f, int c) const
{
    const double s = normal_sign(f, c);
    const Face& fc = faces_[f];
    return {fc.midpoint, fc.length, s * fc.normal};
}

Point2 Mesh::face_tangent(int f) const
{
    const Face& fc = faces_[f];
    return (points_[fc.vertex_ids[1]] - points_[fc.vertex_ids[0]]) / fc.length;
}

bool Mesh::contains(int c, const Point2& x, double tol) const
{
    const auto& v = cells_[c].vertex_ids;
    const int n = int(v.size());
    const double scale = cells_[c].diameter;
    // winding number; boundary points count as inside
    int wn = 0;
    for (int i = 0; i < n; ++i) {
        const Point2& a = points_[v[i]];
        const Point2& b = points_[v[(i + 1) % n]];
        const Point2 e = b - a;
        const double side = cross(e, x - a);
        const double t = e.dot(x - a) / e.squaredNorm();
        if (std::abs(side) <= tol * scale * e.norm() && t >= -tol && t <= 1 + tol)
            return true;
        if (a.y() <= x.y()) {
            if (b.y() > x.y() && side > 0)
                ++wn;
        } else if (b.y() <= x.y() && side < 0) {
            --wn;
        }
    }
    return wn != 0;
}

std::optional<int> Mesh::locate(const Point2& x, std::optional<Subdomain> sub) const
{
    for (int c = 0; c < num_cells(); ++c) {
        if (sub && cells_[c].subdomain != *sub)
            continue;
        if (contains(c, x))
            return c;
    }
    return std::nullopt;
}

Mesh Mesh::retagged(Subdomain s) const
{
    std::vector<std::vector<int>> cv;
    for (const auto& c : cells_)
        cv.push_back(c.vertex_ids);
    return Mesh(points_, std::move(cv), std::vector<Subdomain>(cells_.size(), s));
}

namespace {

struct PointPool {
    std::vector<Point2> pts;
    std::map<std::pair<long long, long long>, int> index;
    double quantum;

    explicit PointPool(double q) : quantum(q) {}

    int get(const Point2& p)
    {
        const auto key = std::make_pair(std::llround(p.x() / quantum), std::llround(p.y() / quantum));
        auto it = index.find(key);
        if (it != index.end())
            return it->second;
        index.emplace(key, int(pts.size()));
        pts.push_back(p);
        return int(pts.size()) - 1;
    }
};

struct Grid {
    Rect r;
    int nx = 0, ny = 0;
    Subdomain tag;
};

Grid make_grid(int level, const Rect& r, Subdomain tag)
{
    if (!(r.width() > 0) || !(r.height() > 0))
        throw GeometryError("cartesian mesh: degenerate rectangle");
    const double h = std::ldexp(1.0, -level);
    Grid g{r, std::max(1, int(std::lround(r.width() / h))), std::max(1, int(std::lround(r.height() / h))), tag};
    return g;
}

void check_shared_edge(const Rect& a, const Rect& b)
{
    const double tol = 1e-12 * std::max({a.width(), a.height(), b.width(), b.height()});
    auto eq = [tol](double x, double y) { return std::abs(x - y) <= tol; };
    const bool horizontal = eq(a.x0, b.x0) && eq(a.x1, b.x1) && (eq(a.y0, b.y1) || eq(a.y1, b.y0));
    const bool vertical = eq(a.y0, b.y0) && eq(a.y1, b.y1) && (eq(a.x0, b.x1) || eq(a.x1, b.x0));
    if (!horizontal && !vertical)
        throw GeometryError("cartesian mesh: fluid and solid rectangles must share one full edge");
}

} // namespace

Mesh build_cartesian_mesh(int level, const Rect& fluid, const Rect& solid)
{
    if (level < 0)
        throw GeometryError("cartesian mesh: level must be >= 0");
    const Grid grids[2] = {make_grid(level, fluid, Subdomain::Fluid), make_grid(level, solid, Subdomain::Solid)};
    check_shared_edge(fluid, solid);
    const double hmin = std::min({fluid.width() / grids[0].nx, fluid.height() / grids[0].ny,
                                  solid.width() / grids[1].nx, solid.height() / grids[1].ny});
    PointPool pool(1e-6 * hmin);
    std::vector<std::vector<int>> cells;
    std::vector<Subdomain> tags;
    for (const auto& g : grids) {
        const double hx = g.r.width() / g.nx, hy = g.r.height() / g.ny;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                auto P = [&](int a, int b) { return pool.get(Point2(g.r.x0 + a * hx, g.r.y0 + b * hy)); };
                cells.push_back({P(i, j), P(i + 1, j), P(i + 1, j + 1), P(i, j + 1)});
                tags.push_back(g.tag);
            }
    }
    return Mesh(std::move(pool.pts), std::move(cells), std::move(tags));
}

Mesh read_polygonal_mesh(std::istream& in)
{
    auto fail = [](const std::string& m) { return GeometryError("polygonal mesh: " + m); };
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            const auto pos = line.find('#');
            if (pos != std::string::npos)
                line.erase(pos);
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                return true;
        }
        return false;
    };
    if (!next_line())
        throw fail("empty input");
    {
        std::istringstream ss(line);
        std::string magic;
        int version = 0;
        ss >> magic >> version;
        if (magic != "POLYMESH2D" || version != 1)
            throw fail("expected header 'POLYMESH2D 1'");
    }
    auto read_count = [&](const char* kw) {
        if (!next_line())
            throw fail(std::string("missing ") + kw + " section");
        std::istringstream ss(line);
        std::string k;
        long n = -1;
        ss >> k >> n;
        if (k != kw || n < 0)
            throw fail(std::string("expected '") + kw + " <n>'");
        return int(n);
    };
    const int np = read_count("POINTS");
    std::vector<Point2> pts(np);
    for (int i = 0; i < np; ++i) {
        if (!next_line())
            throw fail("truncated POINTS section");
        std::istringstream ss(line);
        if (!(ss >> pts[i].x() >> pts[i].y()))
            throw fail("bad point line: " + line);
    }
    const int nc = read_count("CELLS");
    std::vector<std::vector<int>> cells(nc);
    std::vector<Subdomain> tags(nc);
    for (int i = 0; i < nc; ++i) {
        if (!next_line())
            throw fail("truncated CELLS section");
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "F")
            tags[i] = Subdomain::Fluid;
        else if (tag == "S")
            tags[i] = Subdomain::Solid;
        else
            throw fail("cell tag must be F or S, got '" + tag + "'");
        int v;
        while (ss >> v)
            cells[i].push_back(v);
        if (!ss.eof())
            throw fail("bad cell line: " + line);
    }
    if (next_line())
        throw fail("trailing content after CELLS section");
    return Mesh(std::move(pts), std::move(cells), std::move(tags));
}

Mesh read_polygonal_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw GeometryError("cannot open mesh file " + path);
    return read_polygonal_mesh(in);
}

void write_polygonal_mesh(std::ostream& out, const Mesh& mesh)
{
    out << "POLYMESH2D 1\nPOINTS " << mesh.points().size() << '\n' << std::setprecision(17);
    for (const auto& p : mesh.points())
        out << p.x() << ' ' << p.y() << '\n';
    out << "CELLS " << mesh.num_cells() << '\n';
    for (const auto& c : mesh.cells()) {
        out << (c.subdomain == Subdomain::Fluid ? 'F' : 'S');
        for (int v : c.vertex_ids)
            out << ' ' << v;
        out << '\n';
    }
}

Mesh triangulate(const Mesh& mesh)
{
    std::vector<std::vector<int>> cells;
    std::vector<Subdomain> tags;
    std::vector<Point2> pts = mesh.points();
    for (const auto& c : mesh.cells()) {
        const auto& v = c.vertex_ids;
        if (v.size() == 3) {
            cells.push_back(v);
        } else if (v.size() == 4) {
            cells.push_back({v[0], v[1], v[2]});
            cells.push_back({v[0], v[2], v[3]});
            tags.push_back(c.subdomain);
        } else {
            const int ic = int(pts.size());
            pts.push_back(c.centroid);
            for (size_t i = 0; i < v.size(); ++i) {
                cells.push_back({v[i], v[(i + 1) % v.size()], ic});
                if (i + 1 < v.size())
                    tags.push_back(c.subdomain);
            }
        }
        tags.push_back(c.subdomain);
    }
    return Mesh(std::move(pts), std::move(cells), std::move(tags));
}

Mesh perturb(const Mesh& mesh, double amplitude, unsigned seed)
{
    const int np = int(mesh.points().size());
    std::vector<bool> fixed(np, false);
    std::vector<double> spacing(np, std::numeric_limits<double>::max());
    for (const auto& f : mesh.faces()) {
        for (int v : f.vertex_ids) {
            spacing[v] = std::min(spacing[v], f.length);
            if (f.cls != FaceClass::InteriorFluid && f.cls != FaceClass::InteriorSolid)
                fixed[v] = true;
        }
    }
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Point2> pts = mesh.points();
    for (int i = 0; i < np; ++i) {
        const double dx = U(gen), dy = U(gen);
        if (!fixed[i])
            pts[i] += amplitude * spacing[i] * Point2(dx, dy);
    }
    std::vector<std::vector<int>> cells;
    std::vector<Subdomain> tags;
    for (const auto& c : mesh.cells()) {
        cells.push_back(c.vertex_ids);
        tags.push_back(c.subdomain);
    }
    return Mesh(std::move(pts), std::move(cells), std::move(tags));
}

Mesh mixed_polygonal(int level, const Rect& fluid, const Rect& solid)
{
    check_shared_edge(fluid, solid);
    const Grid grids[2] = {make_grid(level, fluid, Subdomain::Fluid), make_grid(level, solid, Subdomain::Solid)};
    const double hmin = std::min({fluid.width() / grids[0].nx, fluid.height() / grids[0].ny,
                                  solid.width() / grids[1].nx, solid.height() / grids[1].ny});
    PointPool pool(1e-6 * hmin);
    std::vector<std::vector<int>> cells;
    std::vector<Subdomain> tags;
    for (const auto& g : grids) {
        const double hx = g.r.width() / g.nx, hy = g.r.height() / g.ny;
        auto P = [&](double a, double b) { return pool.get(Point2(g.r.x0 + a * hx, g.r.y0 + b * hy)); };
        // A merged pair keeps the midpoints of its top and bottom edges as vertices
        // so the rows above and below stay conforming.
        for (int j = 0; j < g.ny; ++j) {
            int i = 0;
            while (i < g.nx) {
                const int kind = (i + j) % 3;
                if (kind == 0 && i + 1 < g.nx) {
                    cells.push_back({P(i, j), P(i + 1, j), P(i + 2, j), P(i + 2, j + 1), P(i + 1, j + 1), P(i, j + 1)});
                    tags.push_back(g.tag);
                    i += 2;
                } else if (kind == 1) {
                    cells.push_back({P(i, j), P(i + 1, j), P(i + 1, j + 1)});
                    cells.push_back({P(i, j), P(i + 1, j + 1), P(i, j + 1)});
                    tags.push_back(g.tag);
                    tags.push_back(g.tag);
                    ++i;
                } else {
                    cells.push_back({P(i, j), P(i + 1, j), P(i + 1, j + 1), P(i, j + 1)});
                    tags.push_back(g.tag);
                    ++i;
                }
            }
        }
    }
    return Mesh(std::move(pool.pts), std::move(cells), std::move(tags));
}

} // namespace hhoea
