#include "hhoea/polybasis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace hhoea {

double QuadratureRule::total_weight() const
{
    double s = 0;
    for (double w : weights)
        s += w;
    return s;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard lk(mtx);
    if (n < 1)
        throw NumericalError("gauss_legendre: need at least one point");
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;

    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // recompute the derivative at the converged root
        double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
    }
    if (n == 1) {
        x[0] = 0;
        w[0] = 2;
    }
    return cache.emplace(n, std::make_pair(x, w)).first->second;
}

QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c, int degree)
{
    if (degree < 0)
        throw NumericalError("quadrature: negative degree");
    const Point2 e1 = b - a, e2 = c - a;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    if (!(det > 0))
        throw GeometryError("quadrature: inverted or degenerate triangle");
    // x = a + u((1-v)e1 + v e2), Jacobian det*u; u carries one extra degree
    const auto [gu, wu] = gauss_legendre((degree + 2 + 1) / 2);
    const auto [gv, wv] = gauss_legendre((degree + 1 + 1) / 2);
    QuadratureRule q;
    q.exactness = degree;
    for (size_t i = 0; i < gu.size(); ++i) {
        const double u = 0.5 * (gu[i] + 1);
        for (size_t j = 0; j < gv.size(); ++j) {
            const double v = 0.5 * (gv[j] + 1);
            q.points.push_back(a + u * ((1 - v) * e1 + v * e2));
            q.weights.push_back(0.25 * wu[i] * wv[j] * det * u);
        }
    }
    return q;
}

QuadratureRule polygon_quadrature(const std::vector<Point2>& v, const Point2& center, int degree)
{
    QuadratureRule q;
    q.exactness = degree;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
        QuadratureRule t;
        try {
            t = triangle_quadrature(center, v[i], v[(i + 1) % n], degree);
        } catch (const GeometryError&) {
            throw GeometryError("quadrature: polygon is not star-shaped with respect to its barycenter");
        }
        q.points.insert(q.points.end(), t.points.begin(), t.points.end());
        q.weights.insert(q.weights.end(), t.weights.begin(), t.weights.end());
    }
    return q;
}

QuadratureRule cell_quadrature(const Mesh& mesh, int cell, int degree)
{
    const Cell& c = mesh.cell(cell);
    std::vector<Point2> v;
    for (int id : c.vertex_ids)
        v.push_back(mesh.points()[id]);
    if (v.size() == 3)
        return triangle_quadrature(v[0], v[1], v[2], degree);
    return polygon_quadrature(v, c.centroid, degree);
}

QuadratureRule segment_quadrature(const Point2& a, const Point2& b, int degree)
{
    if (degree < 0)
        throw NumericalError("quadrature: negative degree");
    const double len = (b - a).norm();
    if (!(len > 0))
        throw GeometryError("quadrature: degenerate segment");
    const auto [g, w] = gauss_legendre((degree + 1 + 1) / 2);
    QuadratureRule q;
    q.exactness = degree;
    for (size_t i = 0; i < g.size(); ++i) {
        q.points.push_back(a + 0.5 * (g[i] + 1) * (b - a));
        q.weights.push_back(0.5 * len * w[i]);
    }
    return q;
}

QuadratureRule face_quadrature(const Mesh& mesh, int face, int degree)
{
    const Face& f = mesh.face(face);
    return segment_quadrature(mesh.points()[f.vertex_ids[0]], mesh.points()[f.vertex_ids[1]], degree);
}

CellBasis::CellBasis(int degree, const Point2& center, double scale)
    : degree_(degree), center_(center), scale_(scale)
{
    if (degree < 0)
        throw NumericalError("CellBasis: negative degree");
    for (int d = 0; d <= degree; ++d)
        for (int b = 0; b <= d; ++b)
            powers_.emplace_back(d - b, b);
}

CellBasis::CellBasis(const Mesh& mesh, int cell, int degree)
    : CellBasis(degree, mesh.cell(cell).centroid, mesh.cell(cell).diameter)
{
}

namespace {

// powers 0..deg of t
inline void power_table(double t, int deg, double* out)
{
    out[0] = 1;
    for (int i = 1; i <= deg; ++i)
        out[i] = out[i - 1] * t;
}

} // namespace

Vec CellBasis::eval(const Point2& x) const
{
    double px[32], py[32];
    power_table((x.x() - center_.x()) / scale_, degree_, px);
    power_table((x.y() - center_.y()) / scale_, degree_, py);
    Vec v(size());
    for (int i = 0; i < size(); ++i)
        v[i] = px[powers_[i].first] * py[powers_[i].second];
    return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> CellBasis::grad(const Point2& x) const
{
    double px[32], py[32];
    power_table((x.x() - center_.x()) / scale_, degree_, px);
    power_table((x.y() - center_.y()) / scale_, degree_, py);
    Eigen::Matrix<double, Eigen::Dynamic, 2> g(size(), 2);
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = powers_[i];
        g(i, 0) = a > 0 ? a * px[a - 1] * py[b] / scale_ : 0.0;
        g(i, 1) = b > 0 ? b * px[a] * py[b - 1] / scale_ : 0.0;
    }
    return g;
}

FaceBasis::FaceBasis(int degree, const Point2& midpoint, const Point2& tangent, double half_length)
    : degree_(degree), mid_(midpoint), tan_(tangent), half_(half_length)
{
    if (degree < 0)
        throw NumericalError("FaceBasis: negative degree");
}

FaceBasis::FaceBasis(const Mesh& mesh, int face, int degree)
    : FaceBasis(degree, mesh.face(face).midpoint, mesh.face_tangent(face), 0.5 * mesh.face(face).length)
{
}

Vec FaceBasis::eval(const Point2& x) const
{
    const double s = tan_.dot(x - mid_) / half_;
    Vec v(size());
    v[0] = 1;
    for (int j = 1; j <= degree_; ++j)
        v[j] = v[j - 1] * s;
    return v;
}

Eigen::Vector3d sym_components(const Eigen::Matrix2d& t)
{
    return {t(0, 0), t(1, 1), std::numbers::sqrt2 * 0.5 * (t(0, 1) + t(1, 0))};
}

Eigen::Matrix2d sym_tensor(const Eigen::Vector3d& c)
{
    const double o = c[2] / std::numbers::sqrt2;
    Eigen::Matrix2d t;
    t << c[0], o, o, c[1];
    return t;
}

Vec l2_project_tensor(const TensorField& f, const CellBasis& basis, const QuadratureRule& q)
{
    const int n = basis.size();
    const Mat M = mass_matrix(basis, q);
    Mat b = Mat::Zero(n, 3);
    for (int i = 0; i < q.size(); ++i) {
        const Eigen::Vector3d c = sym_components(f(q.points[i]));
        const Vec phi = basis.eval(q.points[i]);
        for (int k = 0; k < 3; ++k)
            b.col(k) += q.weights[i] * c[k] * phi;
    }
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("l2_project: singular mass matrix");
    Vec out(3 * n);
    for (int k = 0; k < 3; ++k)
        out.segment(k * n, n) = llt.solve(b.col(k));
    return out;
}

} // namespace hhoea
