#pragma once

#include "hhoea/common.hpp"
#include "hhoea/mesh.hpp"

#include <utility>
#include <vector>

namespace hhoea {

struct QuadratureRule {
    std::vector<Point2> points;
    std::vector<double> weights;
    int exactness = 0;
    int size() const { return int(weights.size()); }
    double total_weight() const;
};

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int npoints);

// Collapsed tensor Gauss rule on the triangle (a, b, c).
QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c, int degree);
// Fan of triangles from `center`; throws if a fan triangle is inverted.
QuadratureRule polygon_quadrature(const std::vector<Point2>& vertices, const Point2& center, int degree);
QuadratureRule cell_quadrature(const Mesh& mesh, int cell, int degree);
// ceil((degree+1)/2) Gauss points mapped to [a, b].
QuadratureRule segment_quadrature(const Point2& a, const Point2& b, int degree);
QuadratureRule face_quadrature(const Mesh& mesh, int face, int degree);

inline int scalar_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

// (x-xc)^a (y-yc)^b / h^(a+b), a+b <= degree, graded order (d,0), (d-1,1), ..., (0,d).
class CellBasis {
public:
    CellBasis() = default;
    CellBasis(int degree, const Point2& center, double scale);
    CellBasis(const Mesh& mesh, int cell, int degree);

    int degree() const { return degree_; }
    int size() const { return int(powers_.size()); }
    const Point2& center() const { return center_; }
    double scale() const { return scale_; }
    const std::vector<std::pair<int, int>>& powers() const { return powers_; }

    Vec eval(const Point2& x) const;
    // Row i is the gradient of function i.
    Eigen::Matrix<double, Eigen::Dynamic, 2> grad(const Point2& x) const;

private:
    int degree_ = 0;
    Point2 center_ = Point2::Zero();
    double scale_ = 1.0;
    std::vector<std::pair<int, int>> powers_;
};

// (s / half_length)^j with s the signed arclength from the midpoint along the
// face tangent (vertex 0 to vertex 1). The basis is shared by both sides.
class FaceBasis {
public:
    FaceBasis() = default;
    FaceBasis(int degree, const Point2& midpoint, const Point2& tangent, double half_length);
    FaceBasis(const Mesh& mesh, int face, int degree);

    int degree() const { return degree_; }
    int size() const { return degree_ + 1; }
    Vec eval(const Point2& x) const;

private:
    int degree_ = 0;
    Point2 mid_ = Point2::Zero();
    Point2 tan_ = Point2::UnitX();
    double half_ = 1.0;
};

// Values of all basis functions at all rule points: nq x n.
template <class Basis>
Mat eval_matrix(const Basis& basis, const QuadratureRule& q)
{
    Mat V(q.size(), basis.size());
    for (int i = 0; i < q.size(); ++i)
        V.row(i) = basis.eval(q.points[i]).transpose();
    return V;
}

// Gram matrix; the rule must integrate products of two basis functions exactly.
template <class Basis>
Mat mass_matrix(const Basis& basis, const QuadratureRule& q)
{
    if (q.exactness < 2 * basis.degree())
        throw NumericalError("mass_matrix: quadrature exactness below 2*degree");
    const Mat V = eval_matrix(basis, q);
    Mat M = V.transpose() * Eigen::Map<const Vec>(q.weights.data(), q.size()).asDiagonal() * V;
    return 0.5 * (M + M.transpose());
}

// Cross Gram matrix (rows: a, columns: b).
template <class BasisA, class BasisB>
Mat cross_mass(const BasisA& a, const BasisB& b, const QuadratureRule& q)
{
    const Mat Va = eval_matrix(a, q), Vb = eval_matrix(b, q);
    return Va.transpose() * Eigen::Map<const Vec>(q.weights.data(), q.size()).asDiagonal() * Vb;
}

template <class Basis>
Vec l2_project(const ScalarField& f, const Basis& basis, const QuadratureRule& q)
{
    const Mat M = mass_matrix(basis, q);
    Vec b = Vec::Zero(basis.size());
    for (int i = 0; i < q.size(); ++i)
        b += q.weights[i] * f(q.points[i]) * basis.eval(q.points[i]);
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("l2_project: singular mass matrix");
    return llt.solve(b);
}

// Component-major vector coefficients: [x-coefficients, y-coefficients].
template <class Basis>
Vec l2_project_vector(const VectorField& f, const Basis& basis, const QuadratureRule& q)
{
    const int n = basis.size();
    const Mat M = mass_matrix(basis, q);
    Mat b = Mat::Zero(n, 2);
    for (int i = 0; i < q.size(); ++i) {
        const Eigen::Vector2d v = f(q.points[i]);
        const Vec phi = basis.eval(q.points[i]);
        b.col(0) += q.weights[i] * v.x() * phi;
        b.col(1) += q.weights[i] * v.y() * phi;
    }
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("l2_project: singular mass matrix");
    Vec out(2 * n);
    out.head(n) = llt.solve(b.col(0));
    out.tail(n) = llt.solve(b.col(1));
    return out;
}

// Symmetric tensor components (xx, yy, xy) against basis tensors
// E_xx, E_yy and E_xy = (e_x e_y^T + e_y e_x^T)/sqrt(2).
Eigen::Vector3d sym_components(const Eigen::Matrix2d& t);
Eigen::Matrix2d sym_tensor(const Eigen::Vector3d& c);

Vec l2_project_tensor(const TensorField& f, const CellBasis& basis, const QuadratureRule& q);

} // namespace hhoea
