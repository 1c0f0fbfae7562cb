#pragma once

#include "hhoea/common.hpp"
#include "hhoea/materials.hpp"
#include "hhoea/mesh.hpp"
#include "hhoea/polybasis.hpp"

#include <vector>

namespace hhoea {

enum class OrderMode { Equal, Mixed };

std::string to_string(OrderMode m);

struct DiscretizationSetting {
    int k = 1;                        // face degree
    OrderMode mode = OrderMode::Mixed; // cell degree k or k+1
    int alpha = 0;                    // tau scales like h~^-alpha
    double eta_f = 0.80;
    double eta_s = 1.38;

    int cell_degree() const { return mode == OrderMode::Equal ? k : k + 1; }
    void validate() const;

    // Weights giving the smallest spectral radius on the academic coupling.
    static double reference_eta_f(OrderMode m) { return m == OrderMode::Equal ? 0.88 : 0.80; }
    static double reference_eta_s(OrderMode m) { return m == OrderMode::Equal ? 1.54 : 1.38; }
    static DiscretizationSetting with_reference_weights(int k, OrderMode m, int alpha);
};

// Bases, quadratures and mass matrices of one cell.
struct LocalContext {
    int cell = -1;
    Subdomain subdomain = Subdomain::Fluid;
    int k = 1;
    double h_tilde = 1.0;
    CellBasis dual;   // degree k, for m and s
    CellBasis primal; // degree k', for p_T and v_T
    QuadratureRule quad;
    Mat M_dual;   // scalar Gram matrix, degree k
    Mat M_primal; // scalar Gram matrix, degree k'
    std::vector<int> faces;
    std::vector<Point2> normals; // outward
    std::vector<FaceBasis> face_bases;
    std::vector<QuadratureRule> face_quads;
    std::vector<Mat> M_face;

    int n_dual() const { return dual.size(); }
    int n_primal() const { return primal.size(); }
    int n_face() const { return k + 1; }
    int num_faces() const { return int(faces.size()); }
};

// Default exactness: 2(k+1)+2 on the cell and 2k+2 on faces, raised by `extra`.
LocalContext make_local_context(const Mesh& mesh, int cell, const DiscretizationSetting& s, int extra = 0);

double stabilization_parameter(double eta, double zeta, double h_tilde, int alpha);

// Columns of G and stabilization: [p_T | p_F for each face].
struct LocalAcousticOps {
    Mat G;    // 2 n_dual x n_local, component-major rows
    Mat B;    // (diag(M_dual, M_dual)) * G
    Mat stab; // includes tau
    double tau = 0;
    int n_cell = 0;

    Mat G_T() const { return G.leftCols(n_cell); }
    Mat G_TF() const { return G.rightCols(G.cols() - n_cell); }
    Mat S_T() const { return stab.topLeftCorner(n_cell, n_cell); }
    Mat S_TF() const { return stab.topRightCorner(n_cell, stab.cols() - n_cell); }
    Mat S_F() const { return stab.bottomRightCorner(stab.rows() - n_cell, stab.cols() - n_cell); }
};

// Columns: [v_T (x then y) | per face (x then y)].
struct LocalElasticOps {
    Mat E;    // 3 n_dual x n_local, rows (xx, yy, xy)
    Mat B;
    Mat stab;
    double tau = 0;
    int n_cell = 0;

    Mat E_T() const { return E.leftCols(n_cell); }
    Mat E_TF() const { return E.rightCols(E.cols() - n_cell); }
    Mat S_T() const { return stab.topLeftCorner(n_cell, n_cell); }
    Mat S_TF() const { return stab.topRightCorner(n_cell, stab.cols() - n_cell); }
    Mat S_F() const { return stab.bottomRightCorner(stab.rows() - n_cell, stab.cols() - n_cell); }
};

// Right-hand sides of the reconstructions (before the dual mass solve).
Mat grad_reconstruction_rhs(const LocalContext& ctx);
Mat sym_grad_reconstruction_rhs(const LocalContext& ctx);

// Unscaled stabilization sum_F D_F^T M_F D_F for `components` copies of the scalar spaces.
Mat stabilization_matrix(const LocalContext& ctx, int components);
// sum_F ||Pi_F(u_T) - u_F||^2 evaluated face by face (no tau), free of the
// cancellation in u^T S u
double stabilization_energy(const LocalContext& ctx, int components, const Vec& u);

LocalAcousticOps acoustic_operators(const LocalContext& ctx, const DiscretizationSetting& s,
                                    const Materials& mat);
LocalElasticOps elastic_operators(const LocalContext& ctx, const DiscretizationSetting& s,
                                  const Materials& mat);

// Single-cell convenience entry points.
LocalAcousticOps grad_reconstruction(const Mesh& mesh, int cell, const DiscretizationSetting& s,
                                     const Materials& mat);
LocalElasticOps sym_grad_reconstruction(const Mesh& mesh, int cell, const DiscretizationSetting& s,
                                        const Materials& mat);

// Local HHO interpolates: cell projection onto degree k', face projections onto degree k.
Vec hho_interpolate(const LocalContext& ctx, const ScalarField& f);
Vec hho_interpolate(const LocalContext& ctx, const VectorField& f);

// Vector field m in P^k(T)^2 written as P m + W a, with W an M-orthonormal basis of
// grad P^{k+1}(T) and Z an M-orthonormal basis of its complement.
struct HPlusSplitting {
    Mat W;
    Mat Z;
    Mat image; // coefficient images of the gradients (or symmetric gradients) of the test space
    Mat gram;  // block-diagonal dual mass matrix
};

HPlusSplitting hplus_splitting_acoustic(const LocalContext& ctx);
HPlusSplitting hplus_splitting_elastic(const LocalContext& ctx);

Vec hplus_interpolate_acoustic(const LocalContext& ctx, const VectorField& m);
Vec hplus_interpolate_elastic(const LocalContext& ctx, const TensorField& s);

// Residuals of the two defining conditions, scaled by the size of the data.
struct HPlusResiduals {
    double orthogonality = 0;
    double gradient_test = 0;
};
HPlusResiduals hplus_residuals_acoustic(const LocalContext& ctx, const VectorField& m, const Vec& coeffs);
HPlusResiduals hplus_residuals_elastic(const LocalContext& ctx, const TensorField& s, const Vec& coeffs);

} // namespace hhoea
