#pragma once

#include "hhoea/common.hpp"
#include "hhoea/hho_local.hpp"
#include "hhoea/materials.hpp"
#include "hhoea/mesh.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <vector>

namespace hhoea {

// Cell unknowns: [m (fluid cells) | p_T (fluid cells) | s (solid cells) | v_T (solid cells)].
// Face unknowns: [p_F (fluid and interface faces) | v_F (solid and interface faces)].
// Outer boundary faces are Dirichlet and numbered separately: [p_D | v_D].
struct DofMap {
    int nd = 0; // scalar dual dimension (degree k)
    int np = 0; // scalar primal dimension (degree k')
    int nf = 0; // scalar face dimension (k+1)

    int n_fluid_cells = 0, n_solid_cells = 0;
    std::vector<int> cell_slot; // rank of a cell within its subdomain

    int off_m = 0, off_p = 0, off_s = 0, off_v = 0, n_cell_dofs = 0;

    std::vector<int> face_p, face_v; // free face slots, -1 if absent
    int n_pF = 0, n_vF = 0;
    int off_pF = 0, off_vF = 0, n_face_dofs = 0;

    std::vector<int> dir_p, dir_v; // Dirichlet face slots, -1 if absent
    int n_pD = 0, n_vD = 0;
    int off_pD = 0, off_vD = 0, n_dir_dofs = 0;

    int m_begin(int c) const { return off_m + cell_slot[c] * 2 * nd; }
    int p_begin(int c) const { return off_p + cell_slot[c] * np; }
    int s_begin(int c) const { return off_s + cell_slot[c] * 3 * nd; }
    int v_begin(int c) const { return off_v + cell_slot[c] * 2 * np; }
    int pF_begin(int f) const { return off_pF + face_p[f] * nf; }
    int vF_begin(int f) const { return off_vF + face_v[f] * 2 * nf; }
    int pD_begin(int f) const { return off_pD + dir_p[f] * nf; }
    int vD_begin(int f) const { return off_vD + dir_v[f] * 2 * nf; }

    // all cell (resp. face) unknowns of one entity, in increasing order
    std::vector<int> cell_dofs(const Mesh& mesh, int c) const;
    std::vector<int> face_dofs(int f) const;

    static DofMap build(const Mesh& mesh, const DiscretizationSetting& s);
};

// Per-cell quadrature with basis values, reused for loads, projections and errors.
struct CellCache {
    QuadratureRule quad;
    Mat dual_vals;   // nq x nd
    Mat primal_vals; // nq x np
};

struct BlockSystem {
    const Mesh* mesh = nullptr;
    DiscretizationSetting setting;
    Materials materials;
    DofMap dofs;

    // M dU/dt + K_TT U + K_TF U_F + K_TD U_D = F,  K_FT U + K_FF U_F = 0
    SpMat M, M_inv;
    SpMat K_TT, K_TF, K_FT, K_FF, K_TD;
    SpMat K_FF_inv;
    SpMat S;            // stabilization over [cells | faces]
    SpMat Q;            // interface coupling, p_F rows x v_F columns (face numbering)
    Eigen::Matrix3d A_s; // C^-1 in tensor components

    std::vector<std::vector<int>> cell_groups; // cell dofs coupled by K_TT and M
    std::vector<std::vector<int>> face_groups; // face dofs coupled by K_FF

    std::vector<LocalContext> contexts;
    std::vector<CellCache> error_cache; // raised exactness

    int n_cells() const { return dofs.n_cell_dofs; }
    int n_faces() const { return dofs.n_face_dofs; }
    // [[K_TT, K_TF], [K_FT, K_FF]]
    SpMat full_stiffness() const;
    // Face values satisfying the algebraic constraint for the cell state U.
    Vec solve_faces(const Vec& U) const;
};

BlockSystem assemble(const Mesh& mesh, const DiscretizationSetting& s, const Materials& mat);

// Q[i, j] = int_F psi_i (theta_j . n_Gamma) over interface faces.
SpMat coupling_matrix(const Mesh& mesh, const DiscretizationSetting& s);

// Cell test integrals of the fluid and solid sources, one precomputed vector per term.
class LoadAssembler {
public:
    LoadAssembler() = default;
    LoadAssembler(const BlockSystem& sys, const ScalarST& f_fluid, const VectorST& f_solid);
    bool empty() const { return terms_.empty(); }
    Vec operator()(double t) const;

private:
    int n_ = 0;
    std::vector<std::pair<std::function<double(double)>, Vec>> terms_;
};

// L2 face projections of the Dirichlet traces of p (fluid) and v (solid).
class DirichletData {
public:
    DirichletData() = default;
    DirichletData(const BlockSystem& sys, const ScalarST& p, const VectorST& v);
    bool empty() const { return terms_.empty(); }
    Vec values(double t) const;
    // Lift K_TD u_D(t).
    Vec lift(const BlockSystem& sys, double t) const;

private:
    int n_ = 0;
    std::vector<std::pair<std::function<double(double)>, Vec>> terms_;
};

// Projection of one boundary face; rejects non-boundary faces.
Vec dirichlet_face_values(const Mesh& mesh, int face, const DiscretizationSetting& s, const ScalarField& g);

// K_TT - K_TF K_FF^-1 K_FT using the per-face inverse blocks.
SpMat schur_complement(const BlockSystem& sys);

// Solves [[M + sigma K_TT, sigma K_TF], [sigma K_FT, sigma K_FF]] [X; U_F] = [b_T; b_F]
// by eliminating the cell unknowns cell by cell.
class CondensedStageSolver {
public:
    CondensedStageSolver(const BlockSystem& sys, double sigma);
    double sigma() const { return sigma_; }
    void solve(const Vec& b_T, const Vec& b_F, Vec& X, Vec& U_F) const;

private:
    const BlockSystem* sys_;
    double sigma_;
    SpMat A_inv_;   // (M + sigma K_TT)^-1, block diagonal
    SpMat AinvKTF_; // A^-1 K_TF
    std::unique_ptr<Eigen::SparseLU<SpMat>> lu_;
};

// Cell-unknown vector of L2 projections of the given fields; with `hplus` the
// dual components use the H+ interpolates instead.
struct CellFields {
    VectorField m;
    ScalarField p;
    TensorField s;
    VectorField v;
};
Vec project_cells(const BlockSystem& sys, const CellFields& f, bool hplus = false);
// L2 projections of p and v onto the free face unknowns.
Vec project_faces(const BlockSystem& sys, const ScalarField& p, const VectorField& v);

} // namespace hhoea
