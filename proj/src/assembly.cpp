#include "hhoea/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hhoea {

std::vector<int> DofMap::cell_dofs(const Mesh& mesh, int c) const
{
    std::vector<int> out;
    if (mesh.cell(c).subdomain == Subdomain::Fluid) {
        for (int i = 0; i < 2 * nd; ++i)
            out.push_back(m_begin(c) + i);
        for (int i = 0; i < np; ++i)
            out.push_back(p_begin(c) + i);
    } else {
        for (int i = 0; i < 3 * nd; ++i)
            out.push_back(s_begin(c) + i);
        for (int i = 0; i < 2 * np; ++i)
            out.push_back(v_begin(c) + i);
    }
    return out;
}

std::vector<int> DofMap::face_dofs(int f) const
{
    std::vector<int> out;
    if (face_p[f] >= 0)
        for (int i = 0; i < nf; ++i)
            out.push_back(pF_begin(f) + i);
    if (face_v[f] >= 0)
        for (int i = 0; i < 2 * nf; ++i)
            out.push_back(vF_begin(f) + i);
    return out;
}

DofMap DofMap::build(const Mesh& mesh, const DiscretizationSetting& s)
{
    DofMap d;
    d.nd = scalar_dim(s.k);
    d.np = scalar_dim(s.cell_degree());
    d.nf = s.k + 1;
    d.cell_slot.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c)
        d.cell_slot[c] = mesh.cell(c).subdomain == Subdomain::Fluid ? d.n_fluid_cells++ : d.n_solid_cells++;
    d.off_m = 0;
    d.off_p = d.n_fluid_cells * 2 * d.nd;
    d.off_s = d.off_p + d.n_fluid_cells * d.np;
    d.off_v = d.off_s + d.n_solid_cells * 3 * d.nd;
    d.n_cell_dofs = d.off_v + d.n_solid_cells * 2 * d.np;

    const int nF = mesh.num_faces();
    d.face_p.assign(nF, -1);
    d.face_v.assign(nF, -1);
    d.dir_p.assign(nF, -1);
    d.dir_v.assign(nF, -1);
    for (int f = 0; f < nF; ++f) {
        switch (mesh.face(f).cls) {
        case FaceClass::InteriorFluid: d.face_p[f] = d.n_pF++; break;
        case FaceClass::InteriorSolid: d.face_v[f] = d.n_vF++; break;
        case FaceClass::Interface:
            d.face_p[f] = d.n_pF++;
            d.face_v[f] = d.n_vF++;
            break;
        case FaceClass::BoundaryFluid: d.dir_p[f] = d.n_pD++; break;
        case FaceClass::BoundarySolid: d.dir_v[f] = d.n_vD++; break;
        }
    }
    d.off_pF = 0;
    d.off_vF = d.n_pF * d.nf;
    d.n_face_dofs = d.off_vF + d.n_vF * 2 * d.nf;
    d.off_pD = 0;
    d.off_vD = d.n_pD * d.nf;
    d.n_dir_dofs = d.off_vD + d.n_vD * 2 * d.nf;
    return d;
}

SpMat BlockSystem::full_stiffness() const
{
    const int nT = n_cells(), nF = n_faces();
    std::vector<Triplet> t;
    auto put = [&t](const SpMat& A, int r0, int c0) {
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it)
                t.emplace_back(int(it.row()) + r0, int(it.col()) + c0, it.value());
    };
    put(K_TT, 0, 0);
    put(K_TF, 0, nT);
    put(K_FT, nT, 0);
    put(K_FF, nT, nT);
    SpMat K(nT + nF, nT + nF);
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

Vec BlockSystem::solve_faces(const Vec& U) const
{
    if (n_faces() == 0)
        return Vec();
    return -(K_FF_inv * (K_FT * U));
}

namespace {

// Global index in one of the three unknown spaces.
enum class Space { T, F, D };
struct Idx {
    Space space;
    int i;
};

struct Scatter {
    int nT, nF, nD;
    std::vector<Triplet> TT, TF, FT, FF, TD, S;

    void add(Idx r, Idx c, double v)
    {
        if (v == 0.0)
            return;
        if (r.space == Space::D)
            return; // eliminated rows
        if (r.space == Space::T) {
            if (c.space == Space::T)
                TT.emplace_back(r.i, c.i, v);
            else if (c.space == Space::F)
                TF.emplace_back(r.i, c.i, v);
            else
                TD.emplace_back(r.i, c.i, v);
        } else {
            if (c.space == Space::T)
                FT.emplace_back(r.i, c.i, v);
            else if (c.space == Space::F)
                FF.emplace_back(r.i, c.i, v);
            // face rows never reach Dirichlet columns: stabilization is facewise
        }
    }

    void add_stab(Idx r, Idx c, double v)
    {
        add(r, c, v);
        if (r.space == Space::D || c.space == Space::D || v == 0.0)
            return;
        S.emplace_back(r.space == Space::T ? r.i : nT + r.i, c.space == Space::T ? c.i : nT + c.i, v);
    }
};

// Local primal columns -> global indices.
std::vector<Idx> primal_indices(const DofMap& d, const LocalContext& ctx)
{
    std::vector<Idx> idx;
    const bool fluid = ctx.subdomain == Subdomain::Fluid;
    const int comps = fluid ? 1 : 2;
    const int base = fluid ? d.p_begin(ctx.cell) : d.v_begin(ctx.cell);
    for (int i = 0; i < comps * d.np; ++i)
        idx.push_back({Space::T, base + i});
    for (int f : ctx.faces) {
        const bool dir = fluid ? d.dir_p[f] >= 0 : d.dir_v[f] >= 0;
        const int b = dir ? (fluid ? d.pD_begin(f) : d.vD_begin(f)) : (fluid ? d.pF_begin(f) : d.vF_begin(f));
        for (int i = 0; i < comps * d.nf; ++i)
            idx.push_back({dir ? Space::D : Space::F, b + i});
    }
    return idx;
}

SpMat from_triplets(int r, int c, const std::vector<Triplet>& t)
{
    SpMat A(r, c);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    return A;
}

// Inverts the dense diagonal blocks A(g, g) for each group g.
SpMat invert_blocks(const SpMat& A, const std::vector<std::vector<int>>& groups, const char* what)
{
    std::vector<Mat> inv(groups.size());
    parallel_for(int(groups.size()), [&](int g) {
        const auto& ids = groups[g];
        const int n = int(ids.size());
        Mat B = Mat::Zero(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                B(i, j) = A.coeff(ids[i], ids[j]);
        Eigen::PartialPivLU<Mat> lu(B);
        const double rc = lu.rcond();
        if (!(rc > 1e-15))
            throw NumericalError(std::string("singular ") + what + " block");
        inv[g] = lu.inverse();
    });
    std::vector<Triplet> t;
    for (size_t g = 0; g < groups.size(); ++g) {
        const auto& ids = groups[g];
        for (size_t j = 0; j < ids.size(); ++j)
            for (size_t i = 0; i < ids.size(); ++i)
                if (inv[g](i, j) != 0.0)
                    t.emplace_back(ids[i], ids[j], inv[g](i, j));
    }
    return from_triplets(int(A.rows()), int(A.cols()), t);
}

struct CellResult {
    Mat B;    // reconstruction right-hand side
    Mat stab; // scaled stabilization
};

} // namespace

SpMat coupling_matrix(const Mesh& mesh, const DiscretizationSetting& s)
{
    const DofMap d = DofMap::build(mesh, s);
    std::vector<Triplet> t;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.face(f).cls != FaceClass::Interface)
            continue;
        const FaceBasis fb(mesh, f, s.k);
        const Mat Mf = mass_matrix(fb, face_quadrature(mesh, f, 2 * s.k + 2));
        const Point2 n = mesh.face(f).normal;
        for (int c = 0; c < 2; ++c)
            for (int j = 0; j < d.nf; ++j)
                for (int i = 0; i < d.nf; ++i)
                    t.emplace_back(d.face_p[f] * d.nf + i, d.face_v[f] * 2 * d.nf + c * d.nf + j, Mf(i, j) * n[c]);
    }
    return from_triplets(d.n_pF * d.nf, d.n_vF * 2 * d.nf, t);
}

BlockSystem assemble(const Mesh& mesh, const DiscretizationSetting& s, const Materials& mat)
{
    s.validate();
    mat.validate();
    if (mesh.num_cells() == 0)
        throw GeometryError("assemble: empty mesh");

    BlockSystem sys;
    sys.mesh = &mesh;
    sys.setting = s;
    sys.materials = mat;
    sys.dofs = DofMap::build(mesh, s);
    const DofMap& d = sys.dofs;
    sys.A_s = HookeTensor{mat.lambda, mat.mu}.inverse_matrix();

    const int ncell = mesh.num_cells();
    sys.contexts.resize(ncell);
    sys.error_cache.resize(ncell);
    std::vector<CellResult> local(ncell);
    parallel_for(ncell, [&](int c) {
        sys.contexts[c] = make_local_context(mesh, c, s);
        const LocalContext& ctx = sys.contexts[c];
        if (ctx.subdomain == Subdomain::Fluid) {
            auto ops = acoustic_operators(ctx, s, mat);
            local[c] = {std::move(ops.B), std::move(ops.stab)};
        } else {
            auto ops = elastic_operators(ctx, s, mat);
            local[c] = {std::move(ops.B), std::move(ops.stab)};
        }
        CellCache& cc = sys.error_cache[c];
        cc.quad = cell_quadrature(mesh, c, 2 * s.cell_degree() + 6);
        cc.dual_vals = eval_matrix(ctx.dual, cc.quad);
        cc.primal_vals = eval_matrix(ctx.primal, cc.quad);
    });

    Scatter sc{d.n_cell_dofs, d.n_face_dofs, d.n_dir_dofs, {}, {}, {}, {}, {}, {}};
    std::vector<Triplet> mass;
    for (int c = 0; c < ncell; ++c) {
        const LocalContext& ctx = sys.contexts[c];
        const bool fluid = ctx.subdomain == Subdomain::Fluid;
        const std::vector<Idx> cols = primal_indices(d, ctx);
        const Mat& B = local[c].B;
        const int dual_base = fluid ? d.m_begin(c) : d.s_begin(c);
        for (int r = 0; r < B.rows(); ++r)
            for (int j = 0; j < B.cols(); ++j) {
                const double v = B(r, j);
                sc.add({Space::T, dual_base + r}, cols[j], -v);
                sc.add(cols[j], {Space::T, dual_base + r}, v);
            }
        const Mat& St = local[c].stab;
        for (int i = 0; i < St.rows(); ++i)
            for (int j = 0; j < St.cols(); ++j)
                sc.add_stab(cols[i], cols[j], St(i, j));

        const int nd = d.nd, np = d.np;
        if (fluid) {
            for (int a = 0; a < 2; ++a)
                for (int j = 0; j < nd; ++j)
                    for (int i = 0; i < nd; ++i)
                        mass.emplace_back(dual_base + a * nd + i, dual_base + a * nd + j, mat.rho_f * ctx.M_dual(i, j));
            for (int j = 0; j < np; ++j)
                for (int i = 0; i < np; ++i)
                    mass.emplace_back(d.p_begin(c) + i, d.p_begin(c) + j, ctx.M_primal(i, j) / mat.kappa);
        } else {
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int j = 0; j < nd; ++j)
                        for (int i = 0; i < nd; ++i)
                            mass.emplace_back(dual_base + a * nd + i, dual_base + b * nd + j,
                                              sys.A_s(a, b) * ctx.M_dual(i, j));
            for (int a = 0; a < 2; ++a)
                for (int j = 0; j < np; ++j)
                    for (int i = 0; i < np; ++i)
                        mass.emplace_back(d.v_begin(c) + a * np + i, d.v_begin(c) + a * np + j,
                                          mat.rho_s * ctx.M_primal(i, j));
        }
    }

    sys.Q = coupling_matrix(mesh, s);
    for (int k = 0; k < sys.Q.outerSize(); ++k)
        for (SpMat::InnerIterator it(sys.Q, k); it; ++it) {
            const int r = d.off_pF + int(it.row()), c = d.off_vF + int(it.col());
            sc.add({Space::F, r}, {Space::F, c}, it.value());
            sc.add({Space::F, c}, {Space::F, r}, -it.value());
        }

    const int nT = d.n_cell_dofs, nF = d.n_face_dofs, nD = d.n_dir_dofs;
    sys.K_TT = from_triplets(nT, nT, sc.TT);
    sys.K_TF = from_triplets(nT, nF, sc.TF);
    sys.K_FT = from_triplets(nF, nT, sc.FT);
    sys.K_FF = from_triplets(nF, nF, sc.FF);
    sys.K_TD = from_triplets(nT, nD, sc.TD);
    sys.S = from_triplets(nT + nF, nT + nF, sc.S);
    sys.M = from_triplets(nT, nT, mass);

    for (int c = 0; c < ncell; ++c)
        sys.cell_groups.push_back(d.cell_dofs(mesh, c));
    for (int f = 0; f < mesh.num_faces(); ++f) {
        auto g = d.face_dofs(f);
        if (!g.empty())
            sys.face_groups.push_back(std::move(g));
    }
    sys.M_inv = invert_blocks(sys.M, sys.cell_groups, "cell mass");
    sys.K_FF_inv = invert_blocks(sys.K_FF, sys.face_groups, "face stiffness");
    return sys;
}

LoadAssembler::LoadAssembler(const BlockSystem& sys, const ScalarST& f_fluid, const VectorST& f_solid)
    : n_(sys.n_cells())
{
    const Mesh& mesh = *sys.mesh;
    const DofMap& d = sys.dofs;
    for (const auto& term : f_fluid.terms) {
        Vec b = Vec::Zero(n_);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            if (mesh.cell(c).subdomain != Subdomain::Fluid)
                continue;
            const CellCache& cc = sys.error_cache[c];
            for (int q = 0; q < cc.quad.size(); ++q)
                b.segment(d.p_begin(c), d.np) +=
                    cc.quad.weights[q] * term.space(cc.quad.points[q]) * cc.primal_vals.row(q).transpose();
        }
        terms_.emplace_back(term.time, std::move(b));
    }
    for (const auto& term : f_solid.terms) {
        Vec b = Vec::Zero(n_);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            if (mesh.cell(c).subdomain != Subdomain::Solid)
                continue;
            const CellCache& cc = sys.error_cache[c];
            for (int q = 0; q < cc.quad.size(); ++q) {
                const Eigen::Vector2d f = term.space(cc.quad.points[q]);
                for (int a = 0; a < 2; ++a)
                    b.segment(d.v_begin(c) + a * d.np, d.np) +=
                        cc.quad.weights[q] * f[a] * cc.primal_vals.row(q).transpose();
            }
        }
        terms_.emplace_back(term.time, std::move(b));
    }
}

Vec LoadAssembler::operator()(double t) const
{
    Vec out = Vec::Zero(n_);
    for (const auto& [a, b] : terms_)
        out += a(t) * b;
    return out;
}

Vec dirichlet_face_values(const Mesh& mesh, int face, const DiscretizationSetting& s, const ScalarField& g)
{
    const FaceClass cls = mesh.face(face).cls;
    if (cls != FaceClass::BoundaryFluid && cls != FaceClass::BoundarySolid)
        throw GeometryError("boundary data requested on non-boundary face " + std::to_string(face) + " (" +
                            to_string(cls) + ")");
    return l2_project(g, FaceBasis(mesh, face, s.k), face_quadrature(mesh, face, 2 * s.k + 6));
}

DirichletData::DirichletData(const BlockSystem& sys, const ScalarST& p, const VectorST& v)
    : n_(sys.dofs.n_dir_dofs)
{
    const Mesh& mesh = *sys.mesh;
    const DofMap& d = sys.dofs;
    for (const auto& term : p.terms) {
        Vec b = Vec::Zero(n_);
        for (int f = 0; f < mesh.num_faces(); ++f)
            if (d.dir_p[f] >= 0)
                b.segment(d.pD_begin(f), d.nf) = dirichlet_face_values(mesh, f, sys.setting, term.space);
        terms_.emplace_back(term.time, std::move(b));
    }
    for (const auto& term : v.terms) {
        Vec b = Vec::Zero(n_);
        for (int f = 0; f < mesh.num_faces(); ++f)
            if (d.dir_v[f] >= 0)
                for (int a = 0; a < 2; ++a)
                    b.segment(d.vD_begin(f) + a * d.nf, d.nf) = dirichlet_face_values(
                        mesh, f, sys.setting, [&](const Point2& x) { return term.space(x)[a]; });
        terms_.emplace_back(term.time, std::move(b));
    }
}

Vec DirichletData::values(double t) const
{
    Vec out = Vec::Zero(n_);
    for (const auto& [a, b] : terms_)
        out += a(t) * b;
    return out;
}

Vec DirichletData::lift(const BlockSystem& sys, double t) const
{
    if (terms_.empty())
        return Vec::Zero(sys.n_cells());
    return sys.K_TD * values(t);
}

SpMat schur_complement(const BlockSystem& sys)
{
    if (sys.n_faces() == 0)
        return sys.K_TT;
    const SpMat X = sys.K_FF_inv * sys.K_FT;
    SpMat out = sys.K_TT - sys.K_TF * X;
    out.prune(0.0);
    return out;
}

CondensedStageSolver::CondensedStageSolver(const BlockSystem& sys, double sigma) : sys_(&sys), sigma_(sigma)
{
    if (!(sigma > 0))
        throw NumericalError("stage factorization requires sigma > 0");
    const SpMat A = sys.M + sigma * sys.K_TT;
    A_inv_ = invert_blocks(A, sys.cell_groups, "stage cell");
    if (sys.n_faces() == 0)
        return;
    AinvKTF_ = A_inv_ * sys.K_TF;
    SpMat Sf = sigma * sys.K_FF - (sigma * sigma) * (sys.K_FT * AinvKTF_);
    Sf.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
    lu_->analyzePattern(Sf);
    lu_->factorize(Sf);
    if (lu_->info() != Eigen::Success)
        throw NumericalError("stage face system factorization failed: " + lu_->lastErrorMessage());
}

void CondensedStageSolver::solve(const Vec& b_T, const Vec& b_F, Vec& X, Vec& U_F) const
{
    const Vec y = A_inv_ * b_T;
    if (!lu_) {
        X = y;
        U_F = Vec();
        return;
    }
    U_F = lu_->solve(b_F - sigma_ * (sys_->K_FT * y));
    if (lu_->info() != Eigen::Success)
        throw NumericalError("stage face solve failed");
    X = y - sigma_ * (AinvKTF_ * U_F);
}

Vec project_cells(const BlockSystem& sys, const CellFields& f, bool hplus)
{
    const Mesh& mesh = *sys.mesh;
    const DofMap& d = sys.dofs;
    Vec U = Vec::Zero(sys.n_cells());
    parallel_for(mesh.num_cells(), [&](int c) {
        const LocalContext& ctx = sys.contexts[c];
        if (ctx.subdomain == Subdomain::Fluid) {
            if (f.m)
                U.segment(d.m_begin(c), 2 * d.nd) =
                    hplus ? hplus_interpolate_acoustic(ctx, f.m) : l2_project_vector(f.m, ctx.dual, ctx.quad);
            if (f.p)
                U.segment(d.p_begin(c), d.np) = l2_project(f.p, ctx.primal, ctx.quad);
        } else {
            if (f.s)
                U.segment(d.s_begin(c), 3 * d.nd) =
                    hplus ? hplus_interpolate_elastic(ctx, f.s) : l2_project_tensor(f.s, ctx.dual, ctx.quad);
            if (f.v)
                U.segment(d.v_begin(c), 2 * d.np) = l2_project_vector(f.v, ctx.primal, ctx.quad);
        }
    });
    return U;
}

Vec project_faces(const BlockSystem& sys, const ScalarField& p, const VectorField& v)
{
    const Mesh& mesh = *sys.mesh;
    const DofMap& d = sys.dofs;
    Vec U = Vec::Zero(sys.n_faces());
    parallel_for(mesh.num_faces(), [&](int f) {
        if (d.face_p[f] < 0 && d.face_v[f] < 0)
            return;
        const FaceBasis fb(mesh, f, sys.setting.k);
        const QuadratureRule q = face_quadrature(mesh, f, 2 * sys.setting.k + 2);
        if (d.face_p[f] >= 0 && p)
            U.segment(d.pF_begin(f), d.nf) = l2_project(p, fb, q);
        if (d.face_v[f] >= 0 && v)
            U.segment(d.vF_begin(f), 2 * d.nf) = l2_project_vector(v, fb, q);
    });
    return U;
}

} // namespace hhoea
