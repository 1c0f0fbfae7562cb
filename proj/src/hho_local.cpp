#include "hhoea/hho_local.hpp"

#include <cmath>

namespace hhoea {

std::string to_string(OrderMode m) { return m == OrderMode::Equal ? "equal" : "mixed"; }

void DiscretizationSetting::validate() const
{
    if (k < 1)
        throw ConfigError("face degree k must be >= 1");
    if (alpha != 0 && alpha != 1)
        throw ConfigError("stabilization exponent alpha must be 0 or 1");
    if (!(eta_f > 0) || !(eta_s > 0))
        throw ConfigError("stabilization weights must be positive");
}

DiscretizationSetting DiscretizationSetting::with_reference_weights(int k, OrderMode m, int alpha)
{
    DiscretizationSetting s;
    s.k = k;
    s.mode = m;
    s.alpha = alpha;
    s.eta_f = reference_eta_f(m);
    s.eta_s = reference_eta_s(m);
    return s;
}

LocalContext make_local_context(const Mesh& mesh, int cell, const DiscretizationSetting& s, int extra)
{
    LocalContext ctx;
    ctx.cell = cell;
    ctx.subdomain = mesh.cell(cell).subdomain;
    ctx.k = s.k;
    ctx.h_tilde = mesh.h_tilde(cell);
    ctx.dual = CellBasis(mesh, cell, s.k);
    ctx.primal = CellBasis(mesh, cell, s.cell_degree());
    ctx.quad = cell_quadrature(mesh, cell, 2 * (s.k + 1) + 2 + extra);
    ctx.M_dual = mass_matrix(ctx.dual, ctx.quad);
    ctx.M_primal = mass_matrix(ctx.primal, ctx.quad);
    for (int f : mesh.cell(cell).face_ids) {
        ctx.faces.push_back(f);
        ctx.normals.push_back(mesh.face_geometry(f, cell).normal);
        ctx.face_bases.emplace_back(mesh, f, s.k);
        ctx.face_quads.push_back(face_quadrature(mesh, f, 2 * s.k + 2 + extra));
        ctx.M_face.push_back(mass_matrix(ctx.face_bases.back(), ctx.face_quads.back()));
    }
    return ctx;
}

double stabilization_parameter(double eta, double zeta, double h_tilde, int alpha)
{
    return eta * zeta * (alpha == 0 ? 1.0 : 1.0 / h_tilde);
}

Mat grad_reconstruction_rhs(const LocalContext& ctx)
{
    const int nd = ctx.n_dual(), np = ctx.n_primal(), nf = ctx.n_face();
    Mat B = Mat::Zero(2 * nd, np + ctx.num_faces() * nf);
    for (int q = 0; q < ctx.quad.size(); ++q) {
        const Point2& x = ctx.quad.points[q];
        const double w = ctx.quad.weights[q];
        const Vec r = ctx.dual.eval(x);
        const auto g = ctx.primal.grad(x);
        for (int c = 0; c < 2; ++c)
            B.block(c * nd, 0, nd, np).noalias() += w * r * g.col(c).transpose();
    }
    for (int i = 0; i < ctx.num_faces(); ++i) {
        const auto& fq = ctx.face_quads[i];
        const Point2& n = ctx.normals[i];
        for (int q = 0; q < fq.size(); ++q) {
            const Point2& x = fq.points[q];
            const Vec r = ctx.dual.eval(x);
            const Vec phi = ctx.primal.eval(x);
            const Vec psi = ctx.face_bases[i].eval(x);
            for (int c = 0; c < 2; ++c) {
                const double wn = fq.weights[q] * n[c];
                B.block(c * nd, 0, nd, np).noalias() -= wn * r * phi.transpose();
                B.block(c * nd, np + i * nf, nd, nf).noalias() += wn * r * psi.transpose();
            }
        }
    }
    return B;
}

namespace {

// E_t for t in (xx, yy, xy)
const Eigen::Matrix2d& unit_tensor(int t)
{
    static const Eigen::Matrix2d E[3] = {
        (Eigen::Matrix2d() << 1, 0, 0, 0).finished(),
        (Eigen::Matrix2d() << 0, 0, 0, 1).finished(),
        (Eigen::Matrix2d() << 0, M_SQRT1_2, M_SQRT1_2, 0).finished(),
    };
    return E[t];
}

Mat block_diag(const Mat& M, int copies)
{
    Mat out = Mat::Zero(copies * M.rows(), copies * M.cols());
    for (int c = 0; c < copies; ++c)
        out.block(c * M.rows(), c * M.cols(), M.rows(), M.cols()) = M;
    return out;
}

Mat solve_block_diag(const Mat& M, int copies, const Mat& rhs)
{
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("singular cell mass matrix (degenerate cell)");
    Mat out(rhs.rows(), rhs.cols());
    const int n = int(M.rows());
    for (int c = 0; c < copies; ++c)
        out.middleRows(c * n, n) = llt.solve(rhs.middleRows(c * n, n));
    return out;
}

} // namespace

Mat sym_grad_reconstruction_rhs(const LocalContext& ctx)
{
    const int nd = ctx.n_dual(), np = ctx.n_primal(), nf = ctx.n_face();
    const int ncell = 2 * np;
    Mat B = Mat::Zero(3 * nd, ncell + ctx.num_faces() * 2 * nf);
    for (int q = 0; q < ctx.quad.size(); ++q) {
        const Point2& x = ctx.quad.points[q];
        const double w = ctx.quad.weights[q];
        const Vec r = ctx.dual.eval(x);
        const auto g = ctx.primal.grad(x);
        for (int t = 0; t < 3; ++t) {
            // (E_t grad phi)_d
            const Mat Eg = g * unit_tensor(t); // np x 2, symmetric E_t
            for (int d = 0; d < 2; ++d)
                B.block(t * nd, d * np, nd, np).noalias() += w * r * Eg.col(d).transpose();
        }
    }
    for (int i = 0; i < ctx.num_faces(); ++i) {
        const auto& fq = ctx.face_quads[i];
        const Point2& n = ctx.normals[i];
        for (int q = 0; q < fq.size(); ++q) {
            const Point2& x = fq.points[q];
            const Vec r = ctx.dual.eval(x);
            const Vec phi = ctx.primal.eval(x);
            const Vec psi = ctx.face_bases[i].eval(x);
            for (int t = 0; t < 3; ++t) {
                const Eigen::Vector2d En = unit_tensor(t) * n;
                for (int d = 0; d < 2; ++d) {
                    const double wn = fq.weights[q] * En[d];
                    if (wn == 0.0)
                        continue;
                    B.block(t * nd, d * np, nd, np).noalias() -= wn * r * phi.transpose();
                    B.block(t * nd, ncell + i * 2 * nf + d * nf, nd, nf).noalias() += wn * r * psi.transpose();
                }
            }
        }
    }
    return B;
}

Mat stabilization_matrix(const LocalContext& ctx, int components)
{
    const int np = ctx.n_primal(), nf = ctx.n_face(), nF = ctx.num_faces();
    const int ncell = components * np;
    const int n = ncell + nF * components * nf;
    Mat S = Mat::Zero(n, n);
    for (int i = 0; i < nF; ++i) {
        const Mat C = cross_mass(ctx.face_bases[i], ctx.primal, ctx.face_quads[i]);
        Eigen::LLT<Mat> llt(ctx.M_face[i]);
        const Mat Tr = llt.solve(C); // trace projection
        for (int c = 0; c < components; ++c) {
            Mat D = Mat::Zero(nf, n);
            D.block(0, c * np, nf, np) = Tr;
            D.block(0, ncell + i * components * nf + c * nf, nf, nf) = -Mat::Identity(nf, nf);
            S.noalias() += D.transpose() * ctx.M_face[i] * D;
        }
    }
    return 0.5 * (S + S.transpose());
}

double stabilization_energy(const LocalContext& ctx, int components, const Vec& u)
{
    const int np = ctx.n_primal(), nf = ctx.n_face();
    const int ncell = components * np;
    if (u.size() != ncell + ctx.num_faces() * components * nf)
        throw NumericalError("stabilization_energy: wrong local vector size");
    double e = 0;
    for (int i = 0; i < ctx.num_faces(); ++i) {
        const Mat C = cross_mass(ctx.face_bases[i], ctx.primal, ctx.face_quads[i]);
        Eigen::LLT<Mat> llt(ctx.M_face[i]);
        const Mat Tr = llt.solve(C);
        for (int c = 0; c < components; ++c) {
            const Vec d = Tr * u.segment(c * np, np) - u.segment(ncell + i * components * nf + c * nf, nf);
            e += d.dot(ctx.M_face[i] * d);
        }
    }
    return e;
}

LocalAcousticOps acoustic_operators(const LocalContext& ctx, const DiscretizationSetting& s, const Materials& mat)
{
    LocalAcousticOps ops;
    ops.n_cell = ctx.n_primal();
    ops.B = grad_reconstruction_rhs(ctx);
    ops.G = solve_block_diag(ctx.M_dual, 2, ops.B);
    ops.tau = stabilization_parameter(s.eta_f, mat.zeta_f(), ctx.h_tilde, s.alpha);
    ops.stab = ops.tau * stabilization_matrix(ctx, 1);
    return ops;
}

LocalElasticOps elastic_operators(const LocalContext& ctx, const DiscretizationSetting& s, const Materials& mat)
{
    LocalElasticOps ops;
    ops.n_cell = 2 * ctx.n_primal();
    ops.B = sym_grad_reconstruction_rhs(ctx);
    ops.E = solve_block_diag(ctx.M_dual, 3, ops.B);
    ops.tau = stabilization_parameter(s.eta_s, mat.zeta_s(), ctx.h_tilde, s.alpha);
    ops.stab = ops.tau * stabilization_matrix(ctx, 2);
    return ops;
}

LocalAcousticOps grad_reconstruction(const Mesh& mesh, int cell, const DiscretizationSetting& s,
                                     const Materials& mat)
{
    return acoustic_operators(make_local_context(mesh, cell, s), s, mat);
}

LocalElasticOps sym_grad_reconstruction(const Mesh& mesh, int cell, const DiscretizationSetting& s,
                                        const Materials& mat)
{
    return elastic_operators(make_local_context(mesh, cell, s), s, mat);
}

Vec hho_interpolate(const LocalContext& ctx, const ScalarField& f)
{
    const int np = ctx.n_primal(), nf = ctx.n_face();
    Vec out(np + ctx.num_faces() * nf);
    out.head(np) = l2_project(f, ctx.primal, ctx.quad);
    for (int i = 0; i < ctx.num_faces(); ++i)
        out.segment(np + i * nf, nf) = l2_project(f, ctx.face_bases[i], ctx.face_quads[i]);
    return out;
}

Vec hho_interpolate(const LocalContext& ctx, const VectorField& f)
{
    const int np = ctx.n_primal(), nf = ctx.n_face();
    Vec out(2 * np + ctx.num_faces() * 2 * nf);
    out.head(2 * np) = l2_project_vector(f, ctx.primal, ctx.quad);
    for (int i = 0; i < ctx.num_faces(); ++i)
        out.segment(2 * np + i * 2 * nf, 2 * nf) = l2_project_vector(f, ctx.face_bases[i], ctx.face_quads[i]);
    return out;
}

namespace {

// M-orthonormal basis W of range(image) and Z of its complement, via the SVD of L^T image.
void split_range(const Mat& gram, const Mat& image, HPlusSplitting& out)
{
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("H+ splitting: mass matrix not SPD");
    const Mat LtI = llt.matrixU() * image;
    Eigen::JacobiSVD<Mat> svd(LtI, Eigen::ComputeFullU);
    const Vec& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-10 * sv[0])
        ++rank;
    if (rank == 0)
        throw NumericalError("H+ splitting: empty gradient image");
    const Mat& U = svd.matrixU();
    out.W = llt.matrixU().solve(U.leftCols(rank));
    out.Z = llt.matrixU().solve(U.rightCols(U.cols() - rank));
}

// Columns: coefficients of grad q_j, q_j the non-constant monomials of degree <= k+1.
Mat gradient_image(const LocalContext& ctx, const CellBasis& test)
{
    const int nd = ctx.n_dual(), nt = test.size() - 1;
    Mat rhs = Mat::Zero(2 * nd, nt);
    for (int q = 0; q < ctx.quad.size(); ++q) {
        const Vec r = ctx.dual.eval(ctx.quad.points[q]);
        const auto g = test.grad(ctx.quad.points[q]);
        for (int c = 0; c < 2; ++c)
            rhs.middleRows(c * nd, nd).noalias() += ctx.quad.weights[q] * r * g.col(c).tail(nt).transpose();
    }
    return solve_block_diag(ctx.M_dual, 2, rhs);
}

// Columns (d, j): coefficients of sym grad (e_d q_j), j >= 1.
Mat sym_gradient_image(const LocalContext& ctx, const CellBasis& test)
{
    const int nd = ctx.n_dual(), nt = test.size() - 1;
    Mat rhs = Mat::Zero(3 * nd, 2 * nt);
    for (int q = 0; q < ctx.quad.size(); ++q) {
        const Vec r = ctx.dual.eval(ctx.quad.points[q]);
        const auto g = test.grad(ctx.quad.points[q]);
        for (int t = 0; t < 3; ++t) {
            const Mat Eg = g * unit_tensor(t);
            for (int d = 0; d < 2; ++d)
                rhs.block(t * nd, d * nt, nd, nt).noalias() +=
                    ctx.quad.weights[q] * r * Eg.col(d).tail(nt).transpose();
        }
    }
    return solve_block_diag(ctx.M_dual, 3, rhs);
}

CellBasis test_basis(const LocalContext& ctx)
{
    return CellBasis(ctx.k + 1, ctx.dual.center(), ctx.dual.scale());
}

// (Pi_F(m.n) - m.n, q_j) summed over the faces, j >= 1
Vec acoustic_boundary_term(const LocalContext& ctx, const VectorField& m, const CellBasis& test)
{
    const int nt = test.size() - 1;
    Vec b = Vec::Zero(nt);
    for (int i = 0; i < ctx.num_faces(); ++i) {
        const auto& fq = ctx.face_quads[i];
        const Point2 n = ctx.normals[i];
        const Vec proj = l2_project([&](const Point2& x) { return m(x).dot(n); }, ctx.face_bases[i], fq);
        for (int q = 0; q < fq.size(); ++q) {
            const Point2& x = fq.points[q];
            const double jump = ctx.face_bases[i].eval(x).dot(proj) - m(x).dot(n);
            b += fq.weights[q] * jump * test.eval(x).tail(nt);
        }
    }
    return b;
}

Vec elastic_boundary_term(const LocalContext& ctx, const TensorField& s, const CellBasis& test)
{
    const int nt = test.size() - 1;
    Vec b = Vec::Zero(2 * nt);
    for (int i = 0; i < ctx.num_faces(); ++i) {
        const auto& fq = ctx.face_quads[i];
        const Point2 n = ctx.normals[i];
        const Vec proj =
            l2_project_vector([&](const Point2& x) -> Eigen::Vector2d { return s(x) * n; }, ctx.face_bases[i], fq);
        const int nf = ctx.n_face();
        for (int q = 0; q < fq.size(); ++q) {
            const Point2& x = fq.points[q];
            const Vec psi = ctx.face_bases[i].eval(x);
            const Eigen::Vector2d sn = s(x) * n;
            const Vec qv = test.eval(x).tail(nt);
            for (int d = 0; d < 2; ++d) {
                const double jump = psi.dot(proj.segment(d * nf, nf)) - sn[d];
                b.segment(d * nt, nt) += fq.weights[q] * jump * qv;
            }
        }
    }
    return b;
}

// Solve image^T gram x = b in range(image): x = W (W^T gram image)^+ ... written via W.
Vec range_component(const HPlusSplitting& sp, const Vec& b)
{
    // x = W a with (image^T gram W) a = b, solved in the least-squares sense
    const Mat A = sp.image.transpose() * sp.gram * sp.W;
    const Vec a = A.colPivHouseholderQr().solve(b);
    return sp.W * a;
}

} // namespace

HPlusSplitting hplus_splitting_acoustic(const LocalContext& ctx)
{
    HPlusSplitting sp;
    sp.gram = block_diag(ctx.M_dual, 2);
    sp.image = gradient_image(ctx, test_basis(ctx));
    split_range(sp.gram, sp.image, sp);
    return sp;
}

HPlusSplitting hplus_splitting_elastic(const LocalContext& ctx)
{
    HPlusSplitting sp;
    sp.gram = block_diag(ctx.M_dual, 3);
    sp.image = sym_gradient_image(ctx, test_basis(ctx));
    split_range(sp.gram, sp.image, sp);
    return sp;
}

Vec hplus_interpolate_acoustic(const LocalContext& ctx, const VectorField& m)
{
    const HPlusSplitting sp = hplus_splitting_acoustic(ctx);
    const Vec pm = l2_project_vector(m, ctx.dual, ctx.quad);
    return pm + range_component(sp, acoustic_boundary_term(ctx, m, test_basis(ctx)));
}

Vec hplus_interpolate_elastic(const LocalContext& ctx, const TensorField& s)
{
    const HPlusSplitting sp = hplus_splitting_elastic(ctx);
    const Vec ps = l2_project_tensor(s, ctx.dual, ctx.quad);
    return ps + range_component(sp, elastic_boundary_term(ctx, s, test_basis(ctx)));
}

namespace {

// Complement of range(image) in the gram inner product, from a kernel computation.
Mat independent_complement(const Mat& gram, const Mat& image)
{
    Eigen::FullPivLU<Mat> lu(image.transpose() * gram);
    lu.setThreshold(1e-10);
    return lu.kernel();
}

} // namespace

HPlusResiduals hplus_residuals_acoustic(const LocalContext& ctx, const VectorField& m, const Vec& coeffs)
{
    const int nd = ctx.n_dual();
    const CellBasis test = test_basis(ctx);
    const int nt = test.size() - 1;
    const Mat gram = block_diag(ctx.M_dual, 2);
    const Mat Z = independent_complement(gram, gradient_image(ctx, test));

    // (I - m, r) for all r in the vector space, and (I - m, grad q_j), straight from quadrature
    Vec diff_r = Vec::Zero(2 * nd), diff_g = Vec::Zero(nt), ref_r = Vec::Zero(2 * nd), ref_g = Vec::Zero(nt);
    for (int q = 0; q < ctx.quad.size(); ++q) {
        const Point2& x = ctx.quad.points[q];
        const double w = ctx.quad.weights[q];
        const Vec r = ctx.dual.eval(x);
        const Eigen::Vector2d I(r.dot(coeffs.head(nd)), r.dot(coeffs.tail(nd)));
        const Eigen::Vector2d mv = m(x);
        const Eigen::Vector2d e = I - mv;
        const auto g = test.grad(x);
        for (int c = 0; c < 2; ++c) {
            diff_r.segment(c * nd, nd) += w * e[c] * r;
            ref_r.segment(c * nd, nd) += w * std::abs(mv[c]) * r.cwiseAbs();
        }
        diff_g += w * (g.bottomRows(nt) * e);
        ref_g += w * (g.bottomRows(nt).cwiseAbs() * mv.cwiseAbs());
    }
    const Vec bterm = acoustic_boundary_term(ctx, m, test);
    HPlusResiduals res;
    const double scale_r = std::max(ref_r.maxCoeff(), 1e-300);
    const double scale_g = std::max(ref_g.maxCoeff(), 1e-300);
    res.orthogonality = Z.cols() > 0 ? (Z.transpose() * diff_r).cwiseAbs().maxCoeff() / scale_r : 0.0;
    res.gradient_test = (diff_g - bterm).cwiseAbs().maxCoeff() / scale_g;
    return res;
}

HPlusResiduals hplus_residuals_elastic(const LocalContext& ctx, const TensorField& s, const Vec& coeffs)
{
    const int nd = ctx.n_dual();
    const CellBasis test = test_basis(ctx);
    const int nt = test.size() - 1;
    const Mat gram = block_diag(ctx.M_dual, 3);
    const Mat Z = independent_complement(gram, sym_gradient_image(ctx, test));

    Vec diff_r = Vec::Zero(3 * nd), diff_g = Vec::Zero(2 * nt), ref_r = Vec::Zero(3 * nd),
        ref_g = Vec::Zero(2 * nt);
    for (int q = 0; q < ctx.quad.size(); ++q) {
        const Point2& x = ctx.quad.points[q];
        const double w = ctx.quad.weights[q];
        const Vec r = ctx.dual.eval(x);
        Eigen::Vector3d Ic;
        for (int t = 0; t < 3; ++t)
            Ic[t] = r.dot(coeffs.segment(t * nd, nd));
        const Eigen::Matrix2d sv = s(x);
        const Eigen::Matrix2d e = sym_tensor(Ic) - sv;
        const Eigen::Vector3d ec = sym_components(e), sc = sym_components(sv).cwiseAbs();
        for (int t = 0; t < 3; ++t) {
            diff_r.segment(t * nd, nd) += w * ec[t] * r;
            ref_r.segment(t * nd, nd) += w * sc[t] * r.cwiseAbs();
        }
        // (e, sym grad(e_d q)) = (e grad q)_d for symmetric e
        const auto g = test.grad(x);
        const Mat eg = g.bottomRows(nt) * e; // nt x 2
        const Mat ag = g.bottomRows(nt).cwiseAbs() * sv.cwiseAbs();
        for (int d = 0; d < 2; ++d) {
            diff_g.segment(d * nt, nt) += w * eg.col(d);
            ref_g.segment(d * nt, nt) += w * ag.col(d);
        }
    }
    const Vec bterm = elastic_boundary_term(ctx, s, test);
    HPlusResiduals res;
    const double scale_r = std::max(ref_r.maxCoeff(), 1e-300);
    const double scale_g = std::max(ref_g.maxCoeff(), 1e-300);
    res.orthogonality = Z.cols() > 0 ? (Z.transpose() * diff_r).cwiseAbs().maxCoeff() / scale_r : 0.0;
    res.gradient_test = (diff_g - bterm).cwiseAbs().maxCoeff() / scale_g;
    return res;
}

} // namespace hhoea
