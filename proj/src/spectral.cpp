#include "hhoea/spectral.hpp"

#include "hhoea/csv.hpp"

#include <cmath>
#include <ostream>

namespace hhoea {

namespace {

// L^-1 with M = L L^T, block by block.
SpMat inverse_cholesky_factor(const SpMat& M, const std::vector<std::vector<int>>& groups)
{
    std::vector<Mat> blocks(groups.size());
    parallel_for(int(groups.size()), [&](int g) {
        const auto& ids = groups[g];
        const int n = int(ids.size());
        Mat B(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                B(i, j) = M.coeff(ids[i], ids[j]);
        Eigen::LLT<Mat> llt(B);
        if (llt.info() != Eigen::Success)
            throw NumericalError("mass matrix is not SPD");
        blocks[g] = llt.matrixL().solve(Mat::Identity(n, n));
    });
    std::vector<Triplet> t;
    for (size_t g = 0; g < groups.size(); ++g)
        for (size_t j = 0; j < groups[g].size(); ++j)
            for (size_t i = j; i < groups[g].size(); ++i)
                t.emplace_back(groups[g][i], groups[g][j], blocks[g](i, j));
    SpMat L(M.rows(), M.cols());
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

} // namespace

double largest_generalized_eigenvalue(const SpMat& K, const SpMat& M, const std::vector<std::vector<int>>& groups,
                                      const SpectralOptions& opt, std::string* method)
{
    const SpMat Li = inverse_cholesky_factor(M, groups);
    const SpMat C = Li * K * SpMat(Li.transpose());
    const int n = int(C.rows());
    if (n == 0)
        return 0.0;
    if (n <= opt.dense_limit) {
        if (method)
            *method = "dense";
        const Mat Cd(C);
        Eigen::BDCSVD<Mat> svd(Cd);
        const double s = svd.singularValues()[0];
        return s * s;
    }
    if (method)
        *method = "power";
    // power iteration on C^T C, deterministic start
    Vec x = Vec::LinSpaced(n, 1.0, 2.0);
    x.normalize();
    double gamma = 0;
    const SpMat Ct = C.transpose();
    for (int it = 0; it < opt.power_max_iter; ++it) {
        Vec y = Ct * (C * x);
        const double g = x.dot(y);
        const double ny = y.norm();
        if (ny == 0.0)
            return 0.0;
        x = y / ny;
        if (std::abs(g - gamma) <= opt.power_tol * std::abs(g)) {
            gamma = g;
            break;
        }
        gamma = g;
    }
    return gamma;
}

SpectralReport spectral_radius(const BlockSystem& sys, const std::string& geometry, const SpectralOptions& opt)
{
    SpectralReport r;
    r.mode = to_string(sys.setting.mode);
    r.k = sys.setting.k;
    r.eta_f = sys.setting.eta_f;
    r.eta_s = sys.setting.eta_s;
    r.geometry = geometry;
    r.cells = sys.mesh->num_cells();
    const SpMat Ks = schur_complement(sys);
    r.raw_gamma = largest_generalized_eigenvalue(Ks, sys.M, sys.cell_groups, opt, &r.method);
    r.normalized_radius = std::sqrt(std::max(r.raw_gamma, 0.0)) / std::sqrt(double(r.cells));
    return r;
}

std::string to_string(PhysicsVariant v)
{
    switch (v) {
    case PhysicsVariant::Coupled: return "coupled";
    case PhysicsVariant::Acoustic: return "acoustic";
    case PhysicsVariant::Elastic: return "elastic";
    }
    return "?";
}

std::vector<SpectralReport> weight_sweep(const Mesh& mesh, const Materials& mat, const SweepSpec& spec,
                                         PhysicsVariant variant, const std::string& geometry,
                                         const SpectralOptions& opt)
{
    Mesh m = mesh;
    if (variant == PhysicsVariant::Acoustic)
        m = mesh.retagged(Subdomain::Fluid);
    else if (variant == PhysicsVariant::Elastic)
        m = mesh.retagged(Subdomain::Solid);
    const std::string label = geometry + "/" + to_string(variant);
    std::vector<SpectralReport> rows;
    for (OrderMode mode : spec.modes)
        for (int k : spec.ks)
            for (int w : spec.ws) {
                DiscretizationSetting s = DiscretizationSetting::with_reference_weights(k, mode, spec.alpha);
                s.eta_f *= std::ldexp(1.0, w);
                s.eta_s *= std::ldexp(1.0, w);
                const BlockSystem sys = assemble(m, s, mat);
                SpectralReport r = spectral_radius(sys, label, opt);
                r.w = w;
                rows.push_back(r);
            }
    return rows;
}

void write_spectral_csv(std::ostream& out, const std::vector<SpectralReport>& rows)
{
    CsvWriter csv(out, {"mode", "k", "w", "eta_f", "eta_s", "geometry", "cells", "raw_gamma", "normalized_radius"});
    for (const auto& r : rows)
        csv.row(r.mode, r.k, r.w, r.eta_f, r.eta_s, r.geometry, r.cells, r.raw_gamma, r.normalized_radius);
}

} // namespace hhoea
