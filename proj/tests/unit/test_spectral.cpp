#include "hhoea/physics.hpp"
#include "hhoea/spectral.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

using namespace hhoea;
using hhoea::test::coupled_squares;

namespace {

const Materials kAcademic = builtin_materials("academic");

BlockSystem coupled_system(int level, int k, OrderMode mode)
{
    static std::map<int, Mesh> meshes;
    if (!meshes.count(level))
        meshes.emplace(level, coupled_squares(level));
    return assemble(meshes.at(level), DiscretizationSetting::with_reference_weights(k, mode, 0), kAcademic);
}

// all eigenvalues of K^T M^-1 K x = gamma M x, brute force
Vec dense_pencil_spectrum(const SpMat& K, const SpMat& M)
{
    const Mat Kd(K), Md(M);
    const Mat A = Kd.transpose() * Md.llt().solve(Kd);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()), Md);
    return es.eigenvalues();
}

using Key = std::tuple<std::string, int, int>;

std::map<Key, double> sweep_table(const std::vector<SpectralReport>& rows)
{
    std::map<Key, double> t;
    for (const auto& r : rows)
        t[{r.mode, r.k, r.w}] = r.normalized_radius;
    return t;
}

const std::vector<SpectralReport>& level1_sweep()
{
    static const auto rows = weight_sweep(coupled_squares(1), kAcademic, SweepSpec{}, PhysicsVariant::Coupled, "cartesian");
    return rows;
}

} // namespace

TEST(Eigen, ZeroStiffnessGivesZero)
{
    const auto sys = coupled_system(1, 1, OrderMode::Equal);
    SpMat Z(sys.M.rows(), sys.M.cols());
    EXPECT_EQ(largest_generalized_eigenvalue(Z, sys.M, sys.cell_groups), 0.0);
    SpectralOptions power;
    power.dense_limit = 0;
    EXPECT_EQ(largest_generalized_eigenvalue(Z, sys.M, sys.cell_groups, power), 0.0);
}

TEST(Eigen, DiagonalPencil)
{
    // K = diag(1,2,3), M = diag(1,4,1) -> gamma = k^2/m^2
    std::vector<Triplet> tk{{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}}, tm{{0, 0, 1.0}, {1, 1, 4.0}, {2, 2, 1.0}};
    SpMat K(3, 3), M(3, 3);
    K.setFromTriplets(tk.begin(), tk.end());
    M.setFromTriplets(tm.begin(), tm.end());
    EXPECT_NEAR(largest_generalized_eigenvalue(K, M, {{0}, {1}, {2}}), 9.0, 1e-13);
}

TEST(Eigen, DenseMatchesBruteForceSpectrum)
{
    for (auto mode : {OrderMode::Equal, OrderMode::Mixed}) {
        const auto sys = coupled_system(1, 1, mode);
        const SpMat Ks = schur_complement(sys);
        const Vec all = dense_pencil_spectrum(Ks, sys.M);
        const double gmax = all.maxCoeff();
        std::string method;
        const double g = largest_generalized_eigenvalue(Ks, sys.M, sys.cell_groups, {}, &method);
        EXPECT_EQ(method, "dense");
        EXPECT_NEAR(g, gmax, 1e-10 * gmax);
        EXPECT_GE(all.minCoeff(), -1e-12 * gmax);
    }
}

TEST(Eigen, PowerIterationMatchesDense)
{
    for (auto mode : {OrderMode::Equal, OrderMode::Mixed}) {
        const auto sys = coupled_system(1, 2, mode);
        const SpMat Ks = schur_complement(sys);
        const double dense = largest_generalized_eigenvalue(Ks, sys.M, sys.cell_groups);
        SpectralOptions opt;
        opt.dense_limit = 0;
        opt.power_tol = 1e-12;
        opt.power_max_iter = 200000;
        std::string method;
        const double power = largest_generalized_eigenvalue(Ks, sys.M, sys.cell_groups, opt, &method);
        EXPECT_EQ(method, "power");
        EXPECT_NEAR(power, dense, 1e-6 * dense);
    }
}

TEST(Eigen, PermutationInvariant)
{
    const auto sys = coupled_system(1, 2, OrderMode::Mixed);
    const SpMat Ks = schur_complement(sys);
    const int n = int(Ks.rows());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(7));
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> P(n);
    for (int i = 0; i < n; ++i)
        P.indices()[i] = perm[i];
    const SpMat Kp = P * Ks * P.transpose();
    const SpMat Mp = P * sys.M * P.transpose();
    auto groups = sys.cell_groups;
    for (auto& g : groups)
        for (int& i : g)
            i = perm[i];
    const double g0 = largest_generalized_eigenvalue(Ks, sys.M, sys.cell_groups);
    const double g1 = largest_generalized_eigenvalue(Kp, Mp, groups);
    EXPECT_NEAR(g1, g0, 1e-11 * g0);
}

TEST(Eigen, QuadraticInStiffnessScale)
{
    const auto sys = coupled_system(1, 1, OrderMode::Equal);
    const SpMat Ks = schur_complement(sys);
    const double g = largest_generalized_eigenvalue(Ks, sys.M, sys.cell_groups);
    const double g3 = largest_generalized_eigenvalue(SpMat(3.0 * Ks), sys.M, sys.cell_groups);
    EXPECT_NEAR(g3, 9.0 * g, 1e-11 * g3);
}

TEST(Eigen, NonSpdMassRejected)
{
    const auto sys = coupled_system(1, 1, OrderMode::Equal);
    const SpMat Ks = schur_complement(sys);
    EXPECT_THROW(largest_generalized_eigenvalue(Ks, SpMat(-1.0 * sys.M), sys.cell_groups), NumericalError);
}

TEST(Report, NormalizationUsesAllCells)
{
    const auto sys = coupled_system(1, 1, OrderMode::Equal);
    const auto r = spectral_radius(sys, "cartesian");
    EXPECT_EQ(r.cells, 8);
    EXPECT_EQ(r.mode, "equal");
    EXPECT_EQ(r.k, 1);
    EXPECT_DOUBLE_EQ(r.eta_f, 0.88);
    EXPECT_DOUBLE_EQ(r.eta_s, 1.54);
    EXPECT_GT(r.raw_gamma, 0.0);
    EXPECT_NEAR(r.normalized_radius, std::sqrt(r.raw_gamma / 8.0), 1e-14 * r.normalized_radius);
}

TEST(Sweep, MinimumAtReferenceWeights)
{
    const auto t = sweep_table(level1_sweep());
    for (std::string mode : {"equal", "mixed"})
        for (int k = 1; k <= 3; ++k)
            for (int w : {-3, -2, -1, 1, 2, 3})
                EXPECT_GT(t.at({mode, k, w}), t.at({mode, k, 0})) << mode << " k=" << k << " w=" << w;
}

TEST(Sweep, MonotoneAwayFromMinimum)
{
    const auto t = sweep_table(level1_sweep());
    for (std::string mode : {"equal", "mixed"})
        for (int k = 1; k <= 3; ++k)
            for (int w = 1; w <= 3; ++w) {
                EXPECT_GT(t.at({mode, k, w}), t.at({mode, k, w - 1}));
                EXPECT_GT(t.at({mode, k, -w}), t.at({mode, k, 1 - w}));
            }
}

TEST(Sweep, LinearInEtaForLargeWeights)
{
    const auto t = sweep_table(level1_sweep());
    for (std::string mode : {"equal", "mixed"})
        for (int k = 1; k <= 3; ++k) {
            const double ratio = t.at({mode, k, 3}) / t.at({mode, k, 2});
            EXPECT_GE(ratio, 1.8) << mode << " k=" << k;
            EXPECT_LE(ratio, 2.2) << mode << " k=" << k;
        }
}

TEST(Sweep, EqualOrderBelowMixedOrder)
{
    const auto t = sweep_table(level1_sweep());
    for (int k = 1; k <= 3; ++k)
        EXPECT_LT(t.at({"equal", k, 0}), t.at({"mixed", k, 0})) << "k=" << k;
}

TEST(Sweep, EqualOrderK1TableValue)
{
    const auto t = sweep_table(level1_sweep());
    EXPECT_NEAR(t.at({"equal", 1, 0}), 9.9, 0.2 * 9.9);
}

TEST(Sweep, MixedOrderK2TableValueOnLevel2)
{
    // level 1 gives 23.3; the table value is reached within 20% from level 2 on
    const auto r = spectral_radius(coupled_system(2, 2, OrderMode::Mixed));
    EXPECT_NEAR(r.normalized_radius, 31.8, 0.2 * 31.8);
}

TEST(Sweep, ElasticAboveAcoustic)
{
    SweepSpec spec;
    spec.ws = {0};
    const Mesh mesh = coupled_squares(1);
    const auto ac = sweep_table(weight_sweep(mesh, kAcademic, spec, PhysicsVariant::Acoustic, "cartesian"));
    const auto el = sweep_table(weight_sweep(mesh, kAcademic, spec, PhysicsVariant::Elastic, "cartesian"));
    for (std::string mode : {"equal", "mixed"})
        for (int k = 1; k <= 3; ++k)
            EXPECT_GT(el.at({mode, k, 0}), ac.at({mode, k, 0})) << mode << " k=" << k;
}

TEST(Sweep, DefaultGridShape)
{
    const auto& rows = level1_sweep();
    EXPECT_EQ(rows.size(), 2u * 3u * 7u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.cells, 8);
        const double scale = std::ldexp(1.0, r.w);
        const auto m = r.mode == "equal" ? OrderMode::Equal : OrderMode::Mixed;
        EXPECT_NEAR(r.eta_f, scale * DiscretizationSetting::reference_eta_f(m), 1e-15);
        EXPECT_NEAR(r.eta_s, scale * DiscretizationSetting::reference_eta_s(m), 1e-15);
    }
}

TEST(Csv, HeaderAndRows)
{
    SpectralReport r;
    r.mode = "equal";
    r.k = 2;
    r.w = -1;
    r.eta_f = 0.44;
    r.eta_s = 0.77;
    r.geometry = "cartesian/coupled";
    r.cells = 8;
    r.raw_gamma = 2.0;
    r.normalized_radius = 0.5;
    std::ostringstream os;
    write_spectral_csv(os, {r});
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "mode,k,w,eta_f,eta_s,geometry,cells,raw_gamma,normalized_radius");
    EXPECT_EQ(row.substr(0, 10), "equal,2,-1");
    EXPECT_NE(row.find("cartesian/coupled,8,2,0.5"), std::string::npos) << row;
}
