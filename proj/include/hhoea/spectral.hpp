#pragma once

#include "hhoea/assembly.hpp"
#include "hhoea/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hhoea {

struct SpectralReport {
    std::string mode; // "equal" / "mixed"
    int k = 0;
    int w = 0;
    double eta_f = 0, eta_s = 0;
    std::string geometry;
    int cells = 0;
    double raw_gamma = 0;         // largest eigenvalue of K^T M^-1 K X = gamma M X
    double normalized_radius = 0; // sqrt(gamma) / sqrt(#cells)
    std::string method;           // "dense" or "power"
};

struct SpectralOptions {
    int dense_limit = 5000;
    double power_tol = 1e-8;
    int power_max_iter = 10000;
};

// Largest gamma with K^T M^-1 K x = gamma M x, M block diagonal over `groups`.
double largest_generalized_eigenvalue(const SpMat& K, const SpMat& M, const std::vector<std::vector<int>>& groups,
                                      const SpectralOptions& opt = {}, std::string* method = nullptr);

SpectralReport spectral_radius(const BlockSystem& sys, const std::string& geometry = "",
                               const SpectralOptions& opt = {});

enum class PhysicsVariant { Coupled, Acoustic, Elastic };
std::string to_string(PhysicsVariant v);

struct SweepSpec {
    std::vector<int> ks{1, 2, 3};
    std::vector<int> ws{-3, -2, -1, 0, 1, 2, 3};
    std::vector<OrderMode> modes{OrderMode::Equal, OrderMode::Mixed};
    int alpha = 0;
};

// eta = 2^w eta_ref for every (mode, k, w); the variant relabels every cell when not coupled.
std::vector<SpectralReport> weight_sweep(const Mesh& mesh, const Materials& mat, const SweepSpec& spec,
                                         PhysicsVariant variant, const std::string& geometry,
                                         const SpectralOptions& opt = {});

void write_spectral_csv(std::ostream& out, const std::vector<SpectralReport>& rows);

} // namespace hhoea
