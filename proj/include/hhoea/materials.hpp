#pragma once

#include "hhoea/common.hpp"

#include <string>

namespace hhoea {

struct Materials {
    std::string name = "custom";
    double rho_f = 1.0;
    double kappa = 1.0;
    double rho_s = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    // wave speed entering zeta_s: c_s^s by default (the one the reference
    // weights are tuned for), c_p^s when cleared
    bool stab_shear_speed = true;

    double cp_f() const;
    double cp_s() const;
    double cs_s() const;
    double zeta_f() const { return 1.0 / (rho_f * cp_f()); }
    double zeta_s() const { return rho_s * (stab_shear_speed ? cs_s() : cp_s()); }

    // Lame parameters from density and wave speeds.
    static Materials from_speeds(std::string name, double rho_f, double cp_f, double rho_s, double cp_s,
                                 double cs_s);
    void validate() const;
};

// Isotropic Hooke tensor acting on symmetric 2x2 tensors.
struct HookeTensor {
    double lambda;
    double mu;

    Eigen::Matrix2d apply(const Eigen::Matrix2d& e) const
    {
        return lambda * e.trace() * Eigen::Matrix2d::Identity() + 2 * mu * e;
    }
    Eigen::Matrix2d apply_inverse(const Eigen::Matrix2d& s) const
    {
        return (s - lambda / (2 * (lambda + mu)) * s.trace() * Eigen::Matrix2d::Identity()) / (2 * mu);
    }
    // C^-1 in the (xx, yy, xy) orthonormal component basis.
    Eigen::Matrix3d inverse_matrix() const;
};

} // namespace hhoea
