#include "hhoea/materials.hpp"

#include <cmath>

namespace hhoea {

double Materials::cp_f() const { return std::sqrt(kappa / rho_f); }
double Materials::cp_s() const { return std::sqrt((lambda + 2 * mu) / rho_s); }
double Materials::cs_s() const { return std::sqrt(mu / rho_s); }

Materials Materials::from_speeds(std::string name, double rho_f, double cp_f, double rho_s, double cp_s,
                                 double cs_s)
{
    Materials m;
    m.name = std::move(name);
    m.rho_f = rho_f;
    m.kappa = rho_f * cp_f * cp_f;
    m.rho_s = rho_s;
    m.mu = rho_s * cs_s * cs_s;
    m.lambda = rho_s * (cp_s * cp_s - 2 * cs_s * cs_s);
    m.validate();
    return m;
}

void Materials::validate() const
{
    if (!(rho_f > 0) || !(kappa > 0) || !(rho_s > 0) || !(mu > 0))
        throw ConfigError("materials: densities, kappa and mu must be positive");
    if (!(lambda > -mu))
        throw ConfigError("materials: lambda must exceed -mu");
}

Eigen::Matrix3d HookeTensor::inverse_matrix() const
{
    // columns are C^-1 E_t expressed in the same components
    Eigen::Matrix3d A;
    for (int t = 0; t < 3; ++t) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[t] = 1;
        const Eigen::Matrix2d E = (Eigen::Matrix2d() << e[0], e[2] * M_SQRT1_2, e[2] * M_SQRT1_2, e[1]).finished();
        const Eigen::Matrix2d C = apply_inverse(E);
        A.col(t) << C(0, 0), C(1, 1), M_SQRT2 * C(0, 1);
    }
    return 0.5 * (A + A.transpose());
}

} // namespace hhoea
