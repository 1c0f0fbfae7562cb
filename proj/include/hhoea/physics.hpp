#pragma once

#include "hhoea/assembly.hpp"
#include "hhoea/common.hpp"
#include "hhoea/materials.hpp"
#include "hhoea/mesh.hpp"

#include <string>
#include <vector>

namespace hhoea {

// "academic", "granite-water", "granite-air", "real-granite-water"
Materials builtin_materials(const std::string& name);
std::vector<std::string> builtin_material_names();

// Potentials u = X_f(x) Y(y) T(t) in the fluid and u_x = u_y = X_s(x) Y(y) T(t) in the solid.
struct ManufacturedCase {
    std::string name;
    Rect fluid, solid;
    ScalarST u_fluid;
    VectorST u_solid;
    ScalarST p;
    VectorST m;
    VectorST v;
    TensorST s;
    ScalarST f_fluid;
    VectorST f_solid;
};

// "poly-in-space" or "poly-in-time". The fluid density must be 1 (m = grad u).
ManufacturedCase manufactured_case(const std::string& name, const Materials& mat);
std::vector<std::string> manufactured_case_names();

struct RickerConfig {
    double theta = 10.0;
    double fc = 10.0;
    double Lambda = 0.1;
    Point2 center = Point2(0.0, 0.125);

    // Lambda = c_p^f / f_c
    static RickerConfig for_materials(const Materials& mat, const Point2& center);
};

VectorField ricker_velocity(const RickerConfig& rc);
// Initial fields (m0 = Ricker wavelet, everything else zero); checks that the
// center lies in the fluid part of the mesh.
CellFields ricker_initial(const Mesh& mesh, const RickerConfig& rc);

struct Energy {
    double fluid = 0;
    double solid = 0;
    double total = 0;
};
Energy discrete_energy(const BlockSystem& sys, const Vec& U);

struct Sensor {
    std::string name;
    Point2 location = Point2::Zero();
    Subdomain subdomain = Subdomain::Fluid;
    int cell = -1;
};
// Locates the point once (lowest cell id on ties) in the requested subdomain.
Sensor make_sensor(const Mesh& mesh, const std::string& name, const Point2& x, Subdomain sub);
// Fluid sensors return {p}; solid sensors return {v_x, v_y}.
std::vector<double> sample_sensor(const BlockSystem& sys, const Vec& U, const Sensor& s);

// Weighted L2 errors of the cell unknowns against the exact fields.
struct ErrorNorms {
    double hho = 0; // (||p||^2_{1/kappa} + ||v||^2_{rho_s})^(1/2)
    double dg = 0;  // (||m||^2_{rho_f} + ||s||^2_{C^-1})^(1/2)
};

class ErrorEvaluator {
public:
    ErrorEvaluator(const BlockSystem& sys, const ManufacturedCase& mc);
    ErrorNorms operator()(const Vec& U, double t) const;

private:
    struct Samples {
        std::vector<std::function<double(double)>> time;
        std::vector<Mat> values; // per term: nq x components
    };
    const BlockSystem* sys_;
    // per cell: primal field (p or v) and dual field (m or s)
    std::vector<Samples> primal_, dual_;
};

} // namespace hhoea
