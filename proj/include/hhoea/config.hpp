#pragma once

#include "hhoea/hho_local.hpp"
#include "hhoea/materials.hpp"
#include "hhoea/mesh.hpp"
#include "hhoea/physics.hpp"
#include "hhoea/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hhoea {

struct SensorSpec {
    std::string name;
    Point2 location = Point2::Zero();
    Subdomain subdomain = Subdomain::Fluid;
};

// One experiment description. Sections and keys of the text form are listed in
// config_schema(); every field has a default so a partial file is valid.
struct ExperimentConfig {
    // [mesh]
    std::string mesh_type = "cartesian"; // cartesian | triangles | perturbed | mixed | file
    int level = 4;
    std::vector<int> levels{2, 3, 4};
    std::string mesh_file;
    Rect fluid{-0.5, 0.5, 0.0, 0.5};
    Rect solid{-0.5, 0.5, -0.5, 0.0};
    double perturb_amplitude = 0.2;
    unsigned seed = 1;

    // [materials]
    std::string materials = "academic";
    bool stab_shear_speed = true;

    // [discretization]
    int k = 2;
    OrderMode mode = OrderMode::Mixed;
    int alpha = 0;
    std::optional<double> eta_f, eta_s; // reference weights when absent

    // [time]
    std::string scheme = "SDIRK34";
    int n = 8;
    std::vector<int> ns{4, 5, 6, 7, 8};
    double final_time = 1.0;

    // [ricker]
    Point2 ricker_center = Point2(0.0, 0.125);
    double ricker_theta = 10.0;
    double ricker_fc = 10.0;

    // [sensors]
    std::vector<SensorSpec> sensors{{"S_f", Point2(-0.15, 0.1), Subdomain::Fluid},
                                    {"S_s", Point2(-0.15, -0.1), Subdomain::Solid}};

    // [convergence]
    std::string manufactured = "poly-in-time";
    std::string study = "space"; // space | time
    bool hplus_initial = false;

    // [spectral]
    std::vector<int> spectral_ks{1, 2, 3};
    std::vector<int> spectral_ws{-3, -2, -1, 0, 1, 2, 3};
    std::vector<OrderMode> spectral_modes{OrderMode::Equal, OrderMode::Mixed};
    std::vector<PhysicsVariant> spectral_variants{PhysicsVariant::Coupled};

    // [output]
    int dump_every = 0;
    int energy_every = 1;

    // Throws ConfigError naming the offending key.
    void validate() const;

    Materials material_set() const;
    DiscretizationSetting setting() const;
    // Mesh of the configured type on the given rectangles at `lvl`.
    Mesh build_mesh(int lvl, const Rect& f, const Rect& s) const;
    Mesh build_mesh() const { return build_mesh(level, fluid, solid); }
    RickerConfig ricker() const;
};

struct ConfigKey {
    std::string section;
    std::string key;
    std::string description;
};
const std::vector<ConfigKey>& config_schema();

// Sectioned "key = value" text. Unknown sections or keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text);
// Complete document with every key, readable by parse_config.
std::string serialize_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

} // namespace hhoea
