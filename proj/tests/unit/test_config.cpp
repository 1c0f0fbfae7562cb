#include "hhoea/config.hpp"
#include "hhoea/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hhoea;

namespace {

ExperimentConfig tiny_ricker()
{
    return parse_config_string("[mesh]\nlevel = 2\n[discretization]\nk = 1\n[time]\nn = 6\nfinal_time = 0.0625\n");
}

} // namespace

TEST(Config, EmptyDocumentGivesDefaults)
{
    const ExperimentConfig c = parse_config_string("");
    EXPECT_TRUE(c == ExperimentConfig{});
    EXPECT_EQ(c.scheme, "SDIRK34");
    EXPECT_EQ(c.mode, OrderMode::Mixed);
    EXPECT_DOUBLE_EQ(c.setting().eta_f, 0.80);
    EXPECT_DOUBLE_EQ(c.setting().eta_s, 1.38);
}

TEST(Config, ReadsEverySection)
{
    const ExperimentConfig c = parse_config_string(R"(
[mesh]
type = triangles
level = 3
levels = 1 2
fluid = 0 1 0 1
solid = -1 0 0 1
[materials]
name = granite-water
stab_speed = p
[discretization]
k = 3
order = equal
alpha = 1
eta_f = 2.5
[time]
scheme = ERK4
n = 5
ns = 4 6
final_time = 0.25
[ricker]
center = 0.1 0.2
[sensors]
fluid = 0.1 0.1; 0.2 0.3
solid = -0.5 0.5
[convergence]
case = poly-in-space
study = time
initial = hplus
[spectral]
ks = 2
ws = 0 1
modes = mixed
variants = acoustic elastic
[output]
dump_every = 7
energy_every = 3
)");
    EXPECT_EQ(c.mesh_type, "triangles");
    EXPECT_EQ(c.levels, (std::vector<int>{1, 2}));
    EXPECT_DOUBLE_EQ(c.solid.x0, -1.0);
    EXPECT_FALSE(c.material_set().stab_shear_speed);
    EXPECT_EQ(c.k, 3);
    EXPECT_EQ(c.mode, OrderMode::Equal);
    EXPECT_DOUBLE_EQ(c.setting().eta_f, 2.5);
    EXPECT_DOUBLE_EQ(c.setting().eta_s, 1.54);
    EXPECT_EQ(c.scheme, "ERK4");
    EXPECT_EQ(c.ns, (std::vector<int>{4, 6}));
    ASSERT_EQ(c.sensors.size(), 3u);
    EXPECT_EQ(c.sensors[1].name, "S_f2");
    EXPECT_EQ(c.sensors[2].subdomain, Subdomain::Solid);
    EXPECT_TRUE(c.hplus_initial);
    EXPECT_EQ(c.spectral_variants.size(), 2u);
    EXPECT_EQ(c.energy_every, 3);
}

TEST(Config, RoundTripIsIdentity)
{
    ExperimentConfig c;
    c.fluid = {0.1, 1.0 / 3.0, 0.0, 0.7};
    c.eta_s = 0.1 + 0.2;
    c.final_time = std::sqrt(2.0);
    c.ricker_center = Point2(-1e-3, 1.0 / 7.0);
    c.spectral_variants = {PhysicsVariant::Elastic, PhysicsVariant::Coupled};
    c.sensors.pop_back();
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config_string(text);
    EXPECT_TRUE(back == c);
    EXPECT_EQ(serialize_config(back), text);
}

TEST(Config, SchemaCoversSerializedKeys)
{
    const std::string text = serialize_config(ExperimentConfig{});
    std::istringstream is(text);
    std::string line;
    size_t keys = 0;
    while (std::getline(is, line))
        if (line.find(" = ") != std::string::npos)
            ++keys;
    EXPECT_EQ(keys, config_schema().size());
}

TEST(Config, RejectsUnknownKeysAndSections)
{
    EXPECT_THROW(parse_config_string("[mesh]\nlevl = 3\n"), ConfigError);
    EXPECT_THROW(parse_config_string("[meshes]\nlevel = 3\n"), ConfigError);
    EXPECT_THROW(parse_config_string("level = 3\n"), ConfigError);
    EXPECT_NO_THROW(parse_config_string("[mesh]\n[time]\nn = 2\n"));
}

TEST(Config, RejectsBadValues)
{
    for (const char* doc : {"[mesh]\nlevel = x\n", "[mesh]\nlevel = 3 4\n", "[mesh]\nfluid = 0 1 0\n",
                            "[mesh]\nfluid = 0 0 0 1\n", "[mesh]\ntype = voronoi\n", "[mesh]\ntype = file\n",
                            "[materials]\nname = basalt\n", "[materials]\nstab_speed = q\n",
                            "[discretization]\nk = 0\n", "[discretization]\nalpha = 2\n",
                            "[discretization]\norder = odd\n", "[discretization]\neta_f = -1\n",
                            "[time]\nscheme = RK45\n", "[time]\nfinal_time = -1\n", "[convergence]\ncase = sine\n",
                            "[convergence]\nstudy = both\n", "[spectral]\nks =\n", "[output]\nenergy_every = 0\n", "[ricker]\ntheta = -1\n",
                            "[mesh]\nlevel = 3\nlevel = 4\n"})
        EXPECT_THROW(parse_config_string(doc), ConfigError) << doc;
}

TEST(Config, MissingFileIsConfigError)
{
    EXPECT_THROW(parse_config_file("/nonexistent/cfg.ini"), ConfigError);
}

TEST(Config, MeshTypes)
{
    ExperimentConfig c;
    c.level = 1;
    EXPECT_EQ(summarize_mesh(c.build_mesh()).quadrilaterals, 4); // two 1 x 0.5 rectangles
    c.mesh_type = "triangles";
    EXPECT_EQ(summarize_mesh(c.build_mesh()).triangles, 8);
    c.mesh_type = "mixed";
    c.level = 2;
    const MeshSummary s = summarize_mesh(c.build_mesh());
    EXPECT_GT(s.triangles, 0);
    EXPECT_GT(s.quadrilaterals, 0);
    EXPECT_GT(s.polygons, 0);
}

TEST(Simulation, ZeroInitialStateStaysZero)
{
    ExperimentConfig c = tiny_ricker();
    c.ricker_theta = 0.0;
    const SimulationResult r = run_simulation(c);
    EXPECT_EQ(r.energy.size(), size_t(r.steps + 1));
    for (const auto& e : r.energy)
        EXPECT_EQ(e.e.total, 0.0);
    for (const auto& row : r.sensor_rows)
        for (size_t j = 1; j < row.size(); ++j)
            EXPECT_EQ(row[j], 0.0);
}

TEST(Simulation, EnergyNonIncreasingAndDeterministic)
{
    const ExperimentConfig c = tiny_ricker();
    const SimulationResult a = run_simulation(c);
    EXPECT_EQ(a.steps, 40);
    EXPECT_LE(a.max_relative_increase, 1e-10);
    EXPECT_GT(a.initial_energy(), 0.0);
    std::ostringstream ea, eb;
    write_energy_csv(ea, a, 1);
    write_energy_csv(eb, run_simulation(c), 1);
    EXPECT_EQ(ea.str(), eb.str());
    EXPECT_EQ(ea.str().substr(0, ea.str().find('\n')), "t,E_fluid,E_solid,E_total,relative_loss");
}

TEST(Simulation, WritesOutputs)
{
    const auto dir = std::filesystem::temp_directory_path() / "hhoea_sim_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    ExperimentConfig c = tiny_ricker();
    c.energy_every = 10;
    run_simulation(c, {dir, 20});
    for (const char* f : {"energy.csv", "sensors.csv", "fields_000000.vtk", "fields_000020.vtk", "fields_000040.vtk"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    std::ifstream in(dir / "energy.csv");
    int lines = 0;
    for (std::string l; std::getline(in, l);)
        ++lines;
    EXPECT_EQ(lines, 1 + 5);
    std::ifstream s(dir / "sensors.csv");
    std::string header;
    std::getline(s, header);
    EXPECT_EQ(header, "t,S_f_p,S_s_vx,S_s_vy");
    std::filesystem::remove_all(dir);
}

TEST(Simulation, SolidFractionMean)
{
    SimulationResult r;
    r.energy = {{0.0, {1, 0, 1}}, {1.0, {0.5, 0.5, 1}}, {2.0, {0.5, 0.5, 1}}};
    EXPECT_DOUBLE_EQ(r.mean_solid_fraction(2.0), (0.25 + 0.5) / 2);
    EXPECT_DOUBLE_EQ(r.mean_solid_fraction(1.0), 0.25);
    EXPECT_DOUBLE_EQ(r.relative_loss(2), 0.0);
}

TEST(Convergence, SpatialRowsAndOrders)
{
    ExperimentConfig c = parse_config_string(
        "[discretization]\nk = 1\norder = equal\n[time]\nn = 4\nfinal_time = 0.1\n[mesh]\nlevels = 1 2\n");
    const auto rows = run_convergence(c);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(std::isnan(rows[0].eoc_hho));
    EXPECT_EQ(rows[1].cells, 4 * rows[0].cells);
    EXPECT_GT(rows[1].eoc_hho, 1.0);
    EXPECT_GE(rows[1].max_error.hho, rows[1].final_error.hho);
    std::ostringstream os;
    write_convergence_csv(os, rows);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
              "level,n,h,dt,cells,err_hho,err_dg,eoc_hho,eoc_dg,max_err_hho,max_err_dg,monotone");
}

TEST(Convergence, FittedOrder)
{
    EXPECT_NEAR(fitted_order({1, 0.5, 0.25}, {3, 0.75, 0.1875}), 2.0, 1e-14);
    EXPECT_THROW(fitted_order({1}, {1}), NumericalError);
}

TEST(Vtk, LegacyLayout)
{
    const Mesh m = build_cartesian_mesh(1, {0, 1, 0, 1}, {-1, 0, 0, 1});
    const BlockSystem sys = assemble(m, DiscretizationSetting::with_reference_weights(1, OrderMode::Mixed, 0),
                                     builtin_materials("academic"));
    const Vec U = project_cells(sys, {{}, [](const Point2&) { return 2.0; }, {}, [](const Point2&) {
                                          return Eigen::Vector2d(3.0, 4.0);
                                      }});
    std::ostringstream os;
    write_vtk(os, sys, U, 0.5);
    const std::string s = os.str();
    EXPECT_NE(s.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
    EXPECT_NE(s.find("CELLS 8 40"), std::string::npos);
    EXPECT_NE(s.find("SCALARS v_norm"), std::string::npos);
    // cell averages of constants: p = 2 in the fluid, |v| = 5 in the solid
    std::istringstream is(s.substr(s.find("LOOKUP_TABLE default")));
    std::string skip;
    std::getline(is, skip);
    double sum = 0;
    for (int i = 0; i < 8; ++i) {
        double v;
        is >> v;
        sum += v;
    }
    EXPECT_NEAR(sum, 4 * 2.0, 1e-12);
}
