#include "hhoea/experiments.hpp"

#include "hhoea/csv.hpp"
#include "hhoea/timeint.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace hhoea {

double SimulationResult::relative_loss(size_t i) const
{
    const double e0 = initial_energy();
    return e0 > 0 ? 1.0 - energy.at(i).e.total / e0 : 0.0;
}

double SimulationResult::mean_solid_fraction(double t_end) const
{
    double integral = 0, span = 0;
    for (size_t i = 1; i < energy.size() && energy[i].t <= t_end * (1 + 1e-12); ++i) {
        auto frac = [](const Energy& e) { return e.total > 0 ? e.solid / e.total : 0.0; };
        const double dt = energy[i].t - energy[i - 1].t;
        integral += 0.5 * dt * (frac(energy[i - 1].e) + frac(energy[i].e));
        span += dt;
    }
    return span > 0 ? integral / span : 0.0;
}

namespace {

int step_count(double final_time, double dt)
{
    return int(std::lround(final_time / dt));
}

std::string vtk_name(int step)
{
    std::ostringstream s;
    s << "fields_" << std::setw(6) << std::setfill('0') << step << ".vtk";
    return s.str();
}

} // namespace

SimulationResult run_simulation(const ExperimentConfig& cfg, const OutputOptions& out)
{
    const Mesh mesh = cfg.build_mesh();
    const Materials mat = cfg.material_set();
    const BlockSystem sys = assemble(mesh, cfg.setting(), mat);

    std::vector<Sensor> sensors;
    SimulationResult r;
    for (const auto& s : cfg.sensors) {
        sensors.push_back(make_sensor(mesh, s.name, s.location, s.subdomain));
        if (s.subdomain == Subdomain::Fluid)
            r.sensor_columns.push_back(s.name + "_p");
        else {
            r.sensor_columns.push_back(s.name + "_vx");
            r.sensor_columns.push_back(s.name + "_vy");
        }
    }
    r.cells = mesh.num_cells();
    r.cell_dofs = sys.n_cells();
    r.face_dofs = sys.n_faces();

    const Vec U0 = project_cells(sys, ricker_initial(mesh, cfg.ricker()));
    const double dt = time_step_for_level(cfg.n);
    r.steps = step_count(cfg.final_time, dt);
    const TimeIntegrator ti(sys, make_tableau(cfg.scheme), dt);

    integrate(ti, make_state(sys, U0, 0.0), r.steps, [&](int step, const State& s) {
        const Energy e = discrete_energy(sys, s.cells);
        if (!r.energy.empty()) {
            const double prev = r.energy.back().e.total;
            if (prev > 0)
                r.max_relative_increase = std::max(r.max_relative_increase, (e.total - prev) / prev);
        }
        r.energy.push_back({s.t, e});
        std::vector<double> row{s.t};
        for (const auto& sensor : sensors)
            for (double v : sample_sensor(sys, s.cells, sensor))
                row.push_back(v);
        r.sensor_rows.push_back(std::move(row));
        if (out.dir && out.dump_every > 0 && (step % out.dump_every == 0 || step == r.steps)) {
            std::ostringstream vtk;
            write_vtk(vtk, sys, s.cells, s.t);
            write_file_atomic(*out.dir / vtk_name(step), vtk.str());
        }
    });

    if (out.dir) {
        std::ostringstream energy, sensor;
        write_energy_csv(energy, r, cfg.energy_every);
        write_sensor_csv(sensor, r, cfg.energy_every);
        write_file_atomic(*out.dir / "energy.csv", energy.str());
        write_file_atomic(*out.dir / "sensors.csv", sensor.str());
    }
    return r;
}

void write_energy_csv(std::ostream& out, const SimulationResult& r, int stride)
{
    CsvWriter csv(out, {"t", "E_fluid", "E_solid", "E_total", "relative_loss"});
    for (size_t i = 0; i < r.energy.size(); ++i)
        if (i % size_t(stride) == 0 || i + 1 == r.energy.size()) {
            const auto& s = r.energy[i];
            csv.row(s.t, s.e.fluid, s.e.solid, s.e.total, r.relative_loss(i));
        }
}

void write_sensor_csv(std::ostream& out, const SimulationResult& r, int stride)
{
    std::vector<std::string> header{"t"};
    header.insert(header.end(), r.sensor_columns.begin(), r.sensor_columns.end());
    CsvWriter csv(out, header);
    for (size_t i = 0; i < r.sensor_rows.size(); ++i)
        if (i % size_t(stride) == 0 || i + 1 == r.sensor_rows.size())
            csv.row_values(r.sensor_rows[i]);
}

ConvergenceRow run_manufactured(const ExperimentConfig& cfg, int level, int n)
{
    const Materials mat = cfg.material_set();
    const ManufacturedCase mc = manufactured_case(cfg.manufactured, mat);
    const Mesh mesh = cfg.build_mesh(level, mc.fluid, mc.solid);
    const BlockSystem sys = assemble(mesh, cfg.setting(), mat);
    const LoadAssembler load(sys, mc.f_fluid, mc.f_solid);
    const DirichletData bc(sys, mc.p, mc.v);
    Forcing forcing;
    forcing.load = &load;
    forcing.bc = &bc;

    ConvergenceRow row;
    row.level = level;
    row.n = n;
    row.h = std::ldexp(1.0, -level);
    row.dt = time_step_for_level(n);
    row.cells = mesh.num_cells();

    const Vec U0 = project_cells(sys, {mc.m.at(0.0), mc.p.at(0.0), mc.s.at(0.0), mc.v.at(0.0)}, cfg.hplus_initial);
    const TimeIntegrator ti(sys, make_tableau(cfg.scheme), row.dt, forcing);
    const ErrorEvaluator err(sys, mc);
    const int steps = step_count(cfg.final_time, row.dt);
    integrate(ti, make_state(sys, U0, 0.0), steps, [&](int step, const State& s) {
        const ErrorNorms e = err(s.cells, s.t);
        row.max_error.hho = std::max(row.max_error.hho, e.hho);
        row.max_error.dg = std::max(row.max_error.dg, e.dg);
        if (step == steps)
            row.final_error = e;
    });
    return row;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg)
{
    std::vector<ConvergenceRow> rows;
    const bool space = cfg.study == "space";
    for (int v : space ? cfg.levels : cfg.ns) {
        ConvergenceRow r = space ? run_manufactured(cfg, v, cfg.n) : run_manufactured(cfg, cfg.level, v);
        r.eoc_hho = r.eoc_dg = std::numeric_limits<double>::quiet_NaN();
        if (!rows.empty()) {
            const ConvergenceRow& p = rows.back();
            const double ratio = space ? std::log(p.h / r.h) : std::log(p.dt / r.dt);
            r.eoc_hho = std::log(p.final_error.hho / r.final_error.hho) / ratio;
            r.eoc_dg = std::log(p.final_error.dg / r.final_error.dg) / ratio;
            r.monotone = r.final_error.hho < p.final_error.hho && r.final_error.dg < p.final_error.dg;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows)
{
    CsvWriter csv(out, {"level", "n", "h", "dt", "cells", "err_hho", "err_dg", "eoc_hho", "eoc_dg", "max_err_hho",
                        "max_err_dg", "monotone"});
    for (const auto& r : rows)
        csv.row(r.level, r.n, r.h, r.dt, r.cells, r.final_error.hho, r.final_error.dg, r.eoc_hho, r.eoc_dg,
                r.max_error.hho, r.max_error.dg, r.monotone ? 1 : 0);
}

double fitted_order(const std::vector<double>& size, const std::vector<double>& err)
{
    const size_t n = size.size();
    if (n < 2 || err.size() != n)
        throw NumericalError("fitted_order needs at least two matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = std::log(size[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<SpectralReport> run_spectral(const ExperimentConfig& cfg)
{
    const Mesh mesh = cfg.build_mesh();
    SweepSpec spec;
    spec.ks = cfg.spectral_ks;
    spec.ws = cfg.spectral_ws;
    spec.modes = cfg.spectral_modes;
    spec.alpha = cfg.alpha;
    const std::string geometry = cfg.mesh_type + "-l" + std::to_string(cfg.level);
    std::vector<SpectralReport> rows;
    for (PhysicsVariant v : cfg.spectral_variants) {
        auto part = weight_sweep(mesh, cfg.material_set(), spec, v, geometry);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

void write_vtk(std::ostream& out, const BlockSystem& sys, const Vec& U, double t)
{
    const Mesh& mesh = *sys.mesh;
    const DofMap& d = sys.dofs;
    out << std::setprecision(17);
    out << "# vtk DataFile Version 3.0\nfields t=" << t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.points().size() << " double\n";
    for (const auto& p : mesh.points())
        out << p.x() << ' ' << p.y() << " 0\n";
    size_t size = 0;
    for (const auto& c : mesh.cells())
        size += c.vertex_ids.size() + 1;
    out << "CELLS " << mesh.num_cells() << ' ' << size << '\n';
    for (const auto& c : mesh.cells()) {
        out << c.vertex_ids.size();
        for (int v : c.vertex_ids)
            out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (int c = 0; c < mesh.num_cells(); ++c)
        out << "7\n";

    std::vector<double> p(mesh.num_cells(), 0.0), vnorm(mesh.num_cells(), 0.0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalContext& ctx = sys.contexts[c];
        Vec mean = Vec::Zero(ctx.n_primal());
        for (int q = 0; q < ctx.quad.size(); ++q)
            mean += ctx.quad.weights[q] * ctx.primal.eval(ctx.quad.points[q]);
        mean /= mesh.cell(c).area;
        if (ctx.subdomain == Subdomain::Fluid)
            p[c] = mean.dot(U.segment(d.p_begin(c), d.np));
        else
            vnorm[c] = std::hypot(mean.dot(U.segment(d.v_begin(c), d.np)),
                                  mean.dot(U.segment(d.v_begin(c) + d.np, d.np)));
    }
    out << "CELL_DATA " << mesh.num_cells() << "\nSCALARS p double 1\nLOOKUP_TABLE default\n";
    for (double x : p)
        out << x << '\n';
    out << "SCALARS v_norm double 1\nLOOKUP_TABLE default\n";
    for (double x : vnorm)
        out << x << '\n';
}

MeshSummary summarize_mesh(const Mesh& mesh)
{
    MeshSummary s;
    s.cells = mesh.num_cells();
    s.fluid_cells = mesh.count_cells(Subdomain::Fluid);
    s.solid_cells = mesh.count_cells(Subdomain::Solid);
    s.faces = mesh.num_faces();
    s.interface_faces = mesh.count_faces(FaceClass::Interface);
    s.boundary_faces = mesh.count_faces(FaceClass::BoundaryFluid) + mesh.count_faces(FaceClass::BoundarySolid);
    for (const auto& c : mesh.cells()) {
        const size_t nv = c.vertex_ids.size();
        (nv == 3 ? s.triangles : nv == 4 ? s.quadrilaterals : s.polygons)++;
    }
    s.h_max = mesh.max_cell_diameter();
    s.diameter = mesh.domain_diameter();
    return s;
}

void write_mesh_summary(std::ostream& out, const MeshSummary& s)
{
    CsvWriter csv(out, {"cells", "fluid_cells", "solid_cells", "faces", "interface_faces", "boundary_faces",
                        "triangles", "quadrilaterals", "polygons", "h_max", "diameter"});
    csv.row(s.cells, s.fluid_cells, s.solid_cells, s.faces, s.interface_faces, s.boundary_faces, s.triangles,
            s.quadrilaterals, s.polygons, s.h_max, s.diameter);
}

} // namespace hhoea
