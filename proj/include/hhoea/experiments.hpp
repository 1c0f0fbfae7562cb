#pragma once

#include "hhoea/config.hpp"
#include "hhoea/physics.hpp"
#include "hhoea/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hhoea {

struct EnergySample {
    double t = 0;
    Energy e;
};

struct SimulationResult {
    std::vector<EnergySample> energy; // every step, starting at t = 0
    std::vector<std::string> sensor_columns;
    std::vector<std::vector<double>> sensor_rows; // t followed by one value per column, every step
    int steps = 0;
    int cells = 0;
    int cell_dofs = 0;
    int face_dofs = 0;
    // largest (E_{n+1} - E_n) / E_n over the run
    double max_relative_increase = 0;

    double initial_energy() const { return energy.empty() ? 0.0 : energy.front().e.total; }
    // 1 - E_total(t_i) / E_total(0), zero when E_total(0) = 0
    double relative_loss(size_t i) const;
    // Trapezoidal mean of E_solid / E_total over [0, t_end].
    double mean_solid_fraction(double t_end) const;
};

struct OutputOptions {
    std::optional<std::filesystem::path> dir; // nothing is written when absent
    int dump_every = 0;                       // VTK stride in steps
};

// Ricker initial velocity, homogeneous Dirichlet walls, no sources.
SimulationResult run_simulation(const ExperimentConfig& cfg, const OutputOptions& out = {});

void write_energy_csv(std::ostream& out, const SimulationResult& r, int stride);
void write_sensor_csv(std::ostream& out, const SimulationResult& r, int stride);

struct ConvergenceRow {
    int level = 0;
    int n = 0;
    double h = 0;
    double dt = 0;
    int cells = 0;
    ErrorNorms final_error;
    ErrorNorms max_error; // max over all time steps
    double eoc_hho = 0;   // against the previous row, NaN on the first
    double eoc_dg = 0;
    bool monotone = true; // error decreased from the previous row
};

// One manufactured-solution run: error at T_f and its maximum over the steps.
ConvergenceRow run_manufactured(const ExperimentConfig& cfg, int level, int n);
// Space study over cfg.levels at cfg.n, or time study over cfg.ns at cfg.level.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

// Least-squares slope of log(err) against log(size).
double fitted_order(const std::vector<double>& size, const std::vector<double>& err);

std::vector<SpectralReport> run_spectral(const ExperimentConfig& cfg);

// Legacy ASCII unstructured grid with polygon cells and cell-averaged p and |v|.
void write_vtk(std::ostream& out, const BlockSystem& sys, const Vec& U, double t);

struct MeshSummary {
    int cells = 0, fluid_cells = 0, solid_cells = 0;
    int faces = 0, interface_faces = 0, boundary_faces = 0;
    int triangles = 0, quadrilaterals = 0, polygons = 0;
    double h_max = 0, diameter = 0;
};
MeshSummary summarize_mesh(const Mesh& mesh);
void write_mesh_summary(std::ostream& out, const MeshSummary& s);

} // namespace hhoea
