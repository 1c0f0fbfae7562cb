// Command-line driver: simulate, convergence, spectral, mesh-info.

#include "hhoea/config.hpp"
#include "hhoea/csv.hpp"
#include "hhoea/experiments.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace hhoea;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
    std::string config;
    std::string out = "out";
    int threads = 0;
    int dump_every = -1;
};

ExperimentConfig load(const Options& o)
{
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : parse_config_file(o.config);
    if (o.dump_every >= 0)
        cfg.dump_every = o.dump_every;
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const Options& o, const ExperimentConfig& cfg)
{
    const fs::path dir(o.out);
    fs::create_directories(dir);
    write_file_atomic(dir / "config.ini", serialize_config(cfg));
    return dir;
}

int simulate(const Options& o)
{
    const ExperimentConfig cfg = load(o);
    const fs::path dir = prepare_out(o, cfg);
    const SimulationResult r = run_simulation(cfg, {dir, cfg.dump_every});
    std::cout << "steps " << r.steps << ", cells " << r.cells << ", E(0) " << r.initial_energy()
              << ", relative loss at T " << r.relative_loss(r.energy.size() - 1) << "\n";
    return 0;
}

int convergence(const Options& o)
{
    const ExperimentConfig cfg = load(o);
    const fs::path dir = prepare_out(o, cfg);
    const auto rows = run_convergence(cfg);
    std::ostringstream csv;
    write_convergence_csv(csv, rows);
    write_file_atomic(dir / "convergence.csv", csv.str());
    std::cout << csv.str();
    for (const auto& r : rows)
        if (!r.monotone)
            std::cerr << "warning: error did not decrease at level " << r.level << ", n " << r.n << "\n";
    return 0;
}

int spectral(const Options& o)
{
    const ExperimentConfig cfg = load(o);
    const fs::path dir = prepare_out(o, cfg);
    std::ostringstream csv;
    write_spectral_csv(csv, run_spectral(cfg));
    write_file_atomic(dir / "spectral.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int mesh_info(const Options& o)
{
    const ExperimentConfig cfg = load(o);
    std::ostringstream csv;
    write_mesh_summary(csv, summarize_mesh(cfg.build_mesh()));
    std::cout << csv.str();
    if (o.out != "-") {
        fs::create_directories(o.out);
        write_file_atomic(fs::path(o.out) / "mesh.csv", csv.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Elasto-acoustic HHO/dG wave solver"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "experiment config file");
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads, 0 keeps the default")->check(CLI::NonNegativeNumber);
    app.add_option("--dump-every", o.dump_every, "VTK dump stride in steps (overrides the config)")
        ->check(CLI::NonNegativeNumber);

    int (*run)(const Options&) = nullptr;
    const std::vector<std::tuple<const char*, const char*, int (*)(const Options&)>> commands{
        {"simulate", "Ricker run: energy, sensor and field output", simulate},
        {"convergence", "manufactured-solution error table", convergence},
        {"spectral", "spectral radius sweep over stabilization weights", spectral},
        {"mesh-info", "mesh statistics", mesh_info},
    };
    for (const auto& [name, help, fn] : commands)
        app.add_subcommand(name, help)->fallthrough()->callback([&run, f = fn] { run = f; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (o.threads > 0)
            set_num_threads(o.threads);
        return run(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const GeometryError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
