#pragma once

#include "hhoea/assembly.hpp"
#include "hhoea/common.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hhoea {

enum class TableauKind { Explicit, SinglyDiagonallyImplicit };

struct ButcherTableau {
    std::string name;
    Mat A;
    Vec b;
    Vec c;
    TableauKind kind = TableauKind::Explicit;
    int order = 0; // classical order of the coefficients
    int stages() const { return int(b.size()); }
};

// SDIRK23, SDIRK23-O3, SDIRK34, ERK2, ERK3, ERK4
ButcherTableau make_tableau(const std::string& name);
std::vector<std::string> tableau_names();

struct State {
    Vec cells;
    Vec faces;
    double t = 0;
};

// Loads and boundary data entering the cell equations.
struct Forcing {
    const LoadAssembler* load = nullptr;
    const DirichletData* bc = nullptr;
    std::function<Vec(double)> extra; // additional cell load, optional
    // F(t) - K_TD u_D(t)
    Vec cell_rhs(const BlockSystem& sys, double t) const;
};

State make_state(const BlockSystem& sys, Vec cells, double t);

// Relative residual of K_FT U + K_FF U_F = 0.
double face_constraint_residual(const BlockSystem& sys, const State& s);

State erk_step(const BlockSystem& sys, const ButcherTableau& tab, const State& s, double dt,
               const Forcing& forcing = {});
// `solver` must be built for sigma = a * dt with a the tableau diagonal.
State sdirk_step(const BlockSystem& sys, const ButcherTableau& tab, const CondensedStageSolver& solver,
                 const State& s, double dt, const Forcing& forcing = {});

// Fixed-step driver; prepares the stage factorization once for SDIRK tableaux.
class TimeIntegrator {
public:
    TimeIntegrator(const BlockSystem& sys, ButcherTableau tab, double dt, Forcing forcing = {});
    State step(const State& s) const;
    double dt() const { return dt_; }
    const ButcherTableau& tableau() const { return tab_; }

private:
    const BlockSystem* sys_;
    ButcherTableau tab_;
    double dt_;
    Forcing forcing_;
    std::unique_ptr<CondensedStageSolver> solver_;
};

// Time step 0.1 * 2^-n.
double time_step_for_level(int n);

using StepObserver = std::function<void(int step, const State&)>;

// Runs `nsteps` steps, calling `observe` on the initial state and after each step.
// Throws NumericalError naming the last finite time if the state blows up.
State integrate(const TimeIntegrator& ti, State s, int nsteps, const StepObserver& observe = {});

} // namespace hhoea
