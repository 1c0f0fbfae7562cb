#include "hhoea/timeint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hhoea {

ButcherTableau make_tableau(const std::string& name)
{
    ButcherTableau t;
    t.name = name;
    if (name == "SDIRK23") {
        // as tabulated; this is two implicit midpoint half steps, hence second order
        t.kind = TableauKind::SinglyDiagonallyImplicit;
        t.order = 2;
        t.A.resize(2, 2);
        t.A << 0.25, 0, 0.5, 0.25;
        t.b = Vec::Constant(2, 0.5);
        t.c.resize(2);
        t.c << 0.25, 0.75;
    } else if (name == "SDIRK23-O3") {
        const double g = 0.5 + std::sqrt(3.0) / 6;
        t.kind = TableauKind::SinglyDiagonallyImplicit;
        t.order = 3;
        t.A.resize(2, 2);
        t.A << g, 0, 1 - 2 * g, g;
        t.b = Vec::Constant(2, 0.5);
        t.c.resize(2);
        t.c << g, 1 - g;
    } else if (name == "SDIRK34") {
        t.kind = TableauKind::SinglyDiagonallyImplicit;
        t.order = 4;
        const double th = std::cos(std::numbers::pi / 18) / std::numbers::sqrt3 + 0.5;
        const double xi = 1.0 / (6 * (2 * th - 1) * (2 * th - 1));
        t.A.resize(3, 3);
        t.A << th, 0, 0, 0.5 - th, th, 0, 2 * th, 1 - 4 * th, th;
        t.b.resize(3);
        t.b << xi, 1 - 2 * xi, xi;
        t.c.resize(3);
        t.c << th, 0.5, 1 - th;
    } else if (name == "ERK2") {
        t.order = 2;
        t.A.resize(2, 2);
        t.A << 0, 0, 0.5, 0;
        t.b.resize(2);
        t.b << 0, 1;
        t.c.resize(2);
        t.c << 0, 0.5;
    } else if (name == "ERK3") {
        t.order = 3;
        t.A.resize(3, 3);
        t.A << 0, 0, 0, 0.5, 0, 0, -1, 2, 0;
        t.b.resize(3);
        t.b << 1.0 / 6, 2.0 / 3, 1.0 / 6;
        t.c.resize(3);
        t.c << 0, 0.5, 1;
    } else if (name == "ERK4") {
        t.order = 4;
        t.A = Mat::Zero(4, 4);
        t.A(1, 0) = 0.5;
        t.A(2, 1) = 0.5;
        t.A(3, 2) = 1;
        t.b.resize(4);
        t.b << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
        t.c.resize(4);
        t.c << 0, 0.5, 0.5, 1;
    } else {
        throw ConfigError("unknown time scheme '" + name + "'");
    }
    return t;
}

std::vector<std::string> tableau_names() { return {"SDIRK23", "SDIRK23-O3", "SDIRK34", "ERK2", "ERK3", "ERK4"}; }

Vec Forcing::cell_rhs(const BlockSystem& sys, double t) const
{
    Vec r = (load && !load->empty()) ? (*load)(t) : Vec::Zero(sys.n_cells());
    if (bc && !bc->empty())
        r -= bc->lift(sys, t);
    if (extra)
        r += extra(t);
    return r;
}

State make_state(const BlockSystem& sys, Vec cells, double t)
{
    State s;
    s.faces = sys.solve_faces(cells);
    s.cells = std::move(cells);
    s.t = t;
    return s;
}

double face_constraint_residual(const BlockSystem& sys, const State& s)
{
    if (sys.n_faces() == 0)
        return 0.0;
    const Vec a = sys.K_FT * s.cells, b = sys.K_FF * s.faces;
    const double scale = std::max({a.norm(), b.norm(), 1e-300});
    return (a + b).norm() / scale;
}

namespace {

bool has_forcing(const Forcing& f)
{
    return (f.load && !f.load->empty()) || (f.bc && !f.bc->empty()) || bool(f.extra);
}

} // namespace

State erk_step(const BlockSystem& sys, const ButcherTableau& tab, const State& s, double dt, const Forcing& forcing)
{
    if (tab.kind != TableauKind::Explicit)
        throw ConfigError("erk_step needs an explicit tableau");
    const int ns = tab.stages();
    const bool forced = has_forcing(forcing);
    std::vector<Vec> k(ns);
    for (int i = 0; i < ns; ++i) {
        Vec Ui = s.cells;
        for (int j = 0; j < i; ++j)
            if (tab.A(i, j) != 0.0)
                Ui += dt * tab.A(i, j) * k[j];
        Vec r = -(sys.K_TT * Ui);
        if (sys.n_faces() > 0)
            r -= sys.K_TF * sys.solve_faces(Ui);
        if (forced)
            r += forcing.cell_rhs(sys, s.t + tab.c[i] * dt);
        k[i] = sys.M_inv * r;
    }
    Vec U = s.cells;
    for (int i = 0; i < ns; ++i)
        U += dt * tab.b[i] * k[i];
    return make_state(sys, std::move(U), s.t + dt);
}

State sdirk_step(const BlockSystem& sys, const ButcherTableau& tab, const CondensedStageSolver& solver,
                 const State& s, double dt, const Forcing& forcing)
{
    if (tab.kind != TableauKind::SinglyDiagonallyImplicit)
        throw ConfigError("sdirk_step needs an SDIRK tableau");
    const double sigma = tab.A(0, 0) * dt;
    if (std::abs(solver.sigma() - sigma) > 1e-14 * sigma)
        throw NumericalError("stage factorization was built for a different time step");
    const int ns = tab.stages();
    const bool forced = has_forcing(forcing);
    const Vec zeroF = Vec::Zero(sys.n_faces());
    std::vector<Vec> k(ns);
    Vec X, UF;
    for (int i = 0; i < ns; ++i) {
        Vec Ut = s.cells;
        for (int j = 0; j < i; ++j)
            Ut += dt * tab.A(i, j) * k[j];
        Vec bT = sys.M * Ut;
        if (forced)
            bT += sigma * forcing.cell_rhs(sys, s.t + tab.c[i] * dt);
        solver.solve(bT, zeroF, X, UF);
        k[i] = (X - Ut) / sigma;
    }
    Vec U = s.cells;
    for (int i = 0; i < ns; ++i)
        U += dt * tab.b[i] * k[i];
    return make_state(sys, std::move(U), s.t + dt);
}

TimeIntegrator::TimeIntegrator(const BlockSystem& sys, ButcherTableau tab, double dt, Forcing forcing)
    : sys_(&sys), tab_(std::move(tab)), dt_(dt), forcing_(forcing)
{
    if (!(dt > 0))
        throw ConfigError("time step must be positive");
    if (tab_.kind == TableauKind::SinglyDiagonallyImplicit)
        solver_ = std::make_unique<CondensedStageSolver>(sys, tab_.A(0, 0) * dt);
}

State TimeIntegrator::step(const State& s) const
{
    if (solver_)
        return sdirk_step(*sys_, tab_, *solver_, s, dt_, forcing_);
    return erk_step(*sys_, tab_, s, dt_, forcing_);
}

double time_step_for_level(int n) { return 0.1 * std::ldexp(1.0, -n); }

State integrate(const TimeIntegrator& ti, State s, int nsteps, const StepObserver& observe)
{
    const double t0 = s.t;
    if (observe)
        observe(0, s);
    for (int n = 1; n <= nsteps; ++n) {
        State next = ti.step(s);
        if (!next.cells.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite state after step " << n << "; last valid t = " << s.t;
            throw NumericalError(msg.str());
        }
        next.t = t0 + n * ti.dt(); // no drift from repeated additions
        s = std::move(next);
        if (observe)
            observe(n, s);
    }
    return s;
}

} // namespace hhoea
