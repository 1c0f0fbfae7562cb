#include "hhoea/physics.hpp"

#include <cmath>
#include <numbers>

namespace hhoea {

Materials builtin_materials(const std::string& name)
{
    if (name == "academic")
        return Materials::from_speeds(name, 1.0, 1.0, 1.0, std::sqrt(3.0), 1.0);
    if (name == "granite-water")
        return Materials::from_speeds(name, 0.5, 0.5, 1.3, 2.0, 1.0);
    if (name == "granite-air")
        return Materials::from_speeds(name, 800.0 / 2200.0, 6.36 / 17.5, 800.0, 6.36, 3.27);
    if (name == "real-granite-water")
        return Materials::from_speeds(name, 1025.0, 1500.0, 2690.0, 6000.0, 3000.0);
    throw ConfigError("unknown material set '" + name + "'");
}

std::vector<std::string> builtin_material_names()
{
    return {"academic", "granite-water", "granite-air", "real-granite-water"};
}

namespace {

using Fn = std::function<double(double)>;

// f, f', f''
struct Profile {
    Fn f, d1, d2;
};

ManufacturedCase separable_case(std::string name, const Profile& Xf, const Profile& Xs, const Profile& Y,
                                const Profile& T, const Materials& mat)
{
    ManufacturedCase mc;
    mc.name = std::move(name);
    mc.fluid = {0, 1, 0, 1};
    mc.solid = {-1, 0, 0, 1};
    const double kappa = mat.kappa, rho_s = mat.rho_s, lam = mat.lambda, mu = mat.mu;

    mc.u_fluid.add(T.f, [=](const Point2& x) { return Xf.f(x.x()) * Y.f(x.y()); });
    mc.p.add(T.d1, [=](const Point2& x) { return Xf.f(x.x()) * Y.f(x.y()); });
    mc.m.add(T.f, [=](const Point2& x) -> Eigen::Vector2d {
        return {Xf.d1(x.x()) * Y.f(x.y()), Xf.f(x.x()) * Y.d1(x.y())};
    });
    // (1/kappa) p_t - div m
    mc.f_fluid.add(T.d2, [=](const Point2& x) { return Xf.f(x.x()) * Y.f(x.y()) / kappa; });
    mc.f_fluid.add(T.f, [=](const Point2& x) {
        return -(Xf.d2(x.x()) * Y.f(x.y()) + Xf.f(x.x()) * Y.d2(x.y()));
    });

    auto w = [=](const Point2& x) -> Eigen::Vector2d {
        const double a = Xs.f(x.x()) * Y.f(x.y());
        return {a, a};
    };
    mc.u_solid.add(T.f, w);
    mc.v.add(T.d1, w);
    mc.s.add(T.f, [=](const Point2& x) -> Eigen::Matrix2d {
        const double ex = Xs.d1(x.x()) * Y.f(x.y()), ey = Xs.f(x.x()) * Y.d1(x.y());
        Eigen::Matrix2d s;
        s(0, 0) = lam * (ex + ey) + 2 * mu * ex;
        s(1, 1) = lam * (ex + ey) + 2 * mu * ey;
        s(0, 1) = s(1, 0) = mu * (ex + ey);
        return s;
    });
    // rho v_t - div s
    mc.f_solid.add(T.d2, [=](const Point2& x) -> Eigen::Vector2d {
        const double a = rho_s * Xs.f(x.x()) * Y.f(x.y());
        return {a, a};
    });
    mc.f_solid.add(T.f, [=](const Point2& x) -> Eigen::Vector2d {
        const double xx = Xs.d2(x.x()) * Y.f(x.y());
        const double xy = Xs.d1(x.x()) * Y.d1(x.y());
        const double yy = Xs.f(x.x()) * Y.d2(x.y());
        return {-((lam + 2 * mu) * xx + (lam + mu) * xy + mu * yy),
                -(mu * xx + (lam + mu) * xy + (lam + 2 * mu) * yy)};
    });
    return mc;
}

} // namespace

ManufacturedCase manufactured_case(const std::string& name, const Materials& mat)
{
    if (std::abs(mat.rho_f - 1.0) > 1e-14)
        throw ConfigError("manufactured cases assume a unit fluid density");
    constexpr double pi = std::numbers::pi;
    if (name == "poly-in-space") {
        const double om = std::numbers::sqrt2 * pi;
        Profile Xf{[](double x) { return (1 - x) * x * x; }, [](double x) { return 2 * x - 3 * x * x; },
                   [](double x) { return 2 - 6 * x; }};
        Profile Xs{[](double x) { return (1 + x) * x * x; }, [](double x) { return 2 * x + 3 * x * x; },
                   [](double x) { return 2 + 6 * x; }};
        Profile Y{[](double y) { return (1 - y) * y; }, [](double y) { return 1 - 2 * y; },
                  [](double) { return -2.0; }};
        Profile T{[om](double t) { return std::sin(om * t); }, [om](double t) { return om * std::cos(om * t); },
                  [om](double t) { return -om * om * std::sin(om * t); }};
        return separable_case(name, Xf, Xs, Y, T, mat);
    }
    if (name == "poly-in-time") {
        Profile X{[](double x) { return x * std::sin(pi * x); },
                  [](double x) { return std::sin(pi * x) + pi * x * std::cos(pi * x); },
                  [](double x) { return 2 * pi * std::cos(pi * x) - pi * pi * x * std::sin(pi * x); }};
        Profile Y{[](double y) { return std::sin(pi * y); }, [](double y) { return pi * std::cos(pi * y); },
                  [](double y) { return -pi * pi * std::sin(pi * y); }};
        Profile T{[](double t) { return t * t; }, [](double t) { return 2 * t; }, [](double) { return 2.0; }};
        return separable_case(name, X, X, Y, T, mat);
    }
    throw ConfigError("unknown manufactured case '" + name + "'");
}

std::vector<std::string> manufactured_case_names() { return {"poly-in-space", "poly-in-time"}; }

RickerConfig RickerConfig::for_materials(const Materials& mat, const Point2& center)
{
    RickerConfig rc;
    rc.Lambda = mat.cp_f() / rc.fc;
    rc.center = center;
    return rc;
}

VectorField ricker_velocity(const RickerConfig& rc)
{
    if (!(rc.Lambda > 0))
        throw ConfigError("Ricker wavelength must be positive");
    return [rc](const Point2& x) -> Eigen::Vector2d {
        const Eigen::Vector2d d = x - rc.center;
        const double a = std::numbers::pi / rc.Lambda;
        return rc.theta * std::exp(-a * a * d.squaredNorm()) * d;
    };
}

CellFields ricker_initial(const Mesh& mesh, const RickerConfig& rc)
{
    if (!mesh.locate(rc.center, Subdomain::Fluid))
        throw ConfigError("Ricker center lies outside the fluid subdomain");
    CellFields f;
    f.m = ricker_velocity(rc);
    return f;
}

Energy discrete_energy(const BlockSystem& sys, const Vec& U)
{
    const int split = sys.dofs.off_s;
    const Vec MU = sys.M * U;
    Energy e;
    e.fluid = 0.5 * U.head(split).dot(MU.head(split));
    e.solid = 0.5 * U.tail(U.size() - split).dot(MU.tail(U.size() - split));
    e.total = e.fluid + e.solid;
    return e;
}

Sensor make_sensor(const Mesh& mesh, const std::string& name, const Point2& x, Subdomain sub)
{
    const auto c = mesh.locate(x, sub);
    if (!c)
        throw ConfigError("sensor '" + name + "' is not inside the " +
                          (sub == Subdomain::Fluid ? "fluid" : "solid") + " subdomain");
    return {name, x, sub, *c};
}

std::vector<double> sample_sensor(const BlockSystem& sys, const Vec& U, const Sensor& s)
{
    const LocalContext& ctx = sys.contexts.at(s.cell);
    const Vec phi = ctx.primal.eval(s.location);
    const DofMap& d = sys.dofs;
    if (s.subdomain == Subdomain::Fluid)
        return {phi.dot(U.segment(d.p_begin(s.cell), d.np))};
    return {phi.dot(U.segment(d.v_begin(s.cell), d.np)), phi.dot(U.segment(d.v_begin(s.cell) + d.np, d.np))};
}

ErrorEvaluator::ErrorEvaluator(const BlockSystem& sys, const ManufacturedCase& mc) : sys_(&sys)
{
    const Mesh& mesh = *sys.mesh;
    const int nc = mesh.num_cells();
    primal_.resize(nc);
    dual_.resize(nc);
    parallel_for(nc, [&](int c) {
        const QuadratureRule& q = sys.error_cache[c].quad;
        const bool fluid = mesh.cell(c).subdomain == Subdomain::Fluid;
        auto sample = [&](auto& field, int comps, auto convert) {
            Samples out;
            for (const auto& term : field.terms) {
                Mat vals(q.size(), comps);
                for (int i = 0; i < q.size(); ++i)
                    vals.row(i) = convert(term.space(q.points[i])).transpose();
                out.time.push_back(term.time);
                out.values.push_back(std::move(vals));
            }
            return out;
        };
        auto scalar = [](double v) { return Eigen::Matrix<double, 1, 1>(v); };
        auto vec = [](const Eigen::Vector2d& v) { return v; };
        auto ten = [](const Eigen::Matrix2d& t) { return sym_components(t); };
        if (fluid) {
            primal_[c] = sample(mc.p, 1, scalar);
            dual_[c] = sample(mc.m, 2, vec);
        } else {
            primal_[c] = sample(mc.v, 2, vec);
            dual_[c] = sample(mc.s, 3, ten);
        }
    });
}

ErrorNorms ErrorEvaluator::operator()(const Vec& U, double t) const
{
    const BlockSystem& sys = *sys_;
    const Mesh& mesh = *sys.mesh;
    const DofMap& d = sys.dofs;
    const Materials& mat = sys.materials;
    double hho = 0, dg = 0;
    auto exact = [t](const Samples& s, int nq, int comps) {
        Mat out = Mat::Zero(nq, comps);
        for (size_t i = 0; i < s.values.size(); ++i)
            out += s.time[i](t) * s.values[i];
        return out;
    };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellCache& cc = sys.error_cache[c];
        const int nq = cc.quad.size();
        const Eigen::Map<const Vec> w(cc.quad.weights.data(), nq);
        if (mesh.cell(c).subdomain == Subdomain::Fluid) {
            const Vec ep = cc.primal_vals * U.segment(d.p_begin(c), d.np) - exact(primal_[c], nq, 1).col(0);
            hho += w.dot(ep.cwiseAbs2()) / mat.kappa;
            const Mat ex = exact(dual_[c], nq, 2);
            for (int a = 0; a < 2; ++a) {
                const Vec e = cc.dual_vals * U.segment(d.m_begin(c) + a * d.nd, d.nd) - ex.col(a);
                dg += mat.rho_f * w.dot(e.cwiseAbs2());
            }
        } else {
            const Mat ev = exact(primal_[c], nq, 2);
            for (int a = 0; a < 2; ++a) {
                const Vec e = cc.primal_vals * U.segment(d.v_begin(c) + a * d.np, d.np) - ev.col(a);
                hho += mat.rho_s * w.dot(e.cwiseAbs2());
            }
            const Mat es = exact(dual_[c], nq, 3);
            Mat e(nq, 3);
            for (int a = 0; a < 3; ++a)
                e.col(a) = cc.dual_vals * U.segment(d.s_begin(c) + a * d.nd, d.nd) - es.col(a);
            dg += w.dot(((e * sys.A_s).cwiseProduct(e)).rowwise().sum());
        }
    }
    return {std::sqrt(hho), std::sqrt(dg)};
}

} // namespace hhoea
