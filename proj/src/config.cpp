#include "hhoea/config.hpp"

#include "hhoea/timeint.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace hhoea {

namespace pt = boost::property_tree;

const std::vector<ConfigKey>& config_schema()
{
    static const std::vector<ConfigKey> schema{
        {"mesh", "type", "cartesian | triangles | perturbed | mixed | file"},
        {"mesh", "level", "refinement level, h = 2^-level"},
        {"mesh", "levels", "level list of a spatial convergence study"},
        {"mesh", "file", "polygonal mesh file (type = file)"},
        {"mesh", "fluid", "fluid rectangle x0 x1 y0 y1"},
        {"mesh", "solid", "solid rectangle x0 x1 y0 y1"},
        {"mesh", "perturb_amplitude", "vertex jitter relative to h (type = perturbed)"},
        {"mesh", "seed", "jitter seed"},
        {"materials", "name", "academic | granite-water | granite-air | real-granite-water"},
        {"materials", "stab_speed", "solid wave speed in the stabilization: s (shear) | p"},
        {"discretization", "k", "face degree, >= 1"},
        {"discretization", "order", "equal | mixed"},
        {"discretization", "alpha", "0 or 1, tau ~ h^-alpha"},
        {"discretization", "eta_f", "fluid weight or 'reference'"},
        {"discretization", "eta_s", "solid weight or 'reference'"},
        {"time", "scheme", "Butcher tableau name"},
        {"time", "n", "time level, dt = 0.1 * 2^-n"},
        {"time", "ns", "time level list of a temporal convergence study"},
        {"time", "final_time", "end of the simulation"},
        {"ricker", "center", "x y, inside the fluid"},
        {"ricker", "theta", "amplitude, 0 gives a zero initial state"},
        {"ricker", "fc", "central frequency; Lambda = c_p^f / fc"},
        {"sensors", "fluid", "pressure sensors, 'x y' separated by ';'"},
        {"sensors", "solid", "velocity sensors, 'x y' separated by ';'"},
        {"convergence", "case", "poly-in-space | poly-in-time"},
        {"convergence", "study", "space | time"},
        {"convergence", "initial", "l2 | hplus projection of the initial dual fields"},
        {"spectral", "ks", "face degrees"},
        {"spectral", "ws", "weight exponents, eta = 2^w eta_ref"},
        {"spectral", "modes", "equal and/or mixed"},
        {"spectral", "variants", "coupled, acoustic and/or elastic"},
        {"output", "dump_every", "VTK dump stride in steps, 0 disables"},
        {"output", "energy_every", "energy/sensor row stride in steps"},
    };
    return schema;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what)
{
    throw ConfigError(key + ": " + what);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(item);
    return out;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
    std::istringstream is(text);
    std::vector<T> out;
    std::string tok;
    while (is >> tok) {
        std::istringstream ts(tok);
        T v;
        if (!(ts >> v) || !ts.eof())
            bad(key, "cannot read '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

template <class T>
T parse_one(const std::string& key, const std::string& text)
{
    const auto v = parse_list<T>(key, text);
    if (v.size() != 1)
        bad(key, "expected one value, got '" + text + "'");
    return v[0];
}

std::vector<double> parse_fixed(const std::string& key, const std::string& text, size_t n)
{
    const auto v = parse_list<double>(key, text);
    if (v.size() != n)
        bad(key, "expected " + std::to_string(n) + " numbers, got '" + text + "'");
    return v;
}

Rect parse_rect(const std::string& key, const std::string& text)
{
    const auto v = parse_fixed(key, text, 4);
    return Rect{v[0], v[1], v[2], v[3]};
}

Point2 parse_point(const std::string& key, const std::string& text)
{
    const auto v = parse_fixed(key, text, 2);
    return Point2(v[0], v[1]);
}

OrderMode parse_mode(const std::string& key, const std::string& s)
{
    if (s == "equal")
        return OrderMode::Equal;
    if (s == "mixed")
        return OrderMode::Mixed;
    bad(key, "expected equal or mixed, got '" + s + "'");
}

PhysicsVariant parse_variant(const std::string& key, const std::string& s)
{
    if (s == "coupled")
        return PhysicsVariant::Coupled;
    if (s == "acoustic")
        return PhysicsVariant::Acoustic;
    if (s == "elastic")
        return PhysicsVariant::Elastic;
    bad(key, "expected coupled, acoustic or elastic, got '" + s + "'");
}

bool parse_bool_choice(const std::string& key, const std::string& s, const std::string& yes, const std::string& no)
{
    if (s == yes)
        return true;
    if (s == no)
        return false;
    bad(key, "expected " + yes + " or " + no + ", got '" + s + "'");
}

std::string sensor_name(Subdomain sub, int i)
{
    return std::string(sub == Subdomain::Fluid ? "S_f" : "S_s") + (i ? std::to_string(i + 1) : "");
}

std::vector<SensorSpec> parse_sensors(const std::string& key, const std::string& text, Subdomain sub)
{
    std::vector<SensorSpec> out;
    for (const auto& item : split(text, ';')) {
        if (trim(item).empty())
            continue;
        out.push_back({sensor_name(sub, int(out.size())), parse_point(key, item), sub});
    }
    return out;
}

std::string num(double x)
{
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f, const std::string& sep = " ")
{
    std::string out;
    for (size_t i = 0; i < v.size(); ++i)
        out += (i ? sep : "") + f(v[i]);
    return out;
}

std::string rect_text(const Rect& r)
{
    return num(r.x0) + " " + num(r.x1) + " " + num(r.y0) + " " + num(r.y1);
}

std::string point_text(const Point2& p) { return num(p.x()) + " " + num(p.y()); }

bool same_rect(const Rect& a, const Rect& b)
{
    return a.x0 == b.x0 && a.x1 == b.x1 && a.y0 == b.y0 && a.y1 == b.y1;
}

} // namespace

ExperimentConfig parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    std::set<std::pair<std::string, std::string>> known;
    for (const auto& k : config_schema())
        known.insert({k.section, k.key});

    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            bad(section, "keys must appear inside a [section]");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            if (!known.count({section, key}))
                bad(full, "unknown key");
            const std::string v = trim(node.data());

            if (section == "mesh") {
                if (key == "type")
                    c.mesh_type = v;
                else if (key == "level")
                    c.level = parse_one<int>(full, v);
                else if (key == "levels")
                    c.levels = parse_list<int>(full, v);
                else if (key == "file")
                    c.mesh_file = v;
                else if (key == "fluid")
                    c.fluid = parse_rect(full, v);
                else if (key == "solid")
                    c.solid = parse_rect(full, v);
                else if (key == "perturb_amplitude")
                    c.perturb_amplitude = parse_one<double>(full, v);
                else if (key == "seed")
                    c.seed = parse_one<unsigned>(full, v);
            } else if (section == "materials") {
                if (key == "name")
                    c.materials = v;
                else if (key == "stab_speed")
                    c.stab_shear_speed = parse_bool_choice(full, v, "s", "p");
            } else if (section == "discretization") {
                if (key == "k")
                    c.k = parse_one<int>(full, v);
                else if (key == "order")
                    c.mode = parse_mode(full, v);
                else if (key == "alpha")
                    c.alpha = parse_one<int>(full, v);
                else if (key == "eta_f")
                    c.eta_f = v == "reference" ? std::nullopt : std::optional<double>(parse_one<double>(full, v));
                else if (key == "eta_s")
                    c.eta_s = v == "reference" ? std::nullopt : std::optional<double>(parse_one<double>(full, v));
            } else if (section == "time") {
                if (key == "scheme")
                    c.scheme = v;
                else if (key == "n")
                    c.n = parse_one<int>(full, v);
                else if (key == "ns")
                    c.ns = parse_list<int>(full, v);
                else if (key == "final_time")
                    c.final_time = parse_one<double>(full, v);
            } else if (section == "ricker") {
                if (key == "center")
                    c.ricker_center = parse_point(full, v);
                else if (key == "theta")
                    c.ricker_theta = parse_one<double>(full, v);
                else if (key == "fc")
                    c.ricker_fc = parse_one<double>(full, v);
            } else if (section == "sensors") {
                const Subdomain sub = key == "fluid" ? Subdomain::Fluid : Subdomain::Solid;
                std::erase_if(c.sensors, [&](const SensorSpec& s) { return s.subdomain == sub; });
                for (auto& s : parse_sensors(full, v, sub))
                    c.sensors.push_back(s);
                std::stable_sort(c.sensors.begin(), c.sensors.end(), [](const auto& a, const auto& b) {
                    return a.subdomain == Subdomain::Fluid && b.subdomain == Subdomain::Solid;
                });
            } else if (section == "convergence") {
                if (key == "case")
                    c.manufactured = v;
                else if (key == "study")
                    c.study = v;
                else if (key == "initial")
                    c.hplus_initial = parse_bool_choice(full, v, "hplus", "l2");
            } else if (section == "spectral") {
                if (key == "ks")
                    c.spectral_ks = parse_list<int>(full, v);
                else if (key == "ws")
                    c.spectral_ws = parse_list<int>(full, v);
                else if (key == "modes") {
                    c.spectral_modes.clear();
                    for (const auto& s : parse_list<std::string>(full, v))
                        c.spectral_modes.push_back(parse_mode(full, s));
                } else if (key == "variants") {
                    c.spectral_variants.clear();
                    for (const auto& s : parse_list<std::string>(full, v))
                        c.spectral_variants.push_back(parse_variant(full, s));
                }
            } else if (section == "output") {
                if (key == "dump_every")
                    c.dump_every = parse_one<int>(full, v);
                else if (key == "energy_every")
                    c.energy_every = parse_one<int>(full, v);
            }
        }
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config_string(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c)
{
    auto ints = [](const std::vector<int>& v) { return join(v, [](int i) { return std::to_string(i); }); };
    auto sensors = [&](Subdomain sub) {
        std::vector<Point2> pts;
        for (const auto& s : c.sensors)
            if (s.subdomain == sub)
                pts.push_back(s.location);
        return join(pts, point_text, "; ");
    };
    auto eta = [](const std::optional<double>& e) { return e ? num(*e) : std::string("reference"); };

    std::ostringstream o;
    o << "[mesh]\n"
      << "type = " << c.mesh_type << "\n"
      << "level = " << c.level << "\n"
      << "levels = " << ints(c.levels) << "\n"
      << "file = " << c.mesh_file << "\n"
      << "fluid = " << rect_text(c.fluid) << "\n"
      << "solid = " << rect_text(c.solid) << "\n"
      << "perturb_amplitude = " << num(c.perturb_amplitude) << "\n"
      << "seed = " << c.seed << "\n\n"
      << "[materials]\n"
      << "name = " << c.materials << "\n"
      << "stab_speed = " << (c.stab_shear_speed ? "s" : "p") << "\n\n"
      << "[discretization]\n"
      << "k = " << c.k << "\n"
      << "order = " << to_string(c.mode) << "\n"
      << "alpha = " << c.alpha << "\n"
      << "eta_f = " << eta(c.eta_f) << "\n"
      << "eta_s = " << eta(c.eta_s) << "\n\n"
      << "[time]\n"
      << "scheme = " << c.scheme << "\n"
      << "n = " << c.n << "\n"
      << "ns = " << ints(c.ns) << "\n"
      << "final_time = " << num(c.final_time) << "\n\n"
      << "[ricker]\n"
      << "center = " << point_text(c.ricker_center) << "\n"
      << "theta = " << num(c.ricker_theta) << "\n"
      << "fc = " << num(c.ricker_fc) << "\n\n"
      << "[sensors]\n"
      << "fluid = " << sensors(Subdomain::Fluid) << "\n"
      << "solid = " << sensors(Subdomain::Solid) << "\n\n"
      << "[convergence]\n"
      << "case = " << c.manufactured << "\n"
      << "study = " << c.study << "\n"
      << "initial = " << (c.hplus_initial ? "hplus" : "l2") << "\n\n"
      << "[spectral]\n"
      << "ks = " << ints(c.spectral_ks) << "\n"
      << "ws = " << ints(c.spectral_ws) << "\n"
      << "modes = " << join(c.spectral_modes, [](OrderMode m) { return to_string(m); }) << "\n"
      << "variants = " << join(c.spectral_variants, [](PhysicsVariant v) { return to_string(v); }) << "\n\n"
      << "[output]\n"
      << "dump_every = " << c.dump_every << "\n"
      << "energy_every = " << c.energy_every << "\n";
    return o.str();
}

void ExperimentConfig::validate() const
{
    static const std::vector<std::string> mesh_types{"cartesian", "triangles", "perturbed", "mixed", "file"};
    if (std::find(mesh_types.begin(), mesh_types.end(), mesh_type) == mesh_types.end())
        bad("mesh.type", "unknown mesh type '" + mesh_type + "'");
    if (mesh_type == "file" && mesh_file.empty())
        bad("mesh.file", "required when mesh.type = file");
    if (level < 0 || level > 10)
        bad("mesh.level", "must lie in [0, 10]");
    for (int l : levels)
        if (l < 0 || l > 10)
            bad("mesh.levels", "entries must lie in [0, 10]");
    for (const auto& [name, r] : {std::pair{"mesh.fluid", fluid}, std::pair{"mesh.solid", solid}})
        if (!(r.width() > 0) || !(r.height() > 0))
            bad(name, "empty rectangle");
    if (perturb_amplitude < 0 || perturb_amplitude >= 0.5)
        bad("mesh.perturb_amplitude", "must lie in [0, 0.5)");

    const auto names = builtin_material_names();
    if (std::find(names.begin(), names.end(), materials) == names.end())
        bad("materials.name", "unknown material set '" + materials + "'");

    if (k < 1)
        bad("discretization.k", "must be at least 1");
    if (alpha != 0 && alpha != 1)
        bad("discretization.alpha", "must be 0 or 1");
    if (eta_f && !(*eta_f > 0))
        bad("discretization.eta_f", "must be positive");
    if (eta_s && !(*eta_s > 0))
        bad("discretization.eta_s", "must be positive");

    const auto tabs = tableau_names();
    if (std::find(tabs.begin(), tabs.end(), scheme) == tabs.end())
        bad("time.scheme", "unknown tableau '" + scheme + "'");
    if (n < 0 || n > 20)
        bad("time.n", "must lie in [0, 20]");
    for (int m : ns)
        if (m < 0 || m > 20)
            bad("time.ns", "entries must lie in [0, 20]");
    if (!(final_time >= 0))
        bad("time.final_time", "must be non-negative");

    if (!(ricker_theta >= 0))
        bad("ricker.theta", "must be non-negative");
    if (!(ricker_fc > 0))
        bad("ricker.fc", "must be positive");

    const auto cases = manufactured_case_names();
    if (std::find(cases.begin(), cases.end(), manufactured) == cases.end())
        bad("convergence.case", "unknown case '" + manufactured + "'");
    if (study != "space" && study != "time")
        bad("convergence.study", "expected space or time");

    if (spectral_ks.empty() || spectral_ws.empty() || spectral_modes.empty() || spectral_variants.empty())
        bad("spectral", "lists must not be empty");
    for (int kk : spectral_ks)
        if (kk < 1)
            bad("spectral.ks", "degrees must be at least 1");

    if (dump_every < 0)
        bad("output.dump_every", "must be non-negative");
    if (energy_every < 1)
        bad("output.energy_every", "must be positive");
}

Materials ExperimentConfig::material_set() const
{
    Materials m = builtin_materials(materials);
    m.stab_shear_speed = stab_shear_speed;
    return m;
}

DiscretizationSetting ExperimentConfig::setting() const
{
    DiscretizationSetting s = DiscretizationSetting::with_reference_weights(k, mode, alpha);
    if (eta_f)
        s.eta_f = *eta_f;
    if (eta_s)
        s.eta_s = *eta_s;
    return s;
}

Mesh ExperimentConfig::build_mesh(int lvl, const Rect& f, const Rect& s) const
{
    if (mesh_type == "file")
        return read_polygonal_mesh_file(mesh_file);
    if (mesh_type == "mixed")
        return mixed_polygonal(lvl, f, s);
    Mesh m = build_cartesian_mesh(lvl, f, s);
    if (mesh_type == "triangles")
        return triangulate(m);
    if (mesh_type == "perturbed")
        return perturb(m, perturb_amplitude, seed);
    return m;
}

RickerConfig ExperimentConfig::ricker() const
{
    RickerConfig rc = RickerConfig::for_materials(material_set(), ricker_center);
    rc.theta = ricker_theta;
    rc.fc = ricker_fc;
    rc.Lambda = material_set().cp_f() / ricker_fc;
    return rc;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b)
{
    auto same_sensors = [](const std::vector<SensorSpec>& x, const std::vector<SensorSpec>& y) {
        if (x.size() != y.size())
            return false;
        for (size_t i = 0; i < x.size(); ++i)
            if (x[i].name != y[i].name || x[i].location != y[i].location || x[i].subdomain != y[i].subdomain)
                return false;
        return true;
    };
    return a.mesh_type == b.mesh_type && a.level == b.level && a.levels == b.levels && a.mesh_file == b.mesh_file &&
           same_rect(a.fluid, b.fluid) && same_rect(a.solid, b.solid) && a.perturb_amplitude == b.perturb_amplitude &&
           a.seed == b.seed && a.materials == b.materials && a.stab_shear_speed == b.stab_shear_speed && a.k == b.k &&
           a.mode == b.mode && a.alpha == b.alpha && a.eta_f == b.eta_f && a.eta_s == b.eta_s && a.scheme == b.scheme &&
           a.n == b.n && a.ns == b.ns && a.final_time == b.final_time && a.ricker_center == b.ricker_center &&
           a.ricker_theta == b.ricker_theta && a.ricker_fc == b.ricker_fc && same_sensors(a.sensors, b.sensors) &&
           a.manufactured == b.manufactured && a.study == b.study && a.hplus_initial == b.hplus_initial &&
           a.spectral_ks == b.spectral_ks && a.spectral_ws == b.spectral_ws &&
           a.spectral_modes == b.spectral_modes && a.spectral_variants == b.spectral_variants &&
           a.dump_every == b.dump_every && a.energy_every == b.energy_every;
}

} // namespace hhoea
