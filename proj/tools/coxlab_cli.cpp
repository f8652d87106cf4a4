#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coxlab/axial.hpp"
#include "coxlab/backgrounds.hpp"
#include "coxlab/errors.hpp"
#include "coxlab/radial.hpp"
#include "coxlab/tensor_algebra.hpp"

using json = nlohmann::json;
using namespace coxlab;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kSphericalEdge = std::numbers::pi / 2.0 - 1e-3;

const std::vector<std::string> kCommands = {"verify-tensor", "spectrum", "radial-eigen",
                                            "zprofile",      "airy",     "axial-integrate"};

// key, default, help
struct Key {
    const char* name;
    const char* fallback;
    const char* help;
};

const std::vector<Key> kKeys = {
    {"geometry", "flat", "flat | lobachevsky | spherical"},
    {"field", "magnetic", "magnetic | electric"},
    {"b", "1", "dimensionless field strength"},
    {"nu", "1", "electric slope parameter"},
    {"eta", "0", "flat structure parameter Gamma*B"},
    {"gamma", "0", "curved structure parameter"},
    {"mu", "1", "axial mass parameter"},
    {"rho", "1", "curvature radius"},
    {"lambda-sep", "2", "radial separation constant feeding the axial problem"},
    {"n-max", "10", "largest radial quantum number"},
    {"m-range", "0", "azimuthal numbers, m or lo:hi"},
    {"k", "0", "axial wavenumber (flat)"},
    {"count", "4", "levels per m for radial-eigen"},
    {"energy", "0", "axial energy parameter (eps, w or W)"},
    {"w-prime", "0", "shifted flat electric energy w'"},
    {"w-perp", "0", "radial separation constant of the flat electric problem"},
    {"lambda-c", "1", "Compton length"},
    {"z-min", "auto", "lower end of the z grid"},
    {"z-max", "auto", "upper end of the z grid"},
    {"x-min", "-10", "lower end of the Airy grid"},
    {"x-max", "10", "upper end of the Airy grid"},
    {"samples", "601", "grid samples"},
    {"ic-value", "1", "initial value for axial-integrate"},
    {"ic-slope", "0", "initial slope for axial-integrate"},
    {"step", "0", "fixed step for axial-integrate (0: adaptive)"},
    {"grid-points", "4000", "radial finite-volume cells"},
    {"r-max", "0", "radial cutoff (0: automatic)"},
    {"trials", "100", "random draws for verify-tensor"},
    {"seed", "7", "random seed"},
    {"tol", "auto", "tolerance override"},
    {"format", "csv", "csv | json"},
    {"out", "-", "output path, - for stdout"},
    {"include-invalid", "false", "keep invalid spectrum rows"},
    {"force-zero", "false", "verify-tensor with E = B = 0"},
};

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

class Settings {
public:
    std::map<std::string, std::string> values;

    const std::string& str(const std::string& k) const { return values.at(k); }
    bool is_auto(const std::string& k) const { return str(k) == "auto"; }

    double num(const std::string& k) const {
        const std::string& s = str(k);
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ParameterError("--" + k + ": not a number: '" + s + "'");
        }
    }

    long integer(const std::string& k) const {
        const std::string& s = str(k);
        try {
            std::size_t pos = 0;
            long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ParameterError("--" + k + ": not an integer: '" + s + "'");
        }
    }

    bool flag(const std::string& k) const {
        const std::string& s = str(k);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ParameterError("--" + k + ": not a boolean: '" + s + "'");
    }

    std::vector<int> range(const std::string& k) const {
        const std::string& s = str(k);
        auto colon = s.find(':');
        try {
            if (colon == std::string::npos) return {std::stoi(s)};
            int lo = std::stoi(s.substr(0, colon)), hi = std::stoi(s.substr(colon + 1));
            if (hi < lo) throw ParameterError("--" + k + ": empty range '" + s + "'");
            std::vector<int> out;
            for (int m = lo; m <= hi; ++m) out.push_back(m);
            return out;
        } catch (const InputError&) {
            throw;
        } catch (const std::exception&) {
            throw ParameterError("--" + k + ": expected m or lo:hi, got '" + s + "'");
        }
    }
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError(path + ":" + std::to_string(lineNo) + ": expected key=value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        bool known = key == "command";
        for (const auto& k : kKeys) known = known || key == k.name;
        if (!known) throw ParameterError(path + ":" + std::to_string(lineNo) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

BackgroundSpec background(const Settings& s) {
    BackgroundSpec spec;
    spec.geometry = parse_geometry(s.str("geometry"));
    spec.field = parse_field(s.str("field"));
    spec.b = s.num("b");
    spec.nu = s.num("nu");
    spec.mu = s.num("mu");
    spec.rho = s.num("rho");
    spec.gamma = (spec.geometry == Geometry::Flat && spec.field == FieldKind::Magnetic)
                     ? s.num("eta")
                     : s.num("gamma");
    spec.validate();
    return spec;
}

double tolerance(const Settings& s, double fallback) {
    if (s.is_auto("tol")) return fallback;
    double t = s.num("tol");
    if (!(t > 0.0)) throw ParameterError("--tol must be positive");
    return t;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw ParameterError("cannot open output '" + path + "'");
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

bool is_json(const Settings& s) {
    const std::string& f = s.str("format");
    if (f == "json") return true;
    if (f == "csv") return false;
    throw ParameterError("--format must be csv or json");
}

// verify-tensor

int cmd_verify_tensor(const Settings& s, std::ostream& os) {
    const long trials = s.integer("trials");
    if (trials < 1) throw ParameterError("--trials must be at least 1");
    const double tol = tolerance(s, 1e-10);
    const bool zero = s.flag("force-zero");
    std::mt19937_64 rng(static_cast<std::uint64_t>(s.integer("seed")));
    std::uniform_real_distribution<double> field(-1.0, 1.0), g0(0.5, 2.0), gs(-2.0, -0.5),
        mass(1.0, 2.0), coupling(-0.2, 0.2);

    std::map<std::string, double> worst = {{"minimalPolynomialCubic", 0.0},
                                           {"minimalPolynomialQuartic", 0.0},
                                           {"invariantTraces", 0.0},
                                           {"inverseProduct", 0.0},
                                           {"generalInverseProduct", 0.0},
                                           {"cayleyHamilton", 0.0}};
    auto bump = [&](const char* k, double v) { worst[k] = std::max(worst[k], v); };

    for (long t = 0; t < trials; ++t) {
        FieldConfig3 f;
        for (int i = 0; i < 3; ++i) {
            f.E[i] = field(rng);
            f.B[i] = field(rng);
        }
        DiagonalMetric g{g0(rng), gs(rng), gs(rng), gs(rng)};
        auto pc = ParticleConstants::from_converted(mass(rng), coupling(rng));
        if (zero) {
            // unit mass keeps the free inverse exact, so every residual is exactly 0
            f = FieldConfig3{};
            pc.mu = 1.0;
        }

        MixedTensor F = build_mixed_field_tensor(f, g);
        MixedTensor Fd = dual_tensor(f, g);
        Invariants inv = field_invariants(f, g);
        auto [r3, r4] = minimal_poly_residuals(F, Fd, inv);
        bump("minimalPolynomialCubic", r3);
        bump("minimalPolynomialQuartic", r4);
        bump("invariantTraces", std::max(inv.residualI, inv.residualJ));
        auto [X, coeffs] = lambda_inverse(pc, F, Fd, inv);
        bump("inverseProduct", inverse_product_residual(pc, F, X));
        auto [Xg, cg] = general_lambda_inverse(pc, F);
        bump("generalInverseProduct", inverse_product_residual(pc, F, Xg));
        bump("cayleyHamilton", newton_char_coeffs(F).cayleyResidual);
    }

    json deSitter = json::array();
    double deSitterWorst = 0.0;
    for (double R : {0.5, 1.0, 2.0}) {
        CharCoeffs cc = newton_char_coeffs(MixedTensor::identity(R / 4.0));
        const double expected[4] = {R, -3.0 * R * R / 8.0, R * R * R / 16.0,
                                    -R * R * R * R / 256.0};
        double rel = 0.0;
        json row = {{"R", R}, {"p", json::array()}, {"expected", json::array()}};
        for (int k = 0; k < 4; ++k) {
            rel = std::max(rel, std::abs(cc.p[k] - expected[k]) / std::abs(expected[k]));
            row["p"].push_back(jnum(cc.p[k].real()));
            row["expected"].push_back(expected[k]);
        }
        MixedTensor shifted = MixedTensor::identity(R / 4.0) - MixedTensor::identity(R / 4.0);
        double quartic = (shifted * shifted * shifted * shifted).max_abs();
        row["maxRelativeError"] = rel;
        row["quarticNorm"] = quartic;
        deSitterWorst = std::max({deSitterWorst, rel, quartic});
        deSitter.push_back(row);
    }
    worst["deSitter"] = deSitterWorst;

    double maxResidual = 0.0;
    std::vector<std::string> failing;
    for (const auto& [name, v] : worst) {
        maxResidual = std::max(maxResidual, v);
        if (!(v <= tol)) failing.push_back(name);
    }

    if (is_json(s)) {
        json report = {{"schemaVersion", kSchemaVersion},
                       {"command", "verify-tensor"},
                       {"trials", trials},
                       {"seed", s.integer("seed")},
                       {"tolerance", tol},
                       {"forceZero", zero},
                       {"checks", json::object()},
                       {"deSitter", deSitter},
                       {"maxResidual", maxResidual},
                       {"failing", failing},
                       {"pass", failing.empty()}};
        for (const auto& [name, v] : worst) report["checks"][name] = v;
        os << report.dump(2) << "\n";
    } else {
        os << "check,maxResidual,pass\n";
        for (const auto& [name, v] : worst) os << name << "," << fmt(v) << "," << (v <= tol) << "\n";
    }
    for (const auto& name : failing)
        std::cerr << "verify-tensor: check " << name << " exceeds tolerance " << fmt(tol) << "\n";
    return failing.empty() ? 0 : 2;
}

// spectrum

int cmd_spectrum(const Settings& s, std::ostream& os) {
    BackgroundSpec spec = background(s);
    if (spec.field != FieldKind::Magnetic) throw ParameterError("spectrum needs --field magnetic");
    const long nMax = s.integer("n-max");
    if (nMax < 0) throw ParameterError("--n-max must be nonnegative");
    const bool keepInvalid = s.flag("include-invalid");
    const double k = s.num("k");
    auto ms = s.range("m-range");

    std::vector<SpectrumEntry> rows;
    for (long n = 0; n <= nMax; ++n)
        for (int m : ms) {
            SpectrumEntry e = evaluate_spectrum(spec, {static_cast<int>(n), m, k});
            if (e.valid || keepInvalid) rows.push_back(e);
        }

    if (is_json(s)) {
        json out = {{"schemaVersion", kSchemaVersion},
                    {"command", "spectrum"},
                    {"geometry", to_string(spec.geometry)},
                    {"b", spec.b},
                    {"gamma", spec.gamma},
                    {"rows", json::array()}};
        for (const auto& e : rows)
            out["rows"].push_back({{"n", e.qn.n},
                                   {"m", e.qn.m},
                                   {"k", e.qn.k},
                                   {"Lambda", jnum(e.Lambda)},
                                   {"epsilon", jnum(e.epsilon)},
                                   {"valid", e.valid},
                                   {"branch", e.branch},
                                   {"reason", e.reason}});
        os << out.dump(2) << "\n";
    } else {
        os << "n,m,k,Lambda,epsilon,valid,branch,reason\n";
        for (const auto& e : rows)
            os << e.qn.n << "," << e.qn.m << "," << fmt(e.qn.k) << "," << fmt(e.Lambda) << ","
               << fmt(e.epsilon) << "," << (e.valid ? "true" : "false") << "," << e.branch << ","
               << e.reason << "\n";
    }
    return 0;
}

// radial-eigen

int cmd_radial_eigen(const Settings& s, std::ostream& os) {
    BackgroundSpec spec = background(s);
    const long count = s.integer("count");
    if (count < 1) throw ParameterError("--count must be at least 1");
    GridSpec grid;
    grid.points = static_cast<int>(s.integer("grid-points"));
    grid.rMax = s.num("r-max");
    if (!s.is_auto("tol")) grid.richardsonTol = tolerance(s, grid.richardsonTol);

    struct Row {
        int m, n;
        double numeric, analytic;
        bool hasAnalytic;
    };
    std::vector<Row> rows;
    double resolvedRMax = 0.0;
    for (int m : s.range("m-range")) {
        SeparatedODE ode = assemble_radial_ode(spec, {0, m, 0.0});
        EigenResult res = solve_radial_eigen(ode, static_cast<int>(count), grid);
        resolvedRMax = std::max(resolvedRMax, res.gridSpec.rMax);
        for (int n = 0; n < count; ++n) {
            Row r{m, n, res.eigenvalues[n], std::numeric_limits<double>::quiet_NaN(), false};
            if (spec.field == FieldKind::Magnetic) {
                SpectrumEntry e = evaluate_spectrum(spec, {n, m, 0.0});
                if (e.valid) {
                    r.analytic = e.Lambda;
                    r.hasAnalytic = true;
                }
            }
            rows.push_back(r);
        }
    }

    if (is_json(s)) {
        json out = {{"schemaVersion", kSchemaVersion},
                    {"command", "radial-eigen"},
                    {"geometry", to_string(spec.geometry)},
                    {"b", spec.b},
                    {"gridPoints", grid.points},
                    {"rMax", jnum(resolvedRMax)},
                    {"rows", json::array()}};
        for (const auto& r : rows)
            out["rows"].push_back({{"m", r.m},
                                   {"n", r.n},
                                   {"numeric", r.numeric},
                                   {"analytic", jnum(r.analytic)},
                                   {"absError", jnum(std::abs(r.numeric - r.analytic))}});
        os << out.dump(2) << "\n";
    } else {
        os << "m,n,numeric,analytic,absError\n";
        for (const auto& r : rows)
            os << r.m << "," << r.n << "," << fmt(r.numeric) << "," << fmt(r.analytic) << ","
               << fmt(std::abs(r.numeric - r.analytic)) << "\n";
    }
    return 0;
}

// zprofile

int cmd_zprofile(const Settings& s, std::ostream& os) {
    BackgroundSpec spec = background(s);
    if (!spec.curved() || spec.field != FieldKind::Magnetic)
        throw ParameterError("zprofile needs a curved geometry with --field magnetic");
    const double edge = spec.geometry == Geometry::Spherical ? kSphericalEdge : 3.0;
    const double zMin = s.is_auto("z-min") ? -edge : s.num("z-min");
    const double zMax = s.is_auto("z-max") ? edge : s.num("z-max");
    const double L = s.num("lambda-sep");
    PotentialProfile prof =
        potential_profile(spec, L, zMin, zMax, static_cast<int>(s.integer("samples")));

    if (is_json(s)) {
        json out = {{"schemaVersion", kSchemaVersion},
                    {"command", "zprofile"},
                    {"geometry", to_string(spec.geometry)},
                    {"Lambda", L},
                    {"b", spec.b},
                    {"gamma", spec.gamma},
                    {"z", prof.zGrid},
                    {"U", prof.U},
                    {"Fz", prof.Fz},
                    {"extrema", json::array()}};
        for (const auto& e : prof.extrema)
            out["extrema"].push_back({{"z", e.z}, {"kind", to_string(e.kind)}});
        os << out.dump(2) << "\n";
    } else {
        os << "z,U,Fz\n";
        for (std::size_t i = 0; i < prof.zGrid.size(); ++i)
            os << fmt(prof.zGrid[i]) << "," << fmt(prof.U[i]) << "," << fmt(prof.Fz[i]) << "\n";
        os << "# extrema," << prof.extrema.size();
        for (const auto& e : prof.extrema) os << "," << fmt(e.z) << ":" << to_string(e.kind);
        os << "\n";
    }
    return 0;
}

// airy

int cmd_airy(const Settings& s, std::ostream& os) {
    AirySolutionPair pair = airy_pair(s.num("w-prime"), s.num("nu"));
    const double xMin = s.num("x-min"), xMax = s.num("x-max");
    const long n = s.integer("samples");
    if (n < 2 || !(xMax > xMin)) throw ParameterError("airy needs samples >= 2 and x-max > x-min");
    // z from x by inverting x = -nu^{1/3}(z - z0)
    const double cbrtNu = std::cbrt(pair.nu());

    std::vector<double> xs(n);
    for (long i = 0; i < n; ++i) xs[i] = ((n - 1 - i) * xMin + i * xMax) / (n - 1);
    auto w = pair.wronskian();

    if (is_json(s)) {
        json out = {{"schemaVersion", kSchemaVersion},
                    {"command", "airy"},
                    {"wPrime", pair.wPrime()},
                    {"nu", pair.nu()},
                    {"turningPoint", pair.turningPoint()},
                    {"xAtTurningPoint", pair.x_of_z(pair.turningPoint())},
                    {"wronskian", {w.real(), w.imag()}},
                    {"rows", json::array()}};
        for (double x : xs) {
            auto z1 = pair.Z1(x), z2 = pair.Z2(x);
            out["rows"].push_back({{"x", x},
                                   {"z", pair.turningPoint() - x / cbrtNu},
                                   {"Z1", {z1.real(), z1.imag()}},
                                   {"Z2", {z2.real(), z2.imag()}}});
        }
        os << out.dump(2) << "\n";
    } else {
        os << "x,z,Z1_re,Z1_im,Z2_re,Z2_im\n";
        for (double x : xs) {
            auto z1 = pair.Z1(x), z2 = pair.Z2(x);
            os << fmt(x) << "," << fmt(pair.turningPoint() - x / cbrtNu) << "," << fmt(z1.real())
               << "," << fmt(z1.imag()) << "," << fmt(z2.real()) << "," << fmt(z2.imag()) << "\n";
        }
        os << "# turningPoint," << fmt(pair.turningPoint()) << "\n";
        os << "# wronskian," << fmt(w.real()) << "," << fmt(w.imag()) << "\n";
    }
    return 0;
}

// axial-integrate

int cmd_axial_integrate(const Settings& s, std::ostream& os) {
    BackgroundSpec spec = background(s);
    AxialParams ap;
    ap.energy = s.num("energy");
    ap.wPerp = s.num("w-perp");
    ap.lambdaC = s.num("lambda-c");
    const double L = s.num("lambda-sep");
    SeparatedODE ode = assemble_axial_ode(spec, L, ap);

    const double edge = spec.geometry == Geometry::Spherical ? 1.5 : 3.0;
    const double zMin = s.is_auto("z-min") ? -edge : s.num("z-min");
    const double zMax = s.is_auto("z-max") ? edge : s.num("z-max");
    AxialIntegrationOptions opts;
    if (!s.is_auto("tol")) opts.absTol = opts.relTol = tolerance(s, opts.absTol);
    opts.fixedStep = s.num("step");
    AxialSolution sol = integrate_axial(ode, {s.num("ic-value"), s.num("ic-slope")}, zMin, zMax,
                                        static_cast<int>(s.integer("samples")), opts);
    json propagating = nullptr;
    if (ode.hasSchrodingerForm) propagating = propagating_at_infinity(ode);

    if (is_json(s)) {
        json out = {{"schemaVersion", kSchemaVersion},
                    {"command", "axial-integrate"},
                    {"geometry", to_string(spec.geometry)},
                    {"field", to_string(spec.field)},
                    {"errorEstimate", sol.errorEstimate},
                    {"evaluations", sol.evaluations},
                    {"propagating", propagating},
                    {"z", sol.z},
                    {"value", sol.value},
                    {"slope", sol.slope}};
        os << out.dump(2) << "\n";
    } else {
        os << "z,value,slope\n";
        for (std::size_t i = 0; i < sol.z.size(); ++i)
            os << fmt(sol.z[i]) << "," << fmt(sol.value[i]) << "," << fmt(sol.slope[i]) << "\n";
        os << "# errorEstimate," << fmt(sol.errorEstimate) << "\n";
        if (!propagating.is_null()) os << "# propagating," << (propagating.get<bool>() ? "true" : "false") << "\n";
    }
    return 0;
}

int dispatch(const std::string& command, const Settings& s) {
    Output out(s.str("out"));
    std::ostream& os = out.os();
    os.precision(17);
    if (command == "verify-tensor") return cmd_verify_tensor(s, os);
    if (command == "spectrum") return cmd_spectrum(s, os);
    if (command == "radial-eigen") return cmd_radial_eigen(s, os);
    if (command == "zprofile") return cmd_zprofile(s, os);
    if (command == "airy") return cmd_airy(s, os);
    if (command == "axial-integrate") return cmd_axial_integrate(s, os);
    throw ParameterError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cox-particle spectra, potentials and tensor identities in uniform fields"};
    app.fallthrough();

    std::map<std::string, std::string> flagValues;
    std::map<std::string, CLI::Option*> options;
    for (const auto& k : kKeys) {
        std::string name = std::string("--") + k.name;
        std::string help = std::string(k.help) + " (default " + k.fallback + ")";
        if (std::string(k.fallback) == "false")
            options[k.name] = app.add_flag(name, help);
        else
            options[k.name] = app.add_option(name, flagValues[k.name], help);
    }
    std::string configPath;
    app.add_option("--config", configPath, "key=value config file (overrides COXLAB_CONFIG)");

    std::map<std::string, CLI::App*> subs;
    for (const auto& c : kCommands) {
        subs[c] = app.add_subcommand(c);
        subs[c]->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Settings s;
        for (const auto& k : kKeys) s.values[k.name] = k.fallback;
        if (configPath.empty())
            if (const char* env = std::getenv("COXLAB_CONFIG")) configPath = env;
        std::string command;
        if (!configPath.empty()) {
            auto file = read_config_file(configPath);
            for (const auto& [key, value] : file) {
                if (key == "command") command = value;
                else s.values[key] = value;
            }
        }
        for (const auto& k : kKeys) {
            if (options[k.name]->count() == 0) continue;
            s.values[k.name] = std::string(k.fallback) == "false" ? "true" : flagValues[k.name];
        }
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) command = name;
        if (command.empty()) {
            std::cerr << app.help();
            return 1;
        }
        return dispatch(command, s);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
