#include "coxlab/backgrounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "coxlab/errors.hpp"

namespace coxlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_spherical_z(double z) {
    if (!(std::abs(z) < kHalfPi)) throw DomainError("spherical model requires |z| < pi/2");
}

void require_radius(const BackgroundSpec& s, double r) {
    if (!(r >= 0.0)) throw DomainError("radial coordinate must be nonnegative");
    if (s.geometry == Geometry::Spherical && r > std::numbers::pi)
        throw DomainError("spherical radial coordinate must lie in [0, pi]");
}

std::vector<SingularPoint> y_points(const BackgroundSpec& s) {
    const char* v = s.geometry == Geometry::Lobachevsky ? "y=ch^2 z" : "y=cos^2 z";
    return {{0.0, v, "regular singular"},
            {1.0, v, "z = 0"},
            {s.gamma, v, "resonance +gamma"},
            {-s.gamma, v, "resonance -gamma"},
            {kInf, v, "irregular"}};
}

}  // namespace

std::string to_string(Geometry g) {
    switch (g) {
        case Geometry::Flat: return "flat";
        case Geometry::Lobachevsky: return "lobachevsky";
        default: return "spherical";
    }
}

std::string to_string(FieldKind f) { return f == FieldKind::Magnetic ? "magnetic" : "electric"; }

Geometry parse_geometry(const std::string& s) {
    if (s == "flat") return Geometry::Flat;
    if (s == "lobachevsky") return Geometry::Lobachevsky;
    if (s == "spherical") return Geometry::Spherical;
    throw ParameterError("unknown geometry '" + s + "'");
}

FieldKind parse_field(const std::string& s) {
    if (s == "magnetic") return FieldKind::Magnetic;
    if (s == "electric") return FieldKind::Electric;
    throw ParameterError("unknown field '" + s + "'");
}

void BackgroundSpec::validate() const {
    if (curved() && !(rho > 0.0)) throw ParameterError("curvature radius must be positive");
    for (double v : {rho, b, nu, gamma, mu, strength})
        if (!std::isfinite(v)) throw ParameterError("background parameters must be finite");
}

double dimensionless_b(double eBOverHbarC, Geometry g, double rho) {
    if (g == Geometry::Flat) return eBOverHbarC / 2.0;
    return eBOverHbarC * rho * rho;
}

double flat_b_from_curved(double bCurved, double rho) { return bCurved / (2.0 * rho * rho); }
double curved_b_from_flat(double bFlat, double rho) { return 2.0 * bFlat * rho * rho; }

bool Interval::contains(double x) const {
    bool okLo = loOpen ? x > lo : x >= lo;
    bool okHi = hiOpen ? x < hi : x <= hi;
    return okLo && okHi;
}

SeparatedODE SeparatedODE::with_eigen(double value) const {
    SeparatedODE out = *this;
    out.eigen = value;
    auto base = q0;
    out.q = [base, value](double x) { return base(x) + value; };
    return out;
}

double gauge_potential(const BackgroundSpec& s, double x) {
    s.validate();
    const double B = s.strength, E = s.strength, rho = s.rho;
    if (s.field == FieldKind::Magnetic) {
        require_radius(s, x);
        switch (s.geometry) {
            case Geometry::Flat: return -B * x * x / 2.0;
            case Geometry::Lobachevsky: return -B * rho * rho * (std::cosh(x) - 1.0);
            default: return B * rho * rho * (std::cos(x) - 1.0);
        }
    }
    switch (s.geometry) {
        case Geometry::Flat: return -E * x;
        case Geometry::Lobachevsky: return -E * rho * std::tanh(x);
        default: require_spherical_z(x); return -E * rho * std::tan(x);
    }
}

FieldSample field_components(const BackgroundSpec& s, double z, double r) {
    s.validate();
    require_radius(s, r);
    if (r == 0.0 || (s.geometry == Geometry::Spherical && r == std::numbers::pi))
        throw DomainError("field components are undefined on the coordinate axis");
    FieldSample out;
    const double rho2 = s.rho * s.rho;
    double a2 = 1.0;    // ch^2 z or cos^2 z
    double sr2 = r * r; // squared circumference factor
    switch (s.geometry) {
        case Geometry::Flat:
            out.metric = {1.0, -1.0, -r * r, -1.0};
            break;
        case Geometry::Lobachevsky:
            a2 = std::cosh(z) * std::cosh(z);
            sr2 = std::sinh(r) * std::sinh(r);
            out.metric = {1.0, -rho2 * a2, -rho2 * a2 * sr2, -rho2};
            break;
        case Geometry::Spherical:
            require_spherical_z(z);
            a2 = std::cos(z) * std::cos(z);
            sr2 = std::sin(r) * std::sin(r);
            out.metric = {1.0, -rho2 * a2, -rho2 * a2 * sr2, -rho2};
            break;
    }
    if (s.field == FieldKind::Magnetic) {
        // B_3 = F_{r phi} = d A_phi / d r
        double B3 = 0.0;
        switch (s.geometry) {
            case Geometry::Flat: B3 = -s.strength * r; break;
            case Geometry::Lobachevsky: B3 = -s.strength * rho2 * std::sinh(r); break;
            case Geometry::Spherical: B3 = -s.strength * rho2 * std::sin(r); break;
        }
        out.fields.B = {0.0, 0.0, B3};
        const double B = s.strength;
        out.invariant = B * B / (a2 * a2);
    } else {
        // E_3 = -dA_0/dz
        double E3 = s.strength;
        if (s.geometry != Geometry::Flat) E3 = s.strength * s.rho / a2;
        out.fields.E = {0.0, 0.0, E3};
        out.invariant = out.metric.inv(3) * E3 * E3;
    }
    return out;
}

SeparatedODE assemble_radial_ode(const BackgroundSpec& s, const QuantumNumbers& qn) {
    s.validate();
    SeparatedODE ode;
    ode.kind = OdeKind::Radial;
    ode.variable = "r";
    const double b = s.b;
    const int m = qn.m;
    // The azimuthal number enters with the sign under which the closed-form
    // spectra hold, i.e. opposite to the printed radial equations.
    const double ms = -static_cast<double>(m);
    const bool magnetic = s.field == FieldKind::Magnetic;
    ode.leftExponent = std::abs(m);
    switch (s.geometry) {
        case Geometry::Flat:
            ode.domain = {0.0, kInf, true, true};
            ode.p = [](double r) { return 1.0 / r; };
            ode.weight = [](double r) { return r; };
            if (magnetic && b > 0.0) ode.suggestedCutoff = 10.0 / std::sqrt(b);
            if (magnetic)
                ode.q0 = [ms, b](double r) {
                    double t = ms - b * r * r;
                    return -t * t / (r * r);
                };
            else
                ode.q0 = [m](double r) { return -double(m) * m / (r * r); };
            break;
        case Geometry::Lobachevsky:
            ode.domain = {0.0, kInf, true, true};
            ode.p = [](double r) { return 1.0 / std::tanh(r); };
            ode.weight = [](double r) { return std::sinh(r); };
            if (magnetic)
                ode.q0 = [ms, b](double r) {
                    double t = ms - b * (std::cosh(r) - 1.0);
                    double sh = std::sinh(r);
                    return -t * t / (sh * sh);
                };
            else
                ode.q0 = [m](double r) {
                    double sh = std::sinh(r);
                    return -double(m) * m / (sh * sh);
                };
            break;
        case Geometry::Spherical:
            ode.domain = {0.0, std::numbers::pi, true, true};
            ode.finiteRight = true;
            ode.p = [](double r) { return 1.0 / std::tan(r); };
            ode.weight = [](double r) { return std::sin(r); };
            if (magnetic) {
                ode.q0 = [ms, b](double r) {
                    double t = ms + b * (std::cos(r) - 1.0);
                    double sn = std::sin(r);
                    return -t * t / (sn * sn);
                };
                ode.rightExponent = std::abs(ms - 2.0 * b);
            } else {
                ode.q0 = [m](double r) {
                    double sn = std::sin(r);
                    return -double(m) * m / (sn * sn);
                };
                ode.rightExponent = std::abs(m);
            }
            break;
    }
    ode.singularPoints.push_back({0.0, "r", "axis, exponents +-|m|"});
    if (ode.finiteRight) ode.singularPoints.push_back({std::numbers::pi, "r", "antipodal axis"});
    else ode.singularPoints.push_back({kInf, "r", "irregular"});
    return ode.with_eigen(0.0);
}

SeparatedODE hypergeometric_radial_ode(int m, double wPerp) {
    SeparatedODE ode;
    ode.kind = OdeKind::Radial;
    ode.variable = "x";
    ode.domain = {1.0, kInf, true, true};
    const double m2 = double(m) * m;
    ode.p = [](double x) { return (1.0 - 2.0 * x) / (x * (1.0 - x)); };
    ode.q0 = [m2](double x) {
        return -(m2 / (4.0 * x) + m2 / (4.0 * (1.0 - x))) / (x * (1.0 - x));
    };
    ode.weight = [](double) { return 1.0; };
    ode.leftExponent = std::abs(m) / 2.0;
    ode.singularPoints = {{0.0, "x", "exponents +-|m|/2"},
                          {1.0, "x", "axis r = 0, exponents +-|m|/2"},
                          {kInf, "x", "exponents alpha, beta"}};
    SeparatedODE out = ode;
    out.eigen = wPerp;
    out.q = [m2, wPerp](double x) {
        return -(wPerp + m2 / (4.0 * x) + m2 / (4.0 * (1.0 - x))) / (x * (1.0 - x));
    };
    // In this form the eigenparameter carries the weight 1/(x(1-x)), so with_eigen is not used.
    out.q0 = ode.q0;
    return out;
}

SeparatedODE assemble_axial_ode(const BackgroundSpec& s, double Lambda, const AxialParams& ap) {
    s.validate();
    SeparatedODE ode;
    ode.kind = OdeKind::Axial;
    ode.variable = "z";
    ode.energy = ap.energy;
    const double b = s.b, g = s.gamma, eps = ap.energy, L = Lambda;
    const double nu = s.nu, mu = s.mu, W = ap.energy;

    if (s.field == FieldKind::Magnetic) {
        switch (s.geometry) {
            case Geometry::Flat: {
                double k2 = eps;
                ode.domain = {-kInf, kInf, true, true};
                ode.p = [](double) { return 0.0; };
                ode.q = [k2](double) { return k2; };
                break;
            }
            case Geometry::Lobachevsky: {
                ode.domain = {-kInf, kInf, true, true};
                auto U = [b, g, L](double z) {
                    double c2 = std::cosh(z) * std::cosh(z);
                    return -(b * g - L * c2) / (c2 * c2 - g * g);
                };
                ode.p = [](double z) { return 2.0 * std::tanh(z); };
                ode.q = [U, eps](double z) { return eps - U(z); };
                ode.hasSchrodingerForm = true;
                ode.potential = U;
                ode.shift = -1.0;
                ode.singularPoints = y_points(s);
                break;
            }
            case Geometry::Spherical: {
                ode.domain = {-kHalfPi, kHalfPi, true, true};
                auto U = [b, g, L](double z) {
                    double c2 = std::cos(z) * std::cos(z);
                    return (b * g + L * c2) / (c2 * c2 - g * g);
                };
                ode.p = [](double z) { return -2.0 * std::tan(z); };
                ode.q = [U, eps](double z) { return eps - U(z); };
                ode.hasSchrodingerForm = true;
                ode.potential = U;
                ode.shift = 1.0;
                ode.singularPoints = y_points(s);
                break;
            }
        }
        return ode;
    }

    switch (s.geometry) {
        case Geometry::Flat: {
            double lc2 = ap.lambdaC * ap.lambdaC;
            double wPrime = ap.energy - ap.wPerp + g * g / ((1.0 + g * g) * lc2);
            ode.domain = {-kInf, kInf, true, true};
            ode.p = [](double) { return 0.0; };
            ode.q = [wPrime, nu](double z) { return wPrime + nu * z; };
            ode.energy = wPrime;
            break;
        }
        case Geometry::Lobachevsky: {
            ode.domain = {-kInf, kInf, true, true};
            ode.p = [](double z) { return 2.0 * std::tanh(z); };
            ode.q = [=](double z) {
                double ch = std::cosh(z), sh = std::sinh(z);
                double c4 = ch * ch * ch * ch;
                double den = c4 + g * g;
                return -2.0 * mu * g * sh * ch * (-c4 + g * g) / (den * den) -
                       2.0 * mu * g * sh * ch / den + W + nu * std::tanh(z) -
                       mu * mu * g * g / den - L / (ch * ch);
            };
            break;
        }
        case Geometry::Spherical: {
            ode.domain = {-kHalfPi, kHalfPi, true, true};
            auto lead = [g](double z) {
                double c4 = std::pow(std::cos(z), 4);
                return (c4 + 2.0 * g * g) / (c4 + g * g);
            };
            ode.p = [=](double z) {
                double c = std::cos(z), c2 = c * c, c4 = c2 * c2, c8 = c4 * c4;
                double den = c4 + g * g;
                double raw = -2.0 * std::tan(z) * (g * g * c4 + 2.0 * g * g * g * g + c8) /
                                 (den * den) -
                             mu * g * c2 / den;
                return raw / lead(z);
            };
            ode.q = [=](double z) {
                double c = std::cos(z), sn = std::sin(z), c2 = c * c, c4 = c2 * c2;
                double den = c4 + g * g;
                double raw = 4.0 * mu * g * g * g * sn * c / (den * den) + W + nu * std::tan(z) -
                             mu * mu * g * g / den - L / c2;
                return raw / lead(z);
            };
            break;
        }
    }
    return ode;
}

}  // namespace coxlab
