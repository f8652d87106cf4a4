#include "coxlab/axial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "coxlab/errors.hpp"

namespace coxlab {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kPoleClearance = 1e-3;

void require_curved_magnetic(const BackgroundSpec& s) {
    s.validate();
    if (!s.curved() || s.field != FieldKind::Magnetic)
        throw ParameterError("effective potential needs a curved magnetic background");
}

// y = ch^2 z or cos^2 z, dy/dz
std::pair<double, double> y_of_z(const BackgroundSpec& s, double z) {
    if (s.geometry == Geometry::Lobachevsky) {
        double c = std::cosh(z), sh = std::sinh(z);
        return {c * c, 2.0 * c * sh};
    }
    if (std::abs(z) > kHalfPi) throw DomainError("spherical axial coordinate needs |z| <= pi/2");
    double c = std::cos(z), sn = std::sin(z);
    return {c * c, -2.0 * c * sn};
}

double pole_denominator(const BackgroundSpec& s, double y) { return y * y - s.gamma * s.gamma; }

void check_pole(const BackgroundSpec& s, double y) {
    double den = pole_denominator(s, y);
    if (std::abs(den) <= 1e-12 * std::max(1.0, y * y))
        throw PoleError("effective potential pole at y = " + std::to_string(y));
}

ExtremumKind classify(const BackgroundSpec& s, double Lambda, double z) {
    const double h = 1e-4;
    double zl = z - h, zr = z + h;
    if (s.geometry == Geometry::Spherical) {
        zl = std::max(zl, -kHalfPi);
        zr = std::min(zr, kHalfPi);
    }
    double u0 = effective_potential(s, Lambda, z);
    double d2 = effective_potential(s, Lambda, zl) - 2.0 * u0 + effective_potential(s, Lambda, zr);
    if (std::abs(d2) <= 1e-13 * std::max(1.0, std::abs(u0))) return ExtremumKind::Degenerate;
    return d2 > 0 ? ExtremumKind::Minimum : ExtremumKind::Maximum;
}

// Power series of the Airy-type shapes in u = x^3 with offset nu0 (4/3 or 2/3).
struct AiryTerms {
    long double value = 0.0L;
    long double deriv = 0.0L;
};

// x S1(x^3) and S2(x^3) with x-derivatives, S_nu(u) = sum (u/9)^k / (k! Gamma(k + nu)).
AiryTerms airy_series(long double x, bool first) {
    const long double nu0 = first ? 4.0L / 3.0L : 2.0L / 3.0L;
    const long double u = x * x * x;
    if (x == 0.0L) {
        long double lead = 1.0L / std::tgamma(nu0);
        return first ? AiryTerms{0.0L, lead} : AiryTerms{lead, 0.0L};
    }
    long double t = 1.0L / std::tgamma(nu0);
    AiryTerms out;
    for (int k = 0; k < 400; ++k) {
        long double xk = first ? t * x : t;                     // term of the shape
        long double dk = first ? (3.0L * k + 1.0L) * t           // its x-derivative
                               : (k > 0 ? 3.0L * k * t / x : 0.0L);
        out.value += xk;
        out.deriv += dk;
        t *= (u / 9.0L) / ((k + 1.0L) * (k + nu0));
        if (k > 4 && std::abs(t) * (1.0L + std::abs(x)) * (3.0L * k + 4.0L) <=
                         1e-21L * (std::abs(out.value) + std::abs(out.deriv)))
            break;
    }
    return out;
}

constexpr double kBesselSwitch = -5.0;

// Oscillatory side through J_{+-1/3} of zeta = (2/3) t^{3/2}, t = -x.
AiryTerms airy_bessel(double x, bool first) {
    using boost::math::cyl_bessel_j;
    const double t = -x;
    const double zeta = 2.0 / 3.0 * std::pow(t, 1.5);
    const double zc = std::cbrt(zeta), st = std::sqrt(t);
    AiryTerms out;
    if (first) {
        const double k1 = std::cbrt(2.0) * std::pow(2.0 / 3.0, -2.0 / 3.0);
        out.value = -k1 * zc * cyl_bessel_j(1.0 / 3.0, zeta);
        out.deriv = k1 * zc * cyl_bessel_j(-2.0 / 3.0, zeta) * st;
    } else {
        const double k2 = 1.0 / std::cbrt(2.0);
        out.value = k2 * zc * cyl_bessel_j(-1.0 / 3.0, zeta);
        out.deriv = k2 * zc * cyl_bessel_j(2.0 / 3.0, zeta) * st;
    }
    return out;
}

AiryTerms airy_shape(double x, bool first) {
    if (x < kBesselSwitch) return airy_bessel(x, first);
    return airy_series(x, first);
}

using State = std::array<double, 2>;

struct RunResult {
    std::vector<double> value, slope;
    long evaluations = 0;
};

RunResult run_odeint(const SeparatedODE& ode, const AxialInitialCondition& ic,
                     const std::vector<double>& times, double absTol, double relTol,
                     double fixedStep, long maxSteps) {
    namespace odeint = boost::numeric::odeint;
    RunResult rr;
    long evals = 0;
    auto sys = [&](const State& y, State& dy, double z) {
        ++evals;
        dy[0] = y[1];
        dy[1] = -ode.p(z) * y[1] - ode.q(z) * y[0];
    };
    auto obs = [&](const State& y, double) {
        rr.value.push_back(y[0]);
        rr.slope.push_back(y[1]);
    };
    State y0{ic.value, ic.slope};
    const double span = times.back() - times.front();
    try {
        if (fixedStep > 0.0) {
            double dt = span >= 0 ? fixedStep : -fixedStep;
            odeint::integrate_times(odeint::runge_kutta_dopri5<State>(), sys, y0, times.begin(),
                                    times.end(), dt, obs,
                                    odeint::max_step_checker(static_cast<int>(maxSteps)));
        } else {
            double dt = span / std::max<std::size_t>(times.size(), 100) / 10.0;
            auto stepper = odeint::make_dense_output(absTol, relTol,
                                                     odeint::runge_kutta_dopri5<State>());
            odeint::integrate_times(stepper, sys, y0, times.begin(), times.end(), dt, obs,
                                    odeint::max_step_checker(static_cast<int>(maxSteps)));
        }
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw StepFailure(std::string("axial integration failed: ") + e.what());
    }
    for (std::size_t i = 0; i < rr.value.size(); ++i)
        if (!std::isfinite(rr.value[i]) || !std::isfinite(rr.slope[i]))
            throw StepFailure("axial integration produced a non-finite value");
    if (rr.value.size() != times.size()) throw StepFailure("axial integration stopped early");
    rr.evaluations = evals;
    return rr;
}

}  // namespace

double effective_potential(const BackgroundSpec& s, double Lambda, double z) {
    require_curved_magnetic(s);
    auto [y, dy] = y_of_z(s, z);
    (void)dy;
    check_pole(s, y);
    const double b = s.b, g = s.gamma;
    if (s.geometry == Geometry::Lobachevsky) return -(b * g - Lambda * y) / pole_denominator(s, y);
    return (b * g + Lambda * y) / pole_denominator(s, y);
}

double effective_force(const BackgroundSpec& s, double Lambda, double z) {
    require_curved_magnetic(s);
    auto [y, dy] = y_of_z(s, z);
    check_pole(s, y);
    const double b = s.b, g = s.gamma;
    const double den = pole_denominator(s, y);
    // dU/dy, then F = -dU/dy * dy/dz
    double dUdy;
    if (s.geometry == Geometry::Lobachevsky)
        dUdy = (-Lambda * y * y + 2.0 * b * g * y - Lambda * g * g) / (den * den);
    else
        dUdy = -(Lambda * y * y + 2.0 * b * g * y + Lambda * g * g) / (den * den);
    return -dUdy * dy;
}

std::string to_string(ExtremumKind k) {
    switch (k) {
        case ExtremumKind::Minimum: return "min";
        case ExtremumKind::Maximum: return "max";
        case ExtremumKind::Degenerate: return "degenerate";
    }
    return "degenerate";
}

ExtremaReport effective_force_extrema(const BackgroundSpec& s, double Lambda) {
    require_curved_magnetic(s);
    const double b = s.b, g = s.gamma;
    ExtremaReport rep;
    rep.extrema.push_back({0.0, classify(s, Lambda, 0.0)});
    if (Lambda == 0.0 || g == 0.0) {
        rep.discriminant = 0.0;
        return rep;
    }
    rep.discriminant = (b * b / (Lambda * Lambda) - 1.0) * g * g;
    if (rep.discriminant < 0.0) {
        rep.complexRoots = true;
        return rep;
    }
    const double sign = s.geometry == Geometry::Lobachevsky ? 1.0 : -1.0;
    const double centre = sign * b / Lambda * g;
    const double root = std::sqrt(rep.discriminant);
    for (double y : {centre - root, centre + root}) {
        rep.candidateY.push_back(y);
        double z;
        if (s.geometry == Geometry::Lobachevsky) {
            if (!(y > 1.0)) continue;
            z = std::acosh(std::sqrt(y));
        } else {
            if (!(y > 0.0 && y < 1.0)) continue;
            z = std::acos(std::sqrt(y));
        }
        if (std::abs(pole_denominator(s, y)) <= 1e-12) continue;
        rep.extrema.push_back({-z, classify(s, Lambda, -z)});
        rep.extrema.push_back({z, classify(s, Lambda, z)});
    }
    std::sort(rep.extrema.begin(), rep.extrema.end(),
              [](const Extremum& a, const Extremum& c) { return a.z < c.z; });
    rep.extrema.erase(std::unique(rep.extrema.begin(), rep.extrema.end(),
                                  [](const Extremum& a, const Extremum& c) { return a.z == c.z; }),
                      rep.extrema.end());
    return rep;
}

PotentialProfile potential_profile(const BackgroundSpec& s, double Lambda, double zMin,
                                   double zMax, int samples) {
    require_curved_magnetic(s);
    if (samples < 2) throw ParameterError("profile needs at least 2 samples");
    if (!(zMax > zMin)) throw ParameterError("profile needs zMax > zMin");
    if (s.geometry == Geometry::Spherical && (zMin < -kHalfPi || zMax > kHalfPi))
        throw DomainError("spherical profile must stay inside [-pi/2, pi/2]");

    PotentialProfile prof;
    const int n1 = samples - 1;
    std::vector<double> poles;
    if (s.geometry == Geometry::Spherical && std::abs(s.gamma) > 0.0 && std::abs(s.gamma) <= 1.0) {
        double zp = std::acos(std::sqrt(std::abs(s.gamma)));
        poles = {-zp, zp};
    }
    for (int i = 0; i < samples; ++i) {
        double z = ((n1 - i) * zMin + i * zMax) / n1;
        for (double zp : poles)
            if (std::abs(z - zp) < kPoleClearance) z = z < zp ? zp - kPoleClearance : zp + kPoleClearance;
        if (s.geometry == Geometry::Spherical) z = std::clamp(z, -kHalfPi, kHalfPi);
        prof.zGrid.push_back(z);
    }

    if (s.geometry == Geometry::Lobachevsky) {
        double prev = 0.0;
        for (int i = 0; i < samples; ++i) {
            auto [y, dy] = y_of_z(s, prof.zGrid[i]);
            (void)dy;
            double den = pole_denominator(s, y);
            if (i > 0 && (den > 0) != (prev > 0))
                throw PoleError("profile grid crosses the pole surface ch^4 z = gamma^2");
            prev = den;
        }
    }

    for (double z : prof.zGrid) {
        prof.U.push_back(effective_potential(s, Lambda, z));
        prof.Fz.push_back(effective_force(s, Lambda, z));
    }

    auto force = [&](double z) { return effective_force(s, Lambda, z); };
    for (int i = 0; i < samples; ++i) {
        if (prof.Fz[i] == 0.0) {
            // Spherical endpoints vanish through the cos z factor, not as equilibria.
            if (s.geometry == Geometry::Spherical && std::abs(prof.zGrid[i]) == kHalfPi) continue;
            prof.extrema.push_back({prof.zGrid[i], classify(s, Lambda, prof.zGrid[i])});
            continue;
        }
        if (i + 1 < samples && prof.Fz[i + 1] != 0.0 && (prof.Fz[i] > 0) != (prof.Fz[i + 1] > 0)) {
            boost::uintmax_t iters = 200;
            auto tol = [](double a, double c) { return std::abs(c - a) <= 1e-14 * std::max(1.0, std::abs(a)); };
            auto br = boost::math::tools::toms748_solve(force, prof.zGrid[i], prof.zGrid[i + 1],
                                                        prof.Fz[i], prof.Fz[i + 1], tol, iters);
            double z = 0.5 * (br.first + br.second);
            prof.extrema.push_back({z, classify(s, Lambda, z)});
        }
    }
    return prof;
}

AirySolutionPair::AirySolutionPair(double wPrime, double nu) : wPrime_(wPrime), nu_(nu) {
    if (!(nu > 0.0)) throw ParameterError("airy_pair needs nu > 0");
    cbrtNu_ = std::cbrt(nu);
    z0_ = -wPrime / nu;
    wronskian_ = -c1() * c2() / (std::tgamma(4.0 / 3.0) * std::tgamma(2.0 / 3.0));
}

std::complex<double> AirySolutionPair::c1() {
    return std::polar(1.0, std::numbers::pi / 6.0) * std::pow(2.0, -1.0 / 3.0) *
           std::pow(2.0 / 3.0, 2.0 / 3.0);
}

std::complex<double> AirySolutionPair::c2() {
    return std::polar(1.0, -std::numbers::pi / 6.0) * std::cbrt(2.0);
}

double AirySolutionPair::A1(double x) { return static_cast<double>(airy_shape(x, true).value); }
double AirySolutionPair::A2(double x) { return static_cast<double>(airy_shape(x, false).value); }
double AirySolutionPair::dA1(double x) { return static_cast<double>(airy_shape(x, true).deriv); }
double AirySolutionPair::dA2(double x) { return static_cast<double>(airy_shape(x, false).deriv); }

std::complex<double> AirySolutionPair::Z1(double x) const { return c1() * A1(x); }
std::complex<double> AirySolutionPair::Z2(double x) const { return c2() * A2(x); }
std::complex<double> AirySolutionPair::dZ1(double x) const { return c1() * dA1(x); }
std::complex<double> AirySolutionPair::dZ2(double x) const { return c2() * dA2(x); }

double AirySolutionPair::x_of_z(double z) const { return -cbrtNu_ * (z - z0_); }

AirySolutionPair airy_pair(double wPrime, double nu) { return AirySolutionPair(wPrime, nu); }

AxialSolution integrate_axial(const SeparatedODE& ode, const AxialInitialCondition& ic,
                              double zLo, double zHi, int samples,
                              const AxialIntegrationOptions& opts) {
    if (ode.kind != OdeKind::Axial) throw ParameterError("integrate_axial needs an axial equation");
    if (samples < 2) throw ParameterError("integrate_axial needs at least 2 samples");
    if (!(zHi != zLo) || !std::isfinite(zLo) || !std::isfinite(zHi))
        throw ParameterError("integrate_axial needs a finite, non-empty range");
    if (!(opts.absTol > 0.0 && opts.relTol > 0.0)) throw ParameterError("tolerances must be positive");
    for (double z : {zLo, zHi})
        if (!(z > ode.domain.lo && z < ode.domain.hi))
            throw DomainError("integration range leaves the open domain of the axial equation");

    // Resonance surfaces y = +-gamma recorded on the curved magnetic records.
    for (const auto& sp : ode.singularPoints) {
        if (sp.note.rfind("resonance", 0) != 0) continue;
        const bool hyperbolic = sp.variable == "y=ch^2 z";
        auto y = [&](double z) {
            double c = hyperbolic ? std::cosh(z) : std::cos(z);
            return c * c;
        };
        double yA = y(zLo), yB = y(zHi);
        double yMin = std::min(yA, yB), yMax = std::max(yA, yB);
        if ((zLo < 0.0) != (zHi < 0.0)) (hyperbolic ? yMin : yMax) = 1.0;
        if (sp.location >= yMin && sp.location <= yMax)
            throw PoleError("integration range crosses the resonance surface y = " +
                            std::to_string(sp.location));
    }

    const int probes = 4001;
    for (int i = 0; i < probes; ++i) {
        double z = zLo + (zHi - zLo) * i / (probes - 1);
        double p = ode.p(z), q = ode.q(z);
        if (!std::isfinite(p) || !std::isfinite(q) || std::abs(q) > 1e8 || std::abs(p) > 1e8)
            throw PoleError("axial coefficients are singular near z = " + std::to_string(z));
    }

    std::vector<double> times(samples);
    for (int i = 0; i < samples; ++i)
        times[i] = ((samples - 1 - i) * zLo + i * zHi) / (samples - 1);

    auto primary = run_odeint(ode, ic, times, opts.absTol, opts.relTol, opts.fixedStep, opts.maxSteps);
    auto check = opts.fixedStep > 0.0
                     ? run_odeint(ode, ic, times, opts.absTol, opts.relTol, opts.fixedStep / 2.0,
                                  2 * opts.maxSteps)
                     : run_odeint(ode, ic, times, opts.absTol / 32.0, opts.relTol / 32.0, 0.0,
                                  2 * opts.maxSteps);
    AxialSolution sol;
    sol.z = times;
    sol.value = std::move(primary.value);
    sol.slope = std::move(primary.slope);
    sol.evaluations = primary.evaluations;
    for (int i = 0; i < samples; ++i)
        sol.errorEstimate = std::max(sol.errorEstimate, std::abs(sol.value[i] - check.value[i]));
    return sol;
}

bool propagating_at_infinity(const SeparatedODE& ode) {
    if (!ode.hasSchrodingerForm) throw ParameterError("classification needs a Schrodinger-form equation");
    double far = std::isfinite(ode.domain.hi) ? ode.domain.hi : 40.0;
    double lim = ode.potential(far);
    if (!std::isfinite(lim)) return false;
    return ode.energy + ode.shift > lim;
}

std::string to_string(SingularTag t) {
    switch (t) {
        case SingularTag::One: return "1";
        case SingularTag::Zero: return "0";
        case SingularTag::PlusGamma: return "+gamma";
        case SingularTag::MinusGamma: return "-gamma";
        case SingularTag::Infinity: return "inf";
    }
    return "1";
}

SingularTag parse_singular_tag(const std::string& s) {
    if (s == "1") return SingularTag::One;
    if (s == "0") return SingularTag::Zero;
    if (s == "+gamma" || s == "gamma") return SingularTag::PlusGamma;
    if (s == "-gamma") return SingularTag::MinusGamma;
    if (s == "inf" || s == "infinity") return SingularTag::Infinity;
    throw ParameterError("unknown singular point '" + s + "'");
}

LocalForm singular_local_form(const BackgroundSpec& s, double Lambda, double energy,
                              SingularTag point) {
    require_curved_magnetic(s);
    const double g = s.gamma, b = s.b;
    if (g == 0.0) throw ParameterError("local forms need gamma != 0: the +-gamma points merge with y = 0");
    const bool lob = s.geometry == Geometry::Lobachevsky;
    const double eps = lob ? -energy : energy;
    const double L = lob ? -Lambda : Lambda;

    LocalForm f;
    f.point = point;
    switch (point) {
        case SingularTag::One:
            f.A = eps - (b * g + L) / (1.0 - g * g);
            f.description = "Z = exp(+-sqrt(A (y - 1)))";
            break;
        case SingularTag::Zero:
            f.C = -eps - b / g;
            f.description = "Z = exp(+-sqrt(C) y) / sqrt(y)";
            break;
        case SingularTag::Infinity: {
            std::complex<double> r = std::sqrt(std::complex<double>(eps + 1.0));
            f.D[0] = (-1.0 + r) / 2.0;
            f.D[1] = (-1.0 - r) / 2.0;
            f.description = "Z = y^D";
            break;
        }
        case SingularTag::PlusGamma:
            f.M = 0.5 * (3.0 / g + 1.0 / (g - 1.0));
            f.N = (L + b) / (8.0 * g * (1.0 - g));
            f.a = (L + b) / (4.0 * (3.0 - 4.0 * g));
            f.description = "Z = c1 M(a+1, 2, y) + c2 U(a+1, 2, y)";
            break;
        case SingularTag::MinusGamma:
            f.M = 0.5 * (3.0 / -g + 1.0 / (-g - 1.0));
            f.N = (L - b) / (8.0 * -g * (1.0 + g));
            f.a = (L - b) / (4.0 * (3.0 + 4.0 * g));
            f.description = "Z = c1 M(a+1, 2, y) + c2 U(a+1, 2, y)";
            break;
    }
    return f;
}

}  // namespace coxlab
