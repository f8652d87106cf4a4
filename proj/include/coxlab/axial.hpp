#pragma once

#include <complex>
#include <string>
#include <vector>

#include "coxlab/backgrounds.hpp"

namespace coxlab {

// Curved magnetic effective potential: Lobachevsky -(b g - L ch^2)/(ch^4 - g^2),
// spherical (b g + L cos^2)/(cos^4 - g^2). PoleError on the resonance surface.
double effective_potential(const BackgroundSpec& spec, double Lambda, double z);
// F_z = -dU/dz in closed form.
double effective_force(const BackgroundSpec& spec, double Lambda, double z);

enum class ExtremumKind { Minimum, Maximum, Degenerate };
std::string to_string(ExtremumKind k);

struct Extremum {
    double z = 0.0;
    ExtremumKind kind = ExtremumKind::Degenerate;
};

struct ExtremaReport {
    std::vector<Extremum> extrema;      // sorted by z, always contains z = 0
    double discriminant = 0.0;          // (b^2/L^2 - 1) g^2
    bool complexRoots = false;          // discriminant < 0: only z = 0 survives
    std::vector<double> candidateY;     // real roots of the quadratic in y = ch^2 z or cos^2 z
};

// Uses spec.b and spec.gamma.
ExtremaReport effective_force_extrema(const BackgroundSpec& spec, double Lambda);

struct PotentialProfile {
    std::vector<double> zGrid;
    std::vector<double> U;
    std::vector<double> Fz;
    std::vector<Extremum> extrema;  // sign changes of Fz on the grid, refined
};

// Samples U and F_z on `samples` points of [zMin, zMax]. Lobachevsky grids that
// cross a pole surface raise PoleError; spherical samples closer than 1e-3 to a
// pole are pushed out to that distance.
PotentialProfile potential_profile(const BackgroundSpec& spec, double Lambda, double zMin,
                                   double zMax, int samples);

// Z1 = xi^{1/3} J_{1/3}(i xi), Z2 = xi^{1/3} J_{-1/3}(i xi), xi = (2/3) x^{3/2},
// continued as entire functions of x. Both solve Z'' = x Z.
class AirySolutionPair {
public:
    AirySolutionPair(double wPrime, double nu);

    std::complex<double> Z1(double x) const;
    std::complex<double> Z2(double x) const;
    std::complex<double> dZ1(double x) const;
    std::complex<double> dZ2(double x) const;

    // x = -nu^{1/3} z - w'/nu^{2/3}
    double x_of_z(double z) const;
    double turningPoint() const { return z0_; }
    // Z1 dZ2 - dZ1 Z2, constant in x
    std::complex<double> wronskian() const { return wronskian_; }
    double wPrime() const { return wPrime_; }
    double nu() const { return nu_; }

    // Real shapes: Z1 = c1 * A1(x), Z2 = c2 * A2(x).
    static double A1(double x);
    static double A2(double x);
    static double dA1(double x);
    static double dA2(double x);
    static std::complex<double> c1();
    static std::complex<double> c2();

private:
    double wPrime_, nu_, cbrtNu_, z0_;
    std::complex<double> wronskian_;
};

AirySolutionPair airy_pair(double wPrime, double nu);

struct AxialInitialCondition {
    double value = 0.0;
    double slope = 0.0;
};

struct AxialIntegrationOptions {
    double absTol = 1e-12;
    double relTol = 1e-12;
    double fixedStep = 0.0;  // > 0 switches to fixed steps of this size
    long maxSteps = 2'000'000;
};

struct AxialSolution {
    std::vector<double> z;
    std::vector<double> value;
    std::vector<double> slope;
    double errorEstimate = 0.0;  // max |difference| against a run at 1/32 of the tolerance (or half the step)
    long evaluations = 0;  // right-hand-side calls of the primary run
};

// Integrates u'' + p u' + q u = 0 from zLo to zHi, reporting `samples` equally spaced points.
AxialSolution integrate_axial(const SeparatedODE& ode, const AxialInitialCondition& ic,
                              double zLo, double zHi, int samples,
                              const AxialIntegrationOptions& opts = {});

// eps + shift > lim U at the far end of the domain.
bool propagating_at_infinity(const SeparatedODE& ode);

enum class SingularTag { One, Zero, PlusGamma, MinusGamma, Infinity };
std::string to_string(SingularTag t);
SingularTag parse_singular_tag(const std::string& s);

struct LocalForm {
    SingularTag point = SingularTag::One;
    double A = 0.0;                  // y ~ 1:  Z = exp(+-sqrt(A (y-1)))
    double C = 0.0;                  // y ~ 0:  Z = exp(+-sqrt(C) y)/sqrt(y)
    std::complex<double> D[2];       // y ~ inf: Z = y^D
    double M = 0.0, N = 0.0;         // y ~ +-g: (y-g) Z'' + M (y-g) Z' + N Z = 0
    double a = 0.0, c = 0.0;         // confluent parameters; solutions M(a+1, 2, .), U(a+1, 2, .)
    std::string description;
};

// Local solutions of the axial equation in y = cos^2 z (spherical) or y = ch^2 z
// (Lobachevsky, which follows from the spherical forms with eps -> -eps, Lambda -> -Lambda).
LocalForm singular_local_form(const BackgroundSpec& spec, double Lambda, double energy,
                              SingularTag point);

}  // namespace coxlab
