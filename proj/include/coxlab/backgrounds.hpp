#pragma once

#include <functional>
#include <string>
#include <vector>

#include "coxlab/tensor_algebra.hpp"

namespace coxlab {

enum class Geometry { Flat, Lobachevsky, Spherical };
enum class FieldKind { Magnetic, Electric };

// Which dimensionless energy an epsilon value refers to.
//   FlatFolded:  eps = (2M E / hbar^2)(1 - eta^2), field strength folded in
//   CurvedPlain: eps = E / (hbar^2 / 2 M rho^2)
enum class EnergyConvention { FlatFolded, CurvedPlain };

std::string to_string(Geometry g);
std::string to_string(FieldKind f);
Geometry parse_geometry(const std::string& s);
FieldKind parse_field(const std::string& s);

// Dimensionless parameters of a uniform-field background.
//   b:        flat eB/(2 hbar c); curved eB rho^2/(hbar c)
//   nu:       electric slope parameter of the axial equation
//   gamma:    structure parameter after i*gamma -> gamma (eta for flat magnetic)
//   mu:       axial mass parameter M rho c / hbar (curved electric), 1/lambda_c (flat electric)
//   strength: physical B or E, used only for potentials and field components
struct BackgroundSpec {
    Geometry geometry = Geometry::Flat;
    FieldKind field = FieldKind::Magnetic;
    double rho = 1.0;
    double b = 0.0;
    double nu = 0.0;
    double gamma = 0.0;
    double mu = 0.0;
    double strength = 1.0;

    bool curved() const { return geometry != Geometry::Flat; }
    EnergyConvention energy_convention() const {
        return curved() ? EnergyConvention::CurvedPlain : EnergyConvention::FlatFolded;
    }
    void validate() const;
};

// eB/(hbar c) -> b in the convention of the given geometry.
double dimensionless_b(double eBOverHbarC, Geometry g, double rho);
// Curved b = eB rho^2/(hbar c) to flat b = eB/(2 hbar c), and back.
double flat_b_from_curved(double bCurved, double rho);
double curved_b_from_flat(double bFlat, double rho);

struct QuantumNumbers {
    int n = 0;
    int m = 0;
    double k = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool loOpen = true;
    bool hiOpen = true;
    bool contains(double x) const;
};

enum class OdeKind { Radial, Axial };

struct SingularPoint {
    double location;  // in the variable named by `variable`, may be +-inf
    std::string variable;
    std::string note;
};

// u'' + p u' + q u = 0 on `domain`.
struct SeparatedODE {
    OdeKind kind = OdeKind::Radial;
    std::string variable = "r";
    Interval domain;
    std::function<double(double)> p;
    std::function<double(double)> q;
    std::vector<SingularPoint> singularPoints;

    // Radial: q = q0 + eigen, the measure is `weight`, regular solutions
    // behave as x^leftExponent at the left end and (hi - x)^rightExponent at a finite right end.
    std::function<double(double)> q0;
    std::function<double(double)> weight;
    double eigen = 0.0;
    double leftExponent = 0.0;
    double rightExponent = 0.0;
    bool finiteRight = false;
    double suggestedCutoff = 25.0;  // starting r_max for infinite domains

    // Curved magnetic axial: f'' + (eps + shift - U) f = 0 with Z = f / w(z).
    bool hasSchrodingerForm = false;
    std::function<double(double)> potential;
    double shift = 0.0;
    double energy = 0.0;

    SeparatedODE with_eigen(double value) const;
};

// Scalars the axial equations need beyond the background itself.
//   energy:  eps (magnetic), w (flat electric) or W (curved electric)
//   wPerp:   radial separation constant of the flat electric problem
//   lambdaC: Compton length entering w' (flat electric)
struct AxialParams {
    double energy = 0.0;
    double wPerp = 0.0;
    double lambdaC = 1.0;
};

double gauge_potential(const BackgroundSpec& spec, double coord);

struct FieldSample {
    FieldConfig3 fields;
    DiagonalMetric metric;
    double invariant = 0.0;  // B_i B^i or E_3 E^3
};

// Covariant fields and metric at depth z (and radius r, which only enters the components).
FieldSample field_components(const BackgroundSpec& spec, double z, double r = 1.0);

SeparatedODE assemble_radial_ode(const BackgroundSpec& spec, const QuantumNumbers& qn);
// Radial electric equation on the Lobachevsky space in x = (1 + ch r)/2, eigenparameter wPerp.
SeparatedODE hypergeometric_radial_ode(int m, double wPerp);
SeparatedODE assemble_axial_ode(const BackgroundSpec& spec, double Lambda,
                                const AxialParams& params = {});

}  // namespace coxlab
