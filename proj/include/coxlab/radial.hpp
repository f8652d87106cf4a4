#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "coxlab/backgrounds.hpp"

namespace coxlab {

struct SpectrumEntry {
    QuantumNumbers qn;
    // Radial separation constant; for flat rows this is eps' = eps - (1-eta^2)k^2 + 2 eta b.
    double Lambda = 0.0;
    // Energy parameter, NaN where the radial problem alone does not fix it.
    double epsilon = 0.0;
    EnergyConvention convention = EnergyConvention::FlatFolded;
    bool valid = true;
    std::string reason;
    std::string branch;
};

// Closed-form level; NoBoundState when a Lobachevsky condition fails,
// InvalidEta when |eta| >= 1 in flat space.
SpectrumEntry analytic_spectrum(const BackgroundSpec& spec, const QuantumNumbers& qn);
// Same, but failed Lobachevsky conditions are reported through valid/reason.
SpectrumEntry evaluate_spectrum(const BackgroundSpec& spec, const QuantumNumbers& qn);

// Landau value Lambda_0 = 2 (eB/hbar c)(n + (m+|m|)/2 + 1/2) reached as rho -> infinity.
double flat_limit_lambda0(double eBOverHbarC, const QuantumNumbers& qn);

// Flat-space energy in units hbar^2/(2M): eps / (1 - eta^2).
double flat_energy(double epsilon, double eta);

// omega / (1 - Gamma^2 B^2) with omega = e B / (M c).
double oscillator_frequency_shift(double B, double Gamma, double M, double charge = 1.0,
                                  double c = 1.0);

struct GridSpec {
    int points = 4000;
    double rMax = 0.0;  // 0 selects a geometry default
    double richardsonTol = 1e-3;
    double boundaryMassTol = 1e-8;
};

struct EigenResult {
    std::vector<double> eigenvalues;        // Richardson-extrapolated
    std::vector<double> fineEigenvalues;    // on the 2N grid
    std::vector<double> grid;               // cell centres of the 2N grid
    std::vector<std::vector<double>> eigenfunctions;  // R on `grid`, unit norm with the radial weight
    GridSpec gridSpec;                      // with the resolved rMax
};

EigenResult solve_radial_eigen(const SeparatedODE& ode, int count, const GridSpec& grid = {});

// Regular solution x^a (1-x)^a F(alpha, beta; alpha+beta+1-gamma; 1-x), a = |m|/2, x >= 1.
std::complex<double> radial_hypergeometric_solution(int m, double wPerp, double x);

struct HypergeometricParams {
    double a = 0.0;
    std::complex<double> alpha, beta;
    double gamma = 1.0;
};
HypergeometricParams radial_hypergeometric_params(int m, double wPerp);

// Coefficients of x^{a+b-alpha} and x^{a+b-beta} in the large-x form of
// F(alpha, beta; alpha+beta+1-gamma; 1-x), branch phases included.
std::pair<std::complex<double>, std::complex<double>> asymptotic_amplitudes(int m, double wPerp);

}  // namespace coxlab
