#pragma once

#include <complex>

namespace coxlab {

using cplx = std::complex<double>;

struct SeriesControl {
    int maxTerms = 5000;
    double tol = 1e-14;

    // Throws ParameterError when tol is below 10 machine epsilons.
    void validate() const;
};

// Lanczos approximation with reflection for Re z < 1/2.
cplx gamma_complex(cplx z);

// Gauss 2F1(a, b; c; x) for real x < 1. Direct series on |x| <= 1/2,
// linear transformations elsewhere.
cplx gauss_2f1(cplx a, cplx b, cplx c, double x, const SeriesControl& ctl = {});

// Kummer 1F1(a; c; x), tuned for |x| <= 30.
cplx kummer_1f1(cplx a, cplx c, cplx x, const SeriesControl& ctl = {});

// Bessel J of real order and complex argument, principal branch of (y/2)^nu.
cplx bessel_j_fractional(double nuOrder, cplx y, const SeriesControl& ctl = {});

}  // namespace coxlab
