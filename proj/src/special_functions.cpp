#include "coxlab/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_complex.hpp>

#include "coxlab/errors.hpp"

namespace coxlab {

namespace {

using lcplx = std::complex<long double>;
using wide = boost::multiprecision::cpp_complex_50;

constexpr double kPi = std::numbers::pi;

// Above this ratio of the largest term to the result, long double loses too much.
constexpr long double kCancellationLimit = 1e6L;

bool is_nonpositive_integer(cplx z) {
    if (std::abs(z.imag()) > 1e-14 * std::max(1.0, std::abs(z.real()))) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) < 1e-13 * std::max(1.0, std::abs(r));
}

bool is_integer(cplx z) {
    if (std::abs(z.imag()) > 1e-12) return false;
    return std::abs(z.real() - std::round(z.real())) < 1e-12;
}

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return 1.0 / gamma_complex(z);
}

// sum_k prod_i (num_i)_k / prod_j (den_j)_k * x^k / k!
template <typename T, std::size_t P, std::size_t Q>
bool hyper_series(const std::array<T, P>& num, const std::array<T, Q>& den, const T& x,
                  const SeriesControl& ctl, T& sum, long double& maxTerm) {
    using std::abs;
    T term = T(1);
    sum = T(1);
    maxTerm = 1.0L;
    int small = 0;
    for (int k = 0; k < ctl.maxTerms; ++k) {
        T kk = T(k);
        T ratio = x / (kk + T(1));
        for (const auto& a : num) ratio *= (a + kk);
        for (const auto& c : den) ratio /= (c + kk);
        term *= ratio;
        sum += term;
        auto at = static_cast<long double>(abs(term));
        auto as = static_cast<long double>(abs(sum));
        if (at > maxTerm) maxTerm = at;
        if (at == 0.0L) return true;
        if (at <= static_cast<long double>(ctl.tol) * as) {
            if (++small >= 2) return true;
        } else {
            small = 0;
        }
    }
    return false;
}

template <std::size_t P, std::size_t Q>
lcplx pfq(const std::array<cplx, P>& num, const std::array<cplx, Q>& den, cplx x,
          const SeriesControl& ctl, const char* name) {
    std::array<lcplx, P> ln;
    std::array<lcplx, Q> ld;
    for (std::size_t i = 0; i < P; ++i) ln[i] = lcplx(num[i]);
    for (std::size_t j = 0; j < Q; ++j) ld[j] = lcplx(den[j]);
    lcplx sum;
    long double maxTerm = 0;
    bool ok = hyper_series(ln, ld, lcplx(x), ctl, sum, maxTerm);
    if (ok && maxTerm <= kCancellationLimit * std::abs(sum)) return sum;

    // Heavy cancellation or slow convergence: redo in 50-digit arithmetic.
    std::array<wide, P> wn;
    std::array<wide, Q> wd;
    for (std::size_t i = 0; i < P; ++i) wn[i] = wide(num[i].real(), num[i].imag());
    for (std::size_t j = 0; j < Q; ++j) wd[j] = wide(den[j].real(), den[j].imag());
    wide wsum;
    ok = hyper_series(wn, wd, wide(x.real(), x.imag()), ctl, wsum, maxTerm);
    if (!ok) throw NonConvergence(std::string(name) + ": series did not converge within maxTerms");
    return lcplx(static_cast<long double>(wsum.real()), static_cast<long double>(wsum.imag()));
}

cplx f21_series(cplx a, cplx b, cplx c, double x, const SeriesControl& ctl) {
    return cplx(pfq<2, 1>({a, b}, {c}, x, ctl, "gauss_2f1"));
}

// Solutions around x = 1; requires c - a - b non-integer.
cplx f21_near_one(cplx a, cplx b, cplx c, double x, const SeriesControl& ctl) {
    double y = 1.0 - x;
    cplx s = c - a - b;
    cplx gc = gamma_complex(c);
    cplx t1 = gc * gamma_complex(s) * rgamma(c - a) * rgamma(c - b) *
              f21_series(a, b, 1.0 - s, y, ctl);
    cplx t2 = gc * gamma_complex(-s) * rgamma(a) * rgamma(b) * std::pow(cplx(y), s) *
              f21_series(c - a, c - b, 1.0 + s, y, ctl);
    return t1 + t2;
}

bool terminates(cplx a) { return is_nonpositive_integer(a); }

}  // namespace

void SeriesControl::validate() const {
    if (!(tol >= 10.0 * std::numeric_limits<double>::epsilon()))
        throw ParameterError("SeriesControl: tol must be at least 10 machine epsilons");
    if (maxTerms < 1) throw ParameterError("SeriesControl: maxTerms must be positive");
}

cplx gamma_complex(cplx z) {
    if (is_nonpositive_integer(z))
        throw PoleError("gamma_complex: pole at nonpositive integer " + std::to_string(z.real()));
    if (z.real() < 0.5) {
        return kPi / (std::sin(kPi * z) * gamma_complex(1.0 - z));
    }
    // g = 7, n = 9
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    cplx zm = z - 1.0;
    cplx acc = c[0];
    for (int i = 1; i < 9; ++i) acc += c[i] / (zm + double(i));
    cplx t = zm + 7.5;
    cplx logg = 0.5 * std::log(2.0 * kPi) + (zm + 0.5) * std::log(t) - t + std::log(acc);
    return std::exp(logg);
}

cplx gauss_2f1(cplx a, cplx b, cplx c, double x, const SeriesControl& ctl) {
    ctl.validate();
    if (is_nonpositive_integer(c)) throw PoleError("gauss_2f1: c is a nonpositive integer");
    if (x == 0.0) return 1.0;
    if (terminates(a) || terminates(b)) return f21_series(a, b, c, x, ctl);
    if (x >= 1.0) throw DomainError("gauss_2f1: x >= 1 lies on the branch cut");

    if (std::abs(x) <= 0.5) return f21_series(a, b, c, x, ctl);

    if (x > 0.5) {
        if (!is_integer(c - a - b)) return f21_near_one(a, b, c, x, ctl);
        return f21_series(a, b, c, x, ctl);
    }

    if (x >= -1.0) {
        // Pfaff: argument x/(x-1) lies in [1/3, 1/2).
        double z = x / (x - 1.0);
        return std::pow(cplx(1.0 - x), -a) * f21_series(a, c - b, c, z, ctl);
    }

    if (!is_integer(b - a)) {
        // Connection to the neighbourhood of infinity.
        double w = 1.0 / x;
        cplx gc = gamma_complex(c);
        cplx t1 = gc * gamma_complex(b - a) * rgamma(b) * rgamma(c - a) *
                  std::pow(cplx(-x), -a) * gauss_2f1(a, a - c + 1.0, a - b + 1.0, w, ctl);
        cplx t2 = gc * gamma_complex(a - b) * rgamma(a) * rgamma(c - b) *
                  std::pow(cplx(-x), -b) * gauss_2f1(b, b - c + 1.0, b - a + 1.0, w, ctl);
        return t1 + t2;
    }
    double z = x / (x - 1.0);
    return std::pow(cplx(1.0 - x), -a) * gauss_2f1(a, c - b, c, z, ctl);
}

cplx kummer_1f1(cplx a, cplx c, cplx x, const SeriesControl& ctl) {
    ctl.validate();
    if (is_nonpositive_integer(c)) throw PoleError("kummer_1f1: c is a nonpositive integer");
    if (x == cplx(0.0)) return 1.0;
    if (x.real() < 0.0 && !terminates(a)) {
        // Kummer transformation keeps the series terms from alternating in sign.
        return std::exp(x) * cplx(pfq<1, 1>({c - a}, {c}, -x, ctl, "kummer_1f1"));
    }
    return cplx(pfq<1, 1>({a}, {c}, x, ctl, "kummer_1f1"));
}

cplx bessel_j_fractional(double nuOrder, cplx y, const SeriesControl& ctl) {
    ctl.validate();
    if (y == cplx(0.0)) {
        if (nuOrder == 0.0) return 1.0;
        if (nuOrder > 0.0) return 0.0;
        if (is_nonpositive_integer(nuOrder)) return 0.0;
        throw PoleError("bessel_j_fractional: negative non-integer order at y = 0");
    }
    if (is_nonpositive_integer(nuOrder + 1.0))
        throw ParameterError("bessel_j_fractional: negative integer order is not supported");
    cplx lead = std::pow(y / 2.0, nuOrder) * rgamma(nuOrder + 1.0);
    // 0F1(; nu + 1; -y^2/4)
    cplx s = cplx(pfq<0, 1>({}, {cplx(nuOrder + 1.0)}, -y * y / 4.0, ctl, "bessel_j_fractional"));
    return lead * s;
}

}  // namespace coxlab
