#include "coxlab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "coxlab/errors.hpp"
#include "coxlab/special_functions.hpp"

namespace coxlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Tridiagonal {
    std::vector<double> d;  // diagonal
    std::vector<double> e;  // off-diagonal, size n-1
};

// Number of eigenvalues strictly below x.
int sturm_count(const Tridiagonal& t, double x) {
    const std::size_t n = t.d.size();
    int count = 0;
    double q = t.d[0] - x;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        if (q == 0.0) q = std::numeric_limits<double>::epsilon() * (std::abs(t.e[i - 1]) + 1e-300);
        q = t.d[i] - x - t.e[i - 1] * t.e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

double last_pivot(const Tridiagonal& t, double x) {
    double q = t.d[0] - x;
    for (std::size_t i = 1; i < t.d.size(); ++i) {
        if (q == 0.0) q = std::numeric_limits<double>::epsilon();
        q = t.d[i] - x - t.e[i - 1] * t.e[i - 1] / q;
    }
    return q;
}

std::pair<double, double> gershgorin(const Tridiagonal& t) {
    double lo = std::numeric_limits<double>::max(), hi = -lo;
    const std::size_t n = t.d.size();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.e[i - 1]);
        if (i + 1 < n) r += std::abs(t.e[i]);
        lo = std::min(lo, t.d[i] - r);
        hi = std::max(hi, t.d[i] + r);
    }
    return {lo, hi};
}

// k-th eigenvalue (0-based) by Sturm bisection, then one secant step on the last pivot.
double kth_eigenvalue(const Tridiagonal& t, int k, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) > k) hi = mid;
        else lo = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(mid))) break;
    }
    double flo = last_pivot(t, lo), fhi = last_pivot(t, hi);
    double mid = 0.5 * (lo + hi);
    if (std::isfinite(flo) && std::isfinite(fhi) && flo != fhi) {
        double s = hi - fhi * (hi - lo) / (fhi - flo);
        if (s > lo && s < hi) return s;
    }
    return mid;
}

// Solves (T - shift) x = rhs with partial pivoting.
std::vector<double> tridiagonal_solve(const Tridiagonal& t, double shift, std::vector<double> rhs) {
    const std::size_t n = t.d.size();
    std::vector<double> dl(t.e), du(t.e), d(n), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.d[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = 1e-300;
            double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            rhs[i + 1] -= f * rhs[i];
            dl[i] = 0.0;
        } else {
            double f = d[i] / dl[i];
            d[i] = dl[i];
            double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if (i + 2 < n) {
                dl[i] = du[i + 1];
                du[i + 1] = -f * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = tmp;
            std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= f * rhs[i];
            du2[i] = dl[i];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = 1e-300;
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    if (n > 1) x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
        x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    return x;
}

std::vector<double> inverse_iteration(const Tridiagonal& t, double lambda, double h) {
    const std::size_t n = t.d.size();
    std::vector<double> v(n, 1.0);
    double shift = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
    for (int it = 0; it < 3; ++it) {
        v = tridiagonal_solve(t, shift, v);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm * h);
        for (double& x : v) x /= norm;
    }
    // Fix the sign: positive near the left end.
    for (double x : v)
        if (std::abs(x) > 1e-8) {
            if (x < 0)
                for (double& y : v) y = -y;
            break;
        }
    return v;
}

struct Discretization {
    Tridiagonal t;
    std::vector<double> x;
    std::vector<double> sqrtWeight;  // sqrt of the original measure w at cell centres
    double h = 0.0;
};

// Cell-centred finite volumes for v = R / phi, phi carrying the endpoint exponents,
// symmetrised through u = sqrt(w phi^2) v.
Discretization discretize(const SeparatedODE& ode, double lo, double hi, int n) {
    const double alpha = ode.leftExponent;
    const double beta = ode.finiteRight ? ode.rightExponent : 0.0;
    const double len = hi - lo;
    const double h = len / n;

    auto logPhi = [&](double x) {
        if (ode.finiteRight) {
            double th = std::numbers::pi * (x - lo) / (2.0 * len);
            return alpha * std::log(std::sin(th)) + beta * std::log(std::cos(th));
        }
        return alpha * std::log(x - lo);
    };
    // phi'/phi and its derivative
    auto ell = [&](double x) -> std::pair<double, double> {
        if (ode.finiteRight) {
            double k = std::numbers::pi / (2.0 * len);
            double th = k * (x - lo);
            double s = std::sin(th), c = std::cos(th);
            double l = k * (alpha * c / s - beta * s / c);
            double lp = -k * k * (alpha / (s * s) + beta / (c * c));
            return {l, lp};
        }
        double y = x - lo;
        return {alpha / y, -alpha / (y * y)};
    };
    auto logW = [&](double x) { return std::log(ode.weight(x)) + 2.0 * logPhi(x); };

    Discretization out;
    out.h = h;
    out.x.resize(n);
    out.sqrtWeight.resize(n);
    std::vector<double> lWc(n), lWf(n + 1);
    for (int i = 0; i < n; ++i) {
        double x = lo + (i + 0.5) * h;
        out.x[i] = x;
        lWc[i] = logW(x);
        out.sqrtWeight[i] = std::sqrt(ode.weight(x));
    }
    const double ninf = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) lWf[i] = logW(lo + i * h);
    lWf[0] = ninf;  // vanishing flux on the axis
    if (ode.finiteRight) lWf[n] = ninf;

    out.t.d.resize(n);
    out.t.e.resize(n > 0 ? n - 1 : 0);
    const double ih2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        double x = out.x[i];
        auto [l, lp] = ell(x);
        double V = -ode.p(x) * l - lp - l * l - ode.q0(x);
        double flux = std::exp(lWf[i + 1] - lWc[i]) + std::exp(lWf[i] - lWc[i]);
        out.t.d[i] = flux * ih2 + V;
        if (i + 1 < n) out.t.e[i] = -std::exp(lWf[i + 1] - 0.5 * (lWc[i] + lWc[i + 1])) * ih2;
    }
    return out;
}

std::vector<double> lowest_eigenvalues(const Tridiagonal& t, int count) {
    auto [glo, ghi] = gershgorin(t);
    // Steep endpoint exponents put huge entries at the far cells; bracket the
    // wanted levels geometrically so bisection does not start from that range.
    double lo = -1.0, hi = 1.0;
    while (lo > glo && sturm_count(t, lo) > 0) lo *= 2.0;
    while (hi < ghi && sturm_count(t, hi) < count) hi *= 2.0;
    lo = std::max(lo, glo);
    hi = std::min(hi, ghi);
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(kth_eigenvalue(t, k, lo, hi));
    return out;
}

}  // namespace

SpectrumEntry evaluate_spectrum(const BackgroundSpec& s, const QuantumNumbers& qn) {
    s.validate();
    if (s.field != FieldKind::Magnetic) throw ParameterError("closed-form spectra need a magnetic field");
    if (qn.n < 0) throw ParameterError("radial quantum number must be nonnegative");
    SpectrumEntry e;
    e.qn = qn;
    e.convention = s.energy_convention();
    const double b = s.b;
    const double n = qn.n, m = qn.m, am = std::abs(qn.m);
    switch (s.geometry) {
        case Geometry::Flat: {
            const double eta = s.gamma;
            if (!(std::abs(eta) < 1.0)) throw InvalidEta("flat spectrum needs |eta| < 1");
            double epsPrime = 4.0 * b * (n + (m + am + 1.0) / 2.0);
            e.Lambda = epsPrime;
            e.epsilon = epsPrime + (1.0 - eta * eta) * qn.k * qn.k - 2.0 * eta * b;
            e.branch = "landau";
            break;
        }
        case Geometry::Lobachevsky: {
            double sp = (m + am) / 2.0 + n + 0.5;
            e.Lambda = 0.25 + 2.0 * b * sp - sp * sp;
            e.epsilon = kNaN;
            e.branch = "ladder";
            std::vector<std::string> failed;
            if (!(m < 2.0 * b)) failed.push_back("m < 2b");
            if (!(sp <= b)) failed.push_back("s + 1/2 <= b");
            if (!(b <= e.Lambda)) failed.push_back("b <= Lambda");
            if (!failed.empty()) {
                e.valid = false;
                std::ostringstream os;
                os << "violates";
                for (std::size_t i = 0; i < failed.size(); ++i) os << (i ? ", " : " ") << failed[i];
                e.reason = os.str();
            }
            break;
        }
        case Geometry::Spherical: {
            double t;
            if (m > 0) {
                t = n + m + 0.5;
                e.Lambda = 2.0 * b * t + t * t - 0.25;
                e.branch = "m>0";
            } else if (m < -2.0 * b) {
                t = n - m + 0.5;
                e.Lambda = -2.0 * b * t + t * t - 0.25;
                e.branch = "m<-2b";
            } else {
                t = n + 0.5;
                e.Lambda = 2.0 * b * t + t * t - 0.25;
                e.branch = "-2b<m<=0";
            }
            e.epsilon = kNaN;
            break;
        }
    }
    return e;
}

SpectrumEntry analytic_spectrum(const BackgroundSpec& s, const QuantumNumbers& qn) {
    SpectrumEntry e = evaluate_spectrum(s, qn);
    if (!e.valid) throw NoBoundState("no bound state for n=" + std::to_string(qn.n) +
                                     ", m=" + std::to_string(qn.m) + ": " + e.reason);
    return e;
}

double flat_limit_lambda0(double eB, const QuantumNumbers& qn) {
    return 2.0 * eB * (qn.n + (qn.m + std::abs(qn.m)) / 2.0 + 0.5);
}

double flat_energy(double epsilon, double eta) {
    if (!(std::abs(eta) < 1.0)) throw InvalidEta("|eta| must be below 1");
    return epsilon / (1.0 - eta * eta);
}

double oscillator_frequency_shift(double B, double Gamma, double M, double charge, double c) {
    double gb = Gamma * B;
    if (!(std::abs(gb) < 1.0)) throw InvalidEta("|Gamma B| must be below 1");
    if (!(M > 0.0)) throw ParameterError("mass must be positive");
    double omega = charge * B / (M * c);
    return omega / (1.0 - gb * gb);
}

EigenResult solve_radial_eigen(const SeparatedODE& ode, int count, const GridSpec& grid) {
    if (ode.kind != OdeKind::Radial || ode.variable != "r")
        throw ParameterError("solve_radial_eigen needs a radial equation in r");
    if (count < 1) throw ParameterError("count must be positive");
    if (grid.points < 16) throw ParameterError("grid needs at least 16 points");
    if (grid.points < 4 * count) throw GridTooCoarse("grid too coarse for the requested levels");

    const double lo = ode.domain.lo;
    const bool autoR = grid.rMax <= 0.0;
    double hi = ode.finiteRight ? ode.domain.hi : (autoR ? ode.suggestedCutoff : grid.rMax);
    int n = grid.points;

    for (int attempt = 0;; ++attempt) {
        Discretization coarse = discretize(ode, lo, hi, n);
        Discretization fine = discretize(ode, lo, hi, 2 * n);
        auto ec = lowest_eigenvalues(coarse.t, count);
        auto ef = lowest_eigenvalues(fine.t, count);

        EigenResult res;
        res.gridSpec = grid;
        res.gridSpec.rMax = hi;
        res.gridSpec.points = n;
        res.grid = fine.x;
        res.fineEigenvalues = ef;
        for (int k = 0; k < count; ++k) {
            double delta = std::abs(ef[k] - ec[k]);
            if (delta > grid.richardsonTol * std::max(1.0, std::abs(ef[k])))
                throw GridTooCoarse("level " + std::to_string(k) + " changes by " +
                                    std::to_string(delta) + " between N and 2N");
            res.eigenvalues.push_back((4.0 * ef[k] - ec[k]) / 3.0);
        }

        bool leaky = false;
        const std::size_t nf = fine.x.size();
        const std::size_t tail = std::max<std::size_t>(1, nf / 20);
        for (int k = 0; k < count; ++k) {
            auto u = inverse_iteration(fine.t, ef[k], fine.h);
            if (!ode.finiteRight) {
                double mass = 0.0;
                for (std::size_t i = nf - tail; i < nf; ++i) mass += u[i] * u[i] * fine.h;
                if (mass > grid.boundaryMassTol) leaky = true;
            }
            std::vector<double> R(nf);
            for (std::size_t i = 0; i < nf; ++i) R[i] = u[i] / fine.sqrtWeight[i];
            res.eigenfunctions.push_back(std::move(R));
        }
        if (!leaky) return res;
        if (!autoR || attempt >= 2)
            throw CutoffTooSmall("eigenfunction mass near r = " + std::to_string(hi) +
                                 " exceeds tolerance");
        hi *= 2.0;
        n *= 2;
    }
}

HypergeometricParams radial_hypergeometric_params(int m, double wPerp) {
    if (!(wPerp > 0.25)) throw ParameterError("radial hypergeometric solution needs wPerp > 1/4");
    HypergeometricParams hp;
    hp.a = std::abs(m) / 2.0;
    double k = std::sqrt(wPerp - 0.25);
    hp.alpha = {2.0 * hp.a + 0.5, -k};
    hp.beta = {2.0 * hp.a + 0.5, k};
    hp.gamma = 2.0 * hp.a + 1.0;
    return hp;
}

std::complex<double> radial_hypergeometric_solution(int m, double wPerp, double x) {
    auto hp = radial_hypergeometric_params(m, wPerp);
    if (!(x >= 1.0)) throw DomainError("radial hypergeometric solution needs x >= 1");
    using C = std::complex<double>;
    C cPrime = hp.alpha + hp.beta + 1.0 - hp.gamma;
    C pre = std::pow(C(x), hp.a) * std::pow(C(1.0 - x), hp.a);
    if (x == 1.0) return hp.a == 0.0 ? C(1.0) : C(0.0);
    return pre * gauss_2f1(hp.alpha, hp.beta, cPrime, 1.0 - x);
}

std::pair<std::complex<double>, std::complex<double>> asymptotic_amplitudes(int m, double wPerp) {
    auto hp = radial_hypergeometric_params(m, wPerp);
    using C = std::complex<double>;
    const C al = hp.alpha, be = hp.beta;
    const double g = hp.gamma;
    C cPrime = al + be + 1.0 - g;
    // The e^{-i pi alpha} factors cancel against the branch of (-x)^{-alpha} for real x > 1.
    C c3 = gamma_complex(cPrime) * gamma_complex(be - al) / (gamma_complex(be + 1.0 - g) * gamma_complex(be));
    C c4 = gamma_complex(cPrime) * gamma_complex(al - be) / (gamma_complex(al + 1.0 - g) * gamma_complex(al));
    return {c3, c4};
}

}  // namespace coxlab
