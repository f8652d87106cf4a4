#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/airy.hpp>

#include "coxlab/axial.hpp"
#include "coxlab/backgrounds.hpp"
#include "coxlab/errors.hpp"
#include "coxlab/special_functions.hpp"
#include "oracles.hpp"

using namespace coxlab;
using oracle::cplx;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

BackgroundSpec curved(Geometry g, double b, double gamma) {
    BackgroundSpec s;
    s.geometry = g;
    s.b = b;
    s.gamma = gamma;
    return s;
}

double central_force(const BackgroundSpec& s, double L, double z, double h = 1e-5) {
    return -(effective_potential(s, L, z + h) - effective_potential(s, L, z - h)) / (2.0 * h);
}

// Sign changes of the force on a fine grid, located by bisection.
std::vector<double> scan_zeros(const BackgroundSpec& s, double L, double lo, double hi, int n) {
    std::vector<double> zeros;
    auto F = [&](double z) { return effective_force(s, L, z); };
    double zp = lo, fp = F(lo);
    for (int i = 1; i <= n; ++i) {
        double z = lo + (hi - lo) * i / n, f = F(z);
        if (f == 0.0) {
            zeros.push_back(z);
        } else if (fp != 0.0 && (f > 0) != (fp > 0)) {
            double a = zp, b = z, fa = fp;
            for (int k = 0; k < 80; ++k) {
                double m = 0.5 * (a + b), fm = F(m);
                if ((fm > 0) == (fa > 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            zeros.push_back(0.5 * (a + b));
        }
        zp = z;
        fp = f;
    }
    return zeros;
}

}  // namespace

TEST_SUITE("effective_potential") {
    TEST_CASE("Lobachevsky midplane value") {
        const double b = 1.3, g = 0.4, L = 2.2;
        auto s = curved(Geometry::Lobachevsky, b, g);
        CHECK(effective_potential(s, L, 0.0) == doctest::Approx(-(b * g - L) / (1 - g * g)).epsilon(1e-15));
        CHECK(std::abs(effective_potential(s, L, 30.0)) < 1e-20);
    }

    TEST_CASE("spherical endpoint value") {
        const double b = 1.5, g = 0.3;
        auto s = curved(Geometry::Spherical, b, g);
        for (double z : {kHalfPi - 1e-3, -kHalfPi + 1e-3})
            CHECK(std::abs(effective_potential(s, 2.0, z) / (-b / g) - 1.0) < 0.01);
    }

    TEST_CASE("force is minus the derivative") {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> lam(0.5, 4.0), frac(-0.95, 0.95), gam(-0.9, 0.9),
            zl(-4.0, 4.0), zs(-1.5, 1.5);
        for (int t = 0; t < 50; ++t) {
            double L = lam(rng), b = frac(rng) * L, g = gam(rng);
            auto lob = curved(Geometry::Lobachevsky, b, g);
            auto sph = curved(Geometry::Spherical, b, g);
            double z1 = zl(rng), z2 = zs(rng);
            double F1 = effective_force(lob, L, z1), F2 = effective_force(sph, L, z2);
            CHECK(std::abs(F1 - central_force(lob, L, z1)) <= 1e-4 * std::max(1e-3, std::abs(F1)));
            if (std::abs(std::pow(std::cos(z2), 4) - g * g) > 0.05)
                CHECK(std::abs(F2 - central_force(sph, L, z2)) <= 1e-4 * std::max(1e-3, std::abs(F2)));
        }
    }

    TEST_CASE("parity") {
        auto s = curved(Geometry::Lobachevsky, 0.7, 0.2);
        for (int i = 0; i <= 50; ++i) {
            double z = 0.1 * i;
            CHECK(effective_potential(s, 1.4, z) == effective_potential(s, 1.4, -z));
            CHECK(effective_force(s, 1.4, -z) == -effective_force(s, 1.4, z));
        }
    }

    TEST_CASE("pole surface") {
        // ch^4 z = gamma^2 at ch^2 z = 2 for gamma = 2
        auto s = curved(Geometry::Lobachevsky, 1.0, 2.0);
        CHECK_THROWS_AS(effective_potential(s, 1.0, std::acosh(std::sqrt(2.0))), PoleError);
        CHECK_THROWS_AS(potential_profile(s, 1.0, -3.0, 3.0, 301), PoleError);
    }

    TEST_CASE("needs a curved magnetic background") {
        BackgroundSpec flat;
        CHECK_THROWS_AS(effective_potential(flat, 1.0, 0.0), ParameterError);
    }
}

TEST_SUITE("effective_force_extrema") {
    TEST_CASE("strong separation constant leaves only the midplane") {
        auto rep = effective_force_extrema(curved(Geometry::Lobachevsky, 1.0, 0.1), 2.0);
        REQUIRE(rep.extrema.size() == 1);
        CHECK(rep.extrema[0].z == 0.0);
        CHECK(rep.complexRoots);
        CHECK(rep.discriminant < 0.0);
    }

    TEST_CASE("no structure parameter") {
        for (double L : {0.5, 1.0, 3.0}) {
            auto s = curved(Geometry::Lobachevsky, 0.8, 0.0);
            auto rep = effective_force_extrema(s, L);
            REQUIRE(rep.extrema.size() == 1);
            CHECK(rep.extrema[0].z == 0.0);
            CHECK(scan_zeros(s, L, -5.0, 5.0, 1001).size() == 1);
        }
    }

    TEST_CASE("off-axis equilibria agree with a sign scan") {
        const double L = 1.0, b = 2.0, g = 0.3;
        auto s = curved(Geometry::Lobachevsky, b, g);
        auto rep = effective_force_extrema(s, L);
        REQUIRE(rep.candidateY.size() == 2);
        std::vector<double> y = rep.candidateY;
        std::sort(y.begin(), y.end());
        CHECK(y[0] == doctest::Approx(0.6 - 0.3 * std::sqrt(3.0)).epsilon(1e-12));
        CHECK(y[1] == doctest::Approx(0.6 + 0.3 * std::sqrt(3.0)).epsilon(1e-12));
        auto zeros = scan_zeros(s, L, -5.0, 5.0, 2001);
        REQUIRE(rep.extrema.size() == zeros.size());
        REQUIRE(zeros.size() == 3);
        for (std::size_t i = 0; i < zeros.size(); ++i)
            CHECK(std::abs(rep.extrema[i].z - zeros[i]) < 1e-9);
        double zr = std::acosh(std::sqrt(0.6 + 0.3 * std::sqrt(3.0)));
        CHECK(std::abs(rep.extrema[2].z - zr) < 1e-12);
        CHECK(rep.extrema[1].kind == ExtremumKind::Minimum);
        CHECK(rep.extrema[0].kind == ExtremumKind::Maximum);
        CHECK(rep.extrema[2].kind == ExtremumKind::Maximum);
    }

    TEST_CASE("uniqueness of equilibrium for dominant separation constant") {
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> lam(0.3, 5.0), frac(-0.98, 0.98), gam(-0.9, 0.9);
        for (int t = 0; t < 50; ++t) {
            double L = lam(rng), b = frac(rng) * L, g = gam(rng);
            auto lob = curved(Geometry::Lobachevsky, b, g);
            CHECK(effective_force_extrema(lob, L).extrema.size() == 1);
            CHECK(scan_zeros(lob, L, -5.0, 5.0, 2000).size() == 1);
            auto sph = curved(Geometry::Spherical, b, g);
            auto prof = potential_profile(sph, L, -kHalfPi + 1e-3, kHalfPi - 1e-3, 2001);
            CHECK(prof.extrema.size() == 1);
        }
    }

    TEST_CASE("profile force matches the derivative of the profile") {
        auto s = curved(Geometry::Lobachevsky, 0.9, 0.25);
        auto prof = potential_profile(s, 1.7, -3.0, 3.0, 6001);
        const double h = prof.zGrid[1] - prof.zGrid[0];
        for (std::size_t i = 1; i + 1 < prof.zGrid.size(); ++i) {
            double fd = -(prof.U[i + 1] - prof.U[i - 1]) / (2.0 * h);
            CHECK(std::abs(fd - prof.Fz[i]) <= 1e-4 * std::max(1e-2, std::abs(prof.Fz[i])));
        }
        for (std::size_t i = 0; i < prof.zGrid.size(); ++i) {
            std::size_t j = prof.zGrid.size() - 1 - i;
            CHECK(prof.zGrid[i] == -prof.zGrid[j]);
            CHECK(prof.U[i] == prof.U[j]);
        }
    }
}

TEST_SUITE("airy_pair") {
    TEST_CASE("turning point maps to the origin") {
        for (auto [w, nu] : {std::pair{0.7, 1.3}, {-2.0, 0.4}, {0.0, 1.0}}) {
            auto pair = airy_pair(w, nu);
            CHECK(pair.turningPoint() == doctest::Approx(-w / nu).epsilon(1e-15));
            CHECK(pair.x_of_z(pair.turningPoint()) == 0.0);
        }
        CHECK_THROWS_AS(airy_pair(0.0, 0.0), ParameterError);
    }

    TEST_CASE("standard Airy functions from the shapes") {
        using AP = AirySolutionPair;
        for (int i = 0; i <= 200; ++i) {
            double x = -10.0 + 0.1 * i;
            double ai = std::pow(3.0, -2.0 / 3.0) * AP::A2(x) - std::pow(3.0, -4.0 / 3.0) * AP::A1(x);
            double bi = std::pow(3.0, -1.0 / 6.0) * AP::A2(x) + std::pow(3.0, -5.0 / 6.0) * AP::A1(x);
            double dai = std::pow(3.0, -2.0 / 3.0) * AP::dA2(x) - std::pow(3.0, -4.0 / 3.0) * AP::dA1(x);
            // Ai is a cancelling difference of the growing shapes for x > 0
            double scale = std::abs(AP::A1(x)) + std::abs(AP::A2(x)) + std::abs(AP::dA1(x)) + std::abs(AP::dA2(x));
            CHECK(std::abs(ai - boost::math::airy_ai(x)) < std::max(1e-12, 1e-15 * scale));
            CHECK(std::abs(dai - boost::math::airy_ai_prime(x)) < std::max(1e-11, 1e-15 * scale));
            CHECK(std::abs(bi - boost::math::airy_bi(x)) < 1e-12 * std::max(1.0, std::abs(bi)));
        }
    }

    TEST_CASE("Bessel representation on the growing side") {
        auto pair = airy_pair(0.0, 1.0);
        const cplx I{0.0, 1.0};
        for (double x : {0.5, 2.0, 4.5}) {
            double xi = 2.0 / 3.0 * std::pow(x, 1.5);
            cplx z1 = std::cbrt(xi) * bessel_j_fractional(1.0 / 3.0, I * xi);
            cplx z2 = std::cbrt(xi) * bessel_j_fractional(-1.0 / 3.0, I * xi);
            CHECK(std::abs(pair.Z1(x) - z1) < 1e-11 * std::abs(z1));
            CHECK(std::abs(pair.Z2(x) - z2) < 1e-11 * std::abs(z2));
        }
    }

    TEST_CASE("both branches solve the Airy equation") {
        auto pair = airy_pair(0.0, 1.0);
        std::vector<double> left, right;
        for (int i = 1; i <= 100; ++i) {
            right.push_back(0.1 * i);
            left.push_back(-0.1 * i);
        }
        auto f = [](double x, double y, double) { return x * y; };
        using AP = AirySolutionPair;
        for (int branch = 0; branch < 2; ++branch) {
            auto val = [&](double x) { return branch == 0 ? AP::A1(x) : AP::A2(x); };
            auto der = [&](double x) { return branch == 0 ? AP::dA1(x) : AP::dA2(x); };
            for (const auto* xs : {&left, &right}) {
                auto out = oracle::integrate2(f, 0.0, {val(0.0), der(0.0)}, *xs, 1e-14);
                double worst = 0.0;
                for (std::size_t i = 0; i < xs->size(); ++i) {
                    double x = (*xs)[i];
                    worst = std::max(worst, std::abs(out[i][0] - val(x)) / std::max(1.0, std::abs(val(x))));
                }
                CHECK(worst <= 1e-8);
            }
        }
    }

    TEST_CASE("Wronskian is constant") {
        auto pair = airy_pair(0.3, 2.0);
        const cplx W = pair.wronskian();
        CHECK(std::abs(W) > 0.0);
        const cplx expected = -AirySolutionPair::c1() * AirySolutionPair::c2() /
                              (std::tgamma(4.0 / 3.0) * std::tgamma(2.0 / 3.0));
        CHECK(std::abs(W - expected) < 1e-14);
        for (int i = 0; i <= 200; ++i) {
            double x = -10.0 + 0.1 * i;
            cplx a = pair.Z1(x) * pair.dZ2(x), b = pair.dZ1(x) * pair.Z2(x);
            // both branches grow for x > 0, so the difference cancels against |a| + |b|
            CHECK(std::abs(a - b - W) <= 1e-8 * std::max(std::abs(W), std::abs(a) + std::abs(b)));
        }
    }

    TEST_CASE("exponential dichotomy for large positive x") {
        using AP = AirySolutionPair;
        auto decaying = [](double x) {
            return std::pow(3.0, -2.0 / 3.0) * AP::A2(x) - std::pow(3.0, -4.0 / 3.0) * AP::A1(x);
        };
        double prev = decaying(2.0);
        for (double x : {4.0, 6.0, 8.0}) {
            double d = decaying(x);
            CHECK(d > 0.0);
            CHECK(d < prev);
            CHECK(AP::A1(x) > AP::A1(x - 2.0));
            prev = d;
        }
        CHECK(decaying(8.0) < 1e-6);
        CHECK(AP::A1(8.0) > 1e6);
    }
}

TEST_SUITE("integrate_axial") {
    TEST_CASE("flat electric reproduces an Airy branch") {
        BackgroundSpec s;
        s.field = FieldKind::Electric;
        s.nu = 1.0;
        auto ode = assemble_axial_ode(s, 0.0, {0.0, 0.0, 1.0});
        auto pair = airy_pair(0.0, 1.0);
        const double zLo = -5.0, zHi = 10.0;
        const double x0 = pair.x_of_z(zLo), cb = std::cbrt(pair.nu());
        AxialInitialCondition ic{AirySolutionPair::A1(x0), -cb * AirySolutionPair::dA1(x0)};
        auto sol = integrate_axial(ode, ic, zLo, zHi, 301);
        double worst = 0.0;
        for (std::size_t i = 0; i < sol.z.size(); ++i) {
            double ref = AirySolutionPair::A1(pair.x_of_z(sol.z[i]));
            worst = std::max(worst, std::abs(sol.value[i] - ref) / std::max(1.0, std::abs(ref)));
        }
        CHECK(worst <= 1e-7);
        CHECK(sol.errorEstimate < 1e-7);
    }

    TEST_CASE("Lobachevsky barrier against an independent integrator") {
        // f = Z ch z solves f'' + (eps - 1 - Lambda/ch^2 z) f = 0
        const double L = 2.0, eps = 3.5;
        auto ode = assemble_axial_ode(curved(Geometry::Lobachevsky, 1.0, 0.0), L, {eps});
        const double zLo = -4.0, zHi = 4.0;
        AxialInitialCondition ic{0.8, -0.3};
        auto sol = integrate_axial(ode, ic, zLo, zHi, 81);
        auto f = [&](double z, double y, double) { return -(eps - 1.0 - L / std::pow(std::cosh(z), 2)) * y; };
        double ch = std::cosh(zLo), sh = std::sinh(zLo);
        oracle::State y{ic.value * ch, ic.slope * ch + ic.value * sh};
        double worst = 0.0;
        double zPrev = zLo;
        for (std::size_t i = 1; i < sol.z.size(); ++i) {
            y = oracle::rk4(f, zPrev, y, sol.z[i], 400);
            zPrev = sol.z[i];
            worst = std::max(worst, std::abs(sol.value[i] * std::cosh(sol.z[i]) - y[0]));
        }
        CHECK(worst < 1e-9);
    }

    TEST_CASE("step halving shows high order") {
        const double L = 2.0, eps = 3.5;
        auto ode = assemble_axial_ode(curved(Geometry::Lobachevsky, 1.0, 0.0), L, {eps});
        AxialInitialCondition ic{1.0, 0.0};
        auto ref = integrate_axial(ode, ic, -3.0, 3.0, 13, {1e-14, 1e-14});
        auto err = [&](double h) {
            AxialIntegrationOptions o;
            o.fixedStep = h;
            auto sol = integrate_axial(ode, ic, -3.0, 3.0, 13, o);
            double e = 0.0;
            for (std::size_t i = 0; i < sol.z.size(); ++i) e = std::max(e, std::abs(sol.value[i] - ref.value[i]));
            return e;
        };
        double e1 = err(0.1), e2 = err(0.05);
        CHECK(e2 > 0.0);
        CHECK(e1 / e2 >= 8.0);
    }

    TEST_CASE("sub-barrier energy grows without oscillating") {
        const double L = 2.0;
        auto below = assemble_axial_ode(curved(Geometry::Lobachevsky, 1.0, 0.0), L, {0.5});
        CHECK_FALSE(propagating_at_infinity(below));
        auto sol = integrate_axial(below, {1.0, 0.0}, 0.0, 6.0, 121);
        for (std::size_t i = 1; i < sol.z.size(); ++i)
            CHECK(sol.value[i] * std::cosh(sol.z[i]) > sol.value[i - 1] * std::cosh(sol.z[i - 1]));
        auto above = assemble_axial_ode(curved(Geometry::Lobachevsky, 1.0, 0.0), L, {3.0});
        CHECK(propagating_at_infinity(above));
    }

    TEST_CASE("domain and pole errors") {
        auto sph = assemble_axial_ode(curved(Geometry::Spherical, 1.0, 0.2), 1.0, {1.0});
        CHECK_THROWS_AS(integrate_axial(sph, {1.0, 0.0}, 0.0, 2.0, 11), DomainError);
        auto pole = assemble_axial_ode(curved(Geometry::Lobachevsky, 1.0, 2.0), 1.0, {1.0});
        CHECK_THROWS_AS(integrate_axial(pole, {1.0, 0.0}, 0.0, 2.0, 11), PoleError);
    }
}

TEST_SUITE("singular_local_form") {
    TEST_CASE("near y = 1 the exponent is energy minus the midplane potential") {
        const double b = 0.8, g = 0.3, L = 1.5, eps = 2.0;
        auto sph = curved(Geometry::Spherical, b, g);
        auto f = singular_local_form(sph, L, eps, SingularTag::One);
        CHECK(f.A == doctest::Approx(eps - (b * g + L) / (1 - g * g)).epsilon(1e-15));
        CHECK(f.A == doctest::Approx(eps - effective_potential(sph, L, 0.0)).epsilon(1e-14));
        // y - 1 = sh^2 z on the Lobachevsky side flips the sign of A
        auto lob = curved(Geometry::Lobachevsky, b, g);
        auto fl = singular_local_form(lob, L, eps, SingularTag::One);
        CHECK(fl.A == doctest::Approx(-(eps - effective_potential(lob, L, 0.0))).epsilon(1e-14));
    }

    TEST_CASE("near y = 0") {
        auto f = singular_local_form(curved(Geometry::Spherical, 1.2, 0.4), 1.0, 0.7, SingularTag::Zero);
        CHECK(f.C == doctest::Approx(-0.7 - 1.2 / 0.4).epsilon(1e-15));
    }

    TEST_CASE("near infinity") {
        auto f = singular_local_form(curved(Geometry::Spherical, 1.0, 0.2), 1.0, 0.0, SingularTag::Infinity);
        CHECK(std::abs(f.D[0] - 0.0) < 1e-15);
        CHECK(std::abs(f.D[1] + 1.0) < 1e-15);
        auto g = singular_local_form(curved(Geometry::Spherical, 1.0, 0.2), 1.0, 3.0, SingularTag::Infinity);
        CHECK(std::abs(g.D[0] - 0.5) < 1e-15);
        CHECK(std::abs(g.D[1] + 1.5) < 1e-15);
    }

    TEST_CASE("resonance points reduce to a confluent equation") {
        const double b = 0.9, g = 0.2, L = 1.7;
        auto s = curved(Geometry::Spherical, b, g);
        auto plus = singular_local_form(s, L, 1.0, SingularTag::PlusGamma);
        CHECK(plus.a == doctest::Approx((L + b) / (4 * (3 - 4 * g))).epsilon(1e-15));
        CHECK(plus.a == doctest::Approx(plus.N / plus.M).epsilon(1e-14));
        CHECK(plus.c == 0.0);
        auto minus = singular_local_form(s, L, 1.0, SingularTag::MinusGamma);
        CHECK(minus.a == doctest::Approx((L - b) / (4 * (3 + 4 * g))).epsilon(1e-15));
        CHECK(minus.a == doctest::Approx(minus.N / minus.M).epsilon(1e-14));
    }

    TEST_CASE("tags") {
        for (auto t : {SingularTag::One, SingularTag::Zero, SingularTag::PlusGamma, SingularTag::MinusGamma,
                       SingularTag::Infinity})
            CHECK(parse_singular_tag(to_string(t)) == t);
        CHECK_THROWS_AS(parse_singular_tag("2"), ParameterError);
    }

    TEST_CASE("merged points") {
        CHECK_THROWS_AS(singular_local_form(curved(Geometry::Spherical, 1.0, 0.0), 1.0, 1.0, SingularTag::Zero),
                        ParameterError);
    }
}
