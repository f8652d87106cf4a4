#include "coxlab/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "coxlab/errors.hpp"

namespace coxlab {

namespace {

constexpr double kSingularThreshold = 1e-12;

ScalarKind combine(ScalarKind a, ScalarKind b) {
    return (a == ScalarKind::Complex || b == ScalarKind::Complex) ? ScalarKind::Complex
                                                                  : ScalarKind::Real;
}

MixedTensor polynomial(const std::array<cplx, 4>& c, const MixedTensor& G) {
    MixedTensor G2 = G * G;
    MixedTensor G3 = G2 * G;
    MixedTensor out = MixedTensor::identity(c[0]) + c[1] * G + c[2] * G2 + c[3] * G3;
    out.kind = G.kind;
    for (const auto& ci : c)
        if (ci.imag() != 0.0) out.kind = ScalarKind::Complex;
    return out;
}

void check_denominator(cplx det, double mu) {
    if (std::abs(det) < kSingularThreshold * std::pow(mu, 4))
        throw SingularLambda("mass matrix is singular: |denominator| = " +
                             std::to_string(std::abs(det)));
}

}  // namespace

double DiagonalMetric::sqrtMinusG() const { return std::sqrt(-detG()); }

double DiagonalMetric::inv(int i) const {
    switch (i) {
        case 0: return 1.0 / g00;
        case 1: return 1.0 / g11;
        case 2: return 1.0 / g22;
        default: return 1.0 / g33;
    }
}

void DiagonalMetric::validate() const {
    if (!(g00 > 0.0 && g11 < 0.0 && g22 < 0.0 && g33 < 0.0))
        throw DomainError("metric must have signature (+,-,-,-)");
}

MixedTensor MixedTensor::identity(cplx scale) {
    MixedTensor t;
    for (int i = 0; i < 4; ++i) t.m[i][i] = scale;
    t.kind = scale.imag() != 0.0 ? ScalarKind::Complex : ScalarKind::Real;
    return t;
}

double MixedTensor::max_abs() const {
    double r = 0.0;
    for (const auto& row : m)
        for (const auto& v : row) r = std::max(r, std::abs(v));
    return r;
}

cplx MixedTensor::trace() const { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }

MixedTensor operator*(const MixedTensor& x, const MixedTensor& y) {
    MixedTensor r;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            cplx s = 0.0;
            for (int k = 0; k < 4; ++k) s += x.m[a][k] * y.m[k][b];
            r.m[a][b] = s;
        }
    r.kind = combine(x.kind, y.kind);
    return r;
}

MixedTensor operator+(const MixedTensor& x, const MixedTensor& y) {
    MixedTensor r;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r.m[a][b] = x.m[a][b] + y.m[a][b];
    r.kind = combine(x.kind, y.kind);
    return r;
}

MixedTensor operator-(const MixedTensor& x, const MixedTensor& y) {
    return x + cplx(-1.0) * y;
}

MixedTensor operator*(cplx s, const MixedTensor& x) {
    MixedTensor r = x;
    for (auto& row : r.m)
        for (auto& v : row) v *= s;
    if (s.imag() != 0.0) r.kind = ScalarKind::Complex;
    return r;
}

ParticleConstants ParticleConstants::from_converted(double mu, double lambdaConverted) {
    return {mu, cplx(0.0, -lambdaConverted)};
}

MixedTensor build_mixed_field_tensor(const FieldConfig3& f, const DiagonalMetric& g) {
    g.validate();
    const auto& E = f.E;
    const auto& B = f.B;
    double h0 = g.inv(0), h1 = g.inv(1), h2 = g.inv(2), h3 = g.inv(3);
    MixedTensor F;
    F.m[0] = {0.0, h1 * E[0], h2 * E[1], h3 * E[2]};
    F.m[1] = {-h0 * E[0], 0.0, h2 * B[2], -h3 * B[1]};
    F.m[2] = {-h0 * E[1], -h1 * B[2], 0.0, h3 * B[0]};
    F.m[3] = {-h0 * E[2], h1 * B[1], -h2 * B[0], 0.0};
    return F;
}

namespace {

std::array<double, 3> raised_b(const FieldConfig3& f, const DiagonalMetric& g) {
    return {g.inv(2) * g.inv(3) * f.B[0], g.inv(3) * g.inv(1) * f.B[1],
            g.inv(1) * g.inv(2) * f.B[2]};
}

}  // namespace

MixedTensor dual_tensor(const FieldConfig3& f, const DiagonalMetric& g) {
    g.validate();
    double s = g.sqrtMinusG();
    double h[4] = {g.inv(0), g.inv(1), g.inv(2), g.inv(3)};
    auto Bu = raised_b(f, g);
    std::array<double, 3> Eu = {h[1] * f.E[0], h[2] * f.E[1], h[3] * f.E[2]};
    MixedTensor D;
    for (int i = 0; i < 3; ++i) {
        D.m[0][i + 1] = -s * h[i + 1] * Bu[i];
        D.m[i + 1][0] = s * h[0] * Bu[i];
    }
    D.m[2][3] = -s * h[0] * h[3] * Eu[0];
    D.m[3][2] = s * h[0] * h[2] * Eu[0];
    D.m[3][1] = -s * h[0] * h[1] * Eu[1];
    D.m[1][3] = s * h[0] * h[3] * Eu[1];
    D.m[1][2] = -s * h[0] * h[2] * Eu[2];
    D.m[2][1] = s * h[0] * h[1] * Eu[2];
    return D;
}

Invariants field_invariants(const FieldConfig3& f, const DiagonalMetric& g) {
    g.validate();
    auto Bu = raised_b(f, g);
    double EE = 0.0, BB = 0.0, EB = 0.0;
    for (int i = 0; i < 3; ++i) {
        EE += f.E[i] * g.inv(i + 1) * f.E[i];
        BB += f.B[i] * Bu[i];
        EB += f.E[i] * f.B[i];
    }
    Invariants inv;
    inv.I = -(g.inv(0) * EE + BB);
    inv.J = -EB / g.sqrtMinusG();
    MixedTensor F = build_mixed_field_tensor(f, g);
    MixedTensor D = dual_tensor(f, g);
    inv.residualI = std::abs(inv.I - 0.5 * (F * F).trace());
    inv.residualJ = std::abs(inv.J - 0.25 * (D * F).trace());
    return inv;
}

std::pair<double, double> minimal_poly_residuals(const MixedTensor& F, const MixedTensor& Fdual,
                                                 const Invariants& inv) {
    MixedTensor F2 = F * F;
    MixedTensor F3 = F2 * F;
    MixedTensor F4 = F3 * F;
    const double n = std::max(1.0, F.max_abs());
    double r3 = (F3 - cplx(inv.I) * F - cplx(inv.J) * Fdual).max_abs() / (n * n * n);
    double r4 = (F4 - cplx(inv.I) * F2 - MixedTensor::identity(inv.J * inv.J)).max_abs() /
                (n * n * n * n);
    return {r3, r4};
}

std::pair<MixedTensor, InverseCoefficients> lambda_inverse(const ParticleConstants& k,
                                                           const MixedTensor& F,
                                                           const MixedTensor& Fdual,
                                                           const Invariants& inv) {
    const cplx mu = k.mu, l = k.lambda;
    const double I = inv.I, J = inv.J;
    cplx a = mu * mu - l * l * I;
    InverseCoefficients ic;
    ic.det = mu * mu * a - std::pow(l, 4) * J * J;
    check_denominator(ic.det, k.mu);
    // Coefficients on delta, F, F^2, F^3 after eliminating F^3 via the minimal polynomial.
    ic.c[0] = mu * a / ic.det;
    ic.c[1] = -l * a / ic.det;
    ic.c[2] = mu * l * l / ic.det;
    ic.c[3] = -l * l * l / ic.det;
    cplx cDual = -l * l * l * J / ic.det;
    MixedTensor out = MixedTensor::identity(mu * a / ic.det) + (-l * mu * mu / ic.det) * F +
                      (mu * l * l / ic.det) * (F * F) + cDual * Fdual;
    out.kind = combine(F.kind, l.imag() != 0.0 ? ScalarKind::Complex : ScalarKind::Real);
    return {out, ic};
}

CharCoeffs newton_char_coeffs(const MixedTensor& G) {
    CharCoeffs cc;
    MixedTensor P = G;
    std::array<MixedTensor, 4> powers;
    for (int k = 0; k < 4; ++k) {
        powers[k] = P;
        cc.s[k] = P.trace();
        P = P * G;
    }
    auto& p = cc.p;
    const auto& s = cc.s;
    p[0] = s[0];
    p[1] = 0.5 * (s[1] - p[0] * s[0]);
    p[2] = (s[2] - p[0] * s[1] - p[1] * s[0]) / 3.0;
    p[3] = 0.25 * (s[3] - p[0] * s[2] - p[1] * s[1] - p[2] * s[0]);
    MixedTensor rel = powers[3] - p[0] * powers[2] - p[1] * powers[1] - p[2] * powers[0] -
                      MixedTensor::identity(p[3]);
    const double n = std::max(1.0, G.max_abs());
    cc.cayleyResidual = rel.max_abs() / (n * n * n * n);
    return cc;
}

std::pair<MixedTensor, InverseCoefficients> general_lambda_inverse(const ParticleConstants& k,
                                                                   const MixedTensor& G) {
    CharCoeffs cc = newton_char_coeffs(G);
    const cplx mu = k.mu, l = k.lambda;
    const auto& p = cc.p;
    cplx l2 = l * l, l3 = l2 * l, l4 = l3 * l;
    cplx m2 = mu * mu, m3 = m2 * mu, m4 = m3 * mu;
    InverseCoefficients ic;
    ic.det = m4 + m3 * l * p[0] - m2 * l2 * p[1] + mu * l3 * p[2] - l4 * p[3];
    check_denominator(ic.det, k.mu);
    ic.c[0] = (m3 + m2 * l * p[0] - mu * l2 * p[1] + l3 * p[2]) / ic.det;
    ic.c[1] = (-m2 * l - mu * l2 * p[0] + l3 * p[1]) / ic.det;
    ic.c[2] = (mu * l2 + l3 * p[0]) / ic.det;
    ic.c[3] = -l3 / ic.det;
    MixedTensor out = polynomial(ic.c, G);
    return {out, ic};
}

MixedTensor ricci_extended_matrix(const MixedTensor& F, const MixedTensor& ricci, double scale) {
    MixedTensor out = F + cplx(0.0, scale) * ricci;
    if (ricci.max_abs() == 0.0 || scale == 0.0) out.kind = F.kind;
    else out.kind = ScalarKind::Complex;
    return out;
}

double inverse_product_residual(const ParticleConstants& k, const MixedTensor& G,
                                const MixedTensor& X) {
    MixedTensor L = MixedTensor::identity(k.mu) + k.lambda * G;
    return (L * X - MixedTensor::identity()).max_abs();
}

}  // namespace coxlab
