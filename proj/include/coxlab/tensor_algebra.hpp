#pragma once

#include <array>
#include <complex>
#include <utility>

namespace coxlab {

using cplx = std::complex<double>;

// Diagonal metric, signature (+,-,-,-).
struct DiagonalMetric {
    double g00 = 1.0, g11 = -1.0, g22 = -1.0, g33 = -1.0;

    static DiagonalMetric flat() { return {}; }
    double detG() const { return g00 * g11 * g22 * g33; }
    double sqrtMinusG() const;
    // Contravariant diagonal g^{ii}.
    double inv(int i) const;
    // Throws DomainError unless g00 > 0 and the spatial entries are negative.
    void validate() const;
};

// Covariant components E_i = F_{0i} and B_i.
struct FieldConfig3 {
    std::array<double, 3> E{0, 0, 0};
    std::array<double, 3> B{0, 0, 0};
};

enum class ScalarKind { Real, Complex };

// Components G_a^b, row = lower index, column = upper index.
struct MixedTensor {
    using Matrix = std::array<std::array<cplx, 4>, 4>;
    Matrix m{};
    ScalarKind kind = ScalarKind::Real;

    static MixedTensor zero() { return {}; }
    static MixedTensor identity(cplx scale = 1.0);

    cplx& operator()(int a, int b) { return m[a][b]; }
    const cplx& operator()(int a, int b) const { return m[a][b]; }

    double max_abs() const;
    cplx trace() const;
};

MixedTensor operator*(const MixedTensor& x, const MixedTensor& y);
MixedTensor operator+(const MixedTensor& x, const MixedTensor& y);
MixedTensor operator-(const MixedTensor& x, const MixedTensor& y);
MixedTensor operator*(cplx s, const MixedTensor& x);

struct Invariants {
    double I = 0.0;
    double J = 0.0;
    // |I - tr(F^2)/2| and |J - tr(Fdual F)/4|
    double residualI = 0.0;
    double residualJ = 0.0;
};

// (mu delta + lambda G)^{-1} = c0 + c1 G + c2 G^2 + c3 G^3, det = common denominator.
struct InverseCoefficients {
    std::array<cplx, 4> c{};
    cplx det = 0.0;
};

// G^4 = p1 G^3 + p2 G^2 + p3 G + p4, s_k = tr(G^k).
struct CharCoeffs {
    std::array<cplx, 4> p{};
    std::array<cplx, 4> s{};
    double cayleyResidual = 0.0;  // divided by max(1, |G|)^4
};

struct ParticleConstants {
    double mu = 1.0;
    cplx lambda = 0.0;

    cplx Gamma() const { return lambda / mu; }
    // lambdaConverted is the real number i*lambda.
    static ParticleConstants from_converted(double mu, double lambdaConverted);
};

MixedTensor build_mixed_field_tensor(const FieldConfig3& fields, const DiagonalMetric& metric);
Invariants field_invariants(const FieldConfig3& fields, const DiagonalMetric& metric);
MixedTensor dual_tensor(const FieldConfig3& fields, const DiagonalMetric& metric);

// (|F^3 - I F - J Fdual|, |F^4 - I F^2 - J^2|) in the max-abs norm, divided by
// max(1, |F|)^3 and max(1, |F|)^4.
std::pair<double, double> minimal_poly_residuals(const MixedTensor& F, const MixedTensor& Fdual,
                                                 const Invariants& inv);

std::pair<MixedTensor, InverseCoefficients> lambda_inverse(const ParticleConstants& consts,
                                                           const MixedTensor& F,
                                                           const MixedTensor& Fdual,
                                                           const Invariants& inv);

CharCoeffs newton_char_coeffs(const MixedTensor& G);

std::pair<MixedTensor, InverseCoefficients> general_lambda_inverse(const ParticleConstants& consts,
                                                                   const MixedTensor& G);

// F + i*scale*R
MixedTensor ricci_extended_matrix(const MixedTensor& F, const MixedTensor& ricci, double scale);

// |(mu + lambda G) X - delta|
double inverse_product_residual(const ParticleConstants& consts, const MixedTensor& G,
                                const MixedTensor& inverse);

}  // namespace coxlab
