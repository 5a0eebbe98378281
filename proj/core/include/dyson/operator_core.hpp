#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "dyson/errors.hpp"

namespace dyson {

using Complex = std::complex<double>;

/// Dense square complex operator. Every operator symbol of the theory
/// (h, H, Omega, Theta, Sigma, sigma, G) is carried by this type.
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
/// Row form of a state, i.e. a bra.
using Covector = Eigen::RowVectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Desk-scale limits applied to configuration input.
inline constexpr Eigen::Index kMaxDim = 64;
inline constexpr double kMaxOperatorNorm = 1e2;

/// Eigenvalues sorted by real part, then imaginary part.
struct Spectrum {
  Eigen::VectorXcd eigenvalues;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const OperatorMatrix& a, std::string_view what);
void require_finite(const StateVector& v, std::string_view what);
/// Throws DimensionMismatch unless `a` is square with at least one row.
void require_square(const OperatorMatrix& a, std::string_view what);

double frobenius(const OperatorMatrix& a);
/// max(1, ||a||_F); the normalization used for every relative tolerance.
double frobenius_floor1(const OperatorMatrix& a);
double spectral_norm(const OperatorMatrix& a);
/// 2-norm condition number sigma_max / sigma_min (infinity when singular).
double condition_number(const OperatorMatrix& a);

/// e^A by scaling and squaring with the degree-13 diagonal Pade approximant.
OperatorMatrix mat_exp(const OperatorMatrix& a);

/// Inverse through a partially pivoted LU factorization. A pivot whose
/// modulus is below 1e-14 * ||A||_F raises SingularMatrix.
OperatorMatrix inverse(const OperatorMatrix& a);

OperatorMatrix adjoint(const OperatorMatrix& a);

/// Hermitian inputs (at 1e-10) go through the self-adjoint solver, everything
/// else through the complex Schur solver.
Spectrum spectrum(const OperatorMatrix& a);

/// ||A - A^dagger||_F <= tol * max(1, ||A||_F)
bool is_hermitian(const OperatorMatrix& a, double tol);

/// Requires A Hermitian within 1e-10 (NotHermitian otherwise). True iff every
/// eigenvalue of the Hermitian part exceeds -1e-12 * ||A||_F.
bool is_positive_definite(const OperatorMatrix& a);

/// Largest elementwise modulus difference of two sorted spectra.
double spectrum_distance(const Spectrum& a, const Spectrum& b);

} // namespace dyson
