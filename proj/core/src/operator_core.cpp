#include "dyson/operator_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dyson {

namespace {

// Numerator coefficients of the [13/13] Pade approximant to exp.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// Largest 1-norm for which the [13/13] approximant meets double precision.
constexpr double kTheta13 = 5.371920351148152;

double one_norm(const OperatorMatrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

void sort_eigenvalues(Eigen::VectorXcd& values) {
  std::vector<Complex> tmp(values.data(), values.data() + values.size());
  std::sort(tmp.begin(), tmp.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  std::copy(tmp.begin(), tmp.end(), values.data());
}

} // namespace

void require_finite(const OperatorMatrix& a, std::string_view what) {
  if (!a.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

void require_finite(const StateVector& v, std::string_view what) {
  if (!v.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

void require_square(const OperatorMatrix& a, std::string_view what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    fail(ErrorKind::DimensionMismatch,
         std::string(what) + " must be a non-empty square matrix, got " +
             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

double frobenius(const OperatorMatrix& a) { return a.norm(); }

double frobenius_floor1(const OperatorMatrix& a) { return std::max(1.0, a.norm()); }

double spectral_norm(const OperatorMatrix& a) {
  Eigen::JacobiSVD<OperatorMatrix> svd(a);
  return svd.singularValues()(0);
}

double condition_number(const OperatorMatrix& a) {
  require_square(a, "condition_number argument");
  Eigen::JacobiSVD<OperatorMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

OperatorMatrix mat_exp(const OperatorMatrix& a) {
  require_square(a, "mat_exp argument");
  require_finite(a, "mat_exp argument");

  const Eigen::Index n = a.rows();
  const double norm = one_norm(a);
  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));

  const OperatorMatrix x = a / std::ldexp(1.0, squarings);
  const OperatorMatrix ident = OperatorMatrix::Identity(n, n);
  const OperatorMatrix x2 = x * x;
  const OperatorMatrix x4 = x2 * x2;
  const OperatorMatrix x6 = x4 * x2;
  const auto& b = kPade13;

  const OperatorMatrix u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 +
                                 b[5] * x4 + b[3] * x2 + b[1] * ident;
  const OperatorMatrix u = x * u_inner;
  const OperatorMatrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 +
                           b[4] * x4 + b[2] * x2 + b[0] * ident;

  OperatorMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;

  require_finite(r, "mat_exp result");
  return r;
}

OperatorMatrix inverse(const OperatorMatrix& a) {
  require_square(a, "inverse argument");
  require_finite(a, "inverse argument");

  Eigen::PartialPivLU<OperatorMatrix> lu(a);
  const double threshold = 1e-14 * a.norm();
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (std::abs(diag(i)) <= threshold) {
      fail(ErrorKind::SingularMatrix,
           "pivot " + std::to_string(i) + " below 1e-14 * ||A||_F");
    }
  }
  return lu.inverse();
}

OperatorMatrix adjoint(const OperatorMatrix& a) { return a.adjoint(); }

Spectrum spectrum(const OperatorMatrix& a) {
  require_square(a, "spectrum argument");
  require_finite(a, "spectrum argument");

  Spectrum out;
  if (is_hermitian(a, 1e-10)) {
    const OperatorMatrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      fail(ErrorKind::NoConvergence, "self-adjoint eigensolver did not converge");
    }
    out.eigenvalues = solver.eigenvalues().cast<Complex>();
  } else {
    Eigen::ComplexEigenSolver<OperatorMatrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      fail(ErrorKind::NoConvergence, "complex Schur eigensolver did not converge");
    }
    out.eigenvalues = solver.eigenvalues();
  }
  sort_eigenvalues(out.eigenvalues);
  return out;
}

bool is_hermitian(const OperatorMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * frobenius_floor1(a);
}

bool is_positive_definite(const OperatorMatrix& a) {
  require_square(a, "is_positive_definite argument");
  require_finite(a, "is_positive_definite argument");
  if (!is_hermitian(a, 1e-10)) {
    fail(ErrorKind::NotHermitian, "is_positive_definite requires a Hermitian argument");
  }
  const OperatorMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::NoConvergence, "self-adjoint eigensolver did not converge");
  }
  return solver.eigenvalues().minCoeff() > -1e-12 * a.norm();
}

double spectrum_distance(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::DimensionMismatch, "spectra have different sizes");
  }
  if (a.size() == 0) return 0.0;
  return (a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff();
}

} // namespace dyson
