#include "gcsr/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "gcsr/errors.hpp"

namespace gcsr {

namespace {

// Direct Kronecker-vectorised DLYAP solves are exact but cost O(m^6); above
// this dimension the doubling iteration takes over.
constexpr int kKroneckerCutoff = 16;
constexpr int kDoublingMaxIter = 128;
constexpr int kDareMaxIter = 10000;
constexpr double kDareRelTol = 1e-12;

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

double inf_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

void require_square(const Matrix& M, const char* name) {
  if (M.rows() == 0 || M.rows() != M.cols())
    throw DimensionMismatch(std::string(name) + " must be square and non-empty");
}

}  // namespace

Matrix companion_matrix(const Matrix& coeffs) {
  const Eigen::Index n = coeffs.rows();
  if (n < 1) throw DimensionMismatch("coefficient block row has zero rows");
  if (coeffs.cols() < n || coeffs.cols() % n != 0)
    throw DimensionMismatch("coefficient block row must be n x (p*n) with p >= 1");
  const Eigen::Index p = coeffs.cols() / n;
  const Eigen::Index m = p * n;
  Matrix C = Matrix::Zero(m, m);
  C.topRows(n) = coeffs;
  if (p > 1) C.block(n, 0, m - n, m - n).setIdentity();
  return C;
}

double spectral_radius(const Matrix& M) {
  require_square(M, "matrix");
  if (!M.allFinite()) throw ValidationError("matrix entries must be finite");
  if (M.rows() == 1) return std::abs(M(0, 0));
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NonConvergent("eigen decomposition failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius_companion(const Matrix& coeffs) {
  return spectral_radius(companion_matrix(coeffs));
}

Matrix solve_dlyap(const Matrix& A, const Matrix& Q) {
  require_square(A, "A");
  require_square(Q, "Q");
  if (A.rows() != Q.rows())
    throw DimensionMismatch("A and Q must have equal dimension");
  const double rho = spectral_radius(A);
  if (rho >= 1.0 - kStabilityMargin)
    throw NonConvergent("DLYAP requires spectral radius < 1 (got " +
                        std::to_string(rho) + ")");

  const Eigen::Index m = A.rows();
  const Matrix Qs = symmetrized(Q);
  Matrix P;

  if (m <= kKroneckerCutoff) {
    // vec(P) = (I - A (x) A)^{-1} vec(Q)
    Matrix K = Matrix::Identity(m * m, m * m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        K.block(i * m, j * m, m, m) -= A(i, j) * A;
    Eigen::Map<const Vector> q(Qs.data(), m * m);
    Vector vecP = K.partialPivLu().solve(q);
    P = Eigen::Map<const Matrix>(vecP.data(), m, m);
  } else {
    // P_{k+1} = P_k + E_k P_k E_k^T with E_{k+1} = E_k^2 accumulates
    // sum_j A^j Q A^{jT}; the operator norm of E_k decays like rho^(2^k).
    P = Qs;
    Matrix E = A;
    bool converged = false;
    for (int it = 0; it < kDoublingMaxIter; ++it) {
      const Matrix update = E * P * E.transpose();
      P += update;
      if (inf_norm(update) <= 1e-16 * inf_norm(P)) {
        converged = true;
        break;
      }
      E = E * E;
    }
    if (!converged) throw NonConvergent("DLYAP doubling iteration stalled");
  }

  P = symmetrized(P);
  const double resid = inf_norm(P - A * P * A.transpose() - Qs);
  const double scale = std::max(inf_norm(Qs), inf_norm(P));
  if (scale > 0 && resid > kSolverRtol * scale)
    throw NonConvergent("DLYAP residual " + std::to_string(resid / scale) +
                        " exceeds tolerance");
  return P;
}

DareSolution riccati_fixed_point(const Matrix& A, const Matrix& C,
                                 const Matrix& Q, const Matrix& S,
                                 const Matrix& R, Matrix P) {
  const bool no_coupling = C.isZero(0.0);
  double rel_change = 0.0;
  bool converged = no_coupling;
  if (!no_coupling) {
    for (int it = 0; it < kDareMaxIter; ++it) {
      const Matrix W = A * P * C.transpose() + S;
      const Matrix innov = symmetrized(C * P * C.transpose() + R);
      Eigen::LLT<Matrix> llt(innov);
      if (llt.info() != Eigen::Success)
        throw SingularInnovations(
            "innovations covariance not invertible at DARE iterate " +
            std::to_string(it));
      const Matrix Pn = symmetrized(A * P * A.transpose() + Q -
                                    W * llt.solve(W.transpose()));
      rel_change = inf_norm(Pn - P) / std::max(inf_norm(Pn), 1e-300);
      P = Pn;
      if (rel_change <= kDareRelTol) {
        converged = true;
        break;
      }
    }
  }
  if (!converged)
    throw NonConvergent("DARE fixed-point iteration exceeded " +
                        std::to_string(kDareMaxIter) +
                        " iterations (last relative change " +
                        std::to_string(rel_change) + ")");

  const Matrix sigma_r = symmetrized(C * P * C.transpose() + R);
  Eigen::LLT<Matrix> llt(sigma_r);
  if (llt.info() != Eigen::Success)
    throw SingularInnovations("innovations covariance not positive-definite");
  const Matrix gain =
      llt.solve((A * P * C.transpose() + S).transpose()).transpose();
  return DareSolution{P, sigma_r, gain};
}

DareSolution solve_dare(const Matrix& Ayy, const Matrix& Axy,
                        const Matrix& Syy, const Matrix& Syx,
                        const Matrix& Sxx) {
  require_square(Ayy, "Ayy");
  require_square(Syy, "Syy");
  require_square(Sxx, "Sxx");
  const Eigen::Index m = Ayy.rows();   // pn_y
  const Eigen::Index nx = Sxx.rows();  // n_x
  if (Axy.rows() != nx || Axy.cols() != m)
    throw DimensionMismatch("Axy must be n_x x pn_y");
  if (Syy.rows() != m) throw DimensionMismatch("Syy must match Ayy");
  if (Syx.rows() != m || Syx.cols() != nx)
    throw DimensionMismatch("Syx must be pn_y x n_x");

  Eigen::LLT<Matrix> sxx_llt(symmetrized(Sxx));
  if (sxx_llt.info() != Eigen::Success)
    throw SingularInnovations("Sxx is not positive-definite");

  // Start from the zero-coupling solution, where the DARE is a DLYAP with the
  // partial-covariance right-hand side.
  const Matrix Q0 = symmetrized(Syy - Syx * sxx_llt.solve(Syx.transpose()));
  const Matrix P0 = solve_dlyap(Ayy, Q0);
  return riccati_fixed_point(Ayy, Axy, Syy, Syx, Sxx, P0);
}

Vector symmetric_eigenvalues(const Matrix& M) {
  require_square(M, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M),
                                           Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NonConvergent("symmetric eigensolver failed");
  return es.eigenvalues().reverse();
}

Matrix cholesky_right(const Matrix& B) {
  require_square(B, "matrix");
  Eigen::LLT<Matrix> llt(symmetrized(B));
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("matrix is not positive-definite");
  return llt.matrixU();
}

double logdet_spd(const Matrix& B) {
  require_square(B, "matrix");
  Eigen::LLT<Matrix> llt(symmetrized(B));
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("matrix is not positive-definite");
  return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace gcsr
