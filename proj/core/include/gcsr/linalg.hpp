#ifndef GCSR_LINALG_HPP
#define GCSR_LINALG_HPP

#include <Eigen/Dense>

namespace gcsr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Relative residual guaranteed by the equation solvers.
inline constexpr double kSolverRtol = 1e-10;
// Models with spectral radius >= 1 - kStabilityMargin are rejected.
inline constexpr double kStabilityMargin = 1e-9;

// Builds the pn x pn companion matrix of a coefficient block row [A_1 ... A_p]
// (n x pn): top block row A, identity blocks on the subdiagonal.
Matrix companion_matrix(const Matrix& coeffs);

// Largest absolute eigenvalue of a general square matrix.
double spectral_radius(const Matrix& M);

// Largest absolute eigenvalue of the companion matrix of an n x pn
// coefficient block row.
double spectral_radius_companion(const Matrix& coeffs);

// Solves P - A P A^T = Q for symmetric Q and stable A. Direct
// Kronecker-vectorised solve at small sizes, squared-operator doubling above.
Matrix solve_dlyap(const Matrix& A, const Matrix& Q);

struct DareSolution {
  Matrix P;        // stabilising solution, pn_y x pn_y
  Matrix sigma_r;  // innovations covariance, n_x x n_x
  Matrix gain;     // pn_y x n_x
};

// Solves the reduced-dimension discrete algebraic Riccati system
//   P - Ayy P Ayy^T = Syy - K SigmaR K^T
//   SigmaR          = Axy P Axy^T + Sxx
//   K               = (Ayy P Axy^T + Syx) SigmaR^{-1}
// by fixed-point iteration from the Axy = 0 solution.
DareSolution solve_dare(const Matrix& Ayy, const Matrix& Axy,
                        const Matrix& Syy, const Matrix& Syx,
                        const Matrix& Sxx);

// General innovations-form Riccati fixed point from an explicit start:
//   P <- A P A^T + Q - (A P C^T + S)(C P C^T + R)^{-1}(A P C^T + S)^T.
DareSolution riccati_fixed_point(const Matrix& A, const Matrix& C,
                                 const Matrix& Q, const Matrix& S,
                                 const Matrix& R, Matrix P0);

// Real eigenvalues of a symmetric matrix, sorted descending. The input is
// symmetrised (M + M^T)/2 before decomposition.
Vector symmetric_eigenvalues(const Matrix& M);

// Upper-triangular R with R^T R = B for positive-definite B.
Matrix cholesky_right(const Matrix& B);

// log det of a symmetric positive-definite matrix via Cholesky.
double logdet_spd(const Matrix& B);

}  // namespace gcsr

#endif  // GCSR_LINALG_HPP
