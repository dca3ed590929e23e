#ifndef GCSR_VAR_MODEL_HPP
#define GCSR_VAR_MODEL_HPP

#include <optional>

#include "gcsr/linalg.hpp"
#include "gcsr/rng.hpp"

namespace gcsr {

// VAR(p) model theta = (A, Sigma): coefficient block row A = [A_1 ... A_p]
// (n x pn) and residual covariance Sigma (n x n).
struct VarParams {
  int n = 0;
  int p = 0;
  Matrix A;
  Matrix Sigma;

  // Lag block A_{k+1} for k in [0, p).
  Eigen::Block<const Matrix> lag(int k) const {
    return A.block(0, static_cast<Eigen::Index>(k) * n, n, n);
  }
};

// Split of the n variables into a target block x (indices 0..nx-1) and a
// source block y (indices nx..n-1). Causality runs y -> x.
struct Partition {
  int nx = 0;
  int ny = 0;
};

// Throws ValidationError naming the first violated invariant: shape
// consistency, finiteness, spectral radius < 1, Sigma symmetric
// positive-definite.
void validate(const VarParams& model);
void validate(const Partition& part, int n);

// True iff every A_{k,xy} block is exactly zero.
bool is_null_model(const VarParams& model, const Partition& part);

double spectral_radius(const VarParams& model);

// pn x pn companion matrix of the model coefficients.
Matrix companion(const VarParams& model);

// Residual partial covariance Sigma_yy - Sigma_yx Sigma_xx^{-1} Sigma_xy.
Matrix sigma_yy_given_x(const VarParams& model, const Partition& part);

// The pn x pn stationary covariance of the stacked process, block (k,l) equal
// to Gamma_{l-k}.
struct AutocovMatrix {
  int n = 0;
  int p = 0;
  Matrix full;

  // Gamma_k for k in [0, p).
  Eigen::Block<const Matrix> gamma(int k) const {
    return full.block(0, static_cast<Eigen::Index>(k) * n, n, n);
  }
};

AutocovMatrix autocovariance(const VarParams& model);

// Autocovariances Gamma_0..Gamma_L; lags beyond p-1 follow the Yule-Walker
// recursion.
std::vector<Matrix> autocov_sequence(const VarParams& model, int max_lag);

// Transfer function and CPSD at one angular frequency, z = e^{-i omega}.
struct SpectralPoint {
  double omega = 0.0;
  ComplexMatrix Phi;  // I - sum_k A_k z^k
  ComplexMatrix Psi;  // Phi^{-1}
  ComplexMatrix S;    // Psi Sigma Psi^*
};

SpectralPoint spectral_point(const VarParams& model, double omega);

// Log-generalised correlation -log|Sigma| + sum_i log Sigma_ii.
double log_generalised_correlation(const Matrix& sigma);

// Binary-chop tolerance shared by the random generators (sqrt of machine
// epsilon).
double generator_tolerance();

// Random correlation matrix with log-generalised correlation within
// generator_tolerance() of gamma. Deterministic given the rng state.
Matrix random_correlation(int n, double gamma, SplitRng& rng);

// Random stable VAR(p) with spectral radius rho, residual generalised
// correlation gamma, and either an exactly-null coupling block (target_gc
// empty) or a population single-regression GC tuned to *target_gc.
VarParams random_var(int n, int p, const Partition& part, double rho,
                     double gamma, std::optional<double> target_gc,
                     SplitRng& rng);

}  // namespace gcsr

#endif  // GCSR_VAR_MODEL_HPP
