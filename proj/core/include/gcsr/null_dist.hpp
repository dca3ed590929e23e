#ifndef GCSR_NULL_DIST_HPP
#define GCSR_NULL_DIST_HPP

#include "gcsr/gc.hpp"
#include "gcsr/var_model.hpp"

namespace gcsr {

// Asymptotic null law of the scaled single-regression GC estimator: a
// weighted sum of p*n_y iid chi^2(n_x) variables. Weights are sorted
// descending; band-limited laws may contain zeros.
struct GenChi2 {
  enum class Kind { Time, Band };

  Vector weights;
  int multiplicity = 0;  // n_x
  Kind kind = Kind::Time;
  FrequencyBand band{};  // meaningful when kind == Band
};

// Moment-matched Gamma approximation of a GenChi2 law.
struct GammaApprox {
  double alpha = 0.0;  // shape
  double beta = 0.0;   // scale
  double mu = 0.0;
  double sigma2 = 0.0;
};

// Weights of the time-domain law: eigenvalues of [bGamma^{-1}]_yy
// bGamma_{yy|x}, computed through the right-Cholesky similarity transform so
// the eigenproblem is symmetric. Requires an exactly-null model.
GenChi2 null_weights_time(const VarParams& model, const Partition& part);

// Weights of the band-limited law: eigenvalues of [bGamma^{-1}]_yy
// Re bS_yy|x(F), with the band average of the companion CPSD taken by
// composite Gauss-Legendre quadrature. Small negative eigenvalues within
// -1e-10 of zero are clamped.
GenChi2 null_weights_band(const VarParams& model, const Partition& part,
                          const FrequencyBand& band);

struct Moments {
  double mu = 0.0;
  double sigma2 = 0.0;
};

// mu = n_x sum lambda_i, sigma2 = 2 n_x sum lambda_i^2.
Moments genchi2_moments(const GenChi2& law);

// alpha = mu^2/sigma2, beta = sigma2/mu. Throws DegenerateLaw when all
// weights vanish.
GammaApprox gamma_approx(const GenChi2& law);

struct CdfEval {
  enum class Method { Exact, Imhof, MonteCarlo };

  double value = 0.0;
  Method method = Method::Exact;
  bool certified = false;  // absolute error bounded by the 1e-8 target
  double abs_err = 0.0;    // error bound (certified) or MC standard error
  double dropped_mass = 0.0;  // mean mass excluded by the degeneracy rule
};

// P(Q <= x). Equal-weight laws reduce exactly to a scaled chi^2; otherwise
// Imhof's characteristic-function inversion, certified to 1e-8 absolute, with
// a seeded Monte Carlo fallback when certification fails.
CdfEval genchi2_cdf_detail(const GenChi2& law, double x);
double genchi2_cdf(const GenChi2& law, double x);

// Inverse CDF by bracketing from the Gamma approximation plus safeguarded
// secant; |cdf(result) - q| <= 1e-8. Propagates AccuracyNotMet if the CDF
// cannot be certified.
double genchi2_quantile(const GenChi2& law, double q);

namespace detail {

// Imhof inversion for sum_i lambda_i W_i, W_i iid chi^2(dof). Exposed for
// oracle tests.
CdfEval imhof_cdf(const Vector& lambdas, int dof, double x, double tol);

}  // namespace detail

}  // namespace gcsr

#endif  // GCSR_NULL_DIST_HPP
