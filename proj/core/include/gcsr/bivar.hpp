#ifndef GCSR_BIVAR_HPP
#define GCSR_BIVAR_HPP

#include "gcsr/gc.hpp"
#include "gcsr/var_model.hpp"

namespace gcsr {

// General bivariate VAR(1): closed forms used as an independent oracle
// against the numerical pipeline.
struct Bivar1Params {
  double a_xx = 0.0, a_xy = 0.0, a_yx = 0.0, a_yy = 0.0;
  double sigma_xx = 1.0, sigma_xy = 0.0, sigma_yy = 1.0;
};

// Throws ValidationError if the 2x2 coefficient matrix is unstable or the
// residual covariance is not positive-definite.
void validate(const Bivar1Params& params);

VarParams to_var(const Bivar1Params& params);

struct BivarDerived {
  double P = 0.0;         // sigma_xx (1 + a_yy^2) - 2 sigma_xy a_xy a_yy + sigma_yy a_xy^2
  double Q = 0.0;         // 2 (sigma_xx a_yy - sigma_xy a_xy)
  double v = 0.0;         // reduced residual variance, (P + sqrt(P^2 - Q^2)) / 2
  double kappa = 0.0;     // residuals correlation
  double sigma_yyx = 0.0; // sigma_yy (1 - kappa^2)
  double omega_yy = 0.0;  // [Gamma_0^{-1}]_yy on the null space (a_xy = 0)
};

BivarDerived bivar_derived(const Bivar1Params& params);

// Time-domain GC from Y to X: log(v / sigma_xx).
double bivar_gc_time(const Bivar1Params& params);

// Spectral GC: log[(P - Q cos w) / (P - Q cos w - a_xy^2 sigma_yy|x)].
double bivar_gc_spectral(const Bivar1Params& params, double omega);

// Single weight of the null law: (1 - kappa^2) sigma_yy omega_yy / (1 - a_yy^2).
// Requires a_xy = 0.
double bivar_null_lambda(const Bivar1Params& params);

// Point-frequency weight (1 - kappa^2) sigma_yy omega_yy /
// (1 - 2 a_yy cos w + a_yy^2). Requires a_xy = 0.
double bivar_null_lambda_spectral(const Bivar1Params& params, double omega);

// Band average of the spectral weight via the closed arctan antiderivative,
// continued across the tan(w/2) branch point at w = pi. Requires a_xy = 0.
double bivar_null_lambda_band(const Bivar1Params& params,
                              const FrequencyBand& band);

}  // namespace gcsr

#endif  // GCSR_BIVAR_HPP
