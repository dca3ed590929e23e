#include "gcsr/bivar.hpp"

#include <cmath>
#include <string>

#include "gcsr/errors.hpp"

namespace gcsr {

namespace {

void require_null_bivar(const Bivar1Params& params) {
  if (params.a_xy != 0.0)
    throw NotNull("closed-form null law requires a_xy = 0");
}

}  // namespace

void validate(const Bivar1Params& params) {
  const double tr = params.a_xx + params.a_yy;
  const double det = params.a_xx * params.a_yy - params.a_xy * params.a_yx;
  // Eigenvalues of the 2x2 coefficient matrix.
  const double disc = tr * tr - 4.0 * det;
  double rho;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    rho = std::max(std::abs(0.5 * (tr + s)), std::abs(0.5 * (tr - s)));
  } else {
    rho = std::sqrt(det);  // complex pair, |z|^2 = det
  }
  if (!(rho < 1.0))
    throw ValidationError("bivariate coefficient matrix must be stable");
  if (!(params.sigma_xx > 0.0) || !(params.sigma_yy > 0.0) ||
      !(params.sigma_xy * params.sigma_xy <
        params.sigma_xx * params.sigma_yy))
    throw ValidationError("residual covariance must be positive-definite");
}

VarParams to_var(const Bivar1Params& params) {
  VarParams model;
  model.n = 2;
  model.p = 1;
  model.A.resize(2, 2);
  model.A << params.a_xx, params.a_xy, params.a_yx, params.a_yy;
  model.Sigma.resize(2, 2);
  model.Sigma << params.sigma_xx, params.sigma_xy, params.sigma_xy,
      params.sigma_yy;
  return model;
}

BivarDerived bivar_derived(const Bivar1Params& params) {
  validate(params);
  BivarDerived d;
  d.P = params.sigma_xx * (1.0 + params.a_yy * params.a_yy) -
        2.0 * params.sigma_xy * params.a_xy * params.a_yy +
        params.sigma_yy * params.a_xy * params.a_xy;
  d.Q = 2.0 * (params.sigma_xx * params.a_yy - params.sigma_xy * params.a_xy);
  double disc = d.P * d.P - d.Q * d.Q;
  if (disc < 0.0) {
    if (disc < -1e-14)
      throw InternalError("P^2 - Q^2 negative beyond rounding (" +
                          std::to_string(disc) + ")");
    disc = 0.0;
  }
  // "+" root of v^2 - P v + Q^2/4, which is exactly sigma_xx when a_xy = 0
  // (the discriminant collapses to sigma_xx^2 (1 - a_yy^2)^2 algebraically).
  d.v = params.a_xy == 0.0 ? params.sigma_xx : 0.5 * (d.P + std::sqrt(disc));
  d.kappa = params.sigma_xy /
            std::sqrt(params.sigma_xx * params.sigma_yy);
  d.sigma_yyx = params.sigma_yy * (1.0 - d.kappa * d.kappa);

  // [Gamma_0^{-1}]_yy on the null space, from the closed DLYAP solution.
  if (params.a_xy == 0.0) {
    const double axx = params.a_xx, ayy = params.a_yy, ayx = params.a_yx;
    const double sxx = params.sigma_xx, sxy = params.sigma_xy,
                 syy = params.sigma_yy;
    const double p0 = sxx / (1.0 - axx * axx);
    const double r0 = (sxy + axx * ayx * p0) / (1.0 - axx * ayy);
    const double q0 =
        (syy + 2.0 * ayy * ayx * sxy / (1.0 - axx * ayy) +
         ayx * ayx * (1.0 + axx * ayy) * sxx /
             ((1.0 - axx * axx) * (1.0 - axx * ayy))) /
        (1.0 - ayy * ayy);
    d.omega_yy = p0 / (p0 * q0 - r0 * r0);
  }
  return d;
}

double bivar_gc_time(const Bivar1Params& params) {
  const BivarDerived d = bivar_derived(params);
  return std::max(0.0, std::log(d.v / params.sigma_xx));
}

double bivar_gc_spectral(const Bivar1Params& params, double omega) {
  const BivarDerived d = bivar_derived(params);
  const double num = d.P - d.Q * std::cos(omega);
  const double den = num - params.a_xy * params.a_xy * d.sigma_yyx;
  if (!(num > 0.0) || !(den > 0.0))
    throw SingularSpectrum("bivariate spectral GC: non-positive determinant");
  return std::max(0.0, std::log(num / den));
}

double bivar_null_lambda(const Bivar1Params& params) {
  require_null_bivar(params);
  const BivarDerived d = bivar_derived(params);
  return d.sigma_yyx * d.omega_yy / (1.0 - params.a_yy * params.a_yy);
}

double bivar_null_lambda_spectral(const Bivar1Params& params, double omega) {
  require_null_bivar(params);
  const BivarDerived d = bivar_derived(params);
  const double denom =
      1.0 - 2.0 * params.a_yy * std::cos(omega) + params.a_yy * params.a_yy;
  return d.sigma_yyx * d.omega_yy / denom;
}

namespace {

// Continuous antiderivative of 1 / (1 - 2 a cos w + a^2). The raw arctan form
// jumps by -pi where tan(w/2) crosses its pole, so w is reduced to (-pi, pi]
// and one period is added back per wrap.
double poisson_kernel_antiderivative(double a, double w) {
  const double c = (1.0 + a) / (1.0 - a);
  const double k = std::round(w / kTwoPi);
  const double reduced = w - kTwoPi * k;
  const double base = std::atan(c * std::tan(0.5 * reduced));
  return (2.0 / (1.0 - a * a)) * (base + M_PI * k);
}

}  // namespace

double bivar_null_lambda_band(const Bivar1Params& params,
                              const FrequencyBand& band) {
  require_null_bivar(params);
  validate(band);
  const BivarDerived d = bivar_derived(params);
  const double a = params.a_yy;
  const double integral = poisson_kernel_antiderivative(a, band.hi) -
                          poisson_kernel_antiderivative(a, band.lo);
  return d.sigma_yyx * d.omega_yy * integral / band.width();
}

}  // namespace gcsr
