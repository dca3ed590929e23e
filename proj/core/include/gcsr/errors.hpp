#ifndef GCSR_ERRORS_HPP
#define GCSR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gcsr {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input shapes are inconsistent, or a degenerate size (n = 0, p = 0) was passed.
struct DimensionMismatch : Error {
  using Error::Error;
};

// An iterative solver hit its iteration limit, or a stability precondition
// (spectral radius < 1) fails so the iteration cannot converge.
struct NonConvergent : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

// The innovations covariance became singular at a DARE iterate.
struct SingularInnovations : Error {
  using Error::Error;
};

// Phi(omega) numerically singular; cannot happen for stable models.
struct SingularPhi : Error {
  using Error::Error;
};

// Determinant underflow while evaluating spectral GC.
struct SingularSpectrum : Error {
  using Error::Error;
};

// Regressor Gram matrix is singular.
struct RankDeficient : Error {
  using Error::Error;
};

// A null-law construction was handed a model with nonzero source-to-target
// coefficients.
struct NotNull : Error {
  using Error::Error;
};

// A random-generation target (spectral radius, generalised correlation,
// population GC) could not be bracketed or reached.
struct Unachievable : Error {
  using Error::Error;
};

// Numerical CDF evaluation failed to certify the requested tolerance.
struct AccuracyNotMet : Error {
  using Error::Error;
};

// All weights of a generalised chi^2 law are zero.
struct DegenerateLaw : Error {
  using Error::Error;
};

// A fitted or projected model violates the stability requirement, so a test
// cannot be carried out.
struct UnstableFit : Error {
  using Error::Error;
};

// A model or file violates a documented invariant; the message names it.
struct ValidationError : Error {
  using Error::Error;
};

// A quantity that cannot be negative by construction came out significantly
// negative; signals a solver failure upstream.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace gcsr

#endif  // GCSR_ERRORS_HPP
