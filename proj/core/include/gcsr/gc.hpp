#ifndef GCSR_GC_HPP
#define GCSR_GC_HPP

#include "gcsr/sampling.hpp"
#include "gcsr/var_model.hpp"

namespace gcsr {

// Frequency range in radians, 0 <= lo < hi <= 2 pi.
struct FrequencyBand {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
};

void validate(const FrequencyBand& band);

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class GcKind { TimeSr, TimeLr, Spectral, Band };

// Granger-causality value in nats. Rounding noise in (-1e-12, 0) is clamped
// to zero; anything more negative raises InternalError upstream.
struct GcValue {
  double value = 0.0;
  GcKind kind = GcKind::TimeSr;
  double omega = 0.0;      // set for Spectral
  FrequencyBand band{};    // set for Band
  // Band values only: doubled-node quadrature check failed to agree to 1e-8.
  bool quadrature_warning = false;
};

// Reduced residual covariance V(theta) = A_xy P A_xy^T + Sigma_xx with P from
// the reduced-dimension DARE.
Matrix reduced_sigma(const VarParams& model, const Partition& part);

// Time-domain single-regression GC: log|Sigma^r| - log|Sigma_xx|.
GcValue gc_time_sr(const VarParams& model, const Partition& part);

// Dual-regression likelihood-ratio GC from order-p full and reduced OLS fits.
GcValue gc_time_lr(const TimeSeries& data, int p, const Partition& part);

// Spectral GC at angular frequency omega.
GcValue gc_spectral(const VarParams& model, const Partition& part,
                    double omega);

// Band-limited GC: (1/|F|) integral of the spectral GC over the band, by
// composite Gauss-Legendre quadrature with a doubled-node accuracy check.
GcValue gc_band(const VarParams& model, const Partition& part,
                const FrequencyBand& band);

}  // namespace gcsr

#endif  // GCSR_GC_HPP
