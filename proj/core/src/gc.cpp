#include "gcsr/gc.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "gcsr/errors.hpp"
#include "gcsr/quadrature.hpp"

namespace gcsr {

namespace {

constexpr double kNegativeFloor = -1e-12;
constexpr double kBandCheckTol = 1e-8;

// GC values are non-negative by construction; rounding noise just below zero
// is clamped, anything worse means a solver failed upstream.
double clamp_gc(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v > kNegativeFloor) return 0.0;
  throw InternalError(std::string(what) + " came out negative (" +
                      std::to_string(v) + "); solver failure suspected");
}

double logdet_hermitian(const ComplexMatrix& M, const char* what) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SingularSpectrum(std::string(what) + ": eigensolver failed");
  const Vector ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0 || !ev.allFinite())
    throw SingularSpectrum(std::string(what) +
                           ": determinant underflow (non-positive spectrum)");
  return ev.array().log().sum();
}

void require_stable(const VarParams& model) {
  if (spectral_radius(model) >= 1.0 - kStabilityMargin)
    throw UnstableFit("model spectral radius is not < 1");
}

// Point evaluation shared by gc_spectral and gc_band once inputs are checked.
double spectral_gc_at(const VarParams& model, const Partition& part,
                      const Matrix& syyx, double omega) {
  const SpectralPoint pt = spectral_point(model, omega);
  const int nx = part.nx, ny = part.ny;
  const ComplexMatrix Sxx = pt.S.topLeftCorner(nx, nx);
  const ComplexMatrix Psi_xy = pt.Psi.topRightCorner(nx, ny);
  const ComplexMatrix T =
      Psi_xy * syyx.cast<std::complex<double>>() * Psi_xy.adjoint();
  const double num = logdet_hermitian(Sxx, "S_xx");
  const double den = logdet_hermitian(Sxx - T, "S_xx - T");
  return clamp_gc(num - den, "spectral GC");
}

}  // namespace

void validate(const FrequencyBand& band) {
  if (!(band.lo >= 0.0 && band.lo < band.hi && band.hi <= kTwoPi + 1e-12))
    throw ValidationError(
        "frequency band must satisfy 0 <= lo < hi <= 2*pi with positive "
        "measure");
}

Matrix reduced_sigma(const VarParams& model, const Partition& part) {
  validate(model);
  validate(part, model.n);
  require_stable(model);
  const int n = model.n, p = model.p, nx = part.nx, ny = part.ny;
  const Eigen::Index m = static_cast<Eigen::Index>(ny) * p;

  // Companion of the yy lag blocks and the stacked xy coupling row.
  Matrix Ayy = Matrix::Zero(m, m);
  Matrix Axy(nx, m);
  for (int k = 0; k < p; ++k) {
    Ayy.block(0, static_cast<Eigen::Index>(k) * ny, ny, ny) =
        model.lag(k).block(nx, nx, ny, ny);
    Axy.middleCols(static_cast<Eigen::Index>(k) * ny, ny) =
        model.lag(k).block(0, nx, nx, ny);
  }
  if (p > 1) Ayy.block(ny, 0, m - ny, m - ny).setIdentity();

  if (spectral_radius(Ayy) < 1.0 - kStabilityMargin) {
    Matrix Syy = Matrix::Zero(m, m);
    Syy.topLeftCorner(ny, ny) = model.Sigma.bottomRightCorner(ny, ny);
    Matrix Syx = Matrix::Zero(m, nx);
    Syx.topRows(ny) = model.Sigma.bottomLeftCorner(ny, nx);
    const Matrix Sxx = model.Sigma.topLeftCorner(nx, nx);
    return solve_dare(Ayy, Axy, Syy, Syx, Sxx).sigma_r;
  }

  // The yy sub-companion of a stable model can itself be unstable, in which
  // case the reduced-dimension fixed point has no valid starting DLYAP. The
  // full-dimension innovations-form DARE only needs the full companion, which
  // is stable, so the iteration from P = 0 always converges.
  const Eigen::Index mn = static_cast<Eigen::Index>(n) * p;
  const Matrix bA = companion_matrix(model.A);
  const Matrix Cx = model.A.topRows(nx);  // x rows of [A_1 ... A_p]
  Matrix Q = Matrix::Zero(mn, mn);
  Q.topLeftCorner(n, n) = model.Sigma;
  Matrix S = Matrix::Zero(mn, nx);
  S.topRows(n) = model.Sigma.leftCols(nx);
  const Matrix R = model.Sigma.topLeftCorner(nx, nx);
  return riccati_fixed_point(bA, Cx, Q, S, R, Matrix::Zero(mn, mn)).sigma_r;
}

GcValue gc_time_sr(const VarParams& model, const Partition& part) {
  const Matrix sr = reduced_sigma(model, part);
  const Matrix sxx = model.Sigma.topLeftCorner(part.nx, part.nx);
  GcValue out;
  out.kind = GcKind::TimeSr;
  out.value = clamp_gc(logdet_spd(sr) - logdet_spd(sxx), "time-domain SR GC");
  return out;
}

GcValue gc_time_lr(const TimeSeries& data, int p, const Partition& part) {
  if (p < 1) throw DimensionMismatch("LR statistic requires order p >= 1");
  validate(part, data.vars());
  const VarParams full = fit_var_ols(data, p);
  const VarParams reduced = fit_var_ols(data.head_vars(part.nx), p);
  const Matrix sxx = full.Sigma.topLeftCorner(part.nx, part.nx);
  GcValue out;
  out.kind = GcKind::TimeLr;
  // A true log-likelihood ratio can dip below zero only through rounding.
  out.value =
      clamp_gc(logdet_spd(reduced.Sigma) - logdet_spd(sxx), "LR GC");
  return out;
}

GcValue gc_spectral(const VarParams& model, const Partition& part,
                    double omega) {
  validate(model);
  validate(part, model.n);
  require_stable(model);
  GcValue out;
  out.kind = GcKind::Spectral;
  out.omega = omega;
  out.value = spectral_gc_at(model, part, sigma_yy_given_x(model, part), omega);
  return out;
}

GcValue gc_band(const VarParams& model, const Partition& part,
                const FrequencyBand& band) {
  validate(model);
  validate(part, model.n);
  validate(band);
  require_stable(model);
  const Matrix syyx = sigma_yy_given_x(model, part);

  const auto f = [&](double w) {
    return spectral_gc_at(model, part, syyx, w);
  };
  const double width = band.width();
  const double coarse =
      integrate_composite(f, band.lo, band.hi, kBandPanels, kBandOrder) / width;
  const double fine =
      integrate_composite(f, band.lo, band.hi, 2 * kBandPanels, kBandOrder) /
      width;

  GcValue out;
  out.kind = GcKind::Band;
  out.band = band;
  out.value = clamp_gc(fine, "band-limited GC");
  out.quadrature_warning =
      std::abs(fine - coarse) > kBandCheckTol * std::max(1.0, std::abs(fine));
  return out;
}

}  // namespace gcsr
