#include <cmath>
#include <string>

#include "gcsr/errors.hpp"
#include "gcsr/gc.hpp"
#include "gcsr/var_model.hpp"

namespace gcsr {

namespace {

constexpr int kMaxRetries = 100;
constexpr int kMaxBracketDoublings = 60;  // bracket growth capped at 2^60
constexpr int kMaxChopIters = 200;

// Random orthogonal matrix: QR of an iid Gaussian matrix with the signs of
// diag(R) folded into Q, which makes the distribution Haar.
Matrix random_orthogonal(int n, SplitRng& rng) {
  Matrix G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

struct CorrelationCandidate {
  Matrix M;        // orthogonal frame
  Vector v;        // eigenvalue draws, iid chi^2(1)

  Matrix correlation(double c) const {
    const Matrix V =
        M * (v.array() + c).matrix().asDiagonal() * M.transpose();
    const Vector d = V.diagonal().cwiseSqrt();
    Matrix corr = (V.array() / (d * d.transpose()).array()).matrix();
    corr = 0.5 * (corr + corr.transpose()).eval();
    corr.diagonal().setOnes();
    return corr;
  }

  double achieved_gamma(double c) const {
    const Matrix V =
        M * (v.array() + c).matrix().asDiagonal() * M.transpose();
    return -(v.array() + c).log().sum() +
           V.diagonal().array().log().sum();
  }
};

}  // namespace

Matrix random_correlation(int n, double gamma, SplitRng& rng) {
  if (n < 1) throw DimensionMismatch("correlation dimension must be >= 1");
  if (gamma < 0) throw ValidationError("gamma must be >= 0");
  const double tol = generator_tolerance();
  if (n == 1) {
    if (gamma > tol)
      throw Unachievable("gamma > 0 is unachievable at dimension 1");
    return Matrix::Identity(1, 1);
  }

  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    CorrelationCandidate cand;
    cand.M = random_orthogonal(n, rng);
    cand.v.resize(n);
    for (int i = 0; i < n; ++i) cand.v[i] = rng.chi2_1();
    if (cand.v.minCoeff() <= 0) continue;

    const double g0 = cand.achieved_gamma(0.0);
    if (!(g0 >= gamma)) continue;  // draw again until gamma* >= gamma
    if (std::abs(g0 - gamma) <= tol) return cand.correlation(0.0);

    // gamma*(c) decreases to 0 as the common shift c grows; bracket then chop.
    double lo = 0.0, hi = 1.0;
    bool bracketed = false;
    for (int d = 0; d < kMaxBracketDoublings; ++d) {
      if (cand.achieved_gamma(hi) < gamma) {
        bracketed = true;
        break;
      }
      lo = hi;
      hi *= 2.0;
    }
    if (!bracketed) continue;

    for (int it = 0; it < kMaxChopIters; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double g = cand.achieved_gamma(mid);
      if (std::abs(g - gamma) <= tol) return cand.correlation(mid);
      (g > gamma ? lo : hi) = mid;
    }
    // Interval exhausted without meeting tolerance; retry with a fresh draw.
  }
  throw Unachievable("random_correlation failed to reach gamma = " +
                     std::to_string(gamma) + " after " +
                     std::to_string(kMaxRetries) + " attempts");
}

namespace {

// Exponentially weight the lag blocks: A_k <- lambda^k A_k, which scales the
// companion spectral radius by exactly lambda.
void weight_lags(Matrix& A, int n, int p, double lambda) {
  double w = lambda;
  for (int k = 0; k < p; ++k, w *= lambda)
    A.middleCols(static_cast<Eigen::Index>(k) * n, n) *= w;
}

VarParams assemble(int n, int p, const Matrix& A, const Matrix& Sigma) {
  VarParams model;
  model.n = n;
  model.p = p;
  model.A = A;
  model.Sigma = Sigma;
  return model;
}

}  // namespace

VarParams random_var(int n, int p, const Partition& part, double rho,
                     double gamma, std::optional<double> target_gc,
                     SplitRng& rng) {
  if (n < 1 || p < 1) throw DimensionMismatch("need n >= 1 and p >= 1");
  validate(part, n);
  if (!(rho > 0.0 && rho < 1.0))
    throw ValidationError("target spectral radius must lie in (0, 1)");
  if (target_gc && !(*target_gc > 0.0))
    throw ValidationError("target GC must be positive");
  const double tol = generator_tolerance();

  const Matrix Sigma = random_correlation(n, gamma, rng);

  // Appendix-style base draw: iid standard normal lag blocks, uniformly
  // damped by e^{-sqrt(p)} so the exponential re-weighting below does not
  // force an unrealistically steep decay across lags.
  Matrix base(n, static_cast<Eigen::Index>(n) * p);
  for (int i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < base.cols(); ++j) base(i, j) = rng.gaussian();
  base *= std::exp(-std::sqrt(static_cast<double>(p)));

  if (!target_gc) {
    Matrix A = base;
    for (int k = 0; k < p; ++k)
      A.block(0, static_cast<Eigen::Index>(k) * n + part.nx, part.nx, part.ny)
          .setZero();
    const double r0 = spectral_radius_companion(A);
    if (!(r0 > 0))
      throw Unachievable("degenerate coefficient draw (zero spectral radius)");
    weight_lags(A, n, p, rho / r0);
    return assemble(n, p, A, Sigma);
  }

  // Scale the xy blocks by c, restore the spectral radius exponentially, and
  // chop on c until the population GC meets the target.
  const auto model_at = [&](double c) {
    Matrix A = base;
    for (int k = 0; k < p; ++k)
      A.block(0, static_cast<Eigen::Index>(k) * n + part.nx, part.nx, part.ny) *= c;
    const double r0 = spectral_radius_companion(A);
    if (!(r0 > 0))
      throw Unachievable("degenerate coefficient draw (zero spectral radius)");
    weight_lags(A, n, p, rho / r0);
    return assemble(n, p, A, Sigma);
  };
  const auto gc_at = [&](double c) {
    return gc_time_sr(model_at(c), part).value;
  };

  const double target = *target_gc;
  double lo = 0.0, f_lo = 0.0;
  double hi = 1.0, f_hi = gc_at(hi);
  bool bracketed = f_hi >= target;
  for (int d = 0; d < kMaxBracketDoublings && !bracketed; ++d) {
    const double next = hi * 2.0;
    const double f_next = gc_at(next);
    if (f_next + tol < f_hi)
      throw Unachievable("population GC is not monotone in the coupling scale");
    lo = hi;
    f_lo = f_hi;
    hi = next;
    f_hi = f_next;
    bracketed = f_hi >= target;
  }
  if (!bracketed)
    throw Unachievable("could not bracket target GC = " +
                       std::to_string(target));

  for (int it = 0; it < kMaxChopIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = gc_at(mid);
    if (std::abs(f - target) <= tol) return model_at(mid);
    if (f < f_lo - tol || f > f_hi + tol)
      throw Unachievable("population GC is not monotone in the coupling scale");
    if (f < target) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  throw Unachievable("GC chop failed to converge to tolerance");
}

}  // namespace gcsr
