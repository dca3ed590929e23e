#include "gcsr/null_dist.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "gcsr/errors.hpp"
#include "gcsr/quadrature.hpp"
#include "gcsr/rng.hpp"

namespace gcsr {

namespace {

constexpr double kCdfTol = 1e-8;
constexpr double kBandWeightFloor = -1e-10;
// Weights below max * kDegenerateRatio are excluded from CDF evaluation;
// their mean mass is reported on the evaluation record.
constexpr double kDegenerateRatio = 1e-12;

void require_null(const VarParams& model, const Partition& part) {
  if (!is_null_model(model, part))
    throw NotNull("model has nonzero A_{k,xy} coefficients");
}

// [bGamma^{-1}]_yy: rows/columns of the y variables in every lag block of the
// inverse of the full-model stacked autocovariance.
Matrix inverse_autocov_yy(const VarParams& model, const Partition& part) {
  const AutocovMatrix G = autocovariance(model);
  const Eigen::Index m = G.full.rows();
  Eigen::LDLT<Matrix> ldlt(G.full);
  if (ldlt.info() != Eigen::Success)
    throw NotPositiveDefinite("stacked autocovariance is not invertible");
  const Matrix inv = ldlt.solve(Matrix::Identity(m, m));

  const int p = model.p, n = model.n, nx = part.nx, ny = part.ny;
  Matrix out(static_cast<Eigen::Index>(p) * ny, static_cast<Eigen::Index>(p) * ny);
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l)
      out.block(static_cast<Eigen::Index>(k) * ny,
                static_cast<Eigen::Index>(l) * ny, ny, ny) =
          inv.block(static_cast<Eigen::Index>(k) * n + nx,
                    static_cast<Eigen::Index>(l) * n + nx, ny, ny);
  return 0.5 * (out + out.transpose());
}

// The notional reduced model (A_yy, Sigma_yy|x) whose stacked autocovariance
// is bGamma_{yy|x} and whose CPSD is S_yy|x.
VarParams conditional_y_model(const VarParams& model, const Partition& part) {
  const int nx = part.nx, ny = part.ny;
  VarParams sub;
  sub.n = ny;
  sub.p = model.p;
  sub.A.resize(ny, static_cast<Eigen::Index>(ny) * model.p);
  for (int k = 0; k < model.p; ++k)
    sub.A.middleCols(static_cast<Eigen::Index>(k) * ny, ny) =
        model.lag(k).block(nx, nx, ny, ny);
  sub.Sigma = sigma_yy_given_x(model, part);
  return sub;
}

GenChi2 weights_from(const Matrix& omega_yy, const Matrix& half_hessian,
                     const Partition& part) {
  const Matrix R = cholesky_right(omega_yy);
  const Matrix M = R * half_hessian * R.transpose();
  GenChi2 law;
  law.weights = symmetric_eigenvalues(M);
  law.multiplicity = part.nx;
  return law;
}

}  // namespace

GenChi2 null_weights_time(const VarParams& model, const Partition& part) {
  validate(model);
  validate(part, model.n);
  require_null(model, part);

  const Matrix omega_yy = inverse_autocov_yy(model, part);
  const Matrix gamma_yyx = autocovariance(conditional_y_model(model, part)).full;
  GenChi2 law = weights_from(omega_yy, gamma_yyx, part);
  law.kind = GenChi2::Kind::Time;
  if (law.weights.minCoeff() <= 0.0)
    throw InternalError(
        "time-domain null weights must be strictly positive; got " +
        std::to_string(law.weights.minCoeff()));
  return law;
}

GenChi2 null_weights_band(const VarParams& model, const Partition& part,
                          const FrequencyBand& band) {
  validate(model);
  validate(part, model.n);
  validate(band);
  require_null(model, part);

  const Matrix omega_yy = inverse_autocov_yy(model, part);
  const VarParams sub = conditional_y_model(model, part);
  const int ny = part.ny, p = model.p;

  // Band average of bS_yy|x(w) = Z(w) (x) S_yy|x(w). Block (k,l) depends only
  // on d = k - l through e^{-iw(k-l)} S(w), so accumulate the p distinct
  // block integrals.
  std::vector<ComplexMatrix> C(
      p, ComplexMatrix::Zero(ny, ny));
  const std::complex<double> i1(0.0, 1.0);
  for (const auto& [w, wt] : composite_nodes(band.lo, band.hi, kBandPanels,
                                             kBandOrder)) {
    const SpectralPoint pt = spectral_point(sub, w);
    for (int d = 0; d < p; ++d)
      C[d] += wt * (std::exp(-i1 * (w * d)) * pt.S);
  }
  const double width = band.width();
  Matrix re_s_bar(static_cast<Eigen::Index>(p) * ny,
                  static_cast<Eigen::Index>(p) * ny);
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l) {
      const int d = k - l;
      const Matrix block = (d >= 0 ? C[d].real() : Matrix(C[-d].real().transpose())) / width;
      re_s_bar.block(static_cast<Eigen::Index>(k) * ny,
                     static_cast<Eigen::Index>(l) * ny, ny, ny) = block;
    }
  re_s_bar = 0.5 * (re_s_bar + re_s_bar.transpose()).eval();

  GenChi2 law = weights_from(omega_yy, re_s_bar, part);
  law.kind = GenChi2::Kind::Band;
  law.band = band;
  const double scale = std::max(1.0, std::abs(law.weights.maxCoeff()));
  for (Eigen::Index i = 0; i < law.weights.size(); ++i) {
    if (law.weights[i] < kBandWeightFloor * scale)
      throw InternalError("band-limited weight " +
                          std::to_string(law.weights[i]) +
                          " is negative beyond the clamping floor");
    if (law.weights[i] < 0.0) law.weights[i] = 0.0;
  }
  return law;
}

Moments genchi2_moments(const GenChi2& law) {
  Moments m;
  m.mu = law.multiplicity * law.weights.sum();
  m.sigma2 = 2.0 * law.multiplicity * law.weights.squaredNorm();
  return m;
}

GammaApprox gamma_approx(const GenChi2& law) {
  const Moments m = genchi2_moments(law);
  if (!(m.mu > 0.0))
    throw DegenerateLaw("all weights are zero; no Gamma approximation");
  GammaApprox g;
  g.mu = m.mu;
  g.sigma2 = m.sigma2;
  g.alpha = m.mu * m.mu / m.sigma2;
  g.beta = m.sigma2 / m.mu;
  return g;
}

namespace detail {

namespace {

struct ImhofIntegrand {
  const Vector& lam;
  double dof;
  double x;

  double theta(double u) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      acc += std::atan(lam[i] * u);
    return 0.5 * dof * acc - 0.5 * x * u;
  }

  double log_rho(double u) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      acc += std::log1p(lam[i] * lam[i] * u * u);
    return 0.25 * dof * acc;
  }

  double operator()(double u) const {
    if (u <= 0.0) return 0.5 * (dof * lam.sum() - x);  // limit at u -> 0
    return std::sin(theta(u)) * std::exp(-log_rho(u)) / u;
  }
};

// Adaptive Gauss-Kronrod (15|7) on [0, U].
struct GkResult {
  double value = 0.0;
  double err = 0.0;
};

GkResult gk15(const ImhofIntegrand& f, double a, double b) {
  static const double xk[15] = {
      -0.991455371120813, -0.949107912342759, -0.864864423359769,
      -0.741531185599394, -0.586087235467691, -0.405845151377397,
      -0.207784955007898, 0.0,                0.207784955007898,
      0.405845151377397,  0.586087235467691,  0.741531185599394,
      0.864864423359769,  0.949107912342759,  0.991455371120813};
  static const double wk[15] = {
      0.022935322010529, 0.063092092629979, 0.104790010322250,
      0.140653259715525, 0.169004726639267, 0.190350578064785,
      0.204432940075298, 0.209482141084728, 0.204432940075298,
      0.190350578064785, 0.169004726639267, 0.140653259715525,
      0.104790010322250, 0.063092092629979, 0.022935322010529};
  static const double wg[7] = {
      0.129484966168870, 0.279705391489277, 0.381830050505119,
      0.417959183673469, 0.381830050505119, 0.279705391489277,
      0.129484966168870};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(c + h * xk[i]);
    k += wk[i] * v;
    if (i % 2 == 1) g += wg[i / 2] * v;
  }
  GkResult r;
  r.value = k * h;
  const double diff = std::abs(k - g) * h;
  r.err = std::pow(200.0 * diff, 1.5);
  if (!(r.err < diff)) r.err = diff;
  return r;
}

}  // namespace

CdfEval imhof_cdf(const Vector& lambdas, int dof, double x, double tol) {
  CdfEval out;
  out.method = CdfEval::Method::Imhof;
  if (x <= 0.0) {
    out.value = 0.0;
    out.certified = true;
    return out;
  }
  const ImhofIntegrand f{lambdas, static_cast<double>(dof), x};
  const double total_dof = dof * static_cast<double>(lambdas.size());
  const double lam_min = lambdas.minCoeff();
  const double lam_max = lambdas.maxCoeff();

  // Truncation point: grow U until either the algebraic-decay envelope bound
  // or the oscillatory (second mean value) bound certifies the tail.
  double U = std::max(10.0 / lam_max, 1.0);
  double tail = 0.0;
  bool tail_ok = false;
  for (int it = 0; it < 80; ++it) {
    const double rho = std::exp(f.log_rho(U));
    // Envelope: |integrand| <= 1/(u rho(u)) and rho grows at least like
    // (u/U)^(K/2) once lambda_i U >= 1.
    double shrink = 0.0;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
      const double t = lambdas[i] * U;
      shrink += 0.25 * dof * std::log1p(1.0 / (t * t));
    }
    const double envelope =
        (2.0 / total_dof) * std::exp(shrink) / rho / M_PI;
    // Oscillation: theta'(u) <= -x/4 once the atan terms have flattened.
    double deriv = 0.0;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i)
      deriv += 0.5 * dof * lambdas[i] / (1.0 + lambdas[i] * lambdas[i] * U * U);
    const double osc = (deriv <= 0.25 * x)
                           ? 2.0 / (0.25 * x * U * rho * M_PI)
                           : std::numeric_limits<double>::infinity();
    tail = std::min(lam_min * U >= 1.0 ? envelope
                                       : std::numeric_limits<double>::infinity(),
                    osc);
    if (tail <= 0.5 * tol) {
      tail_ok = true;
      break;
    }
    U *= 2.0;
    if (U > 1e12) break;
  }
  if (!tail_ok) {
    out.certified = false;
    out.abs_err = tail;
    return out;
  }

  // Adaptive refinement until the quadrature error estimate plus the tail
  // bound sits inside the tolerance.
  struct Piece {
    double err, a, b, value;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  std::priority_queue<Piece> heap;
  const GkResult whole = gk15(f, 0.0, U);
  double value = whole.value, err = whole.err;
  heap.push({whole.err, 0.0, U, whole.value});
  const int max_pieces = 20000;
  int pieces = 1;
  while (err > 0.5 * tol && !heap.empty() && pieces < max_pieces) {
    const Piece top = heap.top();
    heap.pop();
    const double mid = 0.5 * (top.a + top.b);
    const GkResult left = gk15(f, top.a, mid);
    const GkResult right = gk15(f, mid, top.b);
    value += left.value + right.value - top.value;
    err += left.err + right.err - top.err;
    heap.push({left.err, top.a, mid, left.value});
    heap.push({right.err, mid, top.b, right.value});
    ++pieces;
  }
  out.value = 0.5 - value / M_PI;
  out.abs_err = err + tail;
  out.certified = out.abs_err <= tol;
  if (out.value < 0.0) out.value = 0.0;
  if (out.value > 1.0) out.value = 1.0;
  return out;
}

}  // namespace detail

namespace {

// Evaluation-time degeneracy rule: weights 12 orders of magnitude below the
// largest are excluded; the excluded mean mass is reported.
struct EffectiveLaw {
  Vector weights;
  double dropped_mass = 0.0;
};

EffectiveLaw effective_law(const GenChi2& law) {
  if (law.weights.size() == 0)
    throw DegenerateLaw("law has no weights");
  const double wmax = law.weights.maxCoeff();
  EffectiveLaw out;
  if (!(wmax > 0.0)) return out;  // all-zero law
  const double floor = wmax * kDegenerateRatio;
  std::vector<double> kept;
  kept.reserve(law.weights.size());
  for (Eigen::Index i = 0; i < law.weights.size(); ++i) {
    if (law.weights[i] > floor)
      kept.push_back(law.weights[i]);
    else
      out.dropped_mass += law.multiplicity * std::max(law.weights[i], 0.0);
  }
  if (!kept.empty())
    out.weights = Eigen::Map<const Vector>(kept.data(),
                                           static_cast<Eigen::Index>(kept.size()));
  return out;
}

bool all_equal(const Vector& w) {
  return w.size() > 0 &&
         (w.maxCoeff() - w.minCoeff()) <= 1e-12 * std::abs(w.maxCoeff());
}

CdfEval monte_carlo_cdf(const Vector& lam, int dof, double x) {
  // Deterministic fallback stream; accuracy is limited by sample count and
  // reported as a binomial standard error.
  constexpr long kSamples = 10000000;
  SplitRng rng(0x9c0ffee123456789ull);
  long hits = 0;
  const double half_dof = 0.5 * dof;
  for (long s = 0; s < kSamples; ++s) {
    double q = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      // chi^2(dof) = 2 Gamma(dof/2): Marsaglia-Tsang for the gamma draw.
      double d = half_dof - 1.0 / 3.0, g;
      if (half_dof >= 1.0) {
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
          double zz, vv;
          do {
            zz = rng.gaussian();
            vv = 1.0 + c * zz;
          } while (vv <= 0.0);
          vv = vv * vv * vv;
          const double uu = rng.uniform_pos();
          if (std::log(uu) < 0.5 * zz * zz + d - d * vv + d * std::log(vv)) {
            g = d * vv;
            break;
          }
        }
      } else {
        // dof = 1: chi^2(1) is just a squared normal.
        const double z = rng.gaussian();
        g = 0.5 * z * z;
      }
      q += lam[i] * 2.0 * g;
    }
    if (q <= x) ++hits;
  }
  CdfEval out;
  out.method = CdfEval::Method::MonteCarlo;
  out.value = static_cast<double>(hits) / kSamples;
  out.abs_err =
      std::sqrt(std::max(out.value * (1.0 - out.value), 1.0 / kSamples) /
                kSamples);
  out.certified = false;
  return out;
}

}  // namespace

CdfEval genchi2_cdf_detail(const GenChi2& law, double x) {
  if (law.multiplicity < 1)
    throw DimensionMismatch("law multiplicity must be >= 1");
  EffectiveLaw eff = effective_law(law);
  CdfEval out;
  out.dropped_mass = eff.dropped_mass;
  if (eff.weights.size() == 0) {
    // Degenerate point mass at zero.
    out.value = x >= 0.0 ? 1.0 : 0.0;
    out.method = CdfEval::Method::Exact;
    out.certified = true;
    return out;
  }
  if (x <= 0.0) {
    out.value = 0.0;
    out.method = CdfEval::Method::Exact;
    out.certified = true;
    return out;
  }
  if (all_equal(eff.weights)) {
    // Q = lambda chi^2(m dof): exact regularised incomplete gamma.
    const double lambda = eff.weights[0];
    const double k = 0.5 * law.multiplicity * eff.weights.size();
    out.value = boost::math::gamma_p(k, x / (2.0 * lambda));
    out.method = CdfEval::Method::Exact;
    out.certified = true;
    out.abs_err = 1e-14;
    return out;
  }
  CdfEval imhof =
      detail::imhof_cdf(eff.weights, law.multiplicity, x, kCdfTol);
  imhof.dropped_mass = eff.dropped_mass;
  if (imhof.certified) return imhof;
  CdfEval mc = monte_carlo_cdf(eff.weights, law.multiplicity, x);
  mc.dropped_mass = eff.dropped_mass;
  return mc;
}

double genchi2_cdf(const GenChi2& law, double x) {
  return genchi2_cdf_detail(law, x).value;
}

double genchi2_quantile(const GenChi2& law, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw DimensionMismatch("quantile level must lie in (0, 1)");
  const GammaApprox g = gamma_approx(law);  // throws DegenerateLaw if needed

  const auto cdf = [&](double x) {
    const CdfEval e = genchi2_cdf_detail(law, x);
    if (!e.certified)
      throw AccuracyNotMet(
          "CDF could not be certified to 1e-8 during quantile search");
    return e.value;
  };

  // Bracket around the Gamma-approximation quantile, which is close for
  // every law this library produces.
  double guess =
      g.beta * boost::math::gamma_p_inv(g.alpha, q);
  if (!(guess > 0.0)) guess = g.mu;
  double lo = guess, hi = guess;
  double f_lo = cdf(lo) - q, f_hi = f_lo;
  if (std::abs(f_lo) <= kCdfTol) return lo;
  for (int it = 0; it < 200 && f_lo > 0.0; ++it) {
    lo *= 0.5;
    f_lo = cdf(lo) - q;
    if (std::abs(f_lo) <= kCdfTol) return lo;
    if (lo < 1e-300) break;
  }
  for (int it = 0; it < 200 && f_hi < 0.0; ++it) {
    hi *= 2.0;
    f_hi = cdf(hi) - q;
    if (std::abs(f_hi) <= kCdfTol) return hi;
  }
  if (f_lo > 0.0 || f_hi < 0.0)
    throw AccuracyNotMet("failed to bracket the quantile");

  // Illinois-regula-falsi on the monotone CDF with a function-value stop.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    x = (f_hi - f_lo) != 0.0 ? (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
                             : 0.5 * (lo + hi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = cdf(x) - q;
    if (std::abs(fx) <= kCdfTol) return x;
    if ((fx < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = fx;
      f_hi *= 0.5;  // Illinois damping
    } else {
      hi = x;
      f_hi = fx;
      f_lo *= 0.5;
    }
  }
  throw AccuracyNotMet("quantile iteration failed to reach 1e-8");
}

}  // namespace gcsr
