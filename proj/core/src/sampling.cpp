#include "gcsr/sampling.hpp"

#include <cmath>
#include <string>

#include "gcsr/errors.hpp"

namespace gcsr {

long default_burn_in(const VarParams& model) {
  const double rho = spectral_radius(model);
  if (rho >= 1.0) throw ValidationError("model must be stable");
  const double est = 10.0 * model.p / (1.0 - rho);
  return std::max(100L, static_cast<long>(std::ceil(est)));
}

TimeSeries simulate(const VarParams& model, long n_samples, long burn_in,
                    SplitRng& rng) {
  validate(model);
  if (n_samples < 1) throw DimensionMismatch("need at least one sample");
  if (burn_in < 0) throw DimensionMismatch("burn_in must be >= 0");

  const int n = model.n;
  const int p = model.p;
  Eigen::LLT<Matrix> llt(model.Sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("Sigma is not positive-definite");
  const Matrix L = llt.matrixL();

  const long total = n_samples + burn_in;
  Matrix out(total, n);
  Vector z(n), u(n);
  for (long t = 0; t < total; ++t) {
    for (int i = 0; i < n; ++i) z[i] = rng.gaussian();
    u = L * z;
    for (int k = 0; k < p && k < t; ++k)
      u += model.lag(k) * out.row(t - k - 1).transpose();
    out.row(t) = u.transpose();
  }
  return TimeSeries{out.bottomRows(n_samples)};
}

namespace {

struct Regression {
  Matrix coeffs;  // n x pn
  Matrix sigma;   // residual cross-product / (N - p)
};

// Shared OLS core: mean-centre, stack p lags, solve the normal equations.
Regression ols(const TimeSeries& data, int p) {
  const long N = data.length();
  const int n = data.vars();
  if (n < 1) throw DimensionMismatch("time series has no variables");
  if (p < 1) throw DimensionMismatch("model order must be >= 1");
  const long rows = N - p;
  const Eigen::Index m = static_cast<Eigen::Index>(n) * p;
  if (rows <= m)
    throw DimensionMismatch("sample too short for order " + std::to_string(p) +
                            " regression");

  const Matrix centred =
      data.values.rowwise() - data.values.colwise().mean();

  Matrix X(rows, m);
  for (int k = 0; k < p; ++k)
    X.middleCols(static_cast<Eigen::Index>(k) * n, n) =
        centred.middleRows(p - 1 - k, rows);
  const auto Y = centred.bottomRows(rows);

  Matrix gram = Matrix::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() =
      gram.triangularView<Eigen::StrictlyLower>().transpose();
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw RankDeficient("regressor Gram matrix is singular");

  Regression reg;
  reg.coeffs = llt.solve(X.transpose() * Y).transpose();
  const Matrix resid = Y - X * reg.coeffs.transpose();
  reg.sigma = resid.transpose() * resid / static_cast<double>(rows);
  reg.sigma = 0.5 * (reg.sigma + reg.sigma.transpose()).eval();
  return reg;
}

}  // namespace

VarParams fit_var_ols(const TimeSeries& data, int p) {
  if (!data.values.allFinite())
    throw ValidationError("time series contains non-finite values");
  const Regression reg = ols(data, p);
  VarParams est;
  est.n = data.vars();
  est.p = p;
  est.A = reg.coeffs;
  est.Sigma = reg.sigma;
  return est;
}

OrderSelection select_order(const TimeSeries& data, int p_max,
                            OrderCriterion criterion) {
  if (p_max < 1) throw DimensionMismatch("p_max must be >= 1");
  const int n = data.vars();
  OrderSelection sel;
  sel.scores.reserve(p_max);
  for (int p = 1; p <= p_max; ++p) {
    const Regression reg = ols(data, p);
    Eigen::LLT<Matrix> llt(reg.sigma);
    if (llt.info() != Eigen::Success)
      throw RankDeficient("residual covariance is singular at order " +
                          std::to_string(p));
    const double logdet =
        2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    const double rows = static_cast<double>(data.length() - p);
    const double k = static_cast<double>(p) * n * n;
    double penalty = 0.0;
    switch (criterion) {
      case OrderCriterion::Bic: penalty = k * std::log(rows); break;
      case OrderCriterion::Hqic: penalty = 2.0 * k * std::log(std::log(rows)); break;
      case OrderCriterion::Aic: penalty = 2.0 * k; break;
    }
    sel.scores.push_back(rows * logdet + penalty);
  }
  sel.p_hat = 1;
  for (int p = 2; p <= p_max; ++p)
    if (sel.scores[p - 1] < sel.scores[sel.p_hat - 1]) sel.p_hat = p;
  return sel;
}

VarParams project_to_null(const VarParams& estimate, const Partition& part) {
  validate(part, estimate.n);
  VarParams out = estimate;
  for (int k = 0; k < out.p; ++k)
    out.A.block(0, static_cast<Eigen::Index>(k) * out.n + part.nx, part.nx,
                part.ny)
        .setZero();
  return out;
}

}  // namespace gcsr
