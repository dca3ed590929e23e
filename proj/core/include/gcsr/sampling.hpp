#ifndef GCSR_SAMPLING_HPP
#define GCSR_SAMPLING_HPP

#include <vector>

#include "gcsr/var_model.hpp"

namespace gcsr {

// Observed sample: row t is u_t, one column per variable.
struct TimeSeries {
  Matrix values;

  long length() const { return values.rows(); }
  int vars() const { return static_cast<int>(values.cols()); }

  // Sub-series of the first nx variables.
  TimeSeries head_vars(int nx) const { return {values.leftCols(nx)}; }
};

enum class OrderCriterion { Bic, Hqic, Aic };

// Mixing-time heuristic: 10 p / (1 - rho), at least 100.
long default_burn_in(const VarParams& model);

// Draws u_t = sum_k A_k u_{t-k} + eps_t with eps_t ~ N(0, Sigma) from zero
// initial state, discarding the first burn_in rows.
TimeSeries simulate(const VarParams& model, long n_samples, long burn_in,
                    SplitRng& rng);

// OLS fit of a VAR(p): data is mean-centred, the first p rows condition the
// regression, and Sigma_hat is the residual cross-product over (N - p).
// The estimate is not required to be stable or to have positive-definite
// Sigma_hat; downstream consumers validate.
VarParams fit_var_ols(const TimeSeries& data, int p);

struct OrderSelection {
  int p_hat = 0;
  std::vector<double> scores;  // scores[k] is the criterion value at p = k+1
};

// Minimises the information criterion over p = 1..p_max; ties break toward
// smaller p.
OrderSelection select_order(const TimeSeries& data, int p_max,
                            OrderCriterion criterion);

// Zeroes every A_{k,xy} block, leaving all other entries untouched.
VarParams project_to_null(const VarParams& estimate, const Partition& part);

}  // namespace gcsr

#endif  // GCSR_SAMPLING_HPP
