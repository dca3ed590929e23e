#include "gcsr/var_model.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "gcsr/errors.hpp"

namespace gcsr {

void validate(const VarParams& model) {
  if (model.n < 1 || model.p < 1)
    throw ValidationError("model must have n >= 1 and p >= 1");
  if (model.A.rows() != model.n ||
      model.A.cols() != static_cast<Eigen::Index>(model.n) * model.p)
    throw ValidationError("A must be n x (p*n)");
  if (model.Sigma.rows() != model.n || model.Sigma.cols() != model.n)
    throw ValidationError("Sigma must be n x n");
  if (!model.A.allFinite() || !model.Sigma.allFinite())
    throw ValidationError("model entries must be finite");
  if (!model.Sigma.isApprox(model.Sigma.transpose(), 1e-12))
    throw ValidationError("Sigma must be symmetric");
  Eigen::LLT<Matrix> llt(0.5 * (model.Sigma + model.Sigma.transpose()));
  if (llt.info() != Eigen::Success)
    throw ValidationError("Sigma must be positive-definite");
  const double rho = spectral_radius_companion(model.A);
  if (rho >= 1.0)
    throw ValidationError("spectral radius must be < 1 (got " +
                          std::to_string(rho) + ")");
}

void validate(const Partition& part, int n) {
  if (part.nx < 1 || part.ny < 1 || part.nx + part.ny != n)
    throw ValidationError("partition must satisfy nx >= 1, ny >= 1, nx+ny = n");
}

bool is_null_model(const VarParams& model, const Partition& part) {
  for (int k = 0; k < model.p; ++k)
    if (!model.lag(k).block(0, part.nx, part.nx, part.ny).isZero(0.0))
      return false;
  return true;
}

double spectral_radius(const VarParams& model) {
  return spectral_radius_companion(model.A);
}

Matrix companion(const VarParams& model) { return companion_matrix(model.A); }

Matrix sigma_yy_given_x(const VarParams& model, const Partition& part) {
  const auto& S = model.Sigma;
  const int nx = part.nx, ny = part.ny;
  const Matrix Sxx = S.topLeftCorner(nx, nx);
  const Matrix Syx = S.bottomLeftCorner(ny, nx);
  const Matrix Syy = S.bottomRightCorner(ny, ny);
  Eigen::LLT<Matrix> llt(Sxx);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("Sigma_xx is not positive-definite");
  Matrix out = Syy - Syx * llt.solve(Syx.transpose());
  return 0.5 * (out + out.transpose());
}

namespace {

// Shape-only check for hot paths; stability is enforced where it matters.
void check_shape(const VarParams& model) {
  if (model.n < 1 || model.p < 1)
    throw DimensionMismatch("model must have n >= 1 and p >= 1");
  if (model.A.rows() != model.n ||
      model.A.cols() != static_cast<Eigen::Index>(model.n) * model.p)
    throw DimensionMismatch("A must be n x (p*n)");
  if (model.Sigma.rows() != model.n || model.Sigma.cols() != model.n)
    throw DimensionMismatch("Sigma must be n x n");
}

}  // namespace

AutocovMatrix autocovariance(const VarParams& model) {
  check_shape(model);
  const Eigen::Index m = static_cast<Eigen::Index>(model.n) * model.p;
  Matrix bSigma = Matrix::Zero(m, m);
  bSigma.topLeftCorner(model.n, model.n) = model.Sigma;
  AutocovMatrix out;
  out.n = model.n;
  out.p = model.p;
  out.full = solve_dlyap(companion(model), bSigma);
  return out;
}

std::vector<Matrix> autocov_sequence(const VarParams& model, int max_lag) {
  if (max_lag < 0) throw DimensionMismatch("max_lag must be >= 0");
  const AutocovMatrix G = autocovariance(model);
  std::vector<Matrix> gam;
  gam.reserve(max_lag + 1);
  for (int k = 0; k <= max_lag && k < model.p; ++k) gam.emplace_back(G.gamma(k));
  // Gamma_k = sum_l A_l Gamma_{k-l} for k >= p, with Gamma_{-j} = Gamma_j^T.
  for (int k = static_cast<int>(gam.size()); k <= max_lag; ++k) {
    Matrix g = Matrix::Zero(model.n, model.n);
    for (int l = 1; l <= model.p; ++l) {
      const int j = k - l;
      g += model.lag(l - 1) * (j >= 0 ? gam[j] : Matrix(gam[-j].transpose()));
    }
    gam.push_back(std::move(g));
  }
  return gam;
}

SpectralPoint spectral_point(const VarParams& model, double omega) {
  check_shape(model);
  const std::complex<double> i(0.0, 1.0);
  SpectralPoint pt;
  pt.omega = omega;
  pt.Phi = ComplexMatrix::Identity(model.n, model.n);
  for (int k = 0; k < model.p; ++k)
    pt.Phi -= std::exp(-i * (omega * (k + 1))) *
              model.lag(k).cast<std::complex<double>>();
  Eigen::PartialPivLU<ComplexMatrix> lu(pt.Phi);
  const std::complex<double> det = lu.determinant();
  if (!std::isfinite(std::abs(det)) || std::abs(det) < 1e-300)
    throw SingularPhi("Phi(omega) is numerically singular at omega = " +
                      std::to_string(omega));
  pt.Psi = lu.solve(ComplexMatrix::Identity(model.n, model.n));
  pt.S = pt.Psi * model.Sigma * pt.Psi.adjoint();
  pt.S = 0.5 * (pt.S + pt.S.adjoint()).eval();
  return pt;
}

double log_generalised_correlation(const Matrix& sigma) {
  return -logdet_spd(sigma) + sigma.diagonal().array().log().sum();
}

double generator_tolerance() {
  return std::sqrt(std::numeric_limits<double>::epsilon());
}

}  // namespace gcsr
