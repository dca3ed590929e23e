#ifndef GCSR_QUADRATURE_HPP
#define GCSR_QUADRATURE_HPP

#include <functional>
#include <utility>
#include <vector>

namespace gcsr {

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre polynomial and cached per order.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int order);

// Composite rule: `panels` equal panels of the given order over [lo, hi].
double integrate_composite(const std::function<double(double)>& f, double lo,
                           double hi, int panels, int order);

// Node/weight pairs of the composite rule mapped onto [lo, hi], in ascending
// node order (deterministic reduction order for reproducibility).
std::vector<std::pair<double, double>> composite_nodes(double lo, double hi,
                                                       int panels, int order);

// Default band-integration resolution: 128 panels x order 16 = 2048 nodes.
inline constexpr int kBandPanels = 128;
inline constexpr int kBandOrder = 16;

}  // namespace gcsr

#endif  // GCSR_QUADRATURE_HPP
