#include "gcsr/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gcsr {

namespace {

GaussLegendreRule compute_rule(int order) {
  // Newton iteration on P_n(x); nodes are symmetric about zero.
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[order - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

std::vector<std::pair<double, double>> composite_nodes(double lo, double hi,
                                                       int panels, int order) {
  const GaussLegendreRule& rule = gauss_legendre(order);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(panels) * order);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double mid = a + 0.5 * h;
    for (int i = 0; i < order; ++i)
      out.emplace_back(mid + 0.5 * h * rule.nodes[i], 0.5 * h * rule.weights[i]);
  }
  return out;
}

double integrate_composite(const std::function<double(double)>& f, double lo,
                           double hi, int panels, int order) {
  double acc = 0.0;
  for (const auto& [x, w] : composite_nodes(lo, hi, panels, order))
    acc += w * f(x);
  return acc;
}

}  // namespace gcsr
