// Minimal Hajlasz gradient of a step function on four points of a line.
#include <cstdio>

#include "gradspace/metric.hpp"

int main() {
  using namespace gradspace;
  const auto X = FiniteMetricMeasureSpace::on_line({0.0, 1.0, 2.0, 3.0}, {1.0, 1.0, 1.0, 1.0});
  const Vec u{0.0, 0.0, 1.0, 1.0};
  const Vec g = hajlasz_minimal_gradient(X, u, 2.0);
  for (std::size_t i = 0; i < g.size(); ++i) std::printf("g[%zu] = %.6f\n", i, g[i]);
  const Vec k = poincare_minimal_gradient(X, u, 2.0);
  for (std::size_t i = 0; i < k.size(); ++i) std::printf("k[%zu] = %.6f\n", i, k[i]);
}
