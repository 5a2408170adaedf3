// Harmonic function on the annulus 1 < |x| < 2 with u = 1 inside, u = 0 outside.
#include <cmath>
#include <cstdio>

#include "gradspace/grid.hpp"

int main() {
  using namespace gradspace;
  const auto dom = GridDomain::annulus(1.0 / 16.0);
  const auto rep = solve_p_laplace(dom, 2.0);
  std::printf("method %s, iterations %d, energy %.6f\n", rep.method.c_str(), rep.iterations, rep.objective);
  for (double r : {1.25, 1.5, 1.75}) {
    for (std::size_t x = 0; x < dom.node_count(); ++x) {
      const Vec c = dom.coordinate(x);
      if (std::abs(c[1]) < 1e-12 && std::abs(c[0] - r) < 1e-12)
        std::printf("u(%.2f, 0) = %.4f  exact %.4f\n", r, rep.minimizer[x], 1.0 - std::log2(r));
    }
  }
}
