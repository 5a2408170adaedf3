// Least upper bounds of two projections in the Loewner order.
#include <cstdio>

#include "gradspace/lattice.hpp"
#include "gradspace/matrix.hpp"

int main() {
  using namespace gradspace;
  const auto a = SymmetricMatrix::diagonal({1.0, 0.0});
  const auto b = SymmetricMatrix::diagonal({0.0, 1.0});
  const auto m = matrix_max(a, b);
  std::printf("Frobenius: [[%.6f, %.6f], [%.6f, %.6f]]\n", m(0, 0), m(0, 1), m(1, 0), m(1, 1));

  const auto s = matrix_space(2, NormSpec::schatten(3.0));
  const auto m3 = SymmetricMatrix::from_coords(lattice_max(OrderSpec::psd(), s.norm, Element(s, a.coords()), Element(s, b.coords())).coords());
  std::printf("Schatten-3: [[%.6f, %.6f], [%.6f, %.6f]]\n", m3(0, 0), m3(0, 1), m3(1, 0), m3(1, 1));

  const auto lo = matrix_min(SymmetricMatrix::identity(2), SymmetricMatrix::diagonal({2.0, 0.5}));
  std::printf("min(I, diag(2, 0.5)) = diag(%.6f, %.6f)\n", lo(0, 0), lo(1, 1));
}
