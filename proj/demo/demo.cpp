// Small tour of the library on 3x3 instances.
#include <iostream>

#include "rotopt/rotopt.hpp"

using namespace rotopt;

int main() {
  // Rotation with a prescribed diagonal.
  Vector d(3);
  d << 0.2, -0.4, 0.1;
  const Matrix x = construct_with_diagonal(d);
  std::cout << "diagonal target " << d.transpose() << "\n" << x << "\n\n";

  // Orthogonal completion from strictly-upper entries, best over SO(3) vs O(3).
  Vector s(3);
  s << 0.5, 0.3, 0.2;
  const SutVector sigma(3, s);
  Vector a(3);
  a << 1, 1, -1;
  std::cout << "SO(3) value " << sut_opt_special(sigma, a).value << ", O(3) value " << sut_opt_orth(sigma, a).value
            << "\n\n";

  // Trace maximization with an interval constraint on a second linear form.
  const Matrix A = Matrix::Identity(3, 3);
  Matrix B = Matrix::Identity(3, 3);
  B(2, 2) = -1;
  const OneConstraintResult r = solve_one_constraint(A, B, -1.0, -1.0, 1e-5);
  std::cout << "max tr(X) with <B,X> = -1: " << r.value << " (certificate " << r.certificate.alpha << ", "
            << r.certificate.beta << ")\n";
  return 0;
}
