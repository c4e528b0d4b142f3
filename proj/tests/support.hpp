#pragma once

#include <random>

#include "qphase/linalg.hpp"

namespace qphase::testing {

inline CMatrix random_complex(std::mt19937& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  CMatrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = Complex(g(rng), g(rng));
  }
  return M;
}

// Haar unitary via QR with the phase fix on R's diagonal.
inline CMatrix random_unitary(std::mt19937& rng, int d) {
  Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, d, d));
  CMatrix Q = qr.householderQ();
  const CMatrix R = qr.matrixQR();
  for (int j = 0; j < d; ++j) Q.col(j) *= std::polar(1.0, std::arg(R(j, j)));
  return Q;
}

inline CMatrix random_special_unitary(std::mt19937& rng, int d) {
  CMatrix U = random_unitary(rng, d);
  return U / std::pow(U.determinant(), 1.0 / d);
}

inline CMatrix random_traceless_hermitian(std::mt19937& rng, int d) {
  const CMatrix A = random_complex(rng, d, d);
  CMatrix H = (A + A.adjoint()) / 2.0;
  H -= (H.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
  return H;
}

inline CMatrix random_state(std::mt19937& rng, int d_A, int d_B) {
  CMatrix a = random_complex(rng, d_A, d_B);
  return a / a.norm();
}

}  // namespace qphase::testing
