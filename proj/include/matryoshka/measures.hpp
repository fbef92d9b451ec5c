#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "state.hpp"

namespace matryoshka {

// |<a|b>|, insensitive to the global phase of either argument.
inline double state_fidelity(const StateVector& a, const StateVector& b) {
  require_same_dimension(a, b, "state_fidelity");
  return std::min(1.0, std::abs(inner_product(a, b)));
}

inline Eigen::Matrix4cd yy_matrix() {
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  return yy;
}

// Wootters concurrence. The decreasing values lambda_k are the singular
// values of sqrt(rho) (Y x Y) conj(sqrt(rho)), which are the square roots of
// the eigenvalues of rho (Y x Y) rho* (Y x Y).
inline double concurrence(const DensityMatrix& rho) {
  if (rho.sites().size() != 2) throw ValidationError("concurrence needs a two-site density matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  Eigen::VectorXd w = es.eigenvalues();
  // Round-off eigenvalues would otherwise contribute ~sqrt(1e-16) = 1e-8.
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = w(k) < 1e-13 ? 0.0 : std::sqrt(w(k));
  const Eigen::Matrix4cd root = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  const Eigen::Matrix4cd r = root * yy_matrix() * root.conjugate();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(r);
  const Eigen::Vector4d s = svd.singularValues();  // descending
  return std::clamp(s(0) - s(1) - s(2) - s(3), 0.0, 1.0);
}

// Concurrence of a two-qubit pure state with local index bit 0 = first site.
inline double pure_concurrence(const Eigen::Vector4cd& psi) {
  return std::min(1.0, 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2)) / psi.squaredNorm());
}

// Trace distance 0.5 * || a - b ||_1 between density matrices on the same sites.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.sites() != b.sites()) throw DimensionError("trace_distance: site sets differ");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace matryoshka
