#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "pauli.hpp"

namespace matryoshka {

using cplx = std::complex<double>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kDensityTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-12;

// Pure state of n spins on the full 2^n basis. Basis index bit k-1 holds the
// value of site k, so site 1 is the least-significant bit.
class StateVector {
 public:
  StateVector(int n_sites, Eigen::VectorXcd amplitudes)
      : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
    check_size(n_sites);
    if (amplitudes_.size() != (Eigen::Index{1} << n_sites))
      throw DimensionError("state of " + std::to_string(n_sites) + " sites needs " +
                           std::to_string(Eigen::Index{1} << n_sites) + " amplitudes, got " +
                           std::to_string(amplitudes_.size()));
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTolerance)
      throw ValidationError("state vector is not normalized (norm = " + std::to_string(norm) + ")");
  }

  // Rescales to unit norm before validating.
  static StateVector normalized(int n_sites, Eigen::VectorXcd amplitudes) {
    const double norm = amplitudes.norm();
    if (norm == 0.0) throw ValidationError("cannot normalize the zero vector");
    amplitudes /= norm;
    return StateVector(n_sites, std::move(amplitudes));
  }

  static StateVector basis(int n_sites, std::uint64_t index) {
    check_size(n_sites);
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    if (index >= static_cast<std::uint64_t>(dim)) throw ValidationError("basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(n_sites, std::move(v));
  }

  static StateVector all_zero(int n_sites) { return basis(n_sites, 0); }
  static StateVector all_one(int n_sites) {
    check_size(n_sites);
    return basis(n_sites, (std::uint64_t{1} << n_sites) - 1);
  }

  // Z-basis product state from per-site bits; bits[k] is site k+1.
  static StateVector product(const std::vector<int>& bits) {
    std::uint64_t index = 0;
    for (std::size_t k = 0; k < bits.size(); ++k)
      if (bits[k]) index |= std::uint64_t{1} << k;
    return basis(static_cast<int>(bits.size()), index);
  }

  int n_sites() const noexcept { return n_sites_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  cplx operator[](Eigen::Index i) const { return amplitudes_(i); }

  double norm() const { return amplitudes_.norm(); }

  // Same state with the global phase fixed so the largest amplitude is real
  // and positive.
  StateVector phase_normalized() const {
    Eigen::Index arg = 0;
    amplitudes_.cwiseAbs2().maxCoeff(&arg);
    const cplx a = amplitudes_(arg);
    Eigen::VectorXcd v = amplitudes_ * (std::conj(a) / std::abs(a));
    return StateVector(n_sites_, std::move(v));
  }

 private:
  static void check_size(int n_sites) {
    if (n_sites < 1 || n_sites > kMaxSites)
      throw ValidationError("number of sites must be in [1, " + std::to_string(kMaxSites) + "]");
  }

  int n_sites_;
  Eigen::VectorXcd amplitudes_;
};

inline void require_same_dimension(const StateVector& a, const StateVector& b, const char* what) {
  if (a.n_sites() != b.n_sites())
    throw DimensionError(std::string(what) + ": site count mismatch (" + std::to_string(a.n_sites()) +
                         " vs " + std::to_string(b.n_sites()) + ")");
}

// <a|b>
inline cplx inner_product(const StateVector& a, const StateVector& b) {
  require_same_dimension(a, b, "inner_product");
  return a.amplitudes().dot(b.amplitudes());
}

// Reduced state of one or two sites. Local index bit j holds sites[j].
class DensityMatrix {
 public:
  DensityMatrix(std::vector<SiteIndex> sites, Eigen::MatrixXcd entries)
      : sites_(std::move(sites)), entries_(std::move(entries)) {
    validate();
  }

  const std::vector<SiteIndex>& sites() const noexcept { return sites_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return entries_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }

  double trace() const { return entries_.trace().real(); }
  double purity() const { return (entries_ * entries_).trace().real(); }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

 private:
  void validate() const {
    if (sites_.empty() || sites_.size() > 2) throw ValidationError("density matrix spans 1 or 2 sites");
    const Eigen::Index d = Eigen::Index{1} << sites_.size();
    if (entries_.rows() != d || entries_.cols() != d)
      throw DimensionError("density matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kDensityTolerance)
      throw NumericalError("density matrix is not Hermitian");
    if (std::abs(trace() - 1.0) > kDensityTolerance)
      throw NumericalError("density matrix trace " + std::to_string(trace()) + " != 1");
    if (eigenvalues().minCoeff() < -kDensityTolerance)
      throw NumericalError("density matrix is not positive semidefinite");
  }

  std::vector<SiteIndex> sites_;
  Eigen::MatrixXcd entries_;
};

inline void require_length(const PauliString& p, const StateVector& v, const char* what) {
  if (p.n_sites() != v.n_sites())
    throw DimensionError(std::string(what) + ": Pauli string has " + std::to_string(p.n_sites()) +
                         " sites, state has " + std::to_string(v.n_sites()));
}

// Accumulates weight * P|in> into out without materializing P.
inline void accumulate_pauli(const PauliString& p, cplx weight, const Eigen::VectorXcd& in,
                             Eigen::VectorXcd& out) {
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  // P|b> = i^{k+|x&z|} (-1)^{|b&z|} |b^x>
  const cplx base = weight * PauliString::i_pow(p.phase_exponent() + p.y_count());
  const auto dim = static_cast<std::uint64_t>(in.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const cplx a = in(static_cast<Eigen::Index>(b));
    if (a == cplx{}) continue;
    const double s = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(b ^ x)) += s * base * a;
  }
}

inline StateVector pauli_apply(const PauliString& p, const StateVector& v) {
  require_length(p, v, "pauli_apply");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.dim());
  accumulate_pauli(p, 1.0, v.amplitudes(), out);
  return StateVector(v.n_sites(), std::move(out));
}

inline bool is_unitary(const Eigen::Matrix2cd& u, double tol = kUnitaryTolerance) {
  return ((u.adjoint() * u) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= tol;
}

inline Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

inline StateVector gate_apply(const StateVector& v, SiteIndex site, const Eigen::Matrix2cd& u) {
  site.check(v.n_sites());
  if (!is_unitary(u)) throw ValidationError("gate_apply: matrix is not unitary within 1e-12");
  const std::uint64_t m = site.mask();
  const auto dim = static_cast<std::uint64_t>(v.dim());
  Eigen::VectorXcd out = v.amplitudes();
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & m) continue;
    const auto i0 = static_cast<Eigen::Index>(b);
    const auto i1 = static_cast<Eigen::Index>(b | m);
    const cplx a0 = v[i0];
    const cplx a1 = v[i1];
    out(i0) = u(0, 0) * a0 + u(0, 1) * a1;
    out(i1) = u(1, 0) * a0 + u(1, 1) * a1;
  }
  return StateVector(v.n_sites(), std::move(out));
}

inline constexpr double kImaginaryResidue = 1e-10;

inline double expectation(const StateVector& v, const PauliString& p) {
  require_length(p, v, "expectation");
  if (!p.is_hermitian()) throw ValidationError("expectation: Pauli string " + p.str() + " is not Hermitian");
  Eigen::VectorXcd pv = Eigen::VectorXcd::Zero(v.dim());
  accumulate_pauli(p, 1.0, v.amplitudes(), pv);
  const cplx e = v.amplitudes().dot(pv);
  if (std::abs(e.imag()) > kImaginaryResidue)
    throw NumericalError("expectation has imaginary residue " + std::to_string(e.imag()));
  return e.real();
}

inline DensityMatrix reduced_density(const StateVector& v, const std::vector<SiteIndex>& sites) {
  if (sites.empty() || sites.size() > 2) throw ValidationError("reduced_density: need 1 or 2 sites");
  for (const auto& s : sites) s.check(v.n_sites());
  if (sites.size() == 2 && sites[0] == sites[1]) throw ValidationError("reduced_density: duplicate site");

  std::uint64_t keep = 0;
  for (const auto& s : sites) keep |= s.mask();
  const int k = static_cast<int>(sites.size());
  const int local_dim = 1 << k;
  std::vector<std::uint64_t> offsets(local_dim, 0);
  for (int a = 0; a < local_dim; ++a)
    for (int j = 0; j < k; ++j)
      if (a & (1 << j)) offsets[a] |= sites[j].mask();

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(local_dim, local_dim);
  Eigen::VectorXcd local(local_dim);
  const auto dim = static_cast<std::uint64_t>(v.dim());
  for (std::uint64_t rest = 0; rest < dim; ++rest) {
    if (rest & keep) continue;
    for (int a = 0; a < local_dim; ++a) local(a) = v[static_cast<Eigen::Index>(rest | offsets[a])];
    rho.noalias() += local * local.adjoint();
  }
  // Remove round-off asymmetry before validation.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(sites, std::move(rho));
}

inline DensityMatrix reduced_density(const StateVector& v, SiteIndex site) {
  return reduced_density(v, std::vector<SiteIndex>{site});
}

inline DensityMatrix reduced_density(const StateVector& v, SiteIndex a, SiteIndex b) {
  return reduced_density(v, std::vector<SiteIndex>{a, b});
}

}  // namespace matryoshka
