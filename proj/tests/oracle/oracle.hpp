#pragma once

// Brute-force reference implementations. Nothing here calls the library's
// bitmask application, spectral propagator or Lanczos code: operators are
// built from Kronecker products and evolved with a Pade matrix exponential.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "matryoshka/chain.hpp"
#include "matryoshka/pauli.hpp"
#include "matryoshka/state.hpp"

namespace matryoshka::oracle {

using cplx = std::complex<double>;

inline Eigen::Matrix2cd letter_matrix(PauliLetter l) {
  Eigen::Matrix2cd m;
  switch (l) {
    case PauliLetter::I: m << 1, 0, 0, 1; break;
    case PauliLetter::X: m << 0, 1, 1, 0; break;
    case PauliLetter::Y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case PauliLetter::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Site 1 is the least-significant bit, so it is the rightmost Kronecker factor.
inline Eigen::MatrixXcd kron_sites(const std::vector<Eigen::Matrix2cd>& per_site) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (auto it = per_site.rbegin(); it != per_site.rend(); ++it) {
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(m, *it).eval();
    m = std::move(next);
  }
  return m;
}

inline Eigen::MatrixXcd kron_pauli(const PauliString& p) {
  std::vector<Eigen::Matrix2cd> factors;
  for (int s = 1; s <= p.n_sites(); ++s) factors.push_back(letter_matrix(p.letter(SiteIndex(s))));
  return p.phase() * kron_sites(factors);
}

inline Eigen::MatrixXcd kron_hamiltonian(const HamiltonianTerms& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms) m += t.weight * kron_pauli(t.string);
  return m;
}

inline Eigen::VectorXcd dense_expm_evolve(const HamiltonianTerms& h, const Eigen::VectorXcd& v, double t) {
  if (h.n_sites > 10) throw DimensionError("dense_expm_evolve limited to N <= 10");
  if (t == 0.0) return v;
  const Eigen::MatrixXcd a = cplx(0.0, -t) * kron_hamiltonian(h);
  const Eigen::MatrixXcd u = a.exp();
  return u * v;
}

inline StateVector dense_expm_evolve(const HamiltonianTerms& h, const StateVector& v, double t) {
  return StateVector(v.n_sites(), dense_expm_evolve(h, v.amplitudes(), t));
}

struct PauliCoefficient {
  cplx coefficient;
  PauliString string;
};

// c_P = tr(P M) / 2^N over all 4^N Hermitian strings; entries below 1e-12 dropped.
inline std::vector<PauliCoefficient> exhaustive_pauli_decompose(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(m.rows()))));
  if (n > 5) throw DimensionError("exhaustive_pauli_decompose limited to N <= 5");
  std::vector<PauliCoefficient> out;
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < count; ++code) {
    PauliString p(n);
    for (int s = 0; s < n; ++s) p.set(SiteIndex(s + 1), static_cast<PauliLetter>((code >> (2 * s)) & 3));
    const cplx c = (kron_pauli(p) * m).trace() / static_cast<double>(m.rows());
    if (std::abs(c) > 1e-12) out.push_back({c, p});
  }
  return out;
}

inline Eigen::MatrixXcd reconstruct(const std::vector<PauliCoefficient>& terms, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms) m += t.coefficient * kron_pauli(t.string);
  return m;
}

// Partial trace of |v><v| by explicit index bookkeeping over the full matrix.
inline Eigen::MatrixXcd brute_partial_trace(const Eigen::VectorXcd& v, int n, const std::vector<int>& sites) {
  const Eigen::MatrixXcd full = v * v.adjoint();
  const int k = static_cast<int>(sites.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(1 << k, 1 << k);
  auto local = [&](std::uint64_t b) {
    int a = 0;
    for (int j = 0; j < k; ++j) a |= static_cast<int>((b >> (sites[j] - 1)) & 1) << j;
    return a;
  };
  std::uint64_t keep = 0;
  for (int s : sites) keep |= std::uint64_t{1} << (s - 1);
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t b = 0; b < dim; ++b)
    for (std::uint64_t c = 0; c < dim; ++c)
      if ((b & ~keep) == (c & ~keep))
        out(local(b), local(c)) += full(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c));
  return out;
}

// Wootters' definition taken literally: square roots of the eigenvalues of
// the non-Hermitian product rho (Y x Y) rho* (Y x Y).
inline double wootters_concurrence(const Eigen::Matrix4cd& rho) {
  const Eigen::Matrix4cd yy = Eigen::kroneckerProduct(letter_matrix(PauliLetter::Y), letter_matrix(PauliLetter::Y));
  const Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r);
  std::vector<double> l;
  for (int k = 0; k < 4; ++k) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k).real())));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

// exp(-iHt) for the three-site alternating chain H = J (Y1Y2 + X2X3),
// J = sqrt2 lambda. A = Y1Y2 and B = X2X3 square to one and anticommute, so
// H^2 = 2J^2 and exp(-iHt) = cos(sqrt2 J t) - i sin(sqrt2 J t) (A + B)/sqrt2.
inline Eigen::MatrixXcd closed_form_n3_unitary(double lambda, double t) {
  const double j = std::sqrt(2.0) * lambda;
  const Eigen::MatrixXcd a = kron_pauli(PauliString::from_letters("YYI"));
  const Eigen::MatrixXcd b = kron_pauli(PauliString::from_letters("IXX"));
  const double w = std::sqrt(2.0) * j * t;
  return std::cos(w) * Eigen::MatrixXcd::Identity(8, 8) - cplx(0.0, std::sin(w)) * (a + b) / std::sqrt(2.0);
}

// |1>_2 Psi-_13 with Psi- = (|01> - |10>)/sqrt2 in (site1, site3) order:
// +1/sqrt2 on |0_1 1_2 1_3> (index 6), -1/sqrt2 on |1_1 1_2 0_3> (index 3).
inline Eigen::VectorXcd n3_matryoshka_vector() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
  v(6) = 1.0 / std::sqrt(2.0);
  v(3) = -1.0 / std::sqrt(2.0);
  return v;
}

// Best |<a|b>| over global phases, computed without the library.
inline double overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return std::abs(a.dot(b)); }

struct OracleReport {
  std::string case_id;
  nlohmann::json reference_value;
  nlohmann::json main_value;
  double discrepancy;
};

inline nlohmann::json vector_json(const Eigen::VectorXcd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v(k).real(), v(k).imag()});
  return out;
}

inline nlohmann::json to_json(const OracleReport& r) {
  return {{"case_id", r.case_id},
          {"reference_value", r.reference_value},
          {"main_value", r.main_value},
          {"discrepancy", r.discrepancy}};
}

}  // namespace matryoshka::oracle
