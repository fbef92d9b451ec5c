#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "pauli.hpp"
#include "state.hpp"

namespace matryoshka {

enum class CouplingPattern { PerfectTransfer, MatryoshkaAlternating, Custom };

inline const char* pattern_name(CouplingPattern p) {
  switch (p) {
    case CouplingPattern::PerfectTransfer: return "perfect_transfer";
    case CouplingPattern::MatryoshkaAlternating: return "matryoshka";
    case CouplingPattern::Custom: return "custom";
  }
  return "?";
}

inline CouplingPattern parse_pattern(const std::string& name) {
  if (name == "perfect_transfer") return CouplingPattern::PerfectTransfer;
  if (name == "matryoshka") return CouplingPattern::MatryoshkaAlternating;
  if (name == "custom") return CouplingPattern::Custom;
  throw ValidationError("unknown coupling pattern '" + name + "' (expected perfect_transfer, matryoshka or custom)");
}

inline void require_odd_chain(int n_sites) {
  if (n_sites < 3 || n_sites % 2 == 0)
    throw ValidationError("chain length must be odd and >= 3, got " + std::to_string(n_sites));
  if (n_sites > kMaxSites) throw ValidationError("chain length exceeds " + std::to_string(kMaxSites));
}

// J_i = lambda * sqrt(i (N - i)), i = 1..N-1.
inline std::vector<double> perfect_transfer_couplings(int n_sites, double lambda) {
  require_odd_chain(n_sites);
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  std::vector<double> j(static_cast<std::size_t>(n_sites - 1));
  for (int i = 1; i < n_sites; ++i) j[i - 1] = lambda * std::sqrt(static_cast<double>(i) * (n_sites - i));
  return j;
}

struct BondCouplings {
  std::vector<double> j_x;
  std::vector<double> j_y;
};

// Perfect-transfer magnitudes on YY for odd bonds and on XX for even bonds;
// the other coupling on each bond is zero.
inline BondCouplings matryoshka_couplings(int n_sites, double lambda) {
  const auto j = perfect_transfer_couplings(n_sites, lambda);
  BondCouplings c{std::vector<double>(j.size(), 0.0), std::vector<double>(j.size(), 0.0)};
  for (std::size_t k = 0; k < j.size(); ++k) {
    const int bond = static_cast<int>(k) + 1;
    (bond % 2 == 1 ? c.j_y : c.j_x)[k] = j[k];
  }
  return c;
}

struct ChainSpec {
  int n_sites = 3;
  double lambda = 1.0;
  CouplingPattern pattern = CouplingPattern::MatryoshkaAlternating;
  // Only read for the Custom pattern; length n_sites - 1.
  std::vector<double> custom_j_x;
  std::vector<double> custom_j_y;
  // Local Z fields B_i, length n_sites.
  std::vector<double> fields_b;

  static ChainSpec matryoshka(int n_sites, double lambda = 1.0) {
    ChainSpec s;
    s.n_sites = n_sites;
    s.lambda = lambda;
    s.pattern = CouplingPattern::MatryoshkaAlternating;
    s.fields_b.assign(static_cast<std::size_t>(std::max(n_sites, 0)), 0.0);
    s.validate();
    return s;
  }

  static ChainSpec perfect_transfer(int n_sites, double lambda = 1.0) {
    ChainSpec s = matryoshka(n_sites, lambda);
    s.pattern = CouplingPattern::PerfectTransfer;
    return s;
  }

  static ChainSpec custom(std::vector<double> j_x, std::vector<double> j_y) {
    ChainSpec s;
    s.n_sites = static_cast<int>(j_x.size()) + 1;
    s.pattern = CouplingPattern::Custom;
    s.custom_j_x = std::move(j_x);
    s.custom_j_y = std::move(j_y);
    s.fields_b.assign(static_cast<std::size_t>(s.n_sites), 0.0);
    s.validate();
    return s;
  }

  ChainSpec with_fields(std::vector<double> b) const {
    ChainSpec s = *this;
    s.fields_b = std::move(b);
    s.validate();
    return s;
  }

  void validate() const {
    require_odd_chain(n_sites);
    if (pattern != CouplingPattern::Custom && !(lambda > 0.0))
      throw ValidationError("lambda must be positive for built-in patterns");
    if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
    const auto bonds = static_cast<std::size_t>(n_sites - 1);
    if (pattern == CouplingPattern::Custom) {
      if (custom_j_x.size() != bonds || custom_j_y.size() != bonds)
        throw DimensionError("custom couplings need " + std::to_string(bonds) + " entries each, got j_x=" +
                             std::to_string(custom_j_x.size()) + ", j_y=" + std::to_string(custom_j_y.size()));
    }
    if (fields_b.size() != static_cast<std::size_t>(n_sites))
      throw DimensionError("b_fields needs " + std::to_string(n_sites) + " entries, got " +
                           std::to_string(fields_b.size()));
    for (double v : custom_j_x) if (!std::isfinite(v)) throw ValidationError("non-finite coupling");
    for (double v : custom_j_y) if (!std::isfinite(v)) throw ValidationError("non-finite coupling");
    for (double v : fields_b) if (!std::isfinite(v)) throw ValidationError("non-finite field");
  }

  BondCouplings couplings() const {
    validate();
    switch (pattern) {
      case CouplingPattern::PerfectTransfer: {
        auto j = perfect_transfer_couplings(n_sites, lambda);
        return {j, j};
      }
      case CouplingPattern::MatryoshkaAlternating: return matryoshka_couplings(n_sites, lambda);
      case CouplingPattern::Custom: return {custom_j_x, custom_j_y};
    }
    return {};
  }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

// Time at which the alternating pattern produces the matryoshka state for
// H = sum J (XX or YY) with couplings lambda*sqrt(i(N-i)).
inline double t_star(double lambda) { return std::numbers::pi / (4.0 * lambda); }

// The transfer time quoted for the perfect-transfer pattern, pi / lambda.
// Under this Hamiltonian normalization it is four matryoshka times.
inline double quoted_transfer_time(double lambda) { return std::numbers::pi / lambda; }

struct HamiltonianTerm {
  double weight;
  PauliString string;
};

struct HamiltonianTerms {
  int n_sites = 0;
  std::vector<HamiltonianTerm> terms;

  std::size_t size() const noexcept { return terms.size(); }
};

// Nonzero terms ordered by site: XX(i,i+1), YY(i,i+1), Z_i for i = 1..N.
inline HamiltonianTerms build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const auto c = spec.couplings();
  const int n = spec.n_sites;
  HamiltonianTerms h{n, {}};
  for (int i = 1; i <= n; ++i) {
    if (i < n) {
      const double jx = c.j_x[i - 1];
      const double jy = c.j_y[i - 1];
      if (jx != 0.0)
        h.terms.push_back({jx, PauliString::pair(n, SiteIndex(i), PauliLetter::X, SiteIndex(i + 1), PauliLetter::X)});
      if (jy != 0.0)
        h.terms.push_back({jy, PauliString::pair(n, SiteIndex(i), PauliLetter::Y, SiteIndex(i + 1), PauliLetter::Y)});
    }
    const double b = spec.fields_b[i - 1];
    if (b != 0.0) h.terms.push_back({b, PauliString::single(n, SiteIndex(i), PauliLetter::Z)});
  }
  return h;
}

// H|v> without materializing H.
inline Eigen::VectorXcd apply_hamiltonian(const HamiltonianTerms& h, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (const auto& term : h.terms) accumulate_pauli(term.string, term.weight, v, out);
  return out;
}

inline Eigen::MatrixXcd dense_matrix(const PauliString& p) {
  const Eigen::Index dim = Eigen::Index{1} << p.n_sites();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    e.setZero();
    e(col) = 1.0;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    accumulate_pauli(p, 1.0, e, out);
    m.col(col) = out;
  }
  return m;
}

inline Eigen::MatrixXcd dense_matrix(const HamiltonianTerms& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : h.terms) m += term.weight * dense_matrix(term.string);
  return m;
}

// Frobenius norm of [H, sum_i Z_i]; zero iff total Z magnetization is conserved.
inline double total_z_commutator_norm(const HamiltonianTerms& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites;
  Eigen::VectorXd total_z(dim);
  for (Eigen::Index b = 0; b < dim; ++b)
    total_z(b) = h.n_sites - 2.0 * std::popcount(static_cast<std::uint64_t>(b));
  const Eigen::MatrixXcd hm = dense_matrix(h);
  // [H, D]_{ab} = H_{ab} (d_b - d_a) for diagonal D.
  double sum = 0.0;
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) sum += std::norm(hm(a, b) * (total_z(b) - total_z(a)));
  return std::sqrt(sum);
}

inline double energy(const HamiltonianTerms& h, const StateVector& v) {
  if (h.n_sites != v.n_sites()) throw DimensionError("energy: site count mismatch");
  return v.amplitudes().dot(apply_hamiltonian(h, v.amplitudes())).real();
}

}  // namespace matryoshka
