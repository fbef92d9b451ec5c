#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "pauli.hpp"
#include "state.hpp"

namespace matryoshka {

struct EigenDecomposition {};

struct KrylovLanczos {
  double tolerance = 1e-10;
  int max_subspace = 40;
};

using PropagationMethod = std::variant<EigenDecomposition, KrylovLanczos>;

inline constexpr int kMaxDenseSites = 12;
inline constexpr int kMaxKrylovSites = 20;
inline constexpr int kMaxHeisenbergSites = 8;
inline constexpr int kMaxExhaustiveDecomposeSites = 5;

inline PropagationMethod default_method(int n_sites) {
  if (n_sites <= kMaxDenseSites) return EigenDecomposition{};
  return KrylovLanczos{};
}

// Exact evolution exp(-iHt) for a fixed Hamiltonian.
//
// Construction with EigenDecomposition diagonalizes H once; evolve() is const
// and only reads the cached spectrum, so one Propagator may be shared across
// threads.
class Propagator {
 public:
  explicit Propagator(HamiltonianTerms h) : Propagator(h, default_method(h.n_sites)) {}

  Propagator(HamiltonianTerms h, PropagationMethod method) : h_(std::move(h)), method_(method) {
    if (h_.n_sites < 1) throw ValidationError("propagator needs a non-empty chain");
    if (std::holds_alternative<EigenDecomposition>(method_)) {
      if (h_.n_sites > kMaxDenseSites)
        throw DimensionError("eigendecomposition limited to N <= " + std::to_string(kMaxDenseSites) +
                             ", got N = " + std::to_string(h_.n_sites));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h_));
      if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian diagonalization failed");
      spectrum_ = std::make_shared<const Spectrum>(Spectrum{es.eigenvalues(), es.eigenvectors()});
    } else {
      const auto& k = std::get<KrylovLanczos>(method_);
      if (h_.n_sites > kMaxKrylovSites)
        throw DimensionError("Krylov propagation limited to N <= " + std::to_string(kMaxKrylovSites));
      if (!(k.tolerance >= 0.0) || k.max_subspace < 2)
        throw ValidationError("Krylov needs tolerance >= 0 and max_subspace >= 2");
    }
  }

  const HamiltonianTerms& hamiltonian() const noexcept { return h_; }
  const PropagationMethod& method() const noexcept { return method_; }
  int n_sites() const noexcept { return h_.n_sites; }

  StateVector evolve(const StateVector& v, double t) const {
    if (v.n_sites() != h_.n_sites)
      throw DimensionError("evolve: state has " + std::to_string(v.n_sites()) + " sites, Hamiltonian has " +
                           std::to_string(h_.n_sites));
    if (t == 0.0) return v;
    Eigen::VectorXcd out = spectrum_ ? evolve_spectral(v.amplitudes(), t)
                                     : evolve_krylov(v.amplitudes(), t, std::get<KrylovLanczos>(method_));
    return StateVector(v.n_sites(), std::move(out));
  }

  StateVector evolve_until_revival(const StateVector& v, double t_star) const { return evolve(v, t_star); }

  // Dense exp(-iHt); eigendecomposition mode only.
  Eigen::MatrixXcd unitary(double t) const {
    if (!spectrum_) throw ValidationError("unitary() requires the eigendecomposition method");
    const Eigen::VectorXcd phases = phase_factors(t);
    return spectrum_->vectors * phases.asDiagonal() * spectrum_->vectors.adjoint();
  }

 private:
  struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
  };

  Eigen::VectorXcd phase_factors(double t) const {
    Eigen::VectorXcd phases(spectrum_->values.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -spectrum_->values(k) * t);
    return phases;
  }

  Eigen::VectorXcd evolve_spectral(const Eigen::VectorXcd& v, double t) const {
    Eigen::VectorXcd c = spectrum_->vectors.adjoint() * v;
    c = c.cwiseProduct(phase_factors(t));
    return spectrum_->vectors * c;
  }

  // Lanczos projection with adaptive step size. Each accepted step satisfies
  // the a-posteriori estimate beta_m |[exp(-iT dt) e1]_m| <= tol * |dt| / |t|.
  Eigen::VectorXcd evolve_krylov(const Eigen::VectorXcd& v0, double t, const KrylovLanczos& opts) const {
    constexpr int kMaxSteps = 100000;
    const double total = std::abs(t);
    const double direction = t > 0 ? 1.0 : -1.0;
    const double min_step = total * 1e-12;
    const double norm0 = v0.norm();
    Eigen::VectorXcd w = v0 / norm0;
    double done = 0.0;
    double step = total;
    const Eigen::Index dim = w.size();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.max_subspace, dim));

    Eigen::MatrixXcd basis(dim, m_max);
    for (int steps = 0; done < total; ++steps) {
      if (steps >= kMaxSteps) throw ConvergenceError("Krylov propagation exceeded step limit");
      step = std::min(step, total - done);

      // Lanczos with full reorthogonalization.
      std::vector<double> alpha;
      std::vector<double> beta;
      basis.col(0) = w;
      int m = 0;
      double residual = 0.0;
      for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXcd u = apply_hamiltonian(h_, basis.col(j));
        const double a = basis.col(j).dot(u).real();
        alpha.push_back(a);
        u -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * u);
        u -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * u);
        const double b = u.norm();
        m = j + 1;
        residual = b;
        if (b < 1e-13) {
          residual = 0.0;  // invariant subspace: projection is exact
          break;
        }
        if (j + 1 < m_max) {
          beta.push_back(b);
          basis.col(j + 1) = u / b;
        }
      }

      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
      for (int j = 0; j < m; ++j) tri(j, j) = alpha[j];
      for (int j = 0; j + 1 < m; ++j) tri(j, j + 1) = tri(j + 1, j) = beta[j];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);

      Eigen::VectorXcd coeffs;
      while (true) {
        const double dt = direction * step;
        Eigen::VectorXcd phased(m);
        for (int k = 0; k < m; ++k) phased(k) = std::polar(1.0, -es.eigenvalues()(k) * dt) * es.eigenvectors()(0, k);
        coeffs = es.eigenvectors().cast<cplx>() * phased;
        const double err = residual * std::abs(coeffs(m - 1));
        if (err <= opts.tolerance * step / total) break;
        step *= 0.5;
        if (step < min_step)
          throw ConvergenceError("Krylov propagation did not reach tolerance " + std::to_string(opts.tolerance) +
                                 " with subspace " + std::to_string(m_max));
      }
      w = basis.leftCols(m) * coeffs;
      w.normalize();
      done += step;
      step *= 2.0;
    }
    return w * norm0;
  }

  HamiltonianTerms h_;
  PropagationMethod method_;
  std::shared_ptr<const Spectrum> spectrum_;
};

inline StateVector evolve(const Propagator& p, const StateVector& v, double t) { return p.evolve(v, t); }

inline StateVector evolve_until_revival(const Propagator& p, const StateVector& v, double t_star) {
  return p.evolve_until_revival(v, t_star);
}

struct PauliComponent {
  cplx coefficient;
  PauliString string;
};

struct HeisenbergOperator {
  Eigen::MatrixXcd matrix;
  // Components along Hermitian (phase +1) letter strings.
  std::vector<PauliComponent> decomposition;
};

// tr(L M) / 2^N for the letters-only string L.
inline cplx pauli_coefficient(const Eigen::MatrixXcd& m, const PauliString& p) {
  const PauliString l = p.letters_only();
  const auto dim = static_cast<std::uint64_t>(m.rows());
  const cplx base = PauliString::i_pow(l.y_count());
  cplx sum{};
  // L|b> = base (-1)^{|b&z|} |b^x>, so tr(L M) = sum_b <b|L M|b> = sum_b L_{b, b^x} M_{b^x, b}.
  for (std::uint64_t b = 0; b < dim; ++b) {
    const std::uint64_t c = b ^ l.x_mask();
    const double s = (std::popcount(c & l.z_mask()) & 1) ? -1.0 : 1.0;
    sum += base * s * m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(b));
  }
  return sum / static_cast<double>(dim);
}

inline std::vector<PauliString> all_z_strings(int n_sites) {
  std::vector<PauliString> out;
  out.reserve(std::size_t{1} << n_sites);
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << n_sites); ++z) out.emplace_back(n_sites, 0, z);
  return out;
}

// U(t)^dagger P U(t). Without candidates the decomposition is exhaustive over
// all 4^N strings (N <= 5) and drops coefficients below 1e-12; with
// candidates every candidate is reported. For N > 5 and no candidates the
// decomposition is left empty.
inline HeisenbergOperator heisenberg_evolve(const Propagator& prop, const PauliString& p, double t,
                                            const std::optional<std::vector<PauliString>>& candidates = std::nullopt) {
  const int n = prop.n_sites();
  if (p.n_sites() != n) throw DimensionError("heisenberg_evolve: operator length mismatch");
  if (n > kMaxHeisenbergSites)
    throw DimensionError("heisenberg_evolve limited to N <= " + std::to_string(kMaxHeisenbergSites));
  const Eigen::MatrixXcd u = prop.unitary(t);
  HeisenbergOperator out;
  out.matrix = u.adjoint() * dense_matrix(p) * u;
  if (candidates) {
    for (const auto& c : *candidates) {
      if (c.n_sites() != n) throw DimensionError("candidate string length mismatch");
      out.decomposition.push_back({pauli_coefficient(out.matrix, c), c.letters_only()});
    }
  } else if (n <= kMaxExhaustiveDecomposeSites) {
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < count; ++x)
      for (std::uint64_t z = 0; z < count; ++z) {
        PauliString s(n, x, z);
        const cplx c = pauli_coefficient(out.matrix, s);
        if (std::abs(c) > 1e-12) out.decomposition.push_back({c, s});
      }
  }
  return out;
}

inline HeisenbergOperator heisenberg_evolve(const HamiltonianTerms& h, const PauliString& p, double t,
                                            const std::optional<std::vector<PauliString>>& candidates = std::nullopt) {
  if (h.n_sites > kMaxHeisenbergSites)
    throw DimensionError("heisenberg_evolve limited to N <= " + std::to_string(kMaxHeisenbergSites));
  return heisenberg_evolve(Propagator(h, EigenDecomposition{}), p, t, candidates);
}

}  // namespace matryoshka
