#pragma once

// Matryoshka states: nested Bell pairs on mirror-symmetric sites (p, N-p+1)
// around a separable central spin.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "pauli.hpp"
#include "propagator.hpp"
#include "state.hpp"

namespace matryoshka {

// Psi(+/-) = (|01> +/- |10>)/sqrt2 and Phi(+/-) = (|00> +/- |11>)/sqrt2,
// first slot = lower site index.
enum class BellLabel { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellLabel, 4> kAllBellLabels = {BellLabel::PsiPlus, BellLabel::PsiMinus,
                                                            BellLabel::PhiPlus, BellLabel::PhiMinus};

inline const char* bell_name(BellLabel l) {
  switch (l) {
    case BellLabel::PsiPlus: return "psi_plus";
    case BellLabel::PsiMinus: return "psi_minus";
    case BellLabel::PhiPlus: return "phi_plus";
    case BellLabel::PhiMinus: return "phi_minus";
  }
  return "?";
}

// Local index a + 2b for |a>_p |b>_q.
inline Eigen::Vector4cd bell_vector(BellLabel l) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (l) {
    case BellLabel::PsiPlus: return Eigen::Vector4cd(0.0, r, r, 0.0);
    case BellLabel::PsiMinus: return Eigen::Vector4cd(0.0, -r, r, 0.0);
    case BellLabel::PhiPlus: return Eigen::Vector4cd(r, 0.0, 0.0, r);
    case BellLabel::PhiMinus: return Eigen::Vector4cd(r, 0.0, 0.0, -r);
  }
  return Eigen::Vector4cd::Zero();
}

// sqrt(<B|rho|B>)
inline double bell_fidelity(const DensityMatrix& rho, BellLabel l) {
  if (rho.sites().size() != 2) throw ValidationError("bell_fidelity needs a two-site density matrix");
  const Eigen::Vector4cd b = bell_vector(l);
  return std::sqrt(std::max(0.0, b.dot(rho.matrix() * b).real()));
}

inline double bell_fidelity(const Eigen::Vector4cd& psi, BellLabel l) {
  return std::abs(bell_vector(l).dot(psi)) / psi.norm();
}

struct BestBell {
  BellLabel label;
  double fidelity;
};

template <typename PairState>
BestBell closest_bell(const PairState& s) {
  BestBell best{BellLabel::PsiPlus, -1.0};
  for (BellLabel l : kAllBellLabels) {
    const double f = bell_fidelity(s, l);
    if (f > best.fidelity) best = {l, f};
  }
  return best;
}

enum class InitialState { All0, All1 };

inline StateVector initial_state(int n_sites, InitialState init) {
  return init == InitialState::All0 ? StateVector::all_zero(n_sites) : StateVector::all_one(n_sites);
}

struct BellPair {
  SiteIndex p;
  SiteIndex q;
  BellLabel label;
};

struct MatryoshkaSchedule {
  int n_sites = 0;
  SiteIndex central_site{0};
  int central_value = 0;
  std::vector<BellPair> pairs;

  // Number of nested shells counted from the chain ends.
  std::size_t depth() const noexcept { return pairs.size(); }
};

inline SiteIndex central_site(int n_sites) { return SiteIndex((n_sites + 1) / 2); }

// Pair layout and labels from the nested-Bell formula, with the shell counts
// for odd and even p floored independently so any odd N is covered:
//   odd p = 2i+1, i = 0..floor((N-3)/4);  even p = 2i, i = 1..floor((N-1)/4).
// Odd central site: |0>_c, odd-p pairs Psi+, even-p pairs Psi-.
// Even central site: |1>_c, odd-p pairs Psi-, even-p pairs Psi+.
// Starting from all ones only the central value flips.
inline MatryoshkaSchedule bell_schedule(int n_sites, InitialState init = InitialState::All0) {
  require_odd_chain(n_sites);
  MatryoshkaSchedule s;
  s.n_sites = n_sites;
  s.central_site = central_site(n_sites);
  const bool c_odd = s.central_site.value() % 2 == 1;
  s.central_value = c_odd ? 0 : 1;
  if (init == InitialState::All1) s.central_value ^= 1;
  const BellLabel odd_label = c_odd ? BellLabel::PsiPlus : BellLabel::PsiMinus;
  const BellLabel even_label = c_odd ? BellLabel::PsiMinus : BellLabel::PsiPlus;
  for (int i = 0; i <= (n_sites - 3) / 4; ++i)
    s.pairs.push_back({SiteIndex(2 * i + 1), SiteIndex(n_sites - 2 * i), odd_label});
  for (int i = 1; i <= (n_sites - 1) / 4; ++i)
    s.pairs.push_back({SiteIndex(2 * i), SiteIndex(n_sites - 2 * i + 1), even_label});
  std::sort(s.pairs.begin(), s.pairs.end(), [](const BellPair& a, const BellPair& b) { return a.p < b.p; });
  return s;
}

inline void validate_schedule(const MatryoshkaSchedule& s) {
  require_odd_chain(s.n_sites);
  s.central_site.check(s.n_sites);
  if (s.central_value != 0 && s.central_value != 1) throw ValidationError("central value must be 0 or 1");
  std::vector<int> seen(static_cast<std::size_t>(s.n_sites) + 1, 0);
  seen[s.central_site.value()]++;
  for (const auto& pr : s.pairs) {
    pr.p.check(s.n_sites);
    pr.q.check(s.n_sites);
    if (pr.q.value() != s.n_sites - pr.p.value() + 1 || pr.p >= pr.q)
      throw ValidationError("schedule pair is not mirror-symmetric");
    seen[pr.p.value()]++;
    seen[pr.q.value()]++;
  }
  for (int k = 1; k <= s.n_sites; ++k)
    if (seen[k] > 1) throw ValidationError("schedule covers site " + std::to_string(k) + " twice");
}

// Product of the scheduled pairs and the central basis state. Sites not
// covered by the schedule (used for partial schedules) are set to |0>.
inline StateVector ideal_matryoshka_state(const MatryoshkaSchedule& s) {
  validate_schedule(s);
  const auto dim = std::uint64_t{1} << s.n_sites;
  std::uint64_t fixed_mask = s.central_site.mask();
  for (const auto& pr : s.pairs) fixed_mask |= pr.p.mask() | pr.q.mask();
  std::vector<Eigen::Vector4cd> bells;
  for (const auto& pr : s.pairs) bells.push_back(bell_vector(pr.label));

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (((b & s.central_site.mask()) != 0) != (s.central_value == 1)) continue;
    if (b & ~fixed_mask) continue;
    cplx amp = 1.0;
    for (std::size_t k = 0; k < s.pairs.size() && amp != cplx{}; ++k) {
      const int local = ((b & s.pairs[k].p.mask()) ? 1 : 0) + ((b & s.pairs[k].q.mask()) ? 2 : 0);
      amp *= bells[k](local);
    }
    v(static_cast<Eigen::Index>(b)) = amp;
  }
  return StateVector(s.n_sites, std::move(v));
}

struct PairReport {
  SiteIndex p;
  SiteIndex q;
  BellLabel label;
  double concurrence;
  double fidelity;
  double purity;
};

struct VerificationReport {
  std::vector<PairReport> pairs;
  SiteIndex central_site{0};
  int central_value = 0;
  double central_purity = 0.0;
  double central_z = 0.0;
  double global_fidelity = 0.0;

  double min_concurrence() const {
    double m = 1.0;
    for (const auto& p : pairs) m = std::min(m, p.concurrence);
    return m;
  }

  // Every pair maximally entangled and the central spin pure.
  bool is_matryoshka(double tolerance = 1e-8) const {
    return min_concurrence() >= 1.0 - tolerance && central_purity >= 1.0 - tolerance;
  }
};

inline VerificationReport verify_matryoshka(const StateVector& v, const MatryoshkaSchedule& s) {
  if (v.n_sites() != s.n_sites) throw DimensionError("verify_matryoshka: state and schedule sizes differ");
  VerificationReport r;
  for (const auto& pr : s.pairs) {
    const DensityMatrix rho = reduced_density(v, pr.p, pr.q);
    r.pairs.push_back({pr.p, pr.q, pr.label, concurrence(rho), bell_fidelity(rho, pr.label), rho.purity()});
  }
  r.central_site = s.central_site;
  r.central_value = s.central_value;
  r.central_purity = reduced_density(v, s.central_site).purity();
  r.central_z = expectation(v, PauliString::single(s.n_sites, s.central_site, PauliLetter::Z));
  r.global_fidelity = state_fidelity(ideal_matryoshka_state(s), v);
  return r;
}

// Schedule whose labels and central value best match v pair by pair. Shells
// below first_shell are left out of the pairing, so their sites are |0> in
// the template; first_shell = 2 fits the inner chain after an extraction.
inline MatryoshkaSchedule fit_schedule(const StateVector& v, int first_shell = 1) {
  const int n = v.n_sites();
  require_odd_chain(n);
  MatryoshkaSchedule s;
  s.n_sites = n;
  s.central_site = central_site(n);
  s.central_value = expectation(v, PauliString::single(n, s.central_site, PauliLetter::Z)) < 0.0 ? 1 : 0;
  for (int p = first_shell; p < s.central_site.value(); ++p) {
    const SiteIndex q(n - p + 1);
    s.pairs.push_back({SiteIndex(p), q, closest_bell(reduced_density(v, SiteIndex(p), q)).label});
  }
  return s;
}

enum class PairOperator { XX, YY };

inline const char* pair_operator_name(PairOperator k) { return k == PairOperator::XX ? "XX" : "YY"; }

struct FluxMatch {
  int shell;  // i: the pair is (i, N-i+1)
  PairOperator kind;
  PauliString matched;  // signed Z-only string
  double coefficient;
  double max_other;  // largest |coefficient| among the remaining Z strings
  double residual;   // spectral norm of evolved - matched
  bool is_match;
  int predicted_sign;  // (-1)^{(N-2i+1)/2}
};

inline constexpr double kFluxMatchThreshold = 1e-6;

inline int flux_predicted_sign(int n_sites, int shell) {
  return ((n_sites - 2 * shell + 1) / 2) % 2 == 0 ? 1 : -1;
}

inline double spectral_norm_hermitian(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Heisenberg-evolves X_i X_{N-i+1} and Y_i Y_{N-i+1} under the alternating
// pattern and projects onto all 2^N Z-strings.
inline std::vector<FluxMatch> flux_check(int n_sites, double lambda, double t) {
  require_odd_chain(n_sites);
  if (n_sites > kMaxHeisenbergSites)
    throw DimensionError("flux_check limited to N <= " + std::to_string(kMaxHeisenbergSites));
  const Propagator prop(build_hamiltonian(ChainSpec::matryoshka(n_sites, lambda)), EigenDecomposition{});
  const auto candidates = all_z_strings(n_sites);
  std::vector<FluxMatch> out;
  for (int i = 1; i <= (n_sites - 1) / 2; ++i) {
    for (PairOperator kind : {PairOperator::XX, PairOperator::YY}) {
      const PauliLetter l = kind == PairOperator::XX ? PauliLetter::X : PauliLetter::Y;
      const auto op = PauliString::pair(n_sites, SiteIndex(i), l, SiteIndex(n_sites - i + 1), l);
      const auto evolved = heisenberg_evolve(prop, op, t, candidates);

      std::size_t best = 0;
      for (std::size_t k = 1; k < evolved.decomposition.size(); ++k)
        if (std::abs(evolved.decomposition[k].coefficient) > std::abs(evolved.decomposition[best].coefficient))
          best = k;
      double max_other = 0.0;
      for (std::size_t k = 0; k < evolved.decomposition.size(); ++k)
        if (k != best) max_other = std::max(max_other, std::abs(evolved.decomposition[k].coefficient));

      const double c = evolved.decomposition[best].coefficient.real();
      PauliString matched = evolved.decomposition[best].string;
      if (c < 0) matched = matched.negated();
      const double residual = spectral_norm_hermitian(evolved.matrix - matched.phase() * dense_matrix(matched.letters_only()));
      const bool ok = std::abs(evolved.decomposition[best].coefficient) >= 1.0 - kFluxMatchThreshold &&
                      max_other <= kFluxMatchThreshold;
      out.push_back({i, kind, matched, c, max_other, residual, ok, flux_predicted_sign(n_sites, i)});
    }
  }
  return out;
}

}  // namespace matryoshka
