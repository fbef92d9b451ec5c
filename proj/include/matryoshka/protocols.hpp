#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "nesting.hpp"
#include "propagator.hpp"
#include "state.hpp"

namespace matryoshka {

struct ExtractOptions {
  double epsilon_pure = 1e-6;
  // Extract even when the pair is entangled with the chain: the chain is
  // projected onto the dominant product component.
  bool force = false;
};

struct PairExtraction {
  Eigen::Vector4cd pair_state;  // local index a + 2b for |a>_1 |b>_N
  StateVector chain_after;      // sites 1 and N reset to |0>
  double purity;                // purity of the boundary pair before extraction
  double retained_fidelity;     // overlap of the factorized approximation with the input
};

// Swaps the boundary pair (1, N) into fresh |00> memory. For a pure pair the
// state factorizes exactly as |pair> x |rest>, so the swap is a factor
// replacement.
inline PairExtraction extract_pair(const StateVector& v, const ExtractOptions& opts = {}) {
  const int n = v.n_sites();
  if (n < 2) throw ValidationError("extract_pair needs at least two sites");
  const SiteIndex first(1);
  const SiteIndex last(n);
  const DensityMatrix rho = reduced_density(v, first, last);
  const double purity = rho.purity();
  if (purity < 1.0 - opts.epsilon_pure && !opts.force) throw PairNotPure(purity);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  Eigen::Vector4cd pair = es.eigenvectors().col(3);  // largest eigenvalue
  Eigen::Index arg = 0;
  pair.cwiseAbs().maxCoeff(&arg);
  pair *= std::conj(pair(arg)) / std::abs(pair(arg));

  const std::uint64_t boundary = first.mask() | last.mask();
  const std::uint64_t offsets[4] = {0, first.mask(), last.mask(), first.mask() | last.mask()};
  const auto dim = static_cast<std::uint64_t>(v.dim());
  // rest(r) = sum_a conj(pair_a) psi(a, r), placed on the |00> boundary sector.
  Eigen::VectorXcd after = Eigen::VectorXcd::Zero(v.dim());
  for (std::uint64_t r = 0; r < dim; ++r) {
    if (r & boundary) continue;
    cplx sum{};
    for (int a = 0; a < 4; ++a) sum += std::conj(pair(a)) * v[static_cast<Eigen::Index>(r | offsets[a])];
    after(static_cast<Eigen::Index>(r)) = sum;
  }
  const double retained = after.norm();
  if (retained < 1e-12) throw NumericalError("extract_pair: projected chain state vanished");
  return {pair, StateVector::normalized(n, std::move(after)), purity, std::min(1.0, retained)};
}

enum class ChainClass { MatryoshkaLike, ZBasisSeparable, Unclassified };

inline const char* chain_class_name(ChainClass c) {
  switch (c) {
    case ChainClass::MatryoshkaLike: return "matryoshka_like";
    case ChainClass::ZBasisSeparable: return "z_basis_separable";
    case ChainClass::Unclassified: return "unclassified";
  }
  return "?";
}

inline constexpr double kMatryoshkaLikeFidelity = 0.999;
inline constexpr double kSeparablePurity = 1e-8;

struct ChainClassification {
  ChainClass chain_class;
  double fidelity;  // to the matched template
};

// Classifies the internal sites 2..N-1 of a chain whose boundary was just
// reset. Z-basis product is tested first: for N = 3 the inner chain is the
// central spin alone and satisfies both descriptions.
inline ChainClassification classify_internal_chain(const StateVector& v) {
  const int n = v.n_sites();
  bool separable = true;
  for (int s = 2; s < n && separable; ++s) {
    const SiteIndex site(s);
    const double purity = reduced_density(v, site).purity();
    const double z = expectation(v, PauliString::single(n, site, PauliLetter::Z));
    separable = purity >= 1.0 - kSeparablePurity && std::abs(z) >= 1.0 - kSeparablePurity;
  }
  if (separable) return {ChainClass::ZBasisSeparable, v.amplitudes().cwiseAbs().maxCoeff()};

  const auto inner = fit_schedule(v, 2);
  const double f = state_fidelity(ideal_matryoshka_state(inner), v);
  if (f >= kMatryoshkaLikeFidelity) return {ChainClass::MatryoshkaLike, f};
  return {ChainClass::Unclassified, f};
}

struct ConveyorRecord {
  int round;
  Eigen::Vector4cd extracted_pair_state;
  BellLabel extracted_label;
  double label_fidelity;
  double extraction_concurrence;
  double pair_purity;
  double retained_fidelity;
  ChainClass post_extraction_chain_class;
  double internal_state_fidelity;
};

struct ProtocolOptions {
  // Defaults to t_star(spec.lambda).
  std::optional<double> evolution_time;
  ExtractOptions extract;
};

inline void require_alternating(const ChainSpec& spec, const char* what) {
  spec.validate();
  if (spec.pattern != CouplingPattern::MatryoshkaAlternating)
    throw ValidationError(std::string(what) + " needs the matryoshka coupling pattern");
}

// Repeats [evolve t* -> swap out the boundary pair] starting from |0..0>.
inline std::vector<ConveyorRecord> conveyor_run(const ChainSpec& spec, int rounds, const ProtocolOptions& opts = {}) {
  require_alternating(spec, "conveyor_run");
  if (rounds < 0) throw ValidationError("rounds must be non-negative");
  std::vector<ConveyorRecord> out;
  if (rounds == 0) return out;
  const Propagator prop(build_hamiltonian(spec));
  const double t = opts.evolution_time.value_or(t_star(spec.lambda));
  StateVector chain = StateVector::all_zero(spec.n_sites);
  for (int round = 1; round <= rounds; ++round) {
    chain = prop.evolve(chain, t);
    const DensityMatrix rho = reduced_density(chain, SiteIndex(1), SiteIndex(spec.n_sites));
    PairExtraction ex = extract_pair(chain, opts.extract);
    const BestBell bell = closest_bell(ex.pair_state);
    const ChainClassification cls = classify_internal_chain(ex.chain_after);
    out.push_back({round, ex.pair_state, bell.label, bell.fidelity, concurrence(rho), ex.purity,
                   ex.retained_fidelity, cls.chain_class, cls.fidelity});
    chain = std::move(ex.chain_after);
  }
  return out;
}

struct GhzResult {
  StateVector state;
  double fidelity;
  double relative_phase;  // phi in (-pi, pi]
};

// max over phi of |<(|0..0> + e^{i phi}|1..1>)/sqrt2 | psi>| = (|a0| + |a1|)/sqrt2,
// attained at phi = arg(a1) - arg(a0).
inline GhzResult ghz_fidelity(const StateVector& psi) {
  const cplx a0 = psi[0];
  const cplx a1 = psi[psi.dim() - 1];
  const double f = (std::abs(a0) + std::abs(a1)) / std::sqrt(2.0);
  double phi = 0.0;
  if (std::abs(a0) > 0.0 && std::abs(a1) > 0.0) phi = std::arg(a1 * std::conj(a0));
  if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
  return {psi, std::min(1.0, f), phi};
}

// |0..0> -> evolve t* -> Hadamard on the central site -> evolve t*.
inline GhzResult ghz_protocol(const ChainSpec& spec, const ProtocolOptions& opts = {}) {
  require_alternating(spec, "ghz_protocol");
  const Propagator prop(build_hamiltonian(spec));
  const double t = opts.evolution_time.value_or(t_star(spec.lambda));
  StateVector s = prop.evolve(StateVector::all_zero(spec.n_sites), t);
  s = gate_apply(s, central_site(spec.n_sites), hadamard());
  s = prop.evolve(s, t);
  return ghz_fidelity(s);
}

}  // namespace matryoshka
