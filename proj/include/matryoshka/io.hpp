#pragma once

// JSON views of the library's reports. Output is deterministic: object keys
// are sorted and doubles use the shortest round-trip representation.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "analysis.hpp"
#include "chain.hpp"
#include "nesting.hpp"
#include "protocols.hpp"
#include "state.hpp"

namespace matryoshka {

using json = nlohmann::json;

template <typename Vec>
json complex_vector_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v(k).real(), v(k).imag()});
  return out;
}

inline json to_json(const ChainSpec& spec) {
  const auto c = spec.couplings();
  return {{"n_sites", spec.n_sites}, {"lambda", spec.lambda}, {"pattern", pattern_name(spec.pattern)},
          {"j_x", c.j_x},           {"j_y", c.j_y},           {"b_fields", spec.fields_b}};
}

inline json to_json(const MatryoshkaSchedule& s) {
  json pairs = json::array();
  for (const auto& p : s.pairs) pairs.push_back({{"p", p.p.value()}, {"q", p.q.value()}, {"label", bell_name(p.label)}});
  return {{"n_sites", s.n_sites}, {"central_site", s.central_site.value()}, {"central_value", s.central_value},
          {"pairs", pairs}};
}

inline json to_json(const VerificationReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"p", p.p.value()},
                     {"q", p.q.value()},
                     {"label", bell_name(p.label)},
                     {"concurrence", p.concurrence},
                     {"fidelity", p.fidelity},
                     {"purity", p.purity}});
  return {{"pairs", pairs},
          {"central", {{"site", r.central_site.value()}, {"value", r.central_value}, {"purity", r.central_purity},
                       {"z", r.central_z}}},
          {"global_fidelity", r.global_fidelity},
          {"is_matryoshka", r.is_matryoshka()}};
}

inline json to_json(const StateVector& v) {
  return {{"n_sites", v.n_sites()}, {"amplitudes", complex_vector_json(v.amplitudes())}};
}

inline json to_json(const std::vector<FluxMatch>& matches) {
  json out = json::array();
  for (const auto& m : matches)
    out.push_back({{"i", m.shell},
                   {"operator", pair_operator_name(m.kind)},
                   {"matched", m.matched.str()},
                   {"coefficient", m.coefficient},
                   {"max_other", m.max_other},
                   {"residual", m.residual},
                   {"is_match", m.is_match},
                   {"predicted_sign", m.predicted_sign},
                   {"sign_agrees", m.matched.sign() == m.predicted_sign}});
  return out;
}

inline json to_json(const ConveyorRecord& r) {
  return {{"round", r.round},
          {"extracted_pair_state", complex_vector_json(r.extracted_pair_state)},
          {"extracted_label", bell_name(r.extracted_label)},
          {"label_fidelity", r.label_fidelity},
          {"extraction_concurrence", r.extraction_concurrence},
          {"pair_purity", r.pair_purity},
          {"retained_fidelity", r.retained_fidelity},
          {"post_extraction_chain_class", chain_class_name(r.post_extraction_chain_class)},
          {"internal_state_fidelity", r.internal_state_fidelity}};
}

inline json to_json(const std::vector<ConveyorRecord>& records) {
  json out = json::array();
  for (const auto& r : records) out.push_back(to_json(r));
  return out;
}

inline json to_json(const GhzResult& g) { return {{"ghz_fidelity", g.fidelity}, {"relative_phase", g.relative_phase}}; }

// Per-slice summary; runtimes are left out so identical inputs give identical files.
inline json sweep_summary_json(const std::vector<SweepResult>& results) {
  json slices = json::array();
  for (const auto& r : results)
    slices.push_back({{"b3_ratio", r.b3_ratio},
                      {"points", r.grid.size()},
                      {"min_fidelity", r.min_fidelity},
                      {"mean_fidelity", r.mean_fidelity}});
  return slices;
}

}  // namespace matryoshka
