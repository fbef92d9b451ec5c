#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace matryoshka {

inline constexpr int kMaxSites = 30;

// 1-based chain site label. Site k lives at bit k-1 of a basis index.
class SiteIndex {
 public:
  constexpr explicit SiteIndex(int value) : value_(value) {}

  constexpr int value() const noexcept { return value_; }
  constexpr int bit() const noexcept { return value_ - 1; }
  constexpr std::uint64_t mask() const noexcept { return std::uint64_t{1} << bit(); }

  void check(int n_sites) const {
    if (value_ < 1 || value_ > n_sites)
      throw ValidationError("site " + std::to_string(value_) + " outside [1, " +
                            std::to_string(n_sites) + "]");
  }

  friend constexpr bool operator==(SiteIndex, SiteIndex) = default;
  friend constexpr auto operator<=>(SiteIndex, SiteIndex) = default;

 private:
  int value_;
};

enum class PauliLetter : std::uint8_t { I, X, Y, Z };

// Phase i^k times a tensor product of single-site letters.
//
// Letters are stored symplectically: X-part and Z-part bitmasks, with Y
// represented by both bits set. The letter operator on a site is the
// ordinary Pauli matrix, so a stored (x, z) pair means i^{|x&z|} X^x Z^z.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(int n_sites) : n_sites_(n_sites) {
    if (n_sites < 1 || n_sites > kMaxSites)
      throw ValidationError("Pauli string length must be in [1, " + std::to_string(kMaxSites) + "]");
  }

  PauliString(int n_sites, std::uint64_t x_mask, std::uint64_t z_mask, int phase_exponent = 0)
      : PauliString(n_sites) {
    const std::uint64_t all = full_mask();
    if ((x_mask | z_mask) & ~all) throw ValidationError("Pauli mask exceeds string length");
    x_ = x_mask;
    z_ = z_mask;
    phase_ = static_cast<std::uint8_t>(((phase_exponent % 4) + 4) % 4);
  }

  static PauliString identity(int n_sites) { return PauliString(n_sites); }

  static PauliString single(int n_sites, SiteIndex site, PauliLetter letter) {
    PauliString p(n_sites);
    p.set(site, letter);
    return p;
  }

  static PauliString pair(int n_sites, SiteIndex a, PauliLetter la, SiteIndex b, PauliLetter lb) {
    if (a == b) throw ValidationError("pair operator needs two distinct sites");
    PauliString p(n_sites);
    p.set(a, la);
    p.set(b, lb);
    return p;
  }

  // Dense letters, character j acting on site j+1: "XIZ" = X1 Z3.
  // An optional leading sign token ("+", "-", "+i", "-i", "i") sets the phase.
  static PauliString from_letters(std::string_view text) {
    int phase = 0;
    if (text.starts_with("-i")) {
      phase = 3;
      text.remove_prefix(2);
    } else if (text.starts_with("+i")) {
      phase = 1;
      text.remove_prefix(2);
    } else if (text.starts_with("i")) {
      phase = 1;
      text.remove_prefix(1);
    } else if (text.starts_with("-")) {
      phase = 2;
      text.remove_prefix(1);
    } else if (text.starts_with("+")) {
      text.remove_prefix(1);
    }
    PauliString p(static_cast<int>(text.size()));
    for (std::size_t j = 0; j < text.size(); ++j) {
      PauliLetter letter;
      switch (text[j]) {
        case 'I': letter = PauliLetter::I; break;
        case 'X': letter = PauliLetter::X; break;
        case 'Y': letter = PauliLetter::Y; break;
        case 'Z': letter = PauliLetter::Z; break;
        default: throw ValidationError(std::string("unknown Pauli letter '") + text[j] + "'");
      }
      p.set(SiteIndex(static_cast<int>(j) + 1), letter);
    }
    p.phase_ = static_cast<std::uint8_t>(phase);
    return p;
  }

  int n_sites() const noexcept { return n_sites_; }
  std::uint64_t x_mask() const noexcept { return x_; }
  std::uint64_t z_mask() const noexcept { return z_; }
  // Exponent k of the overall phase i^k.
  int phase_exponent() const noexcept { return phase_; }
  std::complex<double> phase() const noexcept { return i_pow(phase_); }

  PauliLetter letter(SiteIndex site) const {
    site.check(n_sites_);
    const bool x = x_ & site.mask();
    const bool z = z_ & site.mask();
    if (x && z) return PauliLetter::Y;
    if (x) return PauliLetter::X;
    if (z) return PauliLetter::Z;
    return PauliLetter::I;
  }

  void set(SiteIndex site, PauliLetter letter) {
    site.check(n_sites_);
    const std::uint64_t m = site.mask();
    x_ &= ~m;
    z_ &= ~m;
    if (letter == PauliLetter::X || letter == PauliLetter::Y) x_ |= m;
    if (letter == PauliLetter::Z || letter == PauliLetter::Y) z_ |= m;
  }

  PauliString with_phase(int phase_exponent) const {
    PauliString p = *this;
    p.phase_ = static_cast<std::uint8_t>(((phase_exponent % 4) + 4) % 4);
    return p;
  }

  // Letters only, phase reset to +1.
  PauliString letters_only() const { return with_phase(0); }

  PauliString negated() const { return with_phase(phase_ + 2); }

  bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }
  bool is_hermitian() const noexcept { return phase_ % 2 == 0; }
  bool is_z_only() const noexcept { return x_ == 0; }
  int weight() const noexcept { return std::popcount(x_ | z_); }
  int y_count() const noexcept { return std::popcount(x_ & z_); }

  // Sign of a Hermitian string: +1 or -1.
  int sign() const {
    if (!is_hermitian()) throw ValidationError("sign() requires a Hermitian Pauli string");
    return phase_ == 0 ? 1 : -1;
  }

  // Sparse form, e.g. "-Z1 Z2", "+iX2", "+I".
  std::string str() const {
    static constexpr const char* kPhase[] = {"+", "+i", "-", "-i"};
    std::string out = kPhase[phase_];
    if (is_identity()) return out + "I";
    bool first = true;
    for (int s = 1; s <= n_sites_; ++s) {
      const PauliLetter l = letter(SiteIndex(s));
      if (l == PauliLetter::I) continue;
      if (!first) out += ' ';
      first = false;
      out += "IXYZ"[static_cast<int>(l)];
      out += std::to_string(s);
    }
    return out;
  }

  // Dense letters with sign prefix, the inverse of from_letters.
  std::string dense_str() const {
    static constexpr const char* kPhase[] = {"+", "+i", "-", "-i"};
    std::string out = kPhase[phase_];
    for (int s = 1; s <= n_sites_; ++s) out += "IXYZ"[static_cast<int>(letter(SiteIndex(s)))];
    return out;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

  static std::complex<double> i_pow(int k) noexcept {
    switch (((k % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

 private:
  std::uint64_t full_mask() const noexcept {
    return n_sites_ >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_sites_) - 1;
  }

  int n_sites_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  std::uint8_t phase_ = 0;
};

// Exact product P*Q with phase bookkeeping.
inline PauliString pauli_mul(const PauliString& p, const PauliString& q) {
  if (p.n_sites() != q.n_sites())
    throw DimensionError("pauli_mul: length mismatch (" + std::to_string(p.n_sites()) + " vs " +
                         std::to_string(q.n_sites()) + ")");
  // i^{yp} X^{x1} Z^{z1} i^{yq} X^{x2} Z^{z2}
  //   = i^{yp+yq} (-1)^{|z1&x2|} X^{x1^x2} Z^{z1^z2}
  //   = i^{yp+yq+2|z1&x2|-yr} L_r
  const std::uint64_t x = p.x_mask() ^ q.x_mask();
  const std::uint64_t z = p.z_mask() ^ q.z_mask();
  const int yr = std::popcount(x & z);
  const int k = p.phase_exponent() + q.phase_exponent() + p.y_count() + q.y_count() +
                2 * std::popcount(p.z_mask() & q.x_mask()) - yr;
  return PauliString(p.n_sites(), x, z, k);
}

inline PauliString operator*(const PauliString& p, const PauliString& q) { return pauli_mul(p, q); }

// Inverse of a Pauli string: letters are self-inverse, so only the phase flips.
inline PauliString inverse(const PauliString& p) { return p.with_phase(-p.phase_exponent()); }

}  // namespace matryoshka
