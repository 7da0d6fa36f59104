#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "qbattery/common.hpp"

namespace qbattery {

enum class Boundary { open, periodic };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// Tensor product of single-site Pauli operators on a chain of up to 64
/// sites. Site 0 is the leftmost tensor factor, which is the most
/// significant bit of a computational-basis index.
class PauliString {
public:
  static constexpr int max_sites = 64;

  PauliString() = default;
  /// Builds the string from labels in {I,X,Y,Z}, one per site.
  explicit PauliString(std::string_view labels);

  static PauliString identity(int sites);

  /// Copy with `label` placed on `site`.
  PauliString with(int site, char label) const;

  int sites() const { return sites_; }
  char label(int site) const;
  std::string to_string() const;

  /// Bit (sites-1-j) is set when site j carries X or Y.
  std::uint64_t x_mask() const { return x_; }
  /// Bit (sites-1-j) is set when site j carries Z or Y.
  std::uint64_t z_mask() const { return z_; }
  int y_count() const;
  /// Number of non-identity factors.
  int weight() const;

  auto operator<=>(const PauliString&) const = default;

private:
  std::uint64_t bit(int site) const { return std::uint64_t{1} << (sites_ - 1 - site); }

  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int sites_ = 0;
};

/// a*b = phase * string, with phase in {1, -1, i, -i}.
struct PauliProduct {
  cplx phase;
  PauliString string;
};

PauliProduct multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

/// Real-weighted sum of Pauli strings in canonical form: strings are
/// unique and no stored coefficient is zero.
class PauliStringOperator {
public:
  using TermMap = std::map<PauliString, double>;

  explicit PauliStringOperator(int sites = 0);

  int sites() const { return sites_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Adds coeff*string, merging with an existing term.
  void add(const PauliString& string, double coeff);
  void add(std::string_view labels, double coeff) { add(PauliString(labels), coeff); }

  /// Coefficient of `string`, zero when absent.
  double coefficient(const PauliString& string) const;
  double coefficient(std::string_view labels) const { return coefficient(PauliString(labels)); }

  TermMap::const_iterator begin() const { return terms_.begin(); }
  TermMap::const_iterator end() const { return terms_.end(); }

  PauliStringOperator& operator+=(const PauliStringOperator& other);
  PauliStringOperator& operator-=(const PauliStringOperator& other);
  PauliStringOperator& operator*=(double scale);

  friend PauliStringOperator operator+(PauliStringOperator a, const PauliStringOperator& b) { return a += b; }
  friend PauliStringOperator operator-(PauliStringOperator a, const PauliStringOperator& b) { return a -= b; }
  friend PauliStringOperator operator*(PauliStringOperator a, double s) { return a *= s; }
  friend PauliStringOperator operator*(double s, PauliStringOperator a) { return a *= s; }

  friend bool operator==(const PauliStringOperator&, const PauliStringOperator&) = default;

  /// Largest |coefficient| difference against `other`, over the union of strings.
  double max_coefficient_difference(const PauliStringOperator& other) const;

  std::string to_string() const;

private:
  void check_sites(int sites) const;

  int sites_;
  TermMap terms_;
};

/// Returns C such that [A, B] = i*C. C has real coefficients whenever A and
/// B do, since anticommuting Pauli strings multiply with phase +-i.
PauliStringOperator minus_i_commutator(const PauliStringOperator& a, const PauliStringOperator& b);

/// Sum over starting sites j of the translated pattern, e.g. "XZX" places
/// X on j, Z on j+1 and X on j+2. Open chains keep only placements fully
/// inside the chain; periodic chains wrap around.
PauliStringOperator site_sum(std::string_view pattern, int sites, Boundary boundary, double coeff = 1.0);

} // namespace qbattery
