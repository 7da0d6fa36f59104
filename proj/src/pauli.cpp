#include "qbattery/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qbattery {

std::string_view to_string(Boundary b)
{
  return b == Boundary::open ? "open" : "periodic";
}

Boundary parse_boundary(std::string_view text)
{
  if (text == "open") return Boundary::open;
  if (text == "periodic") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + std::string(text) + "' (expected open or periodic)");
}

PauliString::PauliString(std::string_view labels) : sites_(static_cast<int>(labels.size()))
{
  if (sites_ > max_sites) throw std::invalid_argument("Pauli string longer than 64 sites");
  for (int j = 0; j < sites_; ++j) {
    switch (labels[static_cast<std::size_t>(j)]) {
      case 'I': break;
      case 'X': x_ |= bit(j); break;
      case 'Y': x_ |= bit(j); z_ |= bit(j); break;
      case 'Z': z_ |= bit(j); break;
      default:
        throw std::invalid_argument("invalid Pauli label '" + std::string(1, labels[static_cast<std::size_t>(j)]) +
                                    "' in \"" + std::string(labels) + "\"");
    }
  }
}

PauliString PauliString::identity(int sites)
{
  if (sites < 0 || sites > max_sites) throw std::invalid_argument("site count out of range");
  PauliString s;
  s.sites_ = sites;
  return s;
}

PauliString PauliString::with(int site, char label) const
{
  if (site < 0 || site >= sites_) throw std::out_of_range("site index out of range");
  PauliString s = *this;
  const auto b = bit(site);
  s.x_ &= ~b;
  s.z_ &= ~b;
  switch (label) {
    case 'I': break;
    case 'X': s.x_ |= b; break;
    case 'Y': s.x_ |= b; s.z_ |= b; break;
    case 'Z': s.z_ |= b; break;
    default: throw std::invalid_argument("invalid Pauli label");
  }
  return s;
}

char PauliString::label(int site) const
{
  if (site < 0 || site >= sites_) throw std::out_of_range("site index out of range");
  const bool x = (x_ & bit(site)) != 0;
  const bool z = (z_ & bit(site)) != 0;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::to_string() const
{
  std::string out(static_cast<std::size_t>(sites_), 'I');
  for (int j = 0; j < sites_; ++j) out[static_cast<std::size_t>(j)] = label(j);
  return out;
}

int PauliString::y_count() const { return std::popcount(x_ & z_); }

int PauliString::weight() const { return std::popcount(x_ | z_); }

namespace {

// phase of sigma_a * sigma_b as a power of i, labels indexed I=0 X=1 Y=2 Z=3
constexpr int kProductPower[4][4] = {
  {0, 0, 0, 0},
  {0, 0, 1, 3},  // XY = iZ, XZ = -iY
  {0, 3, 0, 1},  // YX = -iZ, YZ = iX
  {0, 1, 3, 0},  // ZX = iY, ZY = -iX
};

int label_index(char c)
{
  switch (c) {
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
    default: return 0;
  }
}

cplx i_power(int k)
{
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

} // namespace

PauliProduct multiply(const PauliString& a, const PauliString& b)
{
  if (a.sites() != b.sites()) throw std::invalid_argument("Pauli strings on different site counts");
  int power = 0;
  for (int j = 0; j < a.sites(); ++j) power += kProductPower[label_index(a.label(j))][label_index(b.label(j))];
  PauliString result = PauliString::identity(a.sites());
  // labels combine as XOR of the symplectic bits
  const std::uint64_t x = a.x_mask() ^ b.x_mask();
  const std::uint64_t z = a.z_mask() ^ b.z_mask();
  for (int j = 0; j < a.sites(); ++j) {
    const std::uint64_t m = std::uint64_t{1} << (a.sites() - 1 - j);
    const bool xs = (x & m) != 0;
    const bool zs = (z & m) != 0;
    if (xs || zs) result = result.with(j, xs && zs ? 'Y' : (xs ? 'X' : 'Z'));
  }
  return {i_power(power), result};
}

bool commutes(const PauliString& a, const PauliString& b)
{
  const int anti = std::popcount(a.x_mask() & b.z_mask()) + std::popcount(a.z_mask() & b.x_mask());
  return anti % 2 == 0;
}

PauliStringOperator::PauliStringOperator(int sites) : sites_(sites)
{
  if (sites < 0 || sites > PauliString::max_sites) throw std::invalid_argument("site count out of range");
}

void PauliStringOperator::check_sites(int sites) const
{
  if (sites != sites_) {
    throw std::invalid_argument("Pauli string on " + std::to_string(sites) + " sites added to an operator on " +
                                std::to_string(sites_) + " sites");
  }
}

void PauliStringOperator::add(const PauliString& string, double coeff)
{
  check_sites(string.sites());
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(string, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double PauliStringOperator::coefficient(const PauliString& string) const
{
  auto it = terms_.find(string);
  return it == terms_.end() ? 0.0 : it->second;
}

PauliStringOperator& PauliStringOperator::operator+=(const PauliStringOperator& other)
{
  check_sites(other.sites_);
  for (const auto& [s, c] : other.terms_) add(s, c);
  return *this;
}

PauliStringOperator& PauliStringOperator::operator-=(const PauliStringOperator& other)
{
  check_sites(other.sites_);
  for (const auto& [s, c] : other.terms_) add(s, -c);
  return *this;
}

PauliStringOperator& PauliStringOperator::operator*=(double scale)
{
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [s, c] : terms_) c *= scale;
  return *this;
}

double PauliStringOperator::max_coefficient_difference(const PauliStringOperator& other) const
{
  check_sites(other.sites_);
  double worst = 0.0;
  for (const auto& [s, c] : terms_) worst = std::max(worst, std::abs(c - other.coefficient(s)));
  for (const auto& [s, c] : other.terms_) worst = std::max(worst, std::abs(c - coefficient(s)));
  return worst;
}

std::string PauliStringOperator::to_string() const
{
  if (terms_.empty()) return "0";
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [s, c] : terms_) {
    if (!first) out << " + ";
    out << c << "*" << s.to_string();
    first = false;
  }
  return out.str();
}

PauliStringOperator minus_i_commutator(const PauliStringOperator& a, const PauliStringOperator& b)
{
  if (a.sites() != b.sites()) throw std::invalid_argument("commutator of operators on different site counts");
  PauliStringOperator out(a.sites());
  for (const auto& [sa, ca] : a) {
    for (const auto& [sb, cb] : b) {
      if (commutes(sa, sb)) continue;
      // [P, Q] = 2PQ for anticommuting strings, and PQ = (+-i) R
      const auto [phase, r] = multiply(sa, sb);
      out.add(r, 2.0 * ca * cb * phase.imag());
    }
  }
  return out;
}

PauliStringOperator site_sum(std::string_view pattern, int sites, Boundary boundary, double coeff)
{
  const int len = static_cast<int>(pattern.size());
  if (len == 0) throw std::invalid_argument("empty site pattern");
  if (len > sites) throw std::invalid_argument("site pattern longer than the chain");
  PauliStringOperator out(sites);
  const int starts = boundary == Boundary::periodic ? sites : sites - len + 1;
  for (int j = 0; j < starts; ++j) {
    PauliString s = PauliString::identity(sites);
    for (int r = 0; r < len; ++r) s = s.with((j + r) % sites, pattern[static_cast<std::size_t>(r)]);
    out.add(s, coeff);
  }
  return out;
}

} // namespace qbattery
