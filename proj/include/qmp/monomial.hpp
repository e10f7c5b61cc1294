#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace qmp {

/// Exponent pair (i, j) of the monomial x^i y^j.
struct Monomial {
  int i = 0;
  int j = 0;

  constexpr int degree() const noexcept { return i + j; }
  constexpr Monomial operator+(Monomial o) const noexcept { return {i + o.i, j + o.j}; }
  auto operator<=>(const Monomial&) const = default;
};

/// Number of monomials of total degree <= degree.
constexpr std::size_t monomial_count(int degree) noexcept {
  return degree < 0 ? 0 : static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
}

// Graded lexicographic: 1, X, Y, X^2, XY, Y^2, X^3, X^2Y, ...
constexpr std::size_t monomial_index(Monomial m) noexcept {
  const int d = m.degree();
  return static_cast<std::size_t>(d * (d + 1) / 2 + m.j);
}

Monomial monomial_at(std::size_t index);

std::vector<Monomial> monomials_up_to(int degree);

/// Column label in the usual moment-matrix notation ("1", "X", "XY", "X^2Y", ...).
std::string label(Monomial m);

/// Two-digit exponent key ("00", "31", ...) used by the document format.
std::string exponent_key(Monomial m);

}  // namespace qmp
