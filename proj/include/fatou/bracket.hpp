#pragma once

#include <stdexcept>
#include <string>

#include "fatou/extended_real.hpp"

namespace fatou {

// Enclosure [lo, hi] for a quantity that could not be computed exactly.
// Exact values are brackets of width zero.
struct Bracket {
  ExtendedReal lo = ExtendedReal::neg_inf();
  ExtendedReal hi = ExtendedReal::pos_inf();

  Bracket() = default;
  Bracket(ExtendedReal l, ExtendedReal h) : lo(l), hi(h) {
    if (hi < lo) throw std::invalid_argument("Bracket: lo > hi");
  }
  static Bracket exact(ExtendedReal v) { return Bracket(v, v); }
  static Bracket whole() { return Bracket(); }

  bool is_exact() const { return lo == hi; }
  bool contains(ExtendedReal v) const { return lo <= v && v <= hi; }
  std::string to_string() const { return "[" + lo.to_string() + ", " + hi.to_string() + "]"; }

  Bracket operator-() const { return Bracket(-hi, -lo); }

  // Interval sum; an undefined endpoint combination widens to the
  // corresponding infinity rather than failing.
  friend Bracket operator+(const Bracket& a, const Bracket& b) {
    auto l = try_add(a.lo, b.lo);
    auto h = try_add(a.hi, b.hi);
    return Bracket(l ? *l : ExtendedReal::neg_inf(), h ? *h : ExtendedReal::pos_inf());
  }
  friend Bracket operator-(const Bracket& a, const Bracket& b) { return a + (-b); }

  friend Bracket min(const Bracket& a, const Bracket& b) {
    return Bracket(fatou::min(a.lo, b.lo), fatou::min(a.hi, b.hi));
  }
  friend Bracket max(const Bracket& a, const Bracket& b) {
    return Bracket(fatou::max(a.lo, b.lo), fatou::max(a.hi, b.hi));
  }
  friend Bracket scale(double w, const Bracket& b) {
    if (w < 0) return Bracket(scale(w, b.hi), scale(w, b.lo));
    return Bracket(scale(w, b.lo), scale(w, b.hi));
  }
};

}  // namespace fatou
