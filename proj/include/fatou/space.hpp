#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fatou/point.hpp"

namespace fatou {

class SpaceError : public std::runtime_error {
 public:
  explicit SpaceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Materialized prefix of an injective enumeration of a countable set of
// rationals.  Immutable after construction; safe for concurrent reads.
class Enumeration {
 public:
  explicit Enumeration(std::vector<Rational> items);

  int size() const { return static_cast<int>(items_.size()); }
  const Rational& at(int i) const;                         // 1-based
  // 1-based index, or nullopt when the value is not among the materialized
  // prefix (its index, if any, then exceeds size()).
  std::optional<int> index_of(const Rational& r) const;
  // Indices of enumerated values x with |x - center| <= radius, nearest first,
  // at most `limit` of them.
  std::vector<int> indices_near(double center, double radius, int limit) const;

 private:
  std::vector<Rational> items_;
  std::vector<std::pair<double, int>> by_value_;  // sorted by double value
  struct Map;
  std::shared_ptr<const Map> index_;
};

// Subset of the real line carrying the measures: either an interval with
// open or closed ends, or a countable set given by an injective enumeration.
// The metric is |x - y| in both cases.
class Space {
 public:
  enum class Kind { interval, countable };

  static Space interval(double lo, double hi, bool lo_closed = true, bool hi_closed = true);
  // The rationals in (0, 1], ordered by the Calkin-Wilf walk over the positive
  // rationals filtered to (0, 1].  Injectivity is checked on the materialized
  // prefix at construction.
  static Space rationals01();

  Kind kind() const { return kind_; }
  bool is_interval() const { return kind_ == Kind::interval; }
  bool is_countable() const { return kind_ == Kind::countable; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool lo_closed() const { return lo_closed_; }
  bool hi_closed() const { return hi_closed_; }

  bool contains(const Point& p) const;
  const Enumeration& enumeration() const;

  bool same_as(const Space& other) const;
  std::string to_string() const;

 private:
  Kind kind_ = Kind::interval;
  double lo_ = 0, hi_ = 1;
  bool lo_closed_ = true, hi_closed_ = true;
  std::shared_ptr<const Enumeration> enum_;
};

// Calkin-Wilf sequence over the positive rationals filtered to (0, 1], first
// `count` entries.
std::vector<Rational> calkin_wilf_unit_prefix(int count);

}  // namespace fatou
