#include "fatou/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace fatou {

struct Enumeration::Map {
  std::unordered_map<Rational, int, RationalHash> index;
};

Enumeration::Enumeration(std::vector<Rational> items) : items_(std::move(items)) {
  auto map = std::make_shared<Map>();
  map->index.reserve(items_.size() * 2);
  by_value_.reserve(items_.size());
  for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
    auto [it, inserted] = map->index.emplace(items_[i], i + 1);
    if (!inserted) throw SpaceError("enumeration repeats " + items_[i].to_string());
    by_value_.emplace_back(items_[i].to_double(), i + 1);
  }
  std::sort(by_value_.begin(), by_value_.end());
  index_ = std::move(map);
}

const Rational& Enumeration::at(int i) const {
  if (i < 1 || i > size()) throw SpaceError("enumeration index out of range");
  return items_[static_cast<std::size_t>(i - 1)];
}

std::optional<int> Enumeration::index_of(const Rational& r) const {
  auto it = index_->index.find(r);
  if (it == index_->index.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Enumeration::indices_near(double center, double radius, int limit) const {
  std::vector<int> out;
  if (limit <= 0 || by_value_.empty()) return out;
  auto lo = std::lower_bound(by_value_.begin(), by_value_.end(),
                             std::make_pair(center - radius, 0));
  auto hi = std::upper_bound(by_value_.begin(), by_value_.end(),
                             std::make_pair(center + radius, INT32_MAX));
  std::vector<std::pair<double, int>> hits(lo, hi);
  std::stable_sort(hits.begin(), hits.end(), [center](const auto& a, const auto& b) {
    return std::fabs(a.first - center) < std::fabs(b.first - center);
  });
  for (const auto& [v, idx] : hits) {
    out.push_back(idx);
    if (static_cast<int>(out.size()) >= limit) break;
  }
  return out;
}

std::vector<Rational> calkin_wilf_unit_prefix(int count) {
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(count));
  // Walk the full positive-rational sequence a_{k+1} = 1/(2*floor(a_k) - a_k + 1)
  // starting at 1, keep entries lying in (0, 1].
  Rational a(1);
  while (static_cast<int>(out.size()) < count) {
    if (a.num() > 0 && a <= Rational(1)) out.push_back(a);
    Rational next_den = Rational(2 * a.floor()) - a + Rational(1);
    a = Rational(1) / next_den;
  }
  return out;
}

Space Space::interval(double lo, double hi, bool lo_closed, bool hi_closed) {
  if (!(lo < hi)) throw SpaceError("interval needs lo < hi");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw SpaceError("interval ends must be finite");
  Space s;
  s.kind_ = Kind::interval;
  s.lo_ = lo;
  s.hi_ = hi;
  s.lo_closed_ = lo_closed;
  s.hi_closed_ = hi_closed;
  return s;
}

namespace {
constexpr int kEnumerationPrefix = 32768;

std::shared_ptr<const Enumeration> unit_rationals() {
  static std::shared_ptr<const Enumeration> cached =
      std::make_shared<const Enumeration>(calkin_wilf_unit_prefix(kEnumerationPrefix));
  return cached;
}
}  // namespace

Space Space::rationals01() {
  Space s;
  s.kind_ = Kind::countable;
  s.lo_ = 0;
  s.hi_ = 1;
  s.lo_closed_ = false;
  s.hi_closed_ = true;
  s.enum_ = unit_rationals();
  return s;
}

bool Space::contains(const Point& p) const {
  if (kind_ == Kind::interval) {
    if (p.value < lo_ || p.value > hi_) return false;
    if (p.value == lo_ && !lo_closed_) return false;
    if (p.value == hi_ && !hi_closed_) return false;
    return true;
  }
  if (!p.exact) return false;
  const Rational& r = *p.exact;
  return r.num() > 0 && r <= Rational(1);
}

const Enumeration& Space::enumeration() const {
  if (!enum_) throw SpaceError("space carries no enumeration");
  return *enum_;
}

bool Space::same_as(const Space& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::countable) return true;
  return lo_ == other.lo_ && hi_ == other.hi_ && lo_closed_ == other.lo_closed_ &&
         hi_closed_ == other.hi_closed_;
}

std::string Space::to_string() const {
  if (kind_ == Kind::countable) return "rationals01";
  std::ostringstream os;
  os << (lo_closed_ ? '[' : '(') << format_double(lo_) << ", " << format_double(hi_)
     << (hi_closed_ ? ']' : ')');
  return os.str();
}

}  // namespace fatou
