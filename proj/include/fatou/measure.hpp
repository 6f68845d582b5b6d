#pragma once

#include <vector>

#include "fatou/func.hpp"
#include "fatou/space.hpp"

namespace fatou {

class MeasureError : public std::runtime_error {
 public:
  explicit MeasureError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Atom {
  Point location;
  double weight = 0;  // >= 0
};

// Absolutely continuous part on a subinterval.  const_density short-circuits
// evaluation; the density's antiderivative, when present, gives exact masses.
struct Piece {
  double lo = 0, hi = 0;
  Func density;
  std::optional<double> const_density;
  double mass = 0;  // filled in at construction
};

// Probability measure on the space: atoms plus density pieces.  Construction
// validates total mass 1 within 1e-12, nonnegative weights, density
// nonnegativity on 256 probe points per piece, and the supplied density
// antiderivatives against central differences at 32 probe points.  Atoms at
// the same location merge with summed weights.  Immutable afterwards.
class Measure {
 public:
  Measure(Space space, std::vector<Atom> atoms, std::vector<Piece> pieces);

  const Space& space() const { return space_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool purely_atomic() const { return pieces_.empty(); }
  double total_mass() const { return total_mass_; }

  static Measure dirac(const Space& space, Point at);

 private:
  Space space_;
  std::vector<Atom> atoms_;
  std::vector<Piece> pieces_;
  double total_mass_ = 0;
};

// Two-piece measure on (0, 1]: density sqrt(n) on [1/(2n), 1/n] and
// 2 - 1/sqrt(n) on [1/2, 1].  Masses 1/(2 sqrt(n)) and 1 - 1/(2 sqrt(n)).
Measure escaping_spike_measure(int n);
// Its setwise limit: density 2 on [1/2, 1].
Measure escaping_spike_limit();

// Convex combination; weights must be nonnegative and sum to 1 within 1e-12,
// and all components must live on the same space.
Measure mix(const std::vector<std::pair<double, Measure>>& components);

}  // namespace fatou
