#include "fatou/measure.hpp"

#include <algorithm>
#include <cmath>

namespace fatou {

namespace {

double piece_mass(const Piece& p) {
  if (p.const_density) return *p.const_density * (p.hi - p.lo);
  if (p.density.antiderivative) {
    const auto& anti = *p.density.antiderivative;
    return anti(p.hi) - anti(p.lo);
  }
  // Composite Simpson fallback; densities are finite by validation.
  constexpr int kPanels = 2048;
  double h = (p.hi - p.lo) / (2.0 * kPanels);
  double sum = p.density(Point(p.lo)).raw() + p.density(Point(p.hi)).raw();
  for (int i = 1; i < 2 * kPanels; ++i) {
    double x = p.lo + h * i;
    sum += (i % 2 == 1 ? 4.0 : 2.0) * p.density(Point(x)).raw();
  }
  return sum * h / 3.0;
}

void validate_piece(const Piece& p) {
  if (!(p.lo < p.hi)) throw MeasureError("density piece needs lo < hi");
  if (p.const_density) {
    if (*p.const_density < 0) throw MeasureError("negative density");
  } else {
    if (!p.density.eval) throw MeasureError("density piece without density");
    constexpr int kProbes = 256;
    for (int i = 0; i <= kProbes; ++i) {
      double x = p.lo + (p.hi - p.lo) * i / kProbes;
      ExtendedReal v = p.density(Point(x));
      if (!v.is_finite()) throw MeasureError("density not finite at " + format_double(x));
      if (v.raw() < -1e-12) throw MeasureError("negative density at " + format_double(x));
    }
  }
  // A declared antiderivative must match the density even when the constant path wins.
  if (p.density.antiderivative) {
    const auto& anti = *p.density.antiderivative;
    double h = (p.hi - p.lo) / 4096.0;
    for (int i = 1; i <= 32; ++i) {
      double x = p.lo + (p.hi - p.lo) * i / 33.0;
      double slope = (anti(x + h) - anti(x - h)) / (2 * h);
      double d = p.const_density ? *p.const_density : p.density(Point(x)).raw();
      double scale = std::max(1.0, std::fabs(d));
      if (std::fabs(slope - d) > 1e-5 * scale)
        throw MeasureError("antiderivative disagrees with density near " + format_double(x));
    }
  }
}

}  // namespace

Measure::Measure(Space space, std::vector<Atom> atoms, std::vector<Piece> pieces)
    : space_(std::move(space)) {
  for (auto& a : atoms) {
    if (!(a.weight >= 0)) throw MeasureError("negative atom weight");
    if (!space_.contains(a.location))
      throw MeasureError("atom at " + a.location.to_string() + " outside the space");
    bool merged = false;
    for (auto& existing : atoms_) {
      if (existing.location.same_location(a.location)) {
        existing.weight += a.weight;
        merged = true;
        break;
      }
    }
    if (!merged) atoms_.push_back(a);
  }
  for (auto& p : pieces) {
    if (space_.is_countable()) throw MeasureError("density piece on a countable space");
    if (p.lo < space_.lo() || p.hi > space_.hi())
      throw MeasureError("density piece leaves the space");
    validate_piece(p);
    Piece filled = p;
    filled.mass = piece_mass(p);
    pieces_.push_back(std::move(filled));
  }
  total_mass_ = 0;
  for (const auto& a : atoms_) total_mass_ += a.weight;
  for (const auto& p : pieces_) total_mass_ += p.mass;
  if (std::fabs(total_mass_ - 1.0) > 1e-12)
    throw MeasureError("total mass " + format_double(total_mass_) + " is not 1");
}

Measure Measure::dirac(const Space& space, Point at) {
  return Measure(space, {Atom{std::move(at), 1.0}}, {});
}

Measure escaping_spike_measure(int n) {
  if (n < 1) throw MeasureError("index must be positive");
  double rn = std::sqrt(static_cast<double>(n));
  Piece spike;
  spike.lo = 1.0 / (2.0 * n);
  spike.hi = 1.0 / n;
  spike.const_density = rn;
  Piece body;
  body.lo = 0.5;
  body.hi = 1.0;
  body.const_density = 2.0 - 1.0 / rn;
  return Measure(Space::interval(0, 1, false, true), {}, {spike, body});
}

Measure escaping_spike_limit() {
  Piece body;
  body.lo = 0.5;
  body.hi = 1.0;
  body.const_density = 2.0;
  return Measure(Space::interval(0, 1, false, true), {}, {body});
}

Measure mix(const std::vector<std::pair<double, Measure>>& components) {
  if (components.empty()) throw MeasureError("empty mixture");
  const Space& space = components.front().second.space();
  double total = 0;
  std::vector<Atom> atoms;
  std::vector<Piece> pieces;
  for (const auto& [w, m] : components) {
    if (!(w >= 0)) throw MeasureError("negative mixture weight");
    if (!m.space().same_as(space)) throw MeasureError("mixture components live on different spaces");
    total += w;
    for (const auto& a : m.atoms()) atoms.push_back(Atom{a.location, w * a.weight});
    for (const auto& p : m.pieces()) {
      Piece scaled = p;
      if (p.const_density) {
        scaled.const_density = w * *p.const_density;
      } else {
        auto base = p.density.eval;
        double weight = w;
        scaled.density.eval = [base, weight](const Point& x) {
          return scale(weight, base(x));
        };
        if (p.density.antiderivative) {
          auto anti = *p.density.antiderivative;
          scaled.density.antiderivative = [anti, weight](double x) { return weight * anti(x); };
        }
        scaled.density.continuous = p.density.continuous;
      }
      pieces.push_back(std::move(scaled));
    }
  }
  if (std::fabs(total - 1.0) > 1e-12) throw MeasureError("mixture weights must sum to 1");
  return Measure(space, std::move(atoms), std::move(pieces));
}

}  // namespace fatou
