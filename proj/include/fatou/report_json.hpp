#pragma once

#include <json.hpp>

#include "fatou/inequality.hpp"

namespace fatou {

using json = nlohmann::ordered_json;

// Extended reals serialize as numbers, with the infinities as the strings
// "-inf" / "inf".  Key order is fixed, so equal inputs give byte-equal dumps.
json to_json(const ExtendedReal& v);
json to_json(const Bracket& b);
json to_json(const IntegralValue& v);
json to_json(const HypothesisDetail& h);
json to_json(const InequalityReport& r);
json to_json(const ConvergenceReport& r);
json to_json(const EquivalenceReport& r);
json to_json(const StepReport& s);

}  // namespace fatou
