#include "fatou/report_json.hpp"

namespace fatou {

namespace {

const char* diverged_name(DivergedPart d) {
  switch (d) {
    case DivergedPart::none: return "none";
    case DivergedPart::positive: return "positive";
    case DivergedPart::negative: return "negative";
    case DivergedPart::both: return "both";
  }
  return "none";
}

const char* verdict_name(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::consistent: return "consistent";
    case ConvergenceVerdict::falsified: return "falsified";
    case ConvergenceVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace

json to_json(const ExtendedReal& v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  return v.raw();
}

json to_json(const Bracket& b) {
  json j;
  j["lo"] = to_json(b.lo);
  j["hi"] = to_json(b.hi);
  return j;
}

json to_json(const IntegralValue& v) {
  json j;
  j["value"] = to_json(v.value);
  j["bracket"] = to_json(v.bracket);
  j["defined"] = v.defined;
  j["diverged"] = diverged_name(v.diverged);
  j["heuristic"] = v.heuristic;
  return j;
}

json to_json(const HypothesisDetail& h) {
  json j;
  j["lhs"] = to_json(h.lhs);
  j["rhs"] = to_json(h.rhs);
  j["ok"] = h.ok;
  j["reason"] = h.reason;
  return j;
}

json to_json(const InequalityReport& r) {
  json j;
  j["inequality"] = to_string(r.inequality);
  j["verdict"] = to_string(r.verdict);
  j["lhs"] = to_json(r.lhs);
  j["rhs"] = to_json(r.rhs);
  j["margin"] = to_json(r.margin);
  j["lhs_lower_is_declared"] = r.lhs_lower_is_declared;
  j["hypothesis"] = r.hypothesis ? to_json(*r.hypothesis) : json(nullptr);
  j["reason"] = r.reason;
  json trace = json::array();
  for (const auto& [n, bracket] : r.rhs_trace) {
    json row;
    row["n"] = n;
    row["bracket"] = to_json(bracket);
    trace.push_back(row);
  }
  j["rhs_trace"] = trace;
  return j;
}

json to_json(const ConvergenceReport& r) {
  json j;
  j["mode"] = r.mode == ConvergenceReport::Mode::weak ? "weak" : "setwise";
  j["verdict"] = verdict_name(r.verdict);
  j["witness"] = r.witness ? json(*r.witness) : json(nullptr);
  json members = json::array();
  for (const FunctionDiag& d : r.per_function) {
    json m;
    m["label"] = d.label;
    m["final_gap"] = d.final_gap;
    m["slope"] = d.slope;
    m["verdict"] = verdict_name(d.verdict);
    json gaps = json::array();
    for (const auto& [n, gap] : d.gaps) {
      json row;
      row["n"] = n;
      row["gap"] = gap;
      gaps.push_back(row);
    }
    m["gaps"] = gaps;
    members.push_back(m);
  }
  j["per_function"] = members;
  return j;
}

json to_json(const EquivalenceReport& r) {
  json j;
  j["condition"] = to_json(r.condition);
  j["equality"] = to_json(r.equality);
  j["agree"] = r.agree;
  j["common_value"] = to_json(r.common_value);
  j["note"] = r.note;
  return j;
}

json to_json(const StepReport& s) {
  json j;
  j["name"] = s.name;
  j["lhs"] = to_json(s.lhs);
  j["rhs"] = to_json(s.rhs);
  j["verdict"] = to_string(s.verdict);
  j["note"] = s.note;
  return j;
}

}  // namespace fatou
