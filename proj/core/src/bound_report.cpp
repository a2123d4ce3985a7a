#include <cmath>
#include <cstdio>

#include "annealed/bounds.hpp"
#include "annealed/errors.hpp"

namespace annealed {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void BoundReport::set(const std::string& name, double v) {
  for (auto& [k, x] : constants)
    if (k == name) {
      x = v;
      return;
    }
  constants.emplace_back(name, v);
}

void BoundReport::assume(const std::string& name, bool ok, double witness) {
  assumptions.push_back({name, ok, witness});
}

bool BoundReport::has(const std::string& name) const {
  for (const auto& [k, x] : constants)
    if (k == name) return true;
  return false;
}

double BoundReport::constant(const std::string& name) const {
  for (const auto& [k, x] : constants)
    if (k == name) return x;
  throw PreconditionError(theorem + ": no constant named " + name);
}

double BoundReport::value() const {
  if (!applies || !has("bound")) return kInf;
  return constant("bound");
}

bool BoundReport::assumptions_hold() const {
  for (const auto& a : assumptions)
    if (!a.satisfied) return false;
  return true;
}

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

namespace {

nlohmann::json named_json(const NamedValues& vals) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : vals) j[k] = real_json(v);
  return j;
}

}  // namespace

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["theorem"] = theorem;
  j["constants"] = named_json(constants);
  j["validity"] = {{"variable", validity.variable},
                   {"empty", validity.empty},
                   {"lo", real_json(validity.lo)},
                   {"hi", real_json(validity.hi)}};
  j["applies"] = applies;
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : assumptions)
    as.push_back({{"name", a.name}, {"satisfied", a.satisfied}, {"witness", real_json(a.witness)}});
  j["assumptions"] = as;
  j["trace"] = named_json(trace);
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

std::string bound_csv_header() { return "t,lambda,theorem,applies,bound,validity_lo,validity_hi"; }

std::string bound_csv_row(double t, double lambda, const BoundReport& r) {
  std::string row = format_real(t) + "," + format_real(lambda) + "," + r.theorem + "," + (r.applies ? "1" : "0");
  row += "," + format_real(r.has("bound") ? r.constant("bound") : kInf);
  row += "," + (r.validity.empty ? std::string("") : format_real(r.validity.lo));
  row += "," + (r.validity.empty ? std::string("") : format_real(r.validity.hi));
  return row;
}

}  // namespace annealed
