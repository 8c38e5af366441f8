#pragma once

// "discrimkit-1" problem files and the deterministic JSON writer used
// for reports. Parsing is strict: unknown fields are rejected by name,
// so silent typos ("gama") cannot change a run. Doubles are written
// with 17 significant digits, enough to round-trip IEEE 754 binary64.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "discrimkit/errors.hpp"
#include "discrimkit/state_set.hpp"
#include "discrimkit/strategy.hpp"

namespace discrimkit {

using json = nlohmann::ordered_json;

struct Problem {
  std::vector<std::vector<cplx>> states;
  std::vector<double> priors;  // empty means uniform
  long long copies = 1;
  bool has_strategy = false;
  std::vector<double> gamma;
  std::vector<std::vector<double>> t;  // n rows of n entries
};

namespace detail {

inline void reject_unknown_fields(const json& j, const char* where,
                                  std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (item.key() == name) {
        known = true;
        break;
      }
    if (!known)
      throw invalid_input(std::string(where) + ": unknown field \"" +
                          item.key() + "\"");
  }
}

inline double number_field(const json& j, const std::string& where) {
  if (!j.is_number())
    throw invalid_input(where + ": expected a number");
  return j.get<double>();
}

inline cplx amplitude_field(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw invalid_input(where + ": amplitudes are [re, im] pairs");
  return cplx{number_field(j[0], where + "[0]"),
              number_field(j[1], where + "[1]")};
}

}  // namespace detail

inline Problem parse_problem(const json& j) {
  if (!j.is_object()) throw invalid_input("problem: expected a JSON object");
  detail::reject_unknown_fields(
      j, "problem", {"format", "copies", "states", "priors", "strategy"});
  if (!j.contains("format") || !j["format"].is_string() ||
      j["format"].get<std::string>() != "discrimkit-1")
    throw invalid_input("problem: field \"format\" must be \"discrimkit-1\"");
  if (!j.contains("copies") || !j["copies"].is_number_integer())
    throw invalid_input("problem: field \"copies\" must be an integer");
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
    throw invalid_input("problem: field \"states\" must be a non-empty array");

  Problem p;
  p.copies = j["copies"].get<long long>();
  for (std::size_t i = 0; i < j["states"].size(); ++i) {
    const json& row = j["states"][i];
    const std::string where = "states[" + std::to_string(i) + "]";
    if (!row.is_array() || row.empty())
      throw invalid_input(where + ": expected a non-empty amplitude array");
    std::vector<cplx> amps;
    amps.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k)
      amps.push_back(detail::amplitude_field(
          row[k], where + "[" + std::to_string(k) + "]"));
    p.states.push_back(std::move(amps));
  }
  if (j.contains("priors")) {
    if (!j["priors"].is_array())
      throw invalid_input("problem: field \"priors\" must be an array");
    for (std::size_t i = 0; i < j["priors"].size(); ++i)
      p.priors.push_back(detail::number_field(
          j["priors"][i], "priors[" + std::to_string(i) + "]"));
  }
  if (j.contains("strategy")) {
    const json& s = j["strategy"];
    if (!s.is_object())
      throw invalid_input("problem: field \"strategy\" must be an object");
    detail::reject_unknown_fields(s, "strategy", {"gamma", "t"});
    if (!s.contains("gamma") || !s["gamma"].is_array())
      throw invalid_input("strategy: field \"gamma\" must be an array");
    const std::size_t n = p.states.size();
    if (s["gamma"].size() != n)
      throw invalid_input("strategy: gamma has " +
                          std::to_string(s["gamma"].size()) + " entries for " +
                          std::to_string(n) + " states");
    for (std::size_t i = 0; i < n; ++i)
      p.gamma.push_back(detail::number_field(
          s["gamma"][i], "gamma[" + std::to_string(i) + "]"));
    p.t.assign(n, std::vector<double>(n, 0.0));
    if (s.contains("t")) {
      if (!s["t"].is_array() || s["t"].size() != n * n)
        throw invalid_input("strategy: field \"t\" must be a row-major array "
                            "of " +
                            std::to_string(n * n) + " entries");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          p.t[i][k] = detail::number_field(
              s["t"][i * n + k], "t[" + std::to_string(i * n + k) + "]");
    }
    p.has_strategy = true;
  }
  return p;
}

inline Problem parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_input(std::string("problem: JSON parse failed: ") + e.what());
  }
  return parse_problem(j);
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("problem: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str());
}

inline StateSet to_state_set(const Problem& p) {
  return StateSet(p.states, p.priors, p.copies);
}

inline Strategy to_strategy(const Problem& p) {
  if (!p.has_strategy)
    throw invalid_input("problem: no strategy block present");
  return Strategy(p.gamma, p.t);
}

namespace detail {

inline void format_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";  // JSON has no infinity; flags carry the information
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
  // bare integers like "2" stay valid JSON numbers, nothing to fix up
}

inline void write_json_value(std::string& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t k = 0;
      for (const auto& item : j.items()) {
        out += pad_in;
        out += json(item.key()).dump();
        out += ": ";
        write_json_value(out, item.value(), indent + 1);
        if (++k < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // scalar-only arrays print inline; nested ones get one element per line
      bool flat = true;
      for (const auto& v : j)
        if (v.is_structured()) flat = false;
      out += "[";
      if (!flat) out += "\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (!flat) out += pad_in;
        write_json_value(out, j[k], indent + 1);
        if (k + 1 < j.size()) out += flat ? ", " : ",";
        if (!flat) out += "\n";
      }
      if (!flat) out += pad;
      out += "]";
      return;
    }
    case json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

// Deterministic writer: fixed field order (ordered_json), two-space
// indent, 17-significant-digit doubles, trailing newline.
inline std::string write_json(const json& j) {
  std::string out;
  detail::write_json_value(out, j, 0);
  out += "\n";
  return out;
}

inline json problem_to_json(const Problem& p) {
  json j;
  j["format"] = "discrimkit-1";
  j["copies"] = p.copies;
  json states = json::array();
  for (const auto& s : p.states) {
    json row = json::array();
    for (const cplx& a : s) row.push_back(json::array({a.real(), a.imag()}));
    states.push_back(row);
  }
  j["states"] = states;
  if (!p.priors.empty()) j["priors"] = p.priors;
  if (p.has_strategy) {
    json s;
    s["gamma"] = p.gamma;
    json t = json::array();
    for (const auto& row : p.t)
      for (double v : row) t.push_back(v);
    s["t"] = t;
    j["strategy"] = s;
  }
  return j;
}

}  // namespace discrimkit
