#pragma once

// JSON and CSV plumbing for the command-line front end.

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stieltjes/stieltjes.hpp"

namespace stieltjes::io {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spec_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw spec_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace detail {

inline const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw spec_error(std::string(where) + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const char* where) {
  if (!j.is_number()) throw spec_error(std::string(where) + ": expected a number");
  return j.get<double>();
}

inline std::pair<double, double> pair(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 2) throw spec_error(std::string(where) + ": expected a pair [u, v]");
  return {number(j[0], where), number(j[1], where)};
}

}  // namespace detail

/// {"interval":[a,b], "continuous_part":{"breakpoints":[[x,y],...]}, "jumps":[[x,delta],...]}
inline Derivator derivator_from_json(const json& j) {
  const auto [a, b] = detail::pair(detail::field(j, "interval", "derivator"), "derivator.interval");
  const json& bps = detail::field(detail::field(j, "continuous_part", "derivator"), "breakpoints", "derivator.continuous_part");
  if (!bps.is_array()) throw spec_error("derivator.continuous_part.breakpoints: expected an array");
  std::vector<Breakpoint> breakpoints;
  for (const auto& p : bps) {
    const auto [x, y] = detail::pair(p, "derivator.continuous_part.breakpoints");
    breakpoints.push_back({x, y});
  }
  std::vector<Jump> jumps;
  if (j.contains("jumps")) {
    if (!j.at("jumps").is_array()) throw spec_error("derivator.jumps: expected an array");
    for (const auto& p : j.at("jumps")) {
      const auto [x, gap] = detail::pair(p, "derivator.jumps");
      jumps.push_back({x, gap});
    }
  }
  return Derivator(a, b, std::move(breakpoints), std::move(jumps));
}

inline json to_json(const Derivator& d) {
  json bps = json::array(), jumps = json::array();
  for (const auto& p : d.breakpoints()) bps.push_back({p.x, p.y});
  for (const auto& p : d.jumps()) jumps.push_back({p.x, p.gap});
  return {{"interval", {d.a(), d.b()}}, {"continuous_part", {{"breakpoints", bps}}}, {"jumps", jumps}};
}

inline json to_json(const GPolynomial& p) { return {{"center", p.center()}, {"coefficients", p.coefficients()}}; }

inline GPolynomial gpoly_from_json(const Derivator& d, const json& j) {
  const double c = detail::number(detail::field(j, "center", "g-polynomial"), "g-polynomial.center");
  const json& co = detail::field(j, "coefficients", "g-polynomial");
  if (!co.is_array() || co.empty()) throw spec_error("g-polynomial.coefficients: expected a nonempty array");
  std::vector<double> alpha;
  for (const auto& v : co) alpha.push_back(detail::number(v, "g-polynomial.coefficients"));
  return GPolynomial(d, c, std::move(alpha));
}

/// A target both as a function of x and split into per-piece functions of y.
struct Target {
  std::string kind;
  std::string text;  // expression source, empty for samples
  Integrand f;
  PiecewiseTarget pieces;
};

/// {"kind":"expr","expr":"sin(g)"} or {"kind":"samples","pieces":[[[y,f],...],...]}
inline Target target_from_json(const Derivator& d, const json& j) {
  const json& kind = detail::field(j, "kind", "target");
  if (!kind.is_string()) throw spec_error("target.kind: expected a string");
  Target t;
  t.kind = kind.get<std::string>();
  if (t.kind == "expr") {
    const json& e = detail::field(j, "expr", "target");
    if (!e.is_string()) throw spec_error("target.expr: expected a string");
    t.text = e.get<std::string>();
    Expression ex(t.text);
    t.f = compose(d, ex.function());
    t.pieces = decompose_target(d, t.f);
  } else if (t.kind == "samples") {
    const json& ps = detail::field(j, "pieces", "target");
    if (!ps.is_array()) throw spec_error("target.pieces: expected an array");
    std::vector<std::vector<std::pair<double, double>>> samples;
    for (const auto& piece : ps) {
      if (!piece.is_array()) throw spec_error("target.pieces: each piece must be an array of [y, f]");
      auto& s = samples.emplace_back();
      for (const auto& p : piece) s.push_back(detail::pair(p, "target.pieces"));
    }
    t.pieces = samples_target(d, std::move(samples));
    t.f = from_pieces(d, t.pieces);
  } else {
    throw spec_error("target.kind: expected \"expr\" or \"samples\", got \"" + t.kind + "\"");
  }
  return t;
}

/// 17 significant digits: enough for every double to read back unchanged.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with '.' decimals, ',' separators, a header row and 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<std::optional<double>>& values) {
    if (values.size() != cols_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      if (values[i]) out_ << fmt(*values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  std::size_t cols_;
};

}  // namespace stieltjes::io
