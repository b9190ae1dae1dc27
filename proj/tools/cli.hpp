#pragma once

// Command-line front end: subcommands eval, approx, gram, partition, monomial.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "io.hpp"

namespace stieltjes::cli {

using io::json;

struct RunConfig {
  std::string subcommand;
  std::string derivator_path;
  std::string target_path;
  std::string poly_path;
  std::string backend = "sup_lsq";
  int degree = 8;
  double center = std::nan("");
  int k = kGramDefaultIndex;
  double delta = 0.1;
  int grid = 201;
  std::string out_path;
  std::string plot_path;
  std::string format;  // json or csv; each subcommand has its own default
  int threads = 1;
  int samples = 0;
};

namespace detail {

/// Fills out[i] = f(i) for i < n on up to `threads` workers. Each index is
/// written by exactly one worker, so the result does not depend on the count.
inline void parallel_fill(std::vector<double>& out, const std::function<double(std::size_t)>& f, int threads) {
  const std::size_t n = out.size();
  const std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(t);
  for (std::size_t w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += t) out[i] = f(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

inline std::vector<double> uniform_grid(const Derivator& d, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = i + 1 == n ? d.b() : d.a() + (d.b() - d.a()) * i / (n - 1);
  return xs;
}

inline std::vector<double> eval_grid(const std::vector<double>& xs, const std::function<double(double)>& f, int threads) {
  std::vector<double> v(xs.size());
  parallel_fill(v, [&](std::size_t i) { return f(xs[i]); }, threads);
  return v;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      out_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw spec_error("cannot write '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_ = nullptr;
};

inline void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline double center_or(const RunConfig& c, const Derivator& d) { return std::isnan(c.center) ? d.a() : c.center; }

inline std::optional<double> opt(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// g and its parts on a grid, plus the target and a g-polynomial when given.
inline void run_eval(const RunConfig& c, std::ostream& out) {
  const auto d = io::derivator_from_json(io::read_json_file(c.derivator_path));
  const auto xs = detail::uniform_grid(d, c.grid);
  std::vector<std::string> cols{"x", "g", "g_right", "g_continuous", "g_jump"};
  std::vector<std::vector<double>> data;
  data.push_back(xs);
  data.push_back(detail::eval_grid(xs, [&](double x) { return d.eval(x); }, c.threads));
  data.push_back(detail::eval_grid(
      xs, [&](double x) { return x < d.b() ? d.eval_right(x) : std::nan(""); }, c.threads));
  data.push_back(detail::eval_grid(xs, [&](double x) { return d.continuous_part(x); }, c.threads));
  data.push_back(detail::eval_grid(xs, [&](double x) { return d.jump_part(x); }, c.threads));
  if (!c.target_path.empty()) {
    auto t = io::target_from_json(d, io::read_json_file(c.target_path));
    cols.push_back("f");
    data.push_back(detail::eval_grid(xs, t.f.f, c.threads));
  }
  if (!c.poly_path.empty()) {
    auto p = io::gpoly_from_json(d, io::read_json_file(c.poly_path));
    cols.push_back("p_g");
    data.push_back(detail::eval_grid(xs, [&](double x) { return p.eval(x); }, c.threads));
  }
  detail::Output o(c.out_path, out);
  if (c.format == "json") {
    json j = json::object();
    for (std::size_t k = 0; k < cols.size(); ++k) j[cols[k]] = data[k];
    detail::write_json(*o, j);
    return;
  }
  io::CsvWriter w(*o, cols);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::optional<double>> row;
    for (const auto& col : data) row.push_back(detail::opt(col[i]));
    w.row(row);
  }
}

inline void run_approx(const RunConfig& c, std::ostream& out) {
  if (c.target_path.empty()) throw spec_error("approx needs --target");
  const auto d = io::derivator_from_json(io::read_json_file(c.derivator_path));
  const auto t = io::target_from_json(d, io::read_json_file(c.target_path));
  spdlog::info("approx: backend {}, degree {}, {} pieces", c.backend, c.degree, d.pieces().size());
  const int grid = std::max(c.grid, 2);
  // the full operator on every piece; derivatives above the degree vanish in the fit anyway
  const auto coeffs = jump_coefficients(d, std::min<int>(static_cast<int>(d.jumps().size()), kMaxBinomialOrder));
  std::optional<ApproxResult> r;
  if (c.backend == "sup_lsq") {
    r = fit_sup_lsq(d, t.pieces, coeffs, c.degree, c.samples, grid);
  } else if (c.backend == "l2") {
    r = fit_l2_projection(d, t.f, c.degree, grid);
  } else if (c.backend == "constructive") {
    r = fit_constructive(d, t.pieces, coeffs, c.degree, c.samples, grid);
  } else {
    throw spec_error("unknown backend '" + c.backend + "' (expected sup_lsq, l2 or constructive)");
  }
  for (const auto& wmsg : r->warnings) spdlog::warn("approx: {}", wmsg);
  spdlog::info("approx: sup error {}", r->sup_error);

  const auto xs = detail::uniform_grid(d, grid);
  const auto gv = detail::eval_grid(xs, [&](double x) { return d.eval(x); }, c.threads);
  const auto fv = detail::eval_grid(xs, t.f.f, c.threads);
  const auto pv = detail::eval_grid(xs, [&](double x) { return r->poly.eval(x); }, c.threads);
  auto write_plot = [&](std::ostream& s) {
    io::CsvWriter w(s, {"x", "g(x)", "f(x)", "p_g(x)"});
    for (std::size_t i = 0; i < xs.size(); ++i) w.row({xs[i], gv[i], fv[i], pv[i]});
  };
  if (!c.plot_path.empty()) {
    std::ofstream p(c.plot_path);
    if (!p) throw spec_error("cannot write '" + c.plot_path + "'");
    write_plot(p);
  }

  detail::Output o(c.out_path, out);
  if (c.format == "csv") {
    write_plot(*o);
    return;
  }
  json j{{"alpha", r->poly.coefficients()},
         {"center", r->poly.center()},
         {"degree", r->poly.degree()},
         {"sup_error", r->sup_error},
         {"per_piece", r->per_piece},
         {"backend", r->backend},
         {"condition", r->condition},
         {"warnings", r->warnings}};
  if (!std::isnan(r->l2_residual)) j["l2_residual"] = r->l2_residual;
  detail::write_json(*o, j);
}

inline void run_gram(const RunConfig& c, std::ostream& out) {
  const auto d = io::derivator_from_json(io::read_json_file(c.derivator_path));
  const double x0 = detail::center_or(c, d);
  const auto rep = ratio_sequence(d, x0, c.k);
  const bool atom = d.is_jump(x0) && x0 < d.b();
  std::vector<double> ind(rep.k, std::nan(""));
  if (atom)
    for (int j = 1; j <= rep.k; ++j) ind[j - 1] = indicator_distance(d, x0, j);
  for (int j : rep.divergent) spdlog::warn("gram: determinant and distance ratios disagree at k = {}", j);

  detail::Output o(c.out_path, out);
  if (c.format == "json") {
    auto rows = [](const Eigen::MatrixXd& m) {
      json a = json::array();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        a.push_back(r);
      }
      return a;
    };
    json ratios = json::array(), dets = json::array(), inds = json::array();
    for (int j = 0; j < rep.k; ++j) {
      ratios.push_back(rep.ratios[j]);
      dets.push_back(std::isnan(rep.det_ratios[j]) ? json(nullptr) : json(rep.det_ratios[j]));
      inds.push_back(atom ? json(ind[j]) : json(nullptr));
    }
    json cond = json::array();
    for (double v : rep.conditions) cond.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    detail::write_json(*o, {{"center", rep.center},
                            {"k", rep.k},
                            {"beta", rep.beta},
                            {"limit", rep.limit},
                            {"gram_with_constant", rows(rep.gram_with_constant)},
                            {"gram_without_constant", rows(rep.gram_without_constant)},
                            {"ratios", ratios},
                            {"determinant_ratios", dets},
                            {"indicator_distance", inds},
                            {"conditions", cond},
                            {"divergent", rep.divergent}});
    return;
  }
  io::CsvWriter w(*o, {"k", "r_k", "indicator_distance", "determinant_ratio", "condition", "limit"});
  for (int j = 0; j < rep.k; ++j)
    w.row({double(j + 1), rep.ratios[j], detail::opt(ind[j]), detail::opt(rep.det_ratios[j]),
           std::isfinite(rep.conditions[j]) ? std::optional<double>(rep.conditions[j]) : std::nullopt, rep.limit});
}

inline void run_partition(const RunConfig& c, std::ostream& out) {
  const auto d = io::derivator_from_json(io::read_json_file(c.derivator_path));
  const auto xs = partition_by_oscillation(d, c.delta);
  const double mass = d.total_mass();
  const auto bound = static_cast<std::size_t>(std::ceil(mass / c.delta)) + 1;
  json j{{"delta", c.delta},
         {"points", xs},
         {"oscillation", partition_oscillation(d, xs)},
         {"length_bound", bound}};
  if (!c.target_path.empty()) {
    const auto t = io::target_from_json(d, io::read_json_file(c.target_path));
    const auto q = g_linear_interpolant(d, t.f, xs);
    const int grid = std::max(c.grid, 2);
    double err = 0.0;
    for (const auto& sp : sample_points(d, grid)) {
      const double e = sp.right_limit ? std::abs(right_value(d, t.f, sp.x) - right_value(d, q, sp.x))
                                      : std::abs(t.f(sp.x) - q(sp.x));
      err = std::max(err, e);
    }
    j["interpolant_error"] = err;
    j["modulus"] = sampled_modulus(d, t.f, c.delta, grid);
  }
  detail::Output o(c.out_path, out);
  if (c.format == "csv") {
    io::CsvWriter w(*o, {"i", "x", "g(x)"});
    for (std::size_t i = 0; i < xs.size(); ++i) w.row({double(i), xs[i], d.eval(xs[i])});
    return;
  }
  detail::write_json(*o, j);
}

inline void run_monomial(const RunConfig& c, std::ostream& out) {
  const auto d = io::derivator_from_json(io::read_json_file(c.derivator_path));
  const double x0 = detail::center_or(c, d);
  const auto table = gb_monomials(d, x0, c.degree);
  const auto xs = detail::uniform_grid(d, c.grid);
  std::vector<std::string> cols{"x"};
  std::vector<std::vector<double>> data{xs};
  for (int n = 0; n <= c.degree; ++n) {
    const auto p = monomial_polynomial(d, x0, n, &table);
    cols.push_back("g_" + std::to_string(n));
    data.push_back(detail::eval_grid(xs, [&](double x) { return p(x); }, c.threads));
  }
  detail::Output o(c.out_path, out);
  if (c.format == "json") {
    json j{{"center", x0}};
    for (std::size_t k = 0; k < cols.size(); ++k) j[cols[k]] = data[k];
    detail::write_json(*o, j);
    return;
  }
  io::CsvWriter w(*o, cols);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::optional<double>> row;
    for (const auto& col : data) row.push_back(col[i]);
    w.row(row);
  }
}

inline void configure_logging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("stieltjes", sink);
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("STIELTJES_LOG");
  const std::string level = env ? env : "";
  if (level == "debug") logger->set_level(spdlog::level::debug);
  else if (level == "info") logger->set_level(spdlog::level::info);
  else logger->set_level(spdlog::level::warn);
  spdlog::set_default_logger(logger);
}

inline int fail(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
  return code;
}

/// Exit codes: 0 success, 1 malformed input or flags, 2 numerical failure.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  configure_logging(err);
  RunConfig c;
  CLI::App app{"Lebesgue-Stieltjes g-polynomial toolkit"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* s, bool needs_format) {
    s->add_option("--derivator", c.derivator_path, "derivator JSON file")->required()->check(CLI::ExistingFile);
    s->add_option("--out", c.out_path, "output file (default: standard output)");
    s->add_option("--threads", c.threads, "worker threads for grid evaluation")->check(CLI::PositiveNumber);
    if (needs_format) s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* eval = app.add_subcommand("eval", "tabulate g, its parts, and optionally a target and a g-polynomial");
  common(eval, true);
  eval->add_option("--target", c.target_path, "target JSON file")->check(CLI::ExistingFile);
  eval->add_option("--poly", c.poly_path, "g-polynomial JSON file")->check(CLI::ExistingFile);
  eval->add_option("--grid", c.grid, "grid points")->check(CLI::Range(2, 10000000));

  auto* approx = app.add_subcommand("approx", "fit a g-polynomial to a target");
  common(approx, true);
  approx->add_option("--target", c.target_path, "target JSON file")->required()->check(CLI::ExistingFile);
  approx->add_option("--degree", c.degree, "polynomial degree")->check(CLI::Range(0, kDefaultDegreeCap));
  approx->add_option("--backend", c.backend, "sup_lsq, l2 or constructive");
  approx->add_option("--grid", c.grid, "sample points per piece for errors and plot points")->check(CLI::Range(2, 10000000));
  approx->add_option("--samples", c.samples, "fit points per piece (default 4 (degree + 1))")->check(CLI::NonNegativeNumber);
  approx->add_option("--plot", c.plot_path, "plot CSV with columns x, g(x), f(x), p_g(x)");

  auto* gram = app.add_subcommand("gram", "Gram ratio sequence and indicator distances");
  common(gram, true);
  gram->add_option("--center", c.center, "center x0 (default a)");
  gram->add_option("--k", c.k, "largest index")->check(CLI::Range(1, kGramMaxIndex));

  auto* part = app.add_subcommand("partition", "partition with g-oscillation at most delta");
  common(part, true);
  part->add_option("--delta", c.delta, "oscillation bound")->check(CLI::PositiveNumber);
  part->add_option("--target", c.target_path, "target JSON file for the interpolant error")->check(CLI::ExistingFile);
  part->add_option("--grid", c.grid, "sample points per piece")->check(CLI::Range(2, 10000000));

  auto* mono = app.add_subcommand("monomial", "tabulate g_{x0,n}, n = 0..degree");
  common(mono, true);
  mono->add_option("--center", c.center, "center x0 (default a)");
  mono->add_option("--degree", c.degree, "largest index")->check(CLI::Range(0, kMaxBinomialOrder));
  mono->add_option("--grid", c.grid, "grid points")->check(CLI::Range(2, 10000000));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(err, 1, "usage_error", e.what());
  }

  try {
    if (*eval) {
      if (c.format.empty()) c.format = "csv";
      run_eval(c, out);
    } else if (*approx) {
      if (c.format.empty()) c.format = "json";
      if (approx->count("--grid") == 0) c.grid = 200;
      run_approx(c, out);
    } else if (*gram) {
      if (c.format.empty()) c.format = "csv";
      run_gram(c, out);
    } else if (*part) {
      if (c.format.empty()) c.format = "json";
      if (part->count("--grid") == 0) c.grid = 400;
      run_partition(c, out);
    } else if (*mono) {
      if (c.format.empty()) c.format = "csv";
      run_monomial(c, out);
    }
  } catch (const spec_error& e) {
    return fail(err, 1, "spec_error", e.what());
  } catch (const numerical_error& e) {
    return fail(err, 2, "numerical_error", e.what());
  } catch (const std::exception& e) {
    return fail(err, 2, "internal_error", e.what());
  }
  return 0;
}

}  // namespace stieltjes::cli
