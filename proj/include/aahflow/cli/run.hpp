#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aahflow/aahflow.hpp"
#include "aahflow/cli/config.hpp"
#include "aahflow/cli/output.hpp"
#include "aahflow/cli/svg.hpp"

namespace aahflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

inline constexpr double kVerifySeriesTolerance = 1e-9;
inline constexpr double kVerifyContinuityTolerance = 1e-6;
inline constexpr double kVerifyQuotientTolerance = 1e-9;

namespace detail {

inline OutputFormat pick_format(const RunConfig& cfg, std::initializer_list<OutputFormat> allowed) {
  const OutputFormat f = cfg.format.value_or(*allowed.begin());
  if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(to_string(a));
    throw UsageError("--format " + std::string(to_string(f)) + " is not available for " +
                     std::string(to_string(*cfg.command)) + " (use " + list + ")");
  }
  return f;
}

inline std::size_t arrow_stride(const RunConfig& cfg) {
  if (cfg.stride > 0) return cfg.stride;
  return std::max<std::size_t>(1, (std::max(cfg.grid.nx, cfg.grid.nk) - 1) / 20);
}

inline std::vector<FlowSample> sample_grid(const GaussianEnsemble& ens, const AahParams& p, const PhaseGrid& grid,
                                           unsigned workers) {
  std::vector<FlowSample> out(grid.size());
  parallel_for(grid.nx, workers, [&](std::size_t ix) {
    for (std::size_t ik = 0; ik < grid.nk; ++ik) out[grid.index(ix, ik)] = flow_sample(ens, p, grid.node(ix, ik));
  });
  return out;
}

inline double background_value(const FlowSample& s, const std::string& which) {
  if (which == "density") return s.density;
  if (which == "div_w") return s.div_w;
  return s.div_j;
}

inline void paint_background(SvgCanvas& canvas, const PhaseGrid& grid, const std::vector<double>& values) {
  const double clip = clip_level(values);
  const double dx = grid.x_range.width() / static_cast<double>(grid.nx - 1);
  const double dk = grid.k_range.width() / static_cast<double>(grid.nk - 1);
  for (std::size_t ix = 0; ix < grid.nx; ++ix) {
    for (std::size_t ik = 0; ik < grid.nk; ++ik) {
      canvas.cell(grid.x_at(ix), grid.k_at(ik), dx, dk, diverging(values[grid.index(ix, ik)], clip));
    }
  }
}

inline void report_cells(const EquilibriumReport& r, std::vector<std::string>& row) {
  row.push_back(format_real(r.point.x));
  row.push_back(format_real(r.point.k));
  row.push_back(format_real(r.jacobian.trace));
  row.push_back(format_real(r.jacobian.det));
  row.push_back(format_real(r.jacobian.delta));
  row.push_back(std::string(to_string(r.cls)));
  row.push_back(format_real(r.residual));
}

inline void report_json(JsonWriter& j, double alpha, double a, const EquilibriumReport& r) {
  j.begin_object()
      .field("alpha", alpha)
      .field("a", a)
      .field("x_eq", r.point.x)
      .field("k_eq", r.point.k)
      .field("trace", r.jacobian.trace)
      .field("det", r.jacobian.det)
      .field("delta", r.jacobian.delta)
      .field("class", to_string(r.cls))
      .field("residual", r.residual)
      .end_object();
}

inline const std::vector<std::string_view> kReportColumns = {
    "alpha", "a", "x_eq", "k_eq", "trace", "det", "delta", "class", "residual"};

inline Rgb class_colour(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableFocus: return {67, 147, 195};
    case StabilityClass::StableNode: return {33, 102, 172};
    case StabilityClass::UnstableFocus: return {214, 96, 77};
    case StabilityClass::UnstableNode: return {178, 24, 43};
    case StabilityClass::Saddle: return {90, 174, 97};
    case StabilityClass::NonHyperbolic: return {240, 240, 240};
    case StabilityClass::Unresolved: return {120, 120, 120};
  }
  return {0, 0, 0};
}

inline Rgb energy_colour(std::string_view tag) {
  if (tag == "closed_positive") return {178, 24, 43};
  if (tag == "closed_negative") return {33, 102, 172};
  if (tag == "open") return {90, 174, 97};
  if (tag == "threshold") return {0, 0, 0};
  return {120, 120, 120};
}

inline double wrap(double v, double lo) {
  const double period = 2.0 * std::numbers::pi;
  return lo + (v - lo) - period * std::floor((v - lo) / period);
}

}  // namespace detail

inline void run_portrait(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Csv, OutputFormat::Svg});
  const AahParams p(cfg.a, cfg.w);
  constexpr double pi = std::numbers::pi;

  struct Seed {
    PhaseState start;
    double energy;
    std::string tag;
    Trajectory traj;
  };
  std::vector<Seed> seeds;
  for (double k0 : {0.0, pi}) {
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
      Seed s;
      s.start = {pi * (static_cast<double>(i) + 0.5) / static_cast<double>(cfg.seeds), k0};
      s.energy = aah_energy(p, s.start);
      s.tag = p.w() == 0.0 ? std::string(to_string(classify_energy(p, s.energy))) : "unclassified";
      seeds.push_back(std::move(s));
    }
  }
  parallel_for(seeds.size(), resolve_worker_count(cfg.threads), [&](std::size_t i) {
    seeds[i].traj = integrate_classical(p, seeds[i].start, cfg.step, cfg.horizon);
  });

  const std::size_t stride = cfg.stride > 0 ? cfg.stride : 100;
  if (fmt == OutputFormat::Csv) {
    CsvWriter csv(out, {"seed", "energy_class", "energy", "tau", "x", "k"});
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto& t = seeds[i].traj;
      for (std::size_t n = 0; n < t.states.size(); n += stride) {
        csv.row({std::to_string(i), seeds[i].tag, format_real(seeds[i].energy), format_real(t.times[n]),
                 format_real(t.states[n].x), format_real(t.states[n].k)});
      }
    }
    return;
  }

  SvgCanvas canvas(out, cfg.grid.x_range, cfg.grid.k_range);
  const double jump = pi;
  for (const auto& s : seeds) {
    std::vector<std::pair<double, double>> piece;
    for (std::size_t n = 0; n < s.traj.states.size(); n += stride) {
      const double x = detail::wrap(s.traj.states[n].x, cfg.grid.x_range.lo);
      const double k = detail::wrap(s.traj.states[n].k, cfg.grid.k_range.lo);
      if (!piece.empty() && (std::abs(x - piece.back().first) > jump || std::abs(k - piece.back().second) > jump)) {
        canvas.polyline(piece, detail::energy_colour(s.tag));
        piece.clear();
      }
      piece.emplace_back(x, k);
    }
    if (piece.size() > 1) canvas.polyline(piece, detail::energy_colour(s.tag));
  }
  canvas.frame("x", "k", "classical portrait a=" + format_real(cfg.a) + " w=" + format_real(cfg.w));
  canvas.finish();
}

inline void run_flow(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg});
  cfg.grid.validate();
  const GaussianEnsemble ens(cfg.alpha);
  const AahParams p(cfg.a, cfg.w);
  const auto samples = detail::sample_grid(ens, p, cfg.grid, resolve_worker_count(cfg.threads));
  const auto& g = cfg.grid;

  if (fmt == OutputFormat::Csv) {
    CsvWriter csv(out, {"x", "k", "density", "j_x", "j_k", "div_j", "div_w"});
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      for (std::size_t ik = 0; ik < g.nk; ++ik) {
        const auto& s = samples[g.index(ix, ik)];
        csv.row({format_real(g.x_at(ix)), format_real(g.k_at(ik)), format_real(s.density), format_real(s.j_x),
                 format_real(s.j_k), format_real(s.div_j), format_real(s.div_w)});
      }
    }
    return;
  }
  if (fmt == OutputFormat::Json) {
    JsonWriter j(out);
    j.begin_object().field("alpha", cfg.alpha).field("a", cfg.a).field("w", cfg.w).field("nx", g.nx).field("nk", g.nk);
    j.key("samples").begin_array();
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      for (std::size_t ik = 0; ik < g.nk; ++ik) {
        const auto& s = samples[g.index(ix, ik)];
        j.begin_object()
            .field("x", g.x_at(ix))
            .field("k", g.k_at(ik))
            .field("density", s.density)
            .field("j_x", s.j_x)
            .field("j_k", s.j_k)
            .field("div_j", s.div_j)
            .field("div_w", s.div_w)
            .end_object();
      }
    }
    j.end_array().end_object().finish();
    return;
  }

  std::vector<double> bg(samples.size());
  std::transform(samples.begin(), samples.end(), bg.begin(),
                 [&](const FlowSample& s) { return detail::background_value(s, cfg.background); });
  SvgCanvas canvas(out, g.x_range, g.k_range);
  detail::paint_background(canvas, g, bg);

  const std::size_t stride = detail::arrow_stride(cfg);
  std::vector<std::pair<PhaseState, PhaseVelocity>> arrows;
  double longest = 0.0;
  for (std::size_t ix = 0; ix < g.nx; ix += stride) {
    for (std::size_t ik = 0; ik < g.nk; ik += stride) {
      const PhaseState s = g.node(ix, ik);
      const auto& f = samples[g.index(ix, ik)];
      const PhaseVelocity v = cfg.arrows == "current" ? PhaseVelocity{f.j_x, f.j_k} : velocity(ens, p, s);
      if (!is_finite(v)) continue;
      longest = std::max(longest, std::hypot(v.x, v.k));
      arrows.emplace_back(s, v);
    }
  }
  const double cell = 0.9 * stride * std::min(g.x_range.width() / (g.nx - 1), g.k_range.width() / (g.nk - 1));
  for (const auto& [s, v] : arrows) {
    const double scale = longest > 0.0 ? cell / longest : 0.0;
    canvas.arrow(s.x, s.k, v.x * scale, v.k * scale);
  }
  canvas.frame("x", "k",
               "flow alpha=" + format_real(cfg.alpha) + " a=" + format_real(cfg.a) + " w=" + format_real(cfg.w) +
                   " background " + cfg.background);
  canvas.finish();
}

inline void run_quantifiers(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg});
  cfg.grid.validate();
  const GaussianEnsemble ens(cfg.alpha);
  const AahParams p(cfg.a, cfg.w);
  const auto& g = cfg.grid;
  const unsigned workers = resolve_worker_count(cfg.threads);
  const auto samples = detail::sample_grid(ens, p, g, workers);
  std::vector<std::uint8_t> stagnant;
  if (cfg.speed_threshold) stagnant = stagnation_region(ens, p, g, *cfg.speed_threshold);

  if (fmt == OutputFormat::Csv) {
    if (cfg.speed_threshold) {
      CsvWriter csv(out, {"x", "k", "div_j", "div_w", "stagnant"});
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t ix = i / g.nk;
        const std::size_t ik = i % g.nk;
        csv.row({format_real(g.x_at(ix)), format_real(g.k_at(ik)), format_real(samples[i].div_j),
                 format_real(samples[i].div_w), stagnant[i] ? "1" : "0"});
      }
    } else {
      CsvWriter csv(out, {"x", "k", "div_j", "div_w"});
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t ix = i / g.nk;
        const std::size_t ik = i % g.nk;
        csv.row({format_real(g.x_at(ix)), format_real(g.k_at(ik)), format_real(samples[i].div_j),
                 format_real(samples[i].div_w)});
      }
    }
    return;
  }
  if (fmt == OutputFormat::Json) {
    JsonWriter j(out);
    j.begin_object().field("alpha", cfg.alpha).field("a", cfg.a).field("w", cfg.w).field("nx", g.nx).field("nk", g.nk);
    if (cfg.speed_threshold) j.field("speed_threshold", *cfg.speed_threshold);
    j.key("samples").begin_array();
    for (std::size_t i = 0; i < g.size(); ++i) {
      j.begin_object()
          .field("x", g.x_at(i / g.nk))
          .field("k", g.k_at(i % g.nk))
          .field("div_j", samples[i].div_j)
          .field("div_w", samples[i].div_w);
      if (cfg.speed_threshold) j.field("stagnant", stagnant[i] != 0);
      j.end_object();
    }
    j.end_array().end_object().finish();
    return;
  }

  std::vector<double> bg(samples.size());
  std::transform(samples.begin(), samples.end(), bg.begin(),
                 [&](const FlowSample& s) { return detail::background_value(s, cfg.background); });
  SvgCanvas canvas(out, g.x_range, g.k_range);
  detail::paint_background(canvas, g, bg);
  if (cfg.speed_threshold) {
    const double dx = g.x_range.width() / (g.nx - 1);
    const double dk = g.k_range.width() / (g.nk - 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (stagnant[i]) canvas.cell(g.x_at(i / g.nk), g.k_at(i % g.nk), dx, dk, {0, 0, 0});
    }
  }
  canvas.frame("x", "k", std::string(cfg.background) + " alpha=" + format_real(cfg.alpha) + " a=" +
                             format_real(cfg.a) + " w=" + format_real(cfg.w));
  canvas.finish();
}

inline void run_equilibria(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Csv, OutputFormat::Json});
  const GaussianEnsemble ens(cfg.alpha);
  const AahParams p(cfg.a, cfg.w);
  std::vector<EquilibriumReport> reports;
  if (cfg.exhaustive) {
    reports = find_all_equilibria(ens, p, 12, {}, cfg.classify_tolerance);
  } else if (cfg.start) {
    reports.push_back(equilibrium_report(ens, p, *cfg.start, {}, cfg.classify_tolerance));
  } else {
    reports.push_back(make_report(cfg.alpha, p, tracked_equilibrium(p, cfg.alpha), cfg.classify_tolerance));
  }

  if (fmt == OutputFormat::Csv) {
    CsvWriter csv(out, detail::kReportColumns);
    for (const auto& r : reports) {
      std::vector<std::string> row{format_real(cfg.alpha), format_real(cfg.a)};
      detail::report_cells(r, row);
      csv.row(row);
    }
    return;
  }
  JsonWriter j(out);
  j.begin_object().field("w", cfg.w).key("equilibria").begin_array();
  for (const auto& r : reports) detail::report_json(j, cfg.alpha, cfg.a, r);
  j.end_array().end_object().finish();
}

inline void run_scan(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg});
  ScanOptions opt;
  opt.classify_tolerance = cfg.classify_tolerance;
  opt.workers = resolve_worker_count(cfg.threads);
  const auto table = stability_scan(cfg.alpha_range.values(), cfg.a_range.values(), cfg.w, opt);

  if (fmt == OutputFormat::Csv) {
    CsvWriter csv(out, detail::kReportColumns);
    for (const auto& c : table.cells) {
      std::vector<std::string> row{format_real(c.alpha), format_real(c.a)};
      detail::report_cells(c.report, row);
      csv.row(row);
    }
    return;
  }
  if (fmt == OutputFormat::Json) {
    JsonWriter j(out);
    j.begin_object().field("w", table.w).key("cells").begin_array();
    for (const auto& c : table.cells) detail::report_json(j, c.alpha, c.a, c.report);
    j.end_array().end_object().finish();
    return;
  }

  const Interval ar{cfg.alpha_range.lo, cfg.alpha_range.hi};
  const Interval aa{cfg.a_range.lo, cfg.a_range.hi};
  SvgCanvas canvas(out, ar, aa);
  const double d_alpha = ar.width() / (cfg.alpha_range.n - 1);
  const double d_a = aa.width() / (cfg.a_range.n - 1);
  for (const auto& c : table.cells) canvas.cell(c.alpha, c.a, d_alpha, d_a, detail::class_colour(c.report.cls));
  double y = 60;
  for (auto cls : {StabilityClass::StableFocus, StabilityClass::StableNode, StabilityClass::UnstableFocus,
                   StabilityClass::UnstableNode, StabilityClass::Saddle, StabilityClass::NonHyperbolic,
                   StabilityClass::Unresolved}) {
    canvas.label(560, y, "<tspan fill=\"" + hex(detail::class_colour(cls)) + "\">&#9632;</tspan> " +
                             std::string(to_string(cls)), 11);
    y += 14;
  }
  canvas.frame("alpha", "a", "stability w=" + format_real(cfg.w));
  canvas.finish();
}

inline void run_threshold(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Json, OutputFormat::Csv});
  const auto r = saddle_threshold(AahParams(cfg.a, cfg.w), cfg.bracket);
  if (fmt == OutputFormat::Json) {
    JsonWriter j(out);
    j.begin_object()
        .field("w", r.w)
        .field("alpha_star", r.alpha_star)
        .field("alpha_star_perturbative", r.alpha_star_perturbative);
    j.key("bracket").begin_array().value(r.bracket.lo).value(r.bracket.hi).end_array();
    j.field("iterations", r.iterations).end_object().finish();
    return;
  }
  CsvWriter csv(out, {"w", "alpha_star", "alpha_star_perturbative", "bracket_lo", "bracket_hi", "iterations"});
  csv.row({format_real(r.w), format_real(r.alpha_star), format_real(r.alpha_star_perturbative),
           format_real(r.bracket.lo), format_real(r.bracket.hi), std::to_string(r.iterations)});
}

inline void run_trajectory(const RunConfig& cfg, std::ostream& out) {
  const auto fmt = detail::pick_format(cfg, {OutputFormat::Csv, OutputFormat::Svg});
  const GaussianEnsemble ens(cfg.alpha);
  const AahParams p(cfg.a, cfg.w);
  PhaseState start;
  if (cfg.start) {
    start = *cfg.start;
  } else {
    const PhaseState eq =
        cfg.field == FieldKind::Classical ? classical_symmetric_equilibrium(p) : tracked_equilibrium(p, cfg.alpha);
    start = {eq.x + cfg.offset, eq.k};
  }
  const auto t = integrate(cfg.field, ens, p, start, cfg.step, cfg.horizon);
  const std::size_t stride = cfg.stride > 0 ? cfg.stride : 1;

  if (fmt == OutputFormat::Csv) {
    CsvWriter csv(out, {"tau", "x", "k", "energy"});
    for (std::size_t n = 0; n < t.states.size(); n += stride) {
      const auto& s = t.states[n];
      csv.row({format_real(t.times[n]), format_real(s.x), format_real(s.k),
               cfg.field == FieldKind::Classical ? format_real(aah_energy(p, s)) : std::string()});
    }
    return;
  }
  Interval xr{start.x, start.x};
  Interval kr{start.k, start.k};
  for (const auto& s : t.states) {
    xr = {std::min(xr.lo, s.x), std::max(xr.hi, s.x)};
    kr = {std::min(kr.lo, s.k), std::max(kr.hi, s.k)};
  }
  const double pad = 0.05 * std::max({xr.width(), kr.width(), 1e-6});
  SvgCanvas canvas(out, {xr.lo - pad, xr.hi + pad}, {kr.lo - pad, kr.hi + pad});
  std::vector<std::pair<double, double>> pts;
  for (std::size_t n = 0; n < t.states.size(); n += stride) pts.emplace_back(t.states[n].x, t.states[n].k);
  canvas.polyline(pts, {178, 24, 43});
  canvas.frame("x", "k", std::string(to_string(cfg.field)) + " trajectory alpha=" + format_real(cfg.alpha) +
                             " a=" + format_real(cfg.a) + " w=" + format_real(cfg.w));
  canvas.finish();
}

struct VerifyReport {
  double series_max_rel_dev = 0.0;
  bool series_diverging = false;
  double continuity_max_abs_dev = 0.0;
  double quotient_max_rel_dev = 0.0;
  bool pass = false;
};

/// Closed forms against the Hermite series, finite-difference continuity and
/// the two routes to div w, over the configured grid.
inline VerifyReport verify(const GaussianEnsemble& ens, const AahParams& p, const PhaseGrid& g, int order,
                           unsigned workers) {
  g.validate();
  const ClosureSpec closure = aah_closure(p, order);
  const double h = 1e-5;
  std::vector<VerifyReport> rows(g.nx);
  parallel_for(g.nx, workers, [&](std::size_t ix) {
    VerifyReport& r = rows[ix];
    for (std::size_t ik = 0; ik < g.nk; ++ik) {
      const PhaseState s = g.node(ix, ik);
      const double density = gaussian_value(ens, s);
      const auto series = series_div_currents(ens, closure, s);
      const double ex = div_jx(ens, p, s);
      const double ek = div_jk(ens, p, s);
      r.series_diverging = r.series_diverging || series.diverging;
      r.series_max_rel_dev = std::max(
          {r.series_max_rel_dev, std::abs(series.div_jx - ex) / std::max(std::abs(ex), density),
           std::abs(series.div_jk - ek) / std::max(std::abs(ek), density)});

      const double fd = (current_jx(ens, p, {s.x + h, s.k}) - current_jx(ens, p, {s.x - h, s.k})) / (2 * h) +
                        (current_jk(ens, p, {s.x, s.k + h}) - current_jk(ens, p, {s.x, s.k - h})) / (2 * h);
      r.continuity_max_abs_dev = std::max(r.continuity_max_abs_dev, std::abs(fd - stationarity(ens, p, s)));

      if (density > 1e-100) {
        const double direct = liouvillianity(ens, p, s);
        const double quotient = liouvillianity_quotient(ens, p, s);
        r.quotient_max_rel_dev =
            std::max(r.quotient_max_rel_dev, std::abs(quotient - direct) / std::max(1.0, std::abs(direct)));
      }
    }
  });
  VerifyReport out;
  for (const auto& r : rows) {
    out.series_max_rel_dev = std::max(out.series_max_rel_dev, r.series_max_rel_dev);
    out.series_diverging = out.series_diverging || r.series_diverging;
    out.continuity_max_abs_dev = std::max(out.continuity_max_abs_dev, r.continuity_max_abs_dev);
    out.quotient_max_rel_dev = std::max(out.quotient_max_rel_dev, r.quotient_max_rel_dev);
  }
  out.pass = out.series_max_rel_dev <= kVerifySeriesTolerance && !out.series_diverging &&
             out.continuity_max_abs_dev <= kVerifyContinuityTolerance &&
             out.quotient_max_rel_dev <= kVerifyQuotientTolerance;
  return out;
}

inline bool run_verify(const RunConfig& cfg, std::ostream& out) {
  detail::pick_format(cfg, {OutputFormat::Json});
  const auto r = verify(GaussianEnsemble(cfg.alpha), AahParams(cfg.a, cfg.w), cfg.grid, cfg.series_order,
                        resolve_worker_count(cfg.threads));
  JsonWriter j(out);
  j.begin_object()
      .field("alpha", cfg.alpha)
      .field("a", cfg.a)
      .field("w", cfg.w)
      .field("n", cfg.series_order)
      .field("nx", cfg.grid.nx)
      .field("nk", cfg.grid.nk)
      .field("series_max_rel_dev", r.series_max_rel_dev)
      .field("series_diverging", r.series_diverging)
      .field("continuity_max_abs_dev", r.continuity_max_abs_dev)
      .field("quotient_max_rel_dev", r.quotient_max_rel_dev);
  j.key("tolerances")
      .begin_object()
      .field("series", kVerifySeriesTolerance)
      .field("continuity", kVerifyContinuityTolerance)
      .field("quotient", kVerifyQuotientTolerance)
      .end_object();
  j.field("pass", r.pass).end_object().finish();
  return r.pass;
}

/// Runs one command, writing its artifact to cfg.output (or `out` for "-").
/// Returns the process exit status; diagnostics go to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ostringstream buffer;
  bool ok = true;
  try {
    switch (*cfg.command) {
      case Command::Portrait: run_portrait(cfg, buffer); break;
      case Command::Flow: run_flow(cfg, buffer); break;
      case Command::Quantifiers: run_quantifiers(cfg, buffer); break;
      case Command::Equilibria: run_equilibria(cfg, buffer); break;
      case Command::Scan: run_scan(cfg, buffer); break;
      case Command::Threshold: run_threshold(cfg, buffer); break;
      case Command::Trajectory: run_trajectory(cfg, buffer); break;
      case Command::Verify: ok = run_verify(cfg, buffer); break;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  if (cfg.output == "-") {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    file << buffer.str();
    if (!file) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kExitFailure;
    }
  }
  if (!ok) {
    err << "error: verification failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

/// Full command-line entry: parse, run, map failures onto exit codes.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_config(argc, argv, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!cfg) return kExitOk;
  return run(*cfg, out, err);
}

}  // namespace aahflow::cli
