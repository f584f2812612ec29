#include "cli.hpp"

#include "facetcvt/cvt_engine.hpp"
#include "facetcvt/extractor.hpp"
#include "facetcvt/metrics.hpp"
#include "facetcvt/primitives.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#ifndef FACETCVT_VERSION
#define FACETCVT_VERSION "unknown"
#endif

namespace facetcvt::cli {

namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Thrown for problems with files (exit 1) rather than with the arguments.
struct IoError : Error {
  using Error::Error;
};

// Thrown when the pipeline ran but its diagnostics are out of bounds (exit 3).
struct PipelineError : Error {
  using Error::Error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os.flush()) throw IoError("failed writing '" + path + "'");
}

TriangleMesh load_input(const std::string& path) {
  try {
    return load_mesh(path);
  } catch (const MeshError& e) {
    throw IoError(e.what());
  }
}

struct RemeshArgs {
  std::string input;
  std::string output;
  std::string report;
  std::string manifest;
  std::string trace;
  std::string decisions;
  Config cfg;
  std::size_t samples = 100000;
  std::optional<double> time;
  double max_unsecured = 0.05;
  bool verbose = false;
};

void add_config_flags(CLI::App& app, RemeshArgs& a) {
  app.add_option("--input", a.input, "input OBJ mesh")->required();
  app.add_option("--sites", a.cfg.n, "number of sites")->required();
  app.add_option("--alpha", a.cfg.alpha, "level-2 cosine threshold")->capture_default_str();
  app.add_option("--beta", a.cfg.beta, "level-3 cosine threshold")->capture_default_str();
  app.add_option("--max-clips", a.cfg.max_clips, "facet clips per cell (1-3)")->capture_default_str();
  app.add_option("--knn", a.cfg.knn, "neighbours per Voronoi cell")->capture_default_str();
  app.add_option("--epsilon", a.cfg.epsilon, "stop when max displacement / bbox_diag <= epsilon")
      ->capture_default_str();
  app.add_option("--max-iters", a.cfg.max_iterations, "iteration cap")->capture_default_str();
  app.add_option("--k-proj", a.cfg.k_proj, "mesh vertices gathered for projection")->capture_default_str();
  app.add_option("--seed", a.cfg.seed, "random seed")->capture_default_str();
  app.add_option("--padding", a.cfg.padding, "bounding box padding, fraction of bbox_diag")->capture_default_str();
  app.add_option("--threads", a.cfg.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--samples", a.samples, "surface samples per side for d_H / RMS")->capture_default_str();
  app.add_option("--max-unsecured", a.max_unsecured,
                 "fail (exit 3) when the last iteration leaves more than this fraction of cells unsecured")
      ->capture_default_str();
}

struct PipelineRun {
  RemeshResult remesh;
  TriangleMesh output;
  DualStats dual;
  double extraction_seconds = 0.0;
  double total_seconds = 0.0;
};

PipelineRun run_pipeline(const TriangleMesh& mesh, const Config& cfg, const RemeshObserver* observer) {
  const auto t0 = Clock::now();
  PipelineRun run;
  run.remesh = run_remesh(mesh, cfg, observer);
  const auto t1 = Clock::now();
  const PointIndex index(run.remesh.sites.positions);
  const RestrictedVoronoiDiagram rvd = compute_rvd(mesh, run.remesh.sites, index, cfg.knn, cfg.threads);
  run.output = dual_triangulate(rvd, run.remesh.sites, &run.dual);
  run.extraction_seconds = seconds_since(t1);
  run.total_seconds = seconds_since(t0);
  return run;
}

json config_json(const Config& c) {
  json j;
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["max_clips"] = c.max_clips;
  j["knn"] = c.knn;
  j["epsilon"] = c.epsilon;
  j["max_iterations"] = c.max_iterations;
  j["k_proj"] = c.k_proj;
  j["seed"] = c.seed;
  j["padding"] = c.padding;
  j["threads"] = c.threads;
  return j;
}

json stats_json(const IterationStats& s) {
  json j;
  j["iteration"] = s.iteration;
  j["delta"] = s.delta;
  j["levels"] = {s.level_counts[0], s.level_counts[1], s.level_counts[2]};
  j["unsecured"] = s.unsecured;
  j["escalated"] = s.escalated;
  j["fallbacks"] = s.fallbacks;
  j["seconds"] = s.seconds;
  return j;
}

const char* status_name(ClipStatus s) {
  switch (s) {
    case ClipStatus::Ok: return "ok";
    case ClipStatus::FellBackToLevel1: return "fell_back_to_level1";
    case ClipStatus::EmptyAfterHost: return "empty_after_host";
    case ClipStatus::NoCrossSection: return "no_cross_section";
  }
  return "unknown";
}

json decision_json(std::size_t iteration, std::size_t site, const SiteDiagnostics& d) {
  json j;
  j["iteration"] = iteration;
  j["site"] = site;
  j["level"] = d.decision.level;
  j["f_t"] = d.decision.f_t;
  j["f_u"] = d.decision.f_u;
  j["f_v"] = d.decision.f_v;
  j["score_u"] = d.decision.score_u;
  j["score_v"] = d.decision.score_v;
  j["status"] = status_name(d.status);
  j["applied_level"] = d.applied_level;
  j["secured"] = d.secured;
  j["escalated"] = d.escalated;
  return j;
}

int cmd_remesh(const RemeshArgs& a, std::ostream& out, std::ostream& err) {
  a.cfg.validate();
  if (a.time && !(*a.time > 0.0)) throw InvalidArgument("--time must be positive");
  const auto t_load = Clock::now();
  const TriangleMesh mesh = load_input(a.input);
  const double load_seconds = seconds_since(t_load);

  std::string trace_lines;
  std::string decision_lines;
  RemeshObserver observer;
  observer.want_diagnostics = !a.decisions.empty();
  observer.on_iteration = [&](const IterationStats& s, const std::vector<SiteDiagnostics>& diag) {
    const std::string line = stats_json(s).dump();
    if (!a.trace.empty()) trace_lines += line + "\n";
    if (a.verbose) err << line << "\n";
    for (std::size_t i = 0; i < diag.size(); ++i) decision_lines += decision_json(s.iteration, i, diag[i]).dump() + "\n";
  };
  const PipelineRun run = run_pipeline(mesh, a.cfg, &observer);
  if (!a.trace.empty()) write_text(a.trace, trace_lines);
  if (!a.decisions.empty()) write_text(a.decisions, decision_lines);

  try {
    save_mesh(run.output, a.output);
  } catch (const MeshError& e) {
    throw IoError(e.what());
  }

  const double T = a.time.value_or(run.total_seconds);
  const auto t_metrics = Clock::now();
  const QualityReport report = quality_report(mesh, run.output, T, a.samples, a.cfg.seed, a.cfg.threads);
  const double metrics_seconds = seconds_since(t_metrics);
  if (!a.report.empty()) write_text(a.report, report_to_json(report));
  out << report_table(report);

  if (!a.manifest.empty()) {
    json m;
    m["tool"] = "facetcvt";
    m["version"] = FACETCVT_VERSION;
    m["command"] = "remesh";
    m["input"] = a.input;
    m["output"] = a.output;
    m["report"] = a.report;
    m["seed"] = a.cfg.seed;
    m["config"] = config_json(a.cfg);
    json t;
    t["load"] = load_seconds;
    t["sampling"] = run.remesh.sampling_seconds;
    t["iterations"] = run.remesh.iteration_seconds;
    t["extraction"] = run.extraction_seconds;
    t["metrics"] = metrics_seconds;
    t["remesh"] = run.total_seconds;  // sampling + iterations + extraction; the measured T
    t["total"] = seconds_since(t_load);
    m["timing_seconds"] = t;
    m["report_T"] = T;
    m["report_T_source"] = a.time ? "--time" : "measured";
    m["iterations"] = run.remesh.trace.size();
    m["final_delta"] = run.remesh.trace.empty() ? 0.0 : run.remesh.trace.back().delta;
    m["distance_normalization"] = "d_H and RMS divided by the input bbox diagonal, then multiplied by 100";
    m["distance_samples_per_side"] = a.samples;
    json d;
    d["triangles"] = run.dual.triangles;
    d["fan_split_corners"] = run.dual.corners_fan_split;
    d["degenerate_dropped"] = run.dual.degenerate_dropped;
    d["sites_without_region"] = run.dual.sites_without_region;
    d["non_manifold_edges"] = run.dual.non_manifold_edges;
    m["extraction"] = d;
    write_text(a.manifest, m.dump(2) + "\n");
  }

  if (run.dual.non_manifold_edges > 0) {
    err << "warning: " << run.dual.non_manifold_edges << " non-manifold edges in the output\n";
  }
  if (!run.remesh.trace.empty()) {
    const IterationStats& last = run.remesh.trace.back();
    const double frac = static_cast<double>(last.unsecured) / static_cast<double>(a.cfg.n);
    if (frac > a.max_unsecured) {
      std::ostringstream msg;
      msg << last.unsecured << " of " << a.cfg.n << " cells unsecured in the last iteration (limit "
          << a.max_unsecured << ")";
      throw PipelineError(msg.str());
    }
  }
  return kOk;
}

struct MetricsArgs {
  std::string input;
  std::string output_mesh;
  std::string report;
  std::size_t samples = 100000;
  double time = 1.0;
  std::uint64_t seed = 42;
  unsigned threads = 0;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  if (!(a.time > 0.0)) throw InvalidArgument("--time must be positive");
  if (a.samples == 0) throw InvalidArgument("--samples must be positive");
  const TriangleMesh in = load_input(a.input);
  const TriangleMesh result = load_input(a.output_mesh);
  const QualityReport report = quality_report(in, result, a.time, a.samples, a.seed, a.threads);
  if (!a.report.empty()) write_text(a.report, report_to_json(report));
  out << report_table(report);
  return kOk;
}

struct SweepArgs {
  RemeshArgs remesh;
  std::string alpha_grid = "0.8:0.8:0.1";
  std::string beta_grid = "0.7:0.7:0.1";
  std::string csv;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<double> alphas = parse_grid(a.alpha_grid);
  const std::vector<double> betas = parse_grid(a.beta_grid);
  Config base = a.remesh.cfg;
  for (double al : alphas) {
    for (double be : betas) {
      base.alpha = al;
      base.beta = be;
      base.validate();
    }
  }
  const TriangleMesh mesh = load_input(a.remesh.input);
  std::string csv = "alpha,beta,Q_avg,T\n";
  char line[128];
  for (double al : alphas) {
    for (double be : betas) {
      Config cfg = base;
      cfg.alpha = al;
      cfg.beta = be;
      const PipelineRun run = run_pipeline(mesh, cfg, nullptr);
      const double q = quality_stats(run.output).q_avg;
      std::snprintf(line, sizeof line, "%.4g,%.4g,%.6f,%.6f\n", al, be, q, run.total_seconds);
      csv += line;
      if (a.remesh.verbose) err << line;
    }
  }
  if (a.csv.empty()) {
    out << csv;
  } else {
    write_text(a.csv, csv);
  }
  return kOk;
}

struct GenerateArgs {
  std::string shape;
  int resolution = 4;
  std::string output;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const TriangleMesh mesh = make_primitive(a.shape, a.resolution);
  try {
    save_mesh(mesh, a.output);
  } catch (const MeshError& e) {
    throw IoError(e.what());
  }
  out << a.output << ": " << mesh.vertex_count() << " vertices, " << mesh.face_count() << " faces\n";
  return kOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::istringstream is(text);
  std::string field;
  try {
    while (std::getline(is, field, ':')) {
      std::size_t used = 0;
      parts.push_back(std::stod(field, &used));
      if (used != field.size()) parts.clear();
    }
  } catch (const std::logic_error&) {
    parts.clear();
  }
  if (parts.size() != 3) throw InvalidArgument("grid '" + text + "' is not lo:hi:step");
  const double lo = parts[0];
  const double hi = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || hi < lo) throw InvalidArgument("grid '" + text + "' needs lo <= hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v;
  for (std::size_t i = 0; i < count; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface remeshing by centroidal Voronoi tessellation with facet-clipped cells", "facetcvt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FACETCVT_VERSION);

  RemeshArgs remesh;
  CLI::App* sub_remesh = app.add_subcommand("remesh", "remesh an OBJ surface");
  add_config_flags(*sub_remesh, remesh);
  sub_remesh->add_option("--output", remesh.output, "output OBJ mesh")->required();
  sub_remesh->add_option("--report", remesh.report, "write the quality report as JSON");
  sub_remesh->add_option("--manifest", remesh.manifest, "write a run manifest as JSON");
  sub_remesh->add_option("--trace", remesh.trace, "write per-iteration stats as JSON lines");
  sub_remesh->add_option("--decisions", remesh.decisions,
                         "write each site's clip decision per iteration as JSON lines");
  sub_remesh->add_option("--time", remesh.time, "seconds to report as T instead of the measured time");
  sub_remesh->add_flag("--verbose", remesh.verbose, "print per-iteration stats to stderr");

  MetricsArgs metrics;
  CLI::App* sub_metrics = app.add_subcommand("metrics", "compare an input mesh with a remeshed one");
  sub_metrics->add_option("--input", metrics.input, "original OBJ mesh")->required();
  sub_metrics->add_option("--output-mesh", metrics.output_mesh, "remeshed OBJ mesh")->required();
  sub_metrics->add_option("--samples", metrics.samples, "surface samples per side")->capture_default_str();
  sub_metrics->add_option("--time", metrics.time, "remeshing time T in seconds")->capture_default_str();
  sub_metrics->add_option("--seed", metrics.seed, "sampling seed")->capture_default_str();
  sub_metrics->add_option("--threads", metrics.threads, "worker threads, 0 = all cores")->capture_default_str();
  sub_metrics->add_option("--report", metrics.report, "write the report as JSON");

  SweepArgs sweep;
  CLI::App* sub_sweep = app.add_subcommand("sweep", "remesh over an alpha x beta grid and print CSV");
  add_config_flags(*sub_sweep, sweep.remesh);
  sub_sweep->add_option("--alpha-grid", sweep.alpha_grid, "lo:hi:step")->capture_default_str();
  sub_sweep->add_option("--beta-grid", sweep.beta_grid, "lo:hi:step")->capture_default_str();
  sub_sweep->add_option("--csv", sweep.csv, "write CSV here instead of stdout");
  sub_sweep->add_flag("--verbose", sweep.remesh.verbose, "print rows to stderr as they finish");

  GenerateArgs generate;
  CLI::App* sub_generate = app.add_subcommand("generate", "write a test mesh");
  sub_generate->add_option("--shape", generate.shape, "icosphere, uvsphere, cube, rounded-cube, fillet-cube, torus, grid")
      ->required();
  sub_generate->add_option("--resolution", generate.resolution, "subdivision level or grid size")
      ->capture_default_str();
  sub_generate->add_option("--output", generate.output, "output OBJ mesh")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << FACETCVT_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsageError;
  }

  try {
    if (sub_remesh->parsed()) return cmd_remesh(remesh, out, err);
    if (sub_metrics->parsed()) return cmd_metrics(metrics, out);
    if (sub_sweep->parsed()) return cmd_sweep(sweep, out, err);
    if (sub_generate->parsed()) return cmd_generate(generate, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << "\n";
    return kPipelineError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPipelineError;
  }
  return kUsageError;
}

}  // namespace facetcvt::cli
