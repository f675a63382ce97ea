#include "cli.hpp"

#include "streammvc/error.hpp"
#include "streammvc/harness.hpp"
#include "streammvc/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace smvc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunFlags {
  int k = 0;
  double epsilon = 1e-6;
  int max_iters = 100;
  int restarts = 50;
  std::uint64_t seed = 0;
  std::string fill = "none";
  std::string init = "svd";
  bool dense = false;
  bool no_normalize = false;

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.epsilon = epsilon;
    cfg.max_iters = max_iters;
    cfg.seed = seed;
    cfg.init = init == "random" ? InitMethod::random : InitMethod::svd;
    cfg.dense_indicators = dense;
    return cfg;
  }
  LabelConfig labels(int k_state) const { return {k_state, restarts, seed, !no_normalize}; }
};

void add_solver_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--epsilon", f.epsilon, "Relative objective tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Inner iteration cap")->check(CLI::Range(1, 1000000))->capture_default_str();
  cmd->add_option("--restarts", f.restarts, "k-means restarts")->check(CLI::Range(1, 1000000))->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for k-means and random init")->capture_default_str();
  cmd->add_option("--init", f.init, "First-view initialization")
      ->check(CLI::IsMember({"svd", "random"}))
      ->capture_default_str();
  cmd->add_flag("--dense-indicators", f.dense, "Use explicit indicator matrices (reference path)");
  cmd->add_flag("--no-normalize", f.no_normalize, "Cluster raw Z columns instead of unit-length ones");
}

std::vector<Index> parse_dims(const std::string& text, std::size_t views) {
  std::vector<Index> dims;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      dims.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw ConfigError("--dims: cannot parse '" + part + "'");
    }
  }
  if (dims.size() == 1) dims.assign(views, dims.front());
  if (dims.size() != views) {
    throw ConfigError("--dims lists " + std::to_string(dims.size()) + " sizes for " + std::to_string(views) + " views");
  }
  return dims;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": cannot parse '" + part + "'");
    }
  }
  return out;
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DataError("cannot create " + p.string() + ": " + ec.message());
  return p;
}

json view_record(std::size_t t, const std::string& file, const ViewBatch& v, const ConsensusState& s) {
  json rec = io::to_json(s.last_diag);
  rec["view"] = t;
  rec["file"] = file;
  rec["n_view"] = v.ids.size();
  rec["n_total"] = s.registry.size();
  return rec;
}

std::string metrics_text(const MetricReport& r, const std::string& format) {
  if (format == "csv") {
    return "acc,nmi,purity,fscore\n" + io::format_double(r.acc) + "," + io::format_double(r.nmi) + "," +
           io::format_double(r.purity) + "," + io::format_double(r.fscore) + "\n";
  }
  return io::to_json(r).dump(2) + "\n";
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::size_t n = 0;
  int k = 0;
  std::size_t views = 3;
  std::string dims = "16";
  double separation = 10.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SyntheticSpec spec;
  spec.n = a.n;
  spec.k = a.k;
  spec.dims = parse_dims(a.dims, a.views);
  spec.separation = a.separation;
  spec.sigma = a.sigma;
  spec.seed = a.seed;
  const SyntheticData data = generate_synthetic(spec);
  const fs::path dir = ensure_dir(a.out_dir);
  json files = json::array();
  for (const auto& v : data.views) {
    const fs::path p = dir / ("view_" + std::to_string(v.view_index) + ".csv");
    io::write_view(p, v);
    files.push_back(p.string());
  }
  io::write_labels(dir / "labels.csv", data.labels.ids, data.labels.truth);
  out << json{{"views", files}, {"labels", (dir / "labels.csv").string()}}.dump() << "\n";
  return kOk;
}

// --- corrupt ---------------------------------------------------------------

struct CorruptArgs {
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir = "corrupted";
  std::vector<std::string> files;
};

int cmd_corrupt(const CorruptArgs& a, std::ostream& out) {
  std::vector<ViewBatch> views;
  for (std::size_t t = 0; t < a.files.size(); ++t) views.push_back(io::read_view(a.files[t], t + 1));
  auto [incomplete, pattern] = apply_missing(views, a.ratio, a.seed);
  const fs::path dir = ensure_dir(a.out_dir);
  json manifest = io::to_json(pattern);
  for (std::size_t t = 0; t < incomplete.size(); ++t) {
    const fs::path p = dir / fs::path(a.files[t]).filename();
    io::write_view(p, incomplete[t]);
    manifest["views"][t]["source"] = a.files[t];
    manifest["views"][t]["file"] = p.string();
  }
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out << manifest.dump() << "\n";
  return kOk;
}

// --- run -------------------------------------------------------------------

struct RunArgs {
  RunFlags flags;
  std::string out_dir = ".";
  std::string checkpoint;
  std::vector<std::string> files;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  const fs::path dir = ensure_dir(a.out_dir);
  json diag = {{"status", "running"}, {"views", json::array()}};
  auto flush = [&] { io::write_text(dir / "diagnostics.json", diag.dump(2) + "\n"); };
  try {
    std::vector<ViewBatch> views;
    for (std::size_t t = 0; t < a.files.size(); ++t) views.push_back(io::read_view(a.files[t], t + 1));
    if (a.flags.fill != "none") {
      views = fill_views(views, a.flags.fill == "zero" ? FillMode::zero : FillMode::average);
      diag["fill"] = a.flags.fill;
    }
    const SolverConfig cfg = a.flags.solver();
    ConsensusState state = init_first_view(views[0], a.flags.k, cfg);
    diag["views"].push_back(view_record(1, a.files[0], views[0], state));
    for (std::size_t t = 1; t < views.size(); ++t) {
      state = integrate_view(state, views[t], cfg);
      diag["views"].push_back(view_record(t + 1, a.files[t], views[t], state));
    }
    const Partition labels = final_labels(state, a.flags.labels(state.k));
    io::write_labels(dir / "labels.csv", state.registry.ids(), labels);
    if (!a.checkpoint.empty()) io::save_checkpoint(a.checkpoint, state);
    diag["status"] = "ok";
    flush();
    out << json{{"labels", (dir / "labels.csv").string()}, {"samples", state.registry.size()}}.dump() << "\n";
    return kOk;
  } catch (const Error& e) {
    diag["status"] = "error";
    diag["error"] = e.what();
    flush();
    throw;
  }
}

// --- resume ----------------------------------------------------------------

struct ResumeArgs {
  RunFlags flags;
  std::string checkpoint;
  std::string out;
  std::string labels;
  std::string file;
};

int cmd_resume(const ResumeArgs& a, std::ostream& out) {
  const ConsensusState prior = io::load_checkpoint(a.checkpoint);
  const ViewBatch view = io::read_view(a.file, prior.views_seen + 1);
  const ConsensusState next = integrate_view(prior, view, a.flags.solver());
  io::save_checkpoint(a.out.empty() ? a.checkpoint : a.out, next);
  if (!a.labels.empty()) io::write_labels(a.labels, next.registry.ids(), final_labels(next, a.flags.labels(next.k)));
  out << view_record(next.views_seen, a.file, view, next).dump() << "\n";
  return kOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string labels;
  std::string truth;
  std::string format = "json";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const LabeledSamples pred = io::read_labels(a.labels);
  const LabeledSamples truth = io::read_labels(a.truth);
  const std::set<SampleId> pred_ids(pred.ids.begin(), pred.ids.end());
  const std::set<SampleId> truth_ids(truth.ids.begin(), truth.ids.end());
  std::vector<SampleId> offending;
  std::set_symmetric_difference(pred_ids.begin(), pred_ids.end(), truth_ids.begin(), truth_ids.end(),
                                std::back_inserter(offending));
  if (!offending.empty()) {
    std::string list;
    for (std::size_t i = 0; i < offending.size() && i < 20; ++i) list += (i ? ", " : "") + offending[i];
    if (offending.size() > 20) list += ", ...";
    throw DataError("eval: " + std::to_string(offending.size()) + " ids not present in both files: " + list);
  }
  const MetricReport report = evaluate(truth.aligned_to(pred.ids), pred.truth);
  out << metrics_text(report, a.format);
  return kOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string mode = "ratio";
  std::size_t n = 1000;
  int k = 5;
  std::size_t views = 0;
  std::string dims = "16";
  double separation = 10.0;
  int reps = 10;
  std::string ratios = "0.1,0.2,0.3,0.4,0.5";
  std::size_t perms = 10;
  double ratio = 0.3;
  std::string method = "iv";
  RunFlags flags;
  std::string ns = "2000,4000,8000";
  int scale_k = 10;
  Index scale_d = 64;
  int iters = 20;
  int repeats = 3;
  std::string out_dir = ".";
  std::string format = "json";
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const fs::path dir = ensure_dir(a.out_dir);
  const LabelConfig labels{0, a.flags.restarts, a.flags.seed, !a.flags.no_normalize};
  const SolverConfig cfg = a.flags.solver();
  std::string csv;
  json summary;

  if (a.mode == "scale") {
    std::vector<std::size_t> ns;
    for (double v : parse_list(a.ns, "--ns")) ns.push_back(static_cast<std::size_t>(v));
    const ScaleResult res = scale_sweep(ns, a.scale_k, a.scale_d, a.iters, a.repeats, a.flags.seed);
    csv = "n,iters,seconds_per_iter\n";
    json points = json::array();
    for (const auto& p : res.points) {
      csv += std::to_string(p.n) + "," + std::to_string(p.iters) + "," + io::format_double(p.seconds_per_iter) + "\n";
      points.push_back({{"n", p.n}, {"iters", p.iters}, {"seconds_per_iter", p.seconds_per_iter}});
    }
    json ratios = json::array();
    for (std::size_t i = 1; i < res.points.size(); ++i) {
      ratios.push_back(res.points[i].seconds_per_iter / res.points[i - 1].seconds_per_iter);
    }
    summary = {{"mode", "scale"}, {"k", a.scale_k}, {"d", a.scale_d}, {"points", points},
               {"fitted_slope", res.slope}, {"successive_ratios", ratios}};
  } else {
    SyntheticSpec spec;
    spec.n = a.n;
    spec.k = a.k;
    const std::size_t views = a.views > 0 ? a.views : (a.mode == "order" ? 4 : 3);
    spec.dims = parse_dims(a.dims, views);
    spec.separation = a.separation;
    spec.seed = a.flags.seed;
    if (a.mode == "ratio") {
      const Method method = a.method == "zf" ? Method::zero_fill
                            : a.method == "af" ? Method::average_fill
                                               : Method::incomplete;
      const ExperimentResult res = ratio_sweep(spec, parse_list(a.ratios, "--ratios"), a.reps, cfg, labels, method);
      csv = "ratio,rep,acc,nmi,purity,fscore\n";
      for (const auto& row : res.rows) {
        csv += io::format_double(row.ratio) + "," + std::to_string(row.rep) + "," + io::format_double(row.report.acc) +
               "," + io::format_double(row.report.nmi) + "," + io::format_double(row.report.purity) + "," +
               io::format_double(row.report.fscore) + "\n";
      }
      json aggs = json::array();
      for (const auto& agg : res.aggregates) {
        aggs.push_back({{"ratio", agg.ratio}, {"mean", io::to_json(agg.mean)}, {"std", io::to_json(agg.std)}});
      }
      summary = {{"mode", "ratio"}, {"method", method_name(method)}, {"reps", a.reps}, {"ratios", aggs}};
    } else {
      const SyntheticData data = generate_synthetic(spec);
      const auto runs = order_sweep(data.views, data.labels, a.ratio, a.k, cfg, labels, a.perms, a.flags.seed);
      csv = "order,acc,nmi,purity,fscore\n";
      std::vector<SweepRow> rows;
      for (const auto& run : runs) {
        std::string order;
        for (std::size_t i = 0; i < run.order.size(); ++i) order += (i ? "-" : "") + std::to_string(run.order[i] + 1);
        csv += order + "," + io::format_double(run.report.acc) + "," + io::format_double(run.report.nmi) + "," +
               io::format_double(run.report.purity) + "," + io::format_double(run.report.fscore) + "\n";
        rows.push_back({a.ratio, 0, run.report});
      }
      const auto agg = aggregate(rows);
      summary = {{"mode", "order"}, {"ratio", a.ratio}, {"orders", runs.size()},
                 {"mean", io::to_json(agg.front().mean)}, {"std", io::to_json(agg.front().std)}};
    }
  }
  io::write_text(dir / "results.csv", csv);
  io::write_text(dir / "summary.json", summary.dump(2) + "\n");
  out << (a.format == "csv" ? csv : summary.dump(2) + "\n");
  return kOk;
}

int report(std::ostream& err, const char* kind, int code, const std::string& what) {
  err << json{{"error", what}, {"kind", kind}, {"exit_code", code}}.dump() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming incomplete multi-view clustering"};
  app.require_subcommand(1);
  std::function<int()> action;

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic multi-view Gaussian mixture");
  s->add_option("--n", synth.n, "Samples")->required()->check(CLI::PositiveNumber);
  s->add_option("--k", synth.k, "Clusters")->required()->check(CLI::Range(1, 1 << 20));
  s->add_option("--views", synth.views, "Number of views")->check(CLI::Range(1, 1 << 10))->capture_default_str();
  s->add_option("--dims", synth.dims, "Features per view (one value or a comma list)")->capture_default_str();
  s->add_option("--separation", synth.separation, "Center distance / within-cluster std")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_option("--sigma", synth.sigma, "Within-cluster std")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--out-dir", synth.out_dir)->capture_default_str();
  s->callback([&] { action = [&] { return cmd_synth(synth, out); }; });

  CorruptArgs corrupt;
  auto* c = app.add_subcommand("corrupt", "Apply the missing-sample protocol to complete views");
  c->add_option("--ratio", corrupt.ratio, "Missing ratio in [0, 0.5]")->required()->check(CLI::Range(0.0, 0.5));
  c->add_option("--seed", corrupt.seed)->capture_default_str();
  c->add_option("--out-dir", corrupt.out_dir)->capture_default_str();
  c->add_option("views", corrupt.files, "View files in arrival order")->required()->check(CLI::ExistingFile);
  c->callback([&] { action = [&] { return cmd_corrupt(corrupt, out); }; });

  RunArgs runargs;
  auto* r = app.add_subcommand("run", "Stream views through the solver and label the samples");
  r->add_option("--k", runargs.flags.k, "Clusters")->required()->check(CLI::Range(1, 1 << 20));
  add_solver_flags(r, runargs.flags);
  r->add_option("--fill", runargs.flags.fill, "Complete missing samples before solving")
      ->check(CLI::IsMember({"none", "zero", "average"}))
      ->capture_default_str();
  r->add_option("--out-dir", runargs.out_dir)->capture_default_str();
  r->add_option("--checkpoint", runargs.checkpoint, "Write the final state here");
  r->add_option("views", runargs.files, "View files in arrival order")->required()->check(CLI::ExistingFile);
  r->callback([&] { action = [&] { return cmd_run(runargs, out); }; });

  ResumeArgs resume;
  auto* m = app.add_subcommand("resume", "Fold one more view into a checkpoint");
  m->add_option("--checkpoint", resume.checkpoint, "Input checkpoint")->required()->check(CLI::ExistingFile);
  m->add_option("--out", resume.out, "Output checkpoint (default: replace the input)");
  m->add_option("--labels", resume.labels, "Also write labels here");
  add_solver_flags(m, resume.flags);
  m->add_option("view", resume.file, "New view file")->required()->check(CLI::ExistingFile);
  m->callback([&] { action = [&] { return cmd_resume(resume, out); }; });

  EvalArgs evalargs;
  auto* e = app.add_subcommand("eval", "Score predicted labels against ground truth");
  e->add_option("--labels", evalargs.labels)->required()->check(CLI::ExistingFile);
  e->add_option("--truth", evalargs.truth)->required()->check(CLI::ExistingFile);
  e->add_option("--format", evalargs.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  e->callback([&] { action = [&] { return cmd_eval(evalargs, out); }; });

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Synthetic experiment drivers");
  b->add_option("--mode", bench.mode)->check(CLI::IsMember({"ratio", "order", "scale"}))->capture_default_str();
  b->add_option("--n", bench.n)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--k", bench.k)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--views", bench.views, "Views (default 3, or 4 in order mode)");
  b->add_option("--dims", bench.dims)->capture_default_str();
  b->add_option("--separation", bench.separation)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--reps", bench.reps)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--ratios", bench.ratios)->capture_default_str();
  b->add_option("--perms", bench.perms)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--ratio", bench.ratio, "Missing ratio in order mode")->check(CLI::Range(0.0, 0.5))->capture_default_str();
  b->add_option("--method", bench.method)->check(CLI::IsMember({"iv", "zf", "af"}))->capture_default_str();
  b->add_option("--ns", bench.ns, "Sample counts in scale mode")->capture_default_str();
  b->add_option("--scale-k", bench.scale_k)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--scale-d", bench.scale_d)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--iters", bench.iters)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--repeats", bench.repeats)->check(CLI::Range(1, 1 << 20))->capture_default_str();
  b->add_option("--out-dir", bench.out_dir)->capture_default_str();
  b->add_option("--format", bench.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_solver_flags(b, bench.flags);
  b->callback([&] { action = [&] { return cmd_bench(bench, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    return report(err, "usage", kUsage, ex.what());
  }

  try {
    return action();
  } catch (const ConfigError& ex) {
    return report(err, "usage", kUsage, ex.what());
  } catch (const NumericalError& ex) {
    return report(err, "numerical", kNumerical, ex.what());
  } catch (const Error& ex) {
    return report(err, "data", kData, ex.what());
  } catch (const std::exception& ex) {
    return report(err, "data", kData, ex.what());
  }
}

}  // namespace smvc::cli
