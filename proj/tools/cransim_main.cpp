#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cransim/code_design.hpp"
#include "cransim/density_evolution.hpp"
#include "cransim/harness.hpp"
#include "cransim/peeling.hpp"

namespace {

using namespace cransim;

// Code selection shared by the de/threshold/peel-mc subcommands: either a
// (d_v, d_c) regular pair or a palette label.
struct CodeSelect {
  int d_v = 0;
  int d_c = 0;
  std::string label;
  std::string palette_path;

  void attach(CLI::App* app) {
    app->add_option("--dv", d_v, "variable degree of a regular code");
    app->add_option("--dc", d_c, "check degree of a regular code");
    app->add_option("--label", label, "palette code label");
    app->add_option("--palette", palette_path, "palette file (used with --label)");
  }

  DegreeDistribution resolve() const {
    if (!label.empty()) {
      CodePalette palette = palette_path.empty() ? build_standard_palette()
                                                 : CodePalette::load(palette_path);
      const CodeSpec* code = palette.find_label(label);
      if (!code) throw CLI::ValidationError("--label", "no palette code named '" + label + "'");
      return code->distribution;
    }
    if (d_v >= 2 && d_c > d_v) return DegreeDistribution::regular(d_v, d_c);
    throw CLI::ValidationError("--dv/--dc", "select a code with --label or --dv/--dc");
  }
};

std::vector<SchedulerKind> parse_scheduler_list(const std::string& arg) {
  std::vector<SchedulerKind> kinds;
  std::size_t pos = 0;
  while (pos <= arg.size()) {
    const std::size_t comma = arg.find(',', pos);
    const std::string tok = arg.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) {
      auto kind = parse_scheduler(tok);
      if (!kind) throw CLI::ValidationError("--scheduler", "unknown scheduler '" + tok + "'");
      kinds.push_back(*kind);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (kinds.empty()) throw CLI::ValidationError("--scheduler", "no scheduler given");
  return kinds;
}

void attach_sim_flags(CLI::App* app, SimConfig& cfg, std::string& scheduler_arg, int& threads) {
  app->add_option("--scheduler", scheduler_arg, "mrs|ejf|local-limit|scc (comma list in sweep)");
  app->add_option("--alpha", cfg.alpha, "path-loss exponent");
  app->add_option("--utilization", cfg.utilization, "fraction of occupied cells");
  app->add_option("--cluster-size", cfg.cluster_size, "computing cluster size N");
  app->add_option("--gamma-db", cfg.gamma_db, "SNR at unit distance, dB");
  app->add_option("--s", cfg.s, "fractional power control factor");
  app->add_option("--trials", cfg.trials, "Monte Carlo trials per point");
  app->add_option("--seed", cfg.seed, "master seed");
  app->add_option("--c-server", cfg.c_server, "total cluster complexity budget");
  app->add_option("--c-loc", cfg.c_loc, "per-user complexity limit (local-limit)");
  app->add_option("--palette", cfg.palette_path, "palette file");
  app->add_option("--calibration", cfg.calibration_path, "calibration file");
  app->add_option("--eps-thresh", cfg.de.eps_thresh, "DE convergence threshold");
  app->add_option("--max-iters", cfg.de.max_iters, "DE iteration cap");
  app->add_option("--threads", threads, "worker threads (0 = hardware)");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LDPC decoding-complexity analysis and C-RAN uplink scheduling simulator"};
  app.require_subcommand(1);

  // --- de ---
  auto* de_cmd = app.add_subcommand("de", "run the erasure density-evolution recursion");
  CodeSelect de_select;
  de_select.attach(de_cmd);
  double de_eps0 = 0.4;
  DeConfig de_cfg;
  de_cmd->add_option("--eps0", de_eps0, "initial erasure probability")->required();
  de_cmd->add_option("--eps-thresh", de_cfg.eps_thresh, "convergence threshold");
  de_cmd->add_option("--max-iters", de_cfg.max_iters, "iteration cap");
  de_cmd->callback([&]() {
    const DegreeDistribution dist = de_select.resolve();
    const DeTrace trace = run_de(dist, de_eps0, de_cfg);
    std::printf("iteration,epsilon\n");
    for (std::size_t i = 0; i < trace.eps_sequence.size(); ++i) {
      std::printf("%zu,%.12g\n", i, trace.eps_sequence[i]);
    }
    const char* status = trace.status == DeStatus::converged ? "converged"
                         : trace.status == DeStatus::stalled ? "stalled"
                                                             : "iteration-cap";
    std::fprintf(stderr, "# %s after %d iterations\n", status, trace.iterations());
  });

  // --- threshold ---
  auto* th_cmd = app.add_subcommand("threshold", "analytic erasure threshold of a code");
  CodeSelect th_select;
  th_select.attach(th_cmd);
  ThresholdConfig th_cfg;
  th_cmd->add_option("--x-lo", th_cfg.x_lo, "lower end of the x grid");
  th_cmd->add_option("--grid", th_cfg.grid_points, "grid points");
  th_cmd->callback([&]() {
    const double eps_star = threshold(th_select.resolve(), th_cfg);
    std::printf("%.6f\n", eps_star);
  });

  // --- design ---
  auto* design_cmd = app.add_subcommand("design", "design check-regular ensembles");
  DesignProblem dp;
  double design_rate = 0.0;
  std::string design_out;
  bool standard_palette = false;
  design_cmd->add_option("--rate", design_rate, "target design rate");
  design_cmd->add_option("--dc", dp.d_c, "check degree");
  design_cmd->add_option("--dmax", dp.d_max, "maximum variable degree");
  design_cmd->add_option("--x-grid", dp.x_grid_points, "feasibility grid points");
  design_cmd->add_option("--out", design_out, "palette file to write");
  design_cmd->add_flag("--standard-palette", standard_palette,
                       "build the canonical eight-code d_c=7 palette");
  design_cmd->callback([&]() {
    if (standard_palette) {
      CodePalette palette = build_standard_palette();
      if (!design_out.empty()) palette.save(design_out);
      for (const auto& code : palette.codes()) {
        std::printf("%-14s rate=%.12g threshold=%.6f\n", code.label.c_str(), code.rate,
                    code.threshold);
      }
      return;
    }
    if (design_rate <= 0.0) {
      throw CLI::ValidationError("--rate", "give --rate or --standard-palette");
    }
    dp.target_rate = design_rate;
    const CodeSpec code = optimize(dp);
    std::printf("%-14s rate=%.12g threshold=%.6f\n", code.label.c_str(), code.rate,
                code.threshold);
    if (!design_out.empty()) {
      CodePalette palette{std::vector<CodeSpec>{code}};
      palette.save(design_out);
    }
  });

  // --- peel-mc ---
  auto* peel_cmd = app.add_subcommand("peel-mc", "finite-length peeling Monte Carlo");
  CodeSelect peel_select;
  peel_select.attach(peel_cmd);
  int peel_n = 1200, peel_trials = 100;
  double peel_eps0 = 0.4;
  std::uint64_t peel_seed = 1;
  peel_cmd->add_option("--n", peel_n, "block length");
  peel_cmd->add_option("--eps0", peel_eps0, "erasure probability")->required();
  peel_cmd->add_option("--trials", peel_trials, "number of trials");
  peel_cmd->add_option("--seed", peel_seed, "master seed");
  peel_cmd->callback([&]() {
    const DegreeDistribution dist = peel_select.resolve();
    std::printf("trial,success,passes\n");
    int successes = 0;
    for (int t = 0; t < peel_trials; ++t) {
      const PeelTrial trial = peel_mc_trial(dist, peel_n, peel_eps0,
                                            rng::derive_seed(peel_seed, t));
      successes += trial.success;
      std::printf("%d,%d,%d\n", t, trial.success ? 1 : 0, trial.passes);
    }
    std::fprintf(stderr, "# success rate %.4f\n", double(successes) / peel_trials);
  });

  // --- calibrate ---
  auto* cal_cmd = app.add_subcommand("calibrate", "fit the SINR -> eps0 mapping");
  int cal_trials = 2000;
  std::uint64_t cal_seed = 0x5ca1ab1e;
  std::string cal_out, cal_csv;
  cal_cmd->add_option("--trials", cal_trials, "calibration drops");
  cal_cmd->add_option("--seed", cal_seed, "master seed");
  cal_cmd->add_option("--out", cal_out, "calibration file to write");
  cal_cmd->add_option("--csv", cal_csv, "CCDF table CSV to write");
  cal_cmd->callback([&]() {
    Topology topo = Topology::build(7, 3.0, 20.0, 0.1);
    rng::Prng rng(rng::derive_seed(cal_seed, 0));
    const CalibrationCurve curve = calibrate(topo, cal_trials, rng, cal_seed);
    std::printf("a=%.12g b=%.12g range=[%.4f,%.4f] samples=%ld\n", curve.a(), curve.b(),
                curve.gamma_db_min(), curve.gamma_db_max(), curve.samples());
    if (!cal_out.empty()) curve.save(cal_out);
    FILE* csv = nullptr;
    if (!cal_csv.empty()) csv = std::fopen(cal_csv.c_str(), "w");
    FILE* dst = csv ? csv : stdout;
    std::fprintf(dst, "gamma_db,ccdf\n");
    for (const auto& p : curve.table()) {
      std::fprintf(dst, "%.12g,%.12g\n", p.gamma_db, p.ccdf);
    }
    if (csv) std::fclose(csv);
  });

  // --- simulate ---
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run at one configuration");
  SimConfig sim_cfg;
  std::string sim_sched = "mrs", sim_out;
  int sim_threads = 0;
  attach_sim_flags(sim_cmd, sim_cfg, sim_sched, sim_threads);
  sim_cmd->add_option("--out", sim_out, "results CSV path");
  sim_cmd->callback([&]() {
    auto kinds = parse_scheduler_list(sim_sched);
    print_warnings(sim_cfg.validate());
    SimContext base_ctx = SimContext::make(sim_cfg);
    std::vector<SweepResult> rows;
    for (SchedulerKind kind : kinds) {
      SimConfig cfg = sim_cfg;
      cfg.scheduler = kind;
      SimContext ctx = SimContext::make(cfg, base_ctx.palette, base_ctx.curve);
      ctx.cache = base_ctx.cache;
      const TrialSeries series = run_trials(ctx, cfg.trials, rng::derive_seed(cfg.seed, 0),
                                            sim_threads);
      rows.push_back(aggregate(cfg, series));
    }
    for (const auto& r : rows) {
      std::printf("%s: mean_throughput=%.6f stderr=%.6f outage_prob=%.4f\n", r.scheduler.c_str(),
                  r.mean_throughput, r.stderr_throughput, r.outage_prob);
    }
    if (!sim_out.empty()) emit_results(rows, sim_out);
  });

  // --- sweep ---
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one variable across points");
  SimConfig sweep_cfg;
  std::string sweep_sched = "mrs,ejf,local-limit,scc", sweep_var = "alpha", sweep_out;
  std::vector<double> sweep_points;
  int sweep_threads = 0;
  attach_sim_flags(sweep_cmd, sweep_cfg, sweep_sched, sweep_threads);
  sweep_cmd->add_option("--var", sweep_var, "alpha|utilization|cluster-size")->required();
  sweep_cmd->add_option("--points", sweep_points, "sweep points")->required()->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "results CSV path");
  sweep_cmd->callback([&]() {
    const auto var = parse_sweep_variable(sweep_var);
    if (!var) throw CLI::ValidationError("--var", "unknown sweep variable '" + sweep_var + "'");
    print_warnings(sweep_cfg.validate());
    const auto rows = run_sweep(sweep_cfg, *var, sweep_points, parse_scheduler_list(sweep_sched),
                                sweep_threads);
    for (const auto& r : rows) {
      std::printf("%s %s=%g: mean_throughput=%.6f stderr=%.6f outage_prob=%.4f\n",
                  r.scheduler.c_str(), sweep_var.c_str(),
                  *var == SweepVariable::alpha        ? r.alpha
                  : *var == SweepVariable::utilization ? r.utilization
                                                       : double(r.cluster_size),
                  r.mean_throughput, r.stderr_throughput, r.outage_prob);
    }
    if (!sweep_out.empty()) emit_results(rows, sweep_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
