// Command-line front end: run single simulations, parameter sweeps, config
// validation, and frame-schedule inspection.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "platoon/config.hpp"
#include "platoon/sim.hpp"
#include "platoon/sweep.hpp"

namespace {

using namespace platoon;

struct CommonOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir;
  std::string format;  // "", "csv" or "json"
  int parallel = 1;
};

ParsedConfig load(const CommonOpts& opts) {
  ParsedConfig parsed = parse_config_file(opts.config_path);
  if (opts.seed) {
    parsed.config.seed = *opts.seed;
    if (parsed.sweep) {
      parsed.sweep->base.seed = *opts.seed;
      parsed.sweep->seed_axis = {*opts.seed};
    }
  }
  return parsed;
}

void require_valid(const SimConfig& cfg) {
  const auto errors = validate_config(cfg);
  if (!errors.empty()) {
    std::string msg = "invalid config";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  for (const auto& w : config_warnings(cfg)) std::cerr << "warning: " << w << "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_outputs(const CommonOpts& opts, const std::vector<ResultRow>& rows, int num_flows) {
  if (opts.out_dir.empty()) return;
  std::filesystem::create_directories(opts.out_dir);
  const std::filesystem::path dir(opts.out_dir);
  if (opts.format.empty() || opts.format == "csv") {
    write_file(dir / "results.csv", rows_to_csv(rows, num_flows));
    std::cout << "wrote " << (dir / "results.csv").string() << "\n";
  }
  if (opts.format.empty() || opts.format == "json") {
    write_file(dir / "results.json", rows_to_json(rows));
    std::cout << "wrote " << (dir / "results.json").string() << "\n";
  }
}

void write_histogram(const CommonOpts& opts, const Metrics& m) {
  if (opts.out_dir.empty()) return;
  std::map<int64_t, int64_t> hist;
  for (const auto& fm : m.per_flow) {
    for (int64_t s : fm.latency_samples) ++hist[s];
  }
  std::string out = "latency_slots,latency_ms,count\n";
  char buf[96];
  for (const auto& [slots, count] : hist) {
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%lld\n", static_cast<long long>(slots),
                  slots_to_ms(slots, m.slot_duration_s), static_cast<long long>(count));
    out += buf;
  }
  write_file(std::filesystem::path(opts.out_dir) / "latency_histogram.csv", out);
}

int cmd_run(const CommonOpts& opts) {
  ParsedConfig parsed = load(opts);
  if (parsed.sweep) {
    throw ConfigError("config has a [sweep] section; use the 'sweep' command");
  }
  const SimConfig& cfg = parsed.config;
  require_valid(cfg);

  const Metrics m = run(cfg);
  const Report r = summarize(m, cfg.slot_duration_s);

  std::printf("scheduler=%s n=%d fd=%s sic=%s lambda=%s seed=%llu slots=%lld frame=%d\n",
              scheduler_name(cfg.scheduler), cfg.n_vehicles,
              format_fd_positions(cfg.fd_positions).c_str(),
              format_double(cfg.channel.sic_db).c_str(),
              format_double(cfg.arrivals.lambda).c_str(),
              static_cast<unsigned long long>(cfg.seed),
              static_cast<long long>(cfg.total_slots), m.frame_length);
  if (r.no_samples) {
    std::printf("delivered=%lld undelivered=%lld (no latency samples)\n",
                static_cast<long long>(r.delivered), static_cast<long long>(r.undelivered));
  } else {
    std::printf("delivered=%lld undelivered=%lld mean=%.3f ms max=%.3f ms\n",
                static_cast<long long>(r.delivered), static_cast<long long>(r.undelivered),
                r.mean_latency_ms, r.max_latency_ms);
  }
  std::printf("%-6s %-5s %-10s %-12s %-12s %-14s\n", "flow", "hops", "delivered", "mean_ms",
              "max_ms", "throughput_bps");
  const Topology topo(cfg.n_vehicles, cfg.fd_positions);
  for (const FlowReport& fr : r.flows) {
    if (fr.no_samples) {
      std::printf("%-6d %-5d %-10lld %-12s %-12s %-14.0f\n", fr.flow, topo.flow(fr.flow).hops,
                  static_cast<long long>(fr.delivered), "-", "-", fr.throughput_bps);
    } else {
      std::printf("%-6d %-5d %-10lld %-12.3f %-12.3f %-14.0f\n", fr.flow, topo.flow(fr.flow).hops,
                  static_cast<long long>(fr.delivered), fr.mean_latency_ms, fr.max_latency_ms,
                  fr.throughput_bps);
    }
  }
  std::printf("stability: slope=%.3f bits/slot (%s)\n", r.backlog_slope_bits_per_slot,
              r.stable ? "stable" : "UNSTABLE");
  std::printf("recomputes=%lld violation_slots=%lld conservation=%s\n",
              static_cast<long long>(r.recomputes), static_cast<long long>(r.violation_slots),
              r.conservation_ok ? "ok" : "BROKEN");

  // Single-row sweep output so run and sweep share the same file schema.
  SweepSpec single;
  single.base = cfg;
  single.fd_axis = {cfg.fd_positions};
  single.sic_axis = {cfg.channel.sic_db};
  single.scheduler_axis = {cfg.scheduler};
  single.lambda_axis = {cfg.arrivals.lambda};
  single.seed_axis = {cfg.seed};
  const auto rows = run_sweep(single, 1);
  write_outputs(opts, rows, topo.num_flows());
  write_histogram(opts, m);
  return 0;
}

int cmd_sweep(const CommonOpts& opts) {
  ParsedConfig parsed = load(opts);
  SweepSpec spec;
  if (parsed.sweep) {
    spec = *parsed.sweep;
  } else {
    // A plain config is a one-point sweep.
    spec.base = parsed.config;
    spec.fd_axis = {parsed.config.fd_positions};
    spec.sic_axis = {parsed.config.channel.sic_db};
    spec.scheduler_axis = {parsed.config.scheduler};
    spec.lambda_axis = {parsed.config.arrivals.lambda};
    spec.seed_axis = {parsed.config.seed};
  }
  const auto errors = validate_sweep(spec);
  if (!errors.empty()) {
    std::string msg = "invalid sweep";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  const auto rows = run_sweep(spec, opts.parallel);
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.ok) ++failures;
  }
  std::printf("ran %zu points (%d failed)\n", rows.size(), failures);
  const Topology topo(spec.base.n_vehicles, {});
  if (opts.out_dir.empty()) {
    std::cout << rows_to_csv(rows, topo.num_flows());
  } else {
    write_outputs(opts, rows, topo.num_flows());
  }
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  ParsedConfig parsed = load(opts);
  const auto errors = validate_config(parsed.config);
  std::vector<std::string> sweep_errors;
  if (parsed.sweep) sweep_errors = validate_sweep(*parsed.sweep);
  if (!errors.empty() || !sweep_errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
    for (const auto& e : sweep_errors) std::cerr << "error: " << e << "\n";
    return 1;
  }
  for (const auto& w : config_warnings(parsed.config)) std::cerr << "warning: " << w << "\n";
  std::cout << emit_config(parsed.config);
  if (parsed.sweep) {
    const SweepSpec& s = *parsed.sweep;
    const size_t points = s.fd_axis.size() * s.sic_axis.size() * s.scheduler_axis.size() *
                          s.lambda_axis.size() * s.seed_axis.size();
    std::cout << "# sweep: " << points << " points\n";
  }
  return 0;
}

int cmd_frame(const CommonOpts& opts) {
  ParsedConfig parsed = load(opts);
  const SimConfig& cfg = parsed.config;
  require_valid(cfg);
  if (cfg.scheduler == SchedulerKind::BackPressure) {
    throw ConfigError("scheduler bp decides per slot and has no frame schedule");
  }
  const Topology topo(cfg.n_vehicles, cfg.fd_positions, cfg.gamma_by_hops);
  const int T = resolved_frame_length(cfg);
  FrameSchedule frame;
  if (cfg.scheduler == SchedulerKind::FlowBased) {
    frame = build_fb_frame(topo, T);
  } else {
    // Queue-based schedule at the first frame boundary: empty queues, one
    // capacity draw with the configured seed.
    QueueState queues(topo);
    std::seed_seq seq{cfg.seed, static_cast<uint64_t>(0x6368616e)};
    std::mt19937_64 rng(seq);
    const ChannelModel channel(cfg.channel, cfg.slot_duration_s);
    frame = build_qb_frame(topo, queues, channel.draw(topo, rng), T);
  }

  std::printf("scheduler=%s frame_length=%d\n", scheduler_name(cfg.scheduler), T);
  for (size_t u = 0; u < frame.units.size(); ++u) {
    std::string members;
    for (int b : frame.units[u].bidi_ids) {
      if (!members.empty()) members += "+";
      members += "L" + std::to_string(b);
    }
    if (frame.units[u].bidi_ids.size() > 1) {
      std::printf("FD group: {%s} may share slots\n", members.c_str());
    }
  }
  for (size_t b = 0; b < frame.bidi_slots.size(); ++b) {
    std::printf("link L%zu: %d slots/frame\n", b + 1, frame.bidi_demands[b]);
  }
  std::printf("%-6s", "slot");
  for (size_t b = 0; b < frame.bidi_slots.size(); ++b) {
    std::printf(" L%-3zu", b + 1);
  }
  std::printf("\n");
  for (int s = 0; s < T; ++s) {
    std::printf("%-6d", s + 1);
    for (size_t b = 0; b < frame.bidi_slots.size(); ++b) {
      const auto& slots = frame.bidi_slots[b];
      const bool on = std::find(slots.begin(), slots.end(), s) != slots.end();
      std::printf(" %-4s", on ? "x" : ".");
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted-time scheduling simulator for a vehicle platoon line network"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* cmd, bool with_parallel) {
    cmd->add_option("config", opts.config_path, "config file")->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--out-dir", opts.out_dir, "directory for result files");
    cmd->add_option("--format", opts.format, "restrict output files to one format")
        ->check(CLI::IsMember({"csv", "json"}));
    if (with_parallel) {
      cmd->add_option("--parallel", opts.parallel, "worker threads (0 = hardware)");
    }
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one simulation");
  add_common(run_cmd, false);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep_cmd, true);
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config and print its canonical form");
  add_common(validate_cmd, false);
  CLI::App* frame_cmd = app.add_subcommand("frame", "print the TDMA frame schedule");
  add_common(frame_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(opts);
    if (sweep_cmd->parsed()) return cmd_sweep(opts);
    if (validate_cmd->parsed()) return cmd_validate(opts);
    if (frame_cmd->parsed()) return cmd_frame(opts);
  } catch (const platoon::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
