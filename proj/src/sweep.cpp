#include "platoon/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "json.hpp"

namespace platoon {

SimConfig point_config(const SweepSpec& spec, const std::set<int>& fd, double sic,
                       SchedulerKind sched, double lambda, uint64_t seed) {
  SimConfig cfg = spec.base;
  cfg.fd_positions = fd;
  cfg.channel.sic_db = sic;
  cfg.scheduler = sched;
  cfg.arrivals.lambda = lambda;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::string> validate_sweep(const SweepSpec& spec) {
  std::vector<std::string> errors;
  const size_t points = spec.fd_axis.size() * spec.sic_axis.size() *
                        spec.scheduler_axis.size() * spec.lambda_axis.size() *
                        spec.seed_axis.size();
  if (points == 0) {
    errors.push_back("sweep: empty axis");
    return errors;
  }
  if (spec.max_points > 0 && points > static_cast<size_t>(spec.max_points)) {
    errors.push_back("sweep: " + std::to_string(points) + " points exceed max_points " +
                     std::to_string(spec.max_points));
  }
  for (const auto& fd : spec.fd_axis) {
    for (double sic : spec.sic_axis) {
      for (SchedulerKind sched : spec.scheduler_axis) {
        for (double lambda : spec.lambda_axis) {
          const SimConfig cfg =
              point_config(spec, fd, sic, sched, lambda, spec.seed_axis.front());
          for (const auto& e : validate_config(cfg)) {
            errors.push_back("sweep point (" + std::string(scheduler_name(sched)) + ", fd=" +
                             format_fd_positions(fd) + "): " + e);
          }
        }
      }
    }
  }
  return errors;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, int parallelism) {
  std::vector<SimConfig> configs;
  std::vector<ResultRow> rows;
  for (const auto& fd : spec.fd_axis) {
    for (double sic : spec.sic_axis) {
      for (SchedulerKind sched : spec.scheduler_axis) {
        for (double lambda : spec.lambda_axis) {
          for (uint64_t seed : spec.seed_axis) {
            configs.push_back(point_config(spec, fd, sic, sched, lambda, seed));
            ResultRow row;
            row.scheduler = sched;
            row.fd_positions = fd;
            row.sic_db = sic;
            row.lambda = lambda;
            row.seed = seed;
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }

  auto run_point = [&](size_t i) {
    ResultRow& row = rows[i];
    try {
      const Metrics m = run(configs[i]);
      const Report r = summarize(m, configs[i].slot_duration_s);
      row.ok = true;
      row.delivered = r.delivered;
      row.undelivered = r.undelivered;
      row.mean_latency_ms = r.no_samples ? std::nan("") : r.mean_latency_ms;
      row.max_latency_ms = r.no_samples ? std::nan("") : r.max_latency_ms;
      row.recomputes = r.recomputes;
      row.violation_slots = r.violation_slots;
      row.conservation_ok = r.conservation_ok;
      row.backlog_slope = r.backlog_slope_bits_per_slot;
      row.stable = r.stable;
      for (const FlowReport& fr : r.flows) {
        row.flow_mean_ms.push_back(fr.no_samples ? std::nan("") : fr.mean_latency_ms);
        row.flow_max_ms.push_back(fr.no_samples ? std::nan("") : fr.max_latency_ms);
        row.flow_throughput_bps.push_back(fr.throughput_bps);
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  int workers = parallelism;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (static_cast<size_t>(workers) > configs.size()) workers = static_cast<int>(configs.size());

  if (workers == 1) {
    for (size_t i = 0; i < configs.size(); ++i) run_point(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
          run_point(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return rows;
}

namespace {

nlohmann::json json_number(double v) {
  return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
}

std::string fixed6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows, int num_flows) {
  std::string out =
      "scheduler,fd_positions,sic_db,lambda,seed,ok,delivered,undelivered,"
      "mean_latency_ms,max_latency_ms,recomputes,violation_slots,conservation_ok,"
      "backlog_slope_bits_per_slot,stable,error";
  for (int f = 1; f <= num_flows; ++f) out += ",flow" + std::to_string(f) + "_mean_ms";
  for (int f = 1; f <= num_flows; ++f) out += ",flow" + std::to_string(f) + "_max_ms";
  out += "\n";
  for (const ResultRow& r : rows) {
    out += scheduler_name(r.scheduler);
    out += "," + format_fd_positions(r.fd_positions);
    out += "," + fixed6(r.sic_db);
    out += "," + fixed6(r.lambda);
    out += "," + std::to_string(r.seed);
    out += r.ok ? ",1" : ",0";
    out += "," + std::to_string(r.delivered);
    out += "," + std::to_string(r.undelivered);
    out += "," + fixed6(r.mean_latency_ms);
    out += "," + fixed6(r.max_latency_ms);
    out += "," + std::to_string(r.recomputes);
    out += "," + std::to_string(r.violation_slots);
    out += r.conservation_ok ? ",1" : ",0";
    out += "," + fixed6(r.backlog_slope);
    out += r.stable ? ",1" : ",0";
    out += "," + csv_safe(r.error);
    for (int f = 0; f < num_flows; ++f) {
      out += ",";
      out += f < static_cast<int>(r.flow_mean_ms.size()) ? fixed6(r.flow_mean_ms[static_cast<size_t>(f)])
                                                         : "nan";
    }
    for (int f = 0; f < num_flows; ++f) {
      out += ",";
      out += f < static_cast<int>(r.flow_max_ms.size()) ? fixed6(r.flow_max_ms[static_cast<size_t>(f)])
                                                        : "nan";
    }
    out += "\n";
  }
  return out;
}

std::string rows_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    nlohmann::json row;
    row["scheduler"] = scheduler_name(r.scheduler);
    row["fd_positions"] = std::vector<int>(r.fd_positions.begin(), r.fd_positions.end());
    row["sic_db"] = r.sic_db;
    row["lambda"] = r.lambda;
    row["seed"] = r.seed;
    row["ok"] = r.ok;
    if (!r.ok) {
      row["error"] = r.error;
      arr.push_back(row);
      continue;
    }
    row["delivered"] = r.delivered;
    row["undelivered"] = r.undelivered;
    row["mean_latency_ms"] = json_number(r.mean_latency_ms);
    row["max_latency_ms"] = json_number(r.max_latency_ms);
    row["recomputes"] = r.recomputes;
    row["violation_slots"] = r.violation_slots;
    row["conservation_ok"] = r.conservation_ok;
    row["backlog_slope_bits_per_slot"] = r.backlog_slope;
    row["stable"] = r.stable;
    nlohmann::json flows = nlohmann::json::array();
    for (size_t f = 0; f < r.flow_mean_ms.size(); ++f) {
      nlohmann::json fl;
      fl["flow"] = f + 1;
      fl["mean_ms"] = json_number(r.flow_mean_ms[f]);
      fl["max_ms"] = json_number(r.flow_max_ms[f]);
      fl["throughput_bps"] = r.flow_throughput_bps[f];
      flows.push_back(fl);
    }
    row["flows"] = flows;
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

}  // namespace platoon
