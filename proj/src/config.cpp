#include "platoon/config.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace platoon {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct Cursor {
  std::string source;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const Cursor& c, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    c.fail("key '" + key + "': expected a number, got '" + v + "'");
  }
}

int64_t parse_int(const Cursor& c, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    c.fail("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

uint64_t parse_uint(const Cursor& c, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    c.fail("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

SchedulerKind parse_scheduler(const Cursor& c, const std::string& v) {
  if (v == "fb") return SchedulerKind::FlowBased;
  if (v == "bp") return SchedulerKind::BackPressure;
  if (v == "qb") return SchedulerKind::QueueBased;
  c.fail("unknown scheduler '" + v + "' (expected fb, bp or qb)");
}

// "none" or comma-separated node indices, e.g. "1,2".
std::set<int> parse_fd_set(const Cursor& c, const std::string& token) {
  std::set<int> out;
  if (token == "none" || token.empty()) return out;
  std::string item;
  std::istringstream in(token);
  while (std::getline(in, item, ',')) {
    out.insert(static_cast<int>(parse_int(c, "fd_positions", trim(item))));
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

std::string format_fd_positions(const std::set<int>& fd) {
  if (fd.empty()) return "none";
  std::string out;
  for (int p : fd) {
    if (!out.empty()) out += '+';
    out += std::to_string(p);
  }
  return out;
}

ParsedConfig parse_config_text(const std::string& text, const std::string& source_name) {
  ParsedConfig result;
  SimConfig& cfg = result.config;
  SweepSpec sweep;
  bool has_sweep = false;

  Cursor cur{source_name, 0};
  std::istringstream in(text);
  std::string raw;
  std::string section;

  while (std::getline(in, raw)) {
    ++cur.line;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') cur.fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "sim" && section != "channel" && section != "arrivals" &&
          section != "scheduler" && section != "sweep") {
        cur.fail("unknown section [" + section + "]");
      }
      if (section == "sweep") has_sweep = true;
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) cur.fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) cur.fail("key '" + key + "' outside any section");
    if (key.empty()) cur.fail("empty key");

    if (section == "sim") {
      if (key == "n_vehicles") {
        cfg.n_vehicles = static_cast<int>(parse_int(cur, key, value));
      } else if (key == "fd_positions") {
        cfg.fd_positions.clear();
        for (const auto& tok : split_ws(value)) {
          auto set = parse_fd_set(cur, tok);
          cfg.fd_positions.insert(set.begin(), set.end());
        }
      } else if (key == "total_slots") {
        cfg.total_slots = parse_int(cur, key, value);
      } else if (key == "slot_duration_us") {
        cfg.slot_duration_s = parse_double(cur, key, value) * 1e-6;
      } else if (key == "frame_length") {
        cfg.frame_length = value == "auto" ? 0 : static_cast<int>(parse_int(cur, key, value));
      } else if (key == "seed") {
        cfg.seed = parse_uint(cur, key, value);
      } else if (key == "warmup_slots") {
        cfg.warmup_slots = parse_int(cur, key, value);
      } else {
        cur.fail("unknown key '" + key + "' in [sim]");
      }
    } else if (section == "channel") {
      ChannelConfig& ch = cfg.channel;
      if (key == "carrier_freq_ghz") {
        ch.carrier_freq_hz = parse_double(cur, key, value) * 1e9;
      } else if (key == "bandwidth_mhz") {
        ch.bandwidth_hz = parse_double(cur, key, value) * 1e6;
      } else if (key == "tx_power_dbm") {
        ch.tx_power_dbm = parse_double(cur, key, value);
      } else if (key == "shadowing_mean_db") {
        ch.shadowing_mean_db = parse_double(cur, key, value);
      } else if (key == "shadowing_std_db") {
        ch.shadowing_std_db = parse_double(cur, key, value);
      } else if (key == "noise_psd_dbm_hz") {
        ch.noise_psd_dbm_hz = parse_double(cur, key, value);
      } else if (key == "noise_figure_db") {
        ch.noise_figure_db = parse_double(cur, key, value);
      } else if (key == "sic_db") {
        ch.sic_db = value == "inf" ? std::numeric_limits<double>::infinity()
                                   : parse_double(cur, key, value);
      } else if (key == "vehicle_length_m") {
        ch.vehicle_length_m = parse_double(cur, key, value);
      } else if (key == "vehicle_separation_m") {
        ch.vehicle_separation_m = parse_double(cur, key, value);
      } else if (key == "coherence") {
        if (value == "frame") {
          ch.coherence = Coherence::PerFrame;
        } else if (value == "slot") {
          ch.coherence = Coherence::PerSlot;
        } else {
          cur.fail("coherence must be 'frame' or 'slot'");
        }
      } else {
        cur.fail("unknown key '" + key + "' in [channel]");
      }
    } else if (section == "arrivals") {
      if (key == "lambda") {
        cfg.arrivals.lambda = parse_double(cur, key, value);
      } else if (key == "packet_sizes_kbit") {
        cfg.arrivals.sizes_bits.clear();
        for (const auto& tok : split_ws(value)) {
          cfg.arrivals.sizes_bits.push_back(parse_int(cur, key, tok) * 1000);
        }
      } else {
        cur.fail("unknown key '" + key + "' in [arrivals]");
      }
    } else if (section == "scheduler") {
      if (key == "algo") {
        cfg.scheduler = parse_scheduler(cur, value);
      } else if (key == "gamma_by_hops") {
        cfg.gamma_by_hops.clear();
        if (value != "auto") {
          for (const auto& tok : split_ws(value)) {
            cfg.gamma_by_hops.push_back(parse_double(cur, key, tok));
          }
        }
      } else {
        cur.fail("unknown key '" + key + "' in [scheduler]");
      }
    } else {  // sweep
      if (key == "fd_positions") {
        sweep.fd_axis.clear();
        for (const auto& tok : split_ws(value)) sweep.fd_axis.push_back(parse_fd_set(cur, tok));
      } else if (key == "sic_db") {
        sweep.sic_axis.clear();
        for (const auto& tok : split_ws(value)) {
          sweep.sic_axis.push_back(tok == "inf" ? std::numeric_limits<double>::infinity()
                                                : parse_double(cur, key, tok));
        }
      } else if (key == "algo") {
        sweep.scheduler_axis.clear();
        for (const auto& tok : split_ws(value)) {
          sweep.scheduler_axis.push_back(parse_scheduler(cur, tok));
        }
      } else if (key == "lambda") {
        sweep.lambda_axis.clear();
        for (const auto& tok : split_ws(value)) {
          sweep.lambda_axis.push_back(parse_double(cur, key, tok));
        }
      } else if (key == "seeds") {
        sweep.seed_axis.clear();
        for (const auto& tok : split_ws(value)) sweep.seed_axis.push_back(parse_uint(cur, key, tok));
      } else if (key == "max_points") {
        sweep.max_points = static_cast<int>(parse_int(cur, key, value));
      } else {
        cur.fail("unknown key '" + key + "' in [sweep]");
      }
    }
  }

  if (has_sweep) {
    sweep.base = cfg;
    if (sweep.fd_axis.empty()) sweep.fd_axis.push_back(cfg.fd_positions);
    if (sweep.sic_axis.empty()) sweep.sic_axis.push_back(cfg.channel.sic_db);
    if (sweep.scheduler_axis.empty()) sweep.scheduler_axis.push_back(cfg.scheduler);
    if (sweep.lambda_axis.empty()) sweep.lambda_axis.push_back(cfg.arrivals.lambda);
    if (sweep.seed_axis.empty()) sweep.seed_axis.push_back(cfg.seed);
    result.sweep = std::move(sweep);
  }
  return result;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string emit_config(const SimConfig& cfg) {
  std::ostringstream out;
  out << "[sim]\n";
  out << "n_vehicles = " << cfg.n_vehicles << "\n";
  out << "fd_positions = ";
  if (cfg.fd_positions.empty()) {
    out << "none";
  } else {
    bool first = true;
    for (int p : cfg.fd_positions) {
      out << (first ? "" : ",") << p;
      first = false;
    }
  }
  out << "\n";
  out << "total_slots = " << cfg.total_slots << "\n";
  out << "slot_duration_us = " << format_double(cfg.slot_duration_s * 1e6) << "\n";
  out << "frame_length = ";
  if (cfg.frame_length == 0) {
    out << "auto";
  } else {
    out << cfg.frame_length;
  }
  out << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "warmup_slots = " << cfg.warmup_slots << "\n";
  out << "\n[channel]\n";
  const ChannelConfig& ch = cfg.channel;
  out << "carrier_freq_ghz = " << format_double(ch.carrier_freq_hz / 1e9) << "\n";
  out << "bandwidth_mhz = " << format_double(ch.bandwidth_hz / 1e6) << "\n";
  out << "tx_power_dbm = " << format_double(ch.tx_power_dbm) << "\n";
  out << "shadowing_mean_db = " << format_double(ch.shadowing_mean_db) << "\n";
  out << "shadowing_std_db = " << format_double(ch.shadowing_std_db) << "\n";
  out << "noise_psd_dbm_hz = " << format_double(ch.noise_psd_dbm_hz) << "\n";
  out << "noise_figure_db = " << format_double(ch.noise_figure_db) << "\n";
  out << "sic_db = " << (std::isinf(ch.sic_db) ? "inf" : format_double(ch.sic_db)) << "\n";
  out << "vehicle_length_m = " << format_double(ch.vehicle_length_m) << "\n";
  out << "vehicle_separation_m = " << format_double(ch.vehicle_separation_m) << "\n";
  out << "coherence = " << (ch.coherence == Coherence::PerFrame ? "frame" : "slot") << "\n";
  out << "\n[arrivals]\n";
  out << "lambda = " << format_double(cfg.arrivals.lambda) << "\n";
  out << "packet_sizes_kbit =";
  for (int64_t s : cfg.arrivals.sizes_bits) out << " " << s / 1000;
  out << "\n";
  out << "\n[scheduler]\n";
  out << "algo = " << scheduler_name(cfg.scheduler) << "\n";
  out << "gamma_by_hops =";
  if (cfg.gamma_by_hops.empty()) {
    out << " auto";
  } else {
    for (double g : cfg.gamma_by_hops) out << " " << format_double(g);
  }
  out << "\n";
  return out.str();
}

int resolved_frame_length(const SimConfig& cfg) {
  if (cfg.frame_length > 0) return cfg.frame_length;
  const Topology topo(cfg.n_vehicles, {});
  return fb_frame_length(topo);
}

std::vector<std::string> validate_config(const SimConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.n_vehicles < 3) errors.push_back("sim.n_vehicles must be at least 3");
  for (int p : cfg.fd_positions) {
    if (p < 0 || p >= cfg.n_vehicles) {
      errors.push_back("sim.fd_positions: node " + std::to_string(p) + " outside [0, " +
                       std::to_string(cfg.n_vehicles - 1) + "]");
    }
  }
  if (cfg.total_slots < 1) errors.push_back("sim.total_slots must be at least 1");
  if (!(cfg.slot_duration_s > 0.0)) errors.push_back("sim.slot_duration_us must be positive");
  if (cfg.warmup_slots < 0 || cfg.warmup_slots > cfg.total_slots) {
    errors.push_back("sim.warmup_slots must lie in [0, total_slots]");
  }
  if (cfg.frame_length < 0) errors.push_back("sim.frame_length must be positive or 'auto'");

  const ChannelConfig& ch = cfg.channel;
  if (!(ch.carrier_freq_hz > 0.0)) errors.push_back("channel.carrier_freq_ghz must be positive");
  if (!(ch.bandwidth_hz > 0.0)) errors.push_back("channel.bandwidth_mhz must be positive");
  if (ch.shadowing_std_db < 0.0) errors.push_back("channel.shadowing_std_db must be >= 0");
  if (ch.sic_db < 0.0) errors.push_back("channel.sic_db must be >= 0");
  if (!(ch.vehicle_length_m > 0.0)) errors.push_back("channel.vehicle_length_m must be positive");
  if (!(ch.vehicle_separation_m > 0.0)) {
    errors.push_back("channel.vehicle_separation_m must be positive");
  }

  if (cfg.arrivals.lambda < 0.0) errors.push_back("arrivals.lambda must be >= 0");
  if (cfg.arrivals.sizes_bits.empty()) {
    errors.push_back("arrivals.packet_sizes_kbit must not be empty");
  }
  for (int64_t s : cfg.arrivals.sizes_bits) {
    if (s <= 0) errors.push_back("arrivals.packet_sizes_kbit entries must be positive");
  }

  if (!cfg.gamma_by_hops.empty()) {
    if (static_cast<int>(cfg.gamma_by_hops.size()) != cfg.n_vehicles - 1) {
      errors.push_back("scheduler.gamma_by_hops needs one entry per hop count 1.." +
                       std::to_string(cfg.n_vehicles - 1));
    }
    for (double g : cfg.gamma_by_hops) {
      if (!(g > 0.0 && g <= 1.0)) {
        errors.push_back("scheduler.gamma_by_hops entries must lie in (0, 1]");
      }
    }
  }

  if (cfg.scheduler == SchedulerKind::BackPressure && cfg.n_vehicles > 12) {
    errors.push_back("scheduler bp enumerates activation sets and supports n_vehicles <= 12");
  }

  if (errors.empty()) {
    // Structural frame checks need a valid topology.
    const Topology topo(cfg.n_vehicles, cfg.fd_positions);
    if (cfg.scheduler != SchedulerKind::BackPressure || cfg.channel.coherence == Coherence::PerFrame) {
      const int T = resolved_frame_length(cfg);
      if (T < 1) errors.push_back("sim.frame_length must be at least 1");
      if (cfg.scheduler == SchedulerKind::FlowBased) {
        const int needed = min_frame_length(fb_slot_counts(topo), bidi_conflicts(topo));
        if (needed > T) {
          errors.push_back("sim.frame_length " + std::to_string(T) +
                           " cannot host the flow-based slot counts (need " +
                           std::to_string(needed) + ")");
        }
      }
    }
  }
  return errors;
}

std::vector<std::string> config_warnings(const SimConfig& cfg) {
  std::vector<std::string> warnings;
  if (!validate_config(cfg).empty()) return warnings;
  const ChannelModel model(cfg.channel, cfg.slot_duration_s);
  const int64_t nominal = model.capacity_bits(cfg.channel.shadowing_mean_db, false);
  const int64_t max_size =
      *std::max_element(cfg.arrivals.sizes_bits.begin(), cfg.arrivals.sizes_bits.end());
  if (nominal <= max_size) {
    warnings.push_back("nominal link capacity (" + std::to_string(nominal) +
                       " bits/slot) does not fit the largest packet (" + std::to_string(max_size) +
                       " bits); packets will need several slots per hop");
  }
  return warnings;
}

}  // namespace platoon
