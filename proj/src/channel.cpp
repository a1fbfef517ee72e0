#include "platoon/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace platoon {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace

double path_loss_db(double distance_m, double freq_hz) {
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("path_loss_db: distance must be positive");
  }
  return 20.0 * std::log10(4.0 * M_PI * distance_m * freq_hz / kSpeedOfLight);
}

bool rx_transmits(const Topology& topo, int link_id, const std::vector<int>& active_links) {
  const int rx = topo.link(link_id).rx;
  for (int other : active_links) {
    if (other != link_id && topo.link(other).tx == rx) return true;
  }
  return false;
}

ChannelModel::ChannelModel(const ChannelConfig& cfg, double slot_duration_s)
    : cfg_(cfg), slot_duration_s_(slot_duration_s) {
  link_loss_db_ = path_loss_db(link_distance_m(), cfg_.carrier_freq_hz);
  noise_dbm_ = cfg_.noise_psd_dbm_hz + 10.0 * std::log10(cfg_.bandwidth_hz) + cfg_.noise_figure_db;
  self_interference_dbm_ =
      cfg_.tx_power_dbm - path_loss_db(cfg_.vehicle_length_m, cfg_.carrier_freq_hz) - cfg_.sic_db;
}

int64_t ChannelModel::capacity_bits(double shadowing_db, bool self_interference) const {
  const double rx_dbm = cfg_.tx_power_dbm - link_loss_db_ - shadowing_db;
  double denom_mw = dbm_to_mw(noise_dbm_);
  if (self_interference) denom_mw += dbm_to_mw(self_interference_dbm_);
  const double sinr = dbm_to_mw(rx_dbm) / denom_mw;
  const double bits = cfg_.bandwidth_hz * std::log2(1.0 + sinr) * slot_duration_s_;
  return bits <= 0.0 ? 0 : static_cast<int64_t>(bits);
}

CapacityMap ChannelModel::draw(const Topology& topo, std::mt19937_64& rng) const {
  std::normal_distribution<double> shadow(cfg_.shadowing_mean_db, cfg_.shadowing_std_db);
  CapacityMap map;
  const int n_links = topo.num_links();
  map.clear.resize(static_cast<size_t>(n_links));
  map.si.resize(static_cast<size_t>(n_links));
  for (int l = 1; l <= n_links; ++l) {
    const double s = cfg_.shadowing_std_db > 0.0 ? shadow(rng) : cfg_.shadowing_mean_db;
    const size_t i = static_cast<size_t>(l - 1);
    map.clear[i] = capacity_bits(s, false);
    map.si[i] = topo.is_fd(topo.link(l).rx) ? capacity_bits(s, true) : map.clear[i];
  }
  return map;
}

int64_t link_capacity(const ChannelModel& model, const Topology& topo, int link_id,
                      const std::vector<int>& active_links, double shadowing_db) {
  const bool si = topo.is_fd(topo.link(link_id).rx) && rx_transmits(topo, link_id, active_links);
  return model.capacity_bits(shadowing_db, si);
}

}  // namespace platoon
