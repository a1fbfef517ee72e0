#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "platoon/topology.hpp"

namespace platoon {

// How long one shadowing draw stays valid.
enum class Coherence { PerSlot, PerFrame };

struct ChannelConfig {
  double carrier_freq_hz = 30e9;
  double bandwidth_hz = 200e6;
  double tx_power_dbm = 23.0;
  double shadowing_mean_db = 0.0;
  double shadowing_std_db = 8.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 3.0;
  double sic_db = 40.0;  // self-interference cancellation at an FD receiver
  double vehicle_length_m = 5.0;
  double vehicle_separation_m = 33.33;
  Coherence coherence = Coherence::PerFrame;

  bool operator==(const ChannelConfig&) const = default;
};

// Free-space path loss in dB. Throws on nonpositive distance.
double path_loss_db(double distance_m, double freq_hz);

// Per-link capacities for one coherence interval, in bits per slot. `si` is
// the capacity when the link's receiver is transmitting at the same time
// (residual self-interference raises its noise floor); it equals `clear` for
// links whose receiver is half-duplex.
struct CapacityMap {
  std::vector<int64_t> clear;
  std::vector<int64_t> si;

  int64_t effective(int link_id, bool rx_transmitting) const {
    const size_t i = static_cast<size_t>(link_id - 1);
    return rx_transmitting ? si[i] : clear[i];
  }
};

// True when the receiver of `link_id` is the transmitter of some other link
// in the active set.
bool rx_transmits(const Topology& topo, int link_id, const std::vector<int>& active_links);

// Link budget at 30 GHz: free-space loss over the inter-antenna distance
// (vehicle separation + length), log-normal shadowing, Shannon capacity per
// slot. Residual self-interference at an FD receiver is its own transmit
// power attenuated by propagation across the vehicle body and by SIC.
class ChannelModel {
 public:
  ChannelModel(const ChannelConfig& cfg, double slot_duration_s);

  double link_distance_m() const { return cfg_.vehicle_separation_m + cfg_.vehicle_length_m; }
  double noise_dbm() const { return noise_dbm_; }
  double self_interference_dbm() const { return self_interference_dbm_; }

  int64_t capacity_bits(double shadowing_db, bool self_interference) const;

  // One shadowing draw per directional link; deterministic given the rng state.
  CapacityMap draw(const Topology& topo, std::mt19937_64& rng) const;

 private:
  ChannelConfig cfg_;
  double slot_duration_s_ = 0.0;
  double link_loss_db_ = 0.0;
  double noise_dbm_ = 0.0;
  double self_interference_dbm_ = 0.0;
};

// Capacity of a link given the full set of simultaneously active links.
int64_t link_capacity(const ChannelModel& model, const Topology& topo, int link_id,
                      const std::vector<int>& active_links, double shadowing_db);

}  // namespace platoon
