#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feinsum/core.hpp"

namespace feinsum {

// One tuning fact: on this device, this rewrite of this (canonical) einsum
// ran this fast. meta is free-form (tile sizes, compiler flags, ...).
struct FactRecord {
  std::string canonical_key;
  std::string device_id;
  std::string transform_id;
  double wall_time_s = 0.0;
  double flop_rate = 0.0;
  std::string recorded_at;  // ISO8601 UTC with microseconds; filled in when empty
  std::string meta;
};

std::string now_iso8601_utc();

// On-disk format: a "feinsum-facts v1" header line, then one tab-separated
// row per record (tabs, newlines and % in string fields are %-escaped,
// doubles printed with %.17g). Writers take an advisory lock on <path>.lock
// and replace the file atomically (temp + fsync + rename). A missing file
// reads as an empty database; a malformed one is errc::io.
std::vector<FactRecord> load_facts(const std::string& path);
void record_facts(const std::string& path, const std::vector<FactRecord>& batch);

// Cheapest matching fact: least wall time, ties to the newest recorded_at,
// then to the later row. nullopt when nothing matches (not an error).
std::optional<FactRecord> retrieve(const std::string& path, const std::string& canonical_key,
                                   const std::string& device_id);

// Cost model. One iteration point costs n-1 multiplies plus, when there is a
// reduction, one accumulate; the iteration space is the product of all index
// lengths; rows add up. Footprint charges each distinct input array once plus one
// output per row at the row's widest dtype.
double flop_count(const BatchedEinsum& e);
double footprint_bytes(const BatchedEinsum& e);
double arithmetic_intensity(const BatchedEinsum& e);

// Normalized device: bandwidth 1 byte per unit time, peak_flops equal to the
// balance intensity. Presets: mi250x, h100, titanv, p100.
struct DeviceModel {
  std::string id;
  double peak_flops = 0.0;
  double bandwidth = 1.0;
};

std::optional<DeviceModel> device_preset(const std::string& id);
std::vector<DeviceModel> device_presets();

double roofline_flop_rate(const BatchedEinsum& e, const DeviceModel& d);
bool memory_bound(const BatchedEinsum& e, const DeviceModel& d);

}  // namespace feinsum
