#pragma once

#include <cstdint>

namespace vlk {

inline constexpr std::uint64_t kDefaultSeed = 1111;

/// kg CO2 = power (kW) x hours x intensity (kg/kWh). Throws Error on a
/// negative input.
double carbon_estimate(double power_kw, double hours, double intensity_kg_per_kwh);

}  // namespace vlk
