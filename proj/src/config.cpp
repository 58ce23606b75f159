#include "vlk/config.hpp"

#include <cmath>
#include <cstdlib>

#include "vlk/error.hpp"
#include "vlk/parallel.hpp"

namespace vlk {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VLK_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

double carbon_estimate(double power_kw, double hours, double intensity_kg_per_kwh) {
  for (double v : {power_kw, hours, intensity_kg_per_kwh}) {
    if (!std::isfinite(v) || v < 0.0) throw Error("carbon estimate inputs must be non-negative");
  }
  return power_kw * hours * intensity_kg_per_kwh;
}

}  // namespace vlk
