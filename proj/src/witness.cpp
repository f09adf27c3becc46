#include "thermalent/witness.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "thermalent/errors.hpp"

namespace thermalent::witness {

void MacroObservables::validate() const {
  if (n_sites < 2) throw UsageError(fmt::format("n_sites must be >= 2, got {}", n_sites));
  if (!(j > 0.0)) throw UsageError(fmt::format("j must be positive, got {}", j));
  if (std::abs(m) > 0.5 * n_sites)
    throw UsageError(fmt::format("|M| = {} exceeds N/2 = {}", std::abs(m), 0.5 * n_sites));
  if (!std::isfinite(u) || !std::isfinite(h)) throw UsageError("U and h must be finite");
}

double MacroObservables::hopping() const {
  const double z = (u + m * h) / (n_sites * j);
  return energy_reference == EnergyReference::fermion_hamiltonian ? z + h / (2.0 * j) : z;
}

double thermal_witness(const MacroObservables& obs) {
  obs.validate();
  const double shifted = obs.hopping() + std::numbers::sqrt2 / 2.0;
  const double m_per_site = obs.m / obs.n_sites;
  return shifted * shifted - m_per_site * m_per_site - 0.25;
}

bool zero_field_energy_criterion(double u, int n_sites, double j) {
  if (n_sites < 1 || !(j > 0.0)) throw UsageError("need n_sites >= 1 and j > 0");
  return std::abs(u) / (n_sites * j) > kZeroFieldThreshold;
}

bool quarter_energy_criterion(double u, int n_sites, double j) {
  if (n_sites < 1 || !(j > 0.0)) throw UsageError("need n_sites >= 1 and j > 0");
  return std::abs(u) / (n_sites * j) > 0.25;
}

}  // namespace thermalent::witness
