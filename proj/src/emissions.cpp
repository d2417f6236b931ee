#include "gridflex/emissions.hpp"

#include "gridflex/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridflex {

EmissionRateTable::EmissionRateTable() noexcept
{
    rates_[static_cast<std::size_t>(FuelKind::Coal)] = 895.2;
    rates_[static_cast<std::size_t>(FuelKind::Gas)] = 388.9;
    rates_[static_cast<std::size_t>(FuelKind::Oil)] = 877.6;
    rates_[static_cast<std::size_t>(FuelKind::DualFuel)] = 633.3;
    rates_[static_cast<std::size_t>(FuelKind::Nuclear)] = 0.0;
    rates_[static_cast<std::size_t>(FuelKind::Geothermal)] = 107.6;
    rates_[static_cast<std::size_t>(FuelKind::Biomass)] = 0.0;
    rates_[static_cast<std::size_t>(FuelKind::Hydro)] = 0.0;
    rates_[static_cast<std::size_t>(FuelKind::Wind)] = 0.0;
    rates_[static_cast<std::size_t>(FuelKind::Import)] = 428.0;
}

void EmissionRateTable::set_rate(FuelKind fuel, double kg_per_mwh)
{
    if (!(kg_per_mwh >= 0.0) || !std::isfinite(kg_per_mwh)) {
        throw ValidationError("emission rate for " + std::string(to_string(fuel)) +
                              " must be a nonnegative finite number");
    }
    rates_[static_cast<std::size_t>(fuel)] = kg_per_mwh;
}

double EmissionRateTable::max_rate() const noexcept
{
    return *std::max_element(rates_.begin(), rates_.end());
}

}  // namespace gridflex
