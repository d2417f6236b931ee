#pragma once

#include "gridflex/grid_model.hpp"

#include <array>
#include <string_view>

namespace gridflex {

/// kg CO2 per MWh by fuel kind.
class EmissionRateTable {
public:
    /// The standard table (coal 895.2, gas 388.9, ..., import 428).
    EmissionRateTable() noexcept;

    double rate(FuelKind fuel) const noexcept { return rates_[static_cast<std::size_t>(fuel)]; }

    /// Throws ValidationError for a negative or non-finite rate.
    void set_rate(FuelKind fuel, double kg_per_mwh);

    /// Largest rate in the table; an upper bound for any hourly ACI.
    double max_rate() const noexcept;

    friend bool operator==(const EmissionRateTable&, const EmissionRateTable&) = default;

private:
    std::array<double, 10> rates_{};
};

}  // namespace gridflex
