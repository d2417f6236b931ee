#pragma once

#include "gridflex/dc_flex.hpp"
#include "gridflex/emissions.hpp"
#include "gridflex/opf.hpp"

#include <span>
#include <vector>

namespace gridflex {

/// Total emissions (kg) over the day.
double grid_carbon(const DispatchSolution& solution, const GridTopology& grid, const DayScenario& scenario,
                   const EmissionRateTable& rates = {});

/// Percent of the fixed-capacity fleet's attributed carbon that the
/// adaptation removed from the grid. The attribution charges each hour's
/// fleet energy at that hour's baseline ACI. Negative values mean harm.
/// Throws UndefinedMetric when the attributed carbon is zero.
double dc_carbon_reduction(double baseline_carbon_kg, double adapted_carbon_kg, const HourlySeries& baseline_aci,
                           std::span<const HourlySeries> baseline_dc_caps);

/// Energy-weighted LMP paid by the fleet.
double dc_avg_price(const DispatchSolution& solution, std::span<const DatacenterConfig> dcs,
                    std::span<const HourlySeries> dc_caps);

/// Demand-weighted LMP paid by the other loads.
double nondc_avg_price(const DispatchSolution& solution, const GridTopology& grid, const DayScenario& scenario);

/// (1/23) * sum over t >= 2 of |cap_t - cap_{t-1}|.
double capacity_variation(const HourlySeries& plan) noexcept;

/// Mean of capacity_variation across the fleet.
double fleet_capacity_variation(std::span<const HourlySeries> plans) noexcept;

struct EvaluationReport {
    double dc_carbon_reduction_pct = 0.0;
    double grid_carbon_baseline_kg = 0.0;
    double grid_carbon_adapted_kg = 0.0;
    double dispatch_cost_baseline = 0.0;
    double dispatch_cost_adapted = 0.0;
    double dc_avg_price_baseline = 0.0;
    double dc_avg_price = 0.0;
    double nondc_avg_price_baseline = 0.0;
    double nondc_avg_price = 0.0;
    double capacity_variation_mw = 0.0;   // MW/h, fleet mean
    double capacity_variation_pct = 0.0;  // of cap_max, fleet mean

    friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct EvaluatedRun {
    const DispatchSolution* dispatch = nullptr;
    std::span<const HourlySeries> dc_caps;
};

/// Compares an adapted run against the fixed-capacity baseline on the same
/// scenario.
EvaluationReport evaluate(const GridTopology& grid, const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                          const EvaluatedRun& baseline, const EvaluatedRun& adapted,
                          const EmissionRateTable& rates = {});

}  // namespace gridflex
