#include "gridflex/metrics.hpp"

#include "gridflex/error.hpp"

#include <cmath>
#include <numeric>

namespace gridflex {

double grid_carbon(const DispatchSolution& solution, const GridTopology& grid, const DayScenario& scenario,
                   const EmissionRateTable& rates)
{
    const auto kg = hourly_emissions(solution, grid, scenario, rates);
    return std::accumulate(kg.begin(), kg.end(), 0.0);
}

double dc_carbon_reduction(double baseline_carbon_kg, double adapted_carbon_kg, const HourlySeries& baseline_aci,
                           std::span<const HourlySeries> baseline_dc_caps)
{
    if (baseline_dc_caps.empty()) {
        throw UndefinedMetric("datacenter carbon reduction needs at least one datacenter");
    }
    double attributed = 0.0;
    for (std::size_t t = 0; t < kHours; ++t) {
        double energy = 0.0;
        for (const auto& caps : baseline_dc_caps) {
            energy += caps[t];
        }
        attributed += baseline_aci[t] * energy;
    }
    if (!(attributed > 0.0)) {
        throw UndefinedMetric("baseline datacenter carbon is zero");
    }
    return (baseline_carbon_kg - adapted_carbon_kg) / attributed * 100.0;
}

double dc_avg_price(const DispatchSolution& solution, std::span<const DatacenterConfig> dcs,
                    std::span<const HourlySeries> dc_caps)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < dcs.size(); ++i) {
        for (std::size_t t = 0; t < kHours; ++t) {
            num += solution.lmp.at(dcs[i].bus)[t] * dc_caps[i][t];
            den += dc_caps[i][t];
        }
    }
    if (!(den > 0.0)) {
        throw UndefinedMetric("datacenter average price is undefined with zero datacenter energy");
    }
    return num / den;
}

double nondc_avg_price(const DispatchSolution& solution, const GridTopology& grid, const DayScenario& scenario)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < grid.loads.size(); ++j) {
        for (std::size_t t = 0; t < kHours; ++t) {
            num += solution.lmp.at(grid.loads[j].bus)[t] * scenario.base_load[j][t];
            den += scenario.base_load[j][t];
        }
    }
    if (!(den > 0.0)) {
        throw UndefinedMetric("non-datacenter average price is undefined with zero demand");
    }
    return num / den;
}

double capacity_variation(const HourlySeries& plan) noexcept
{
    double s = 0.0;
    for (std::size_t t = 1; t < kHours; ++t) {
        s += std::abs(plan[t] - plan[t - 1]);
    }
    return s / static_cast<double>(kHours - 1);
}

double fleet_capacity_variation(std::span<const HourlySeries> plans) noexcept
{
    if (plans.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (const auto& p : plans) {
        s += capacity_variation(p);
    }
    return s / static_cast<double>(plans.size());
}

EvaluationReport evaluate(const GridTopology& grid, const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                          const EvaluatedRun& baseline, const EvaluatedRun& adapted, const EmissionRateTable& rates)
{
    EvaluationReport r;
    r.grid_carbon_baseline_kg = grid_carbon(*baseline.dispatch, grid, scenario, rates);
    r.grid_carbon_adapted_kg = grid_carbon(*adapted.dispatch, grid, scenario, rates);
    r.dispatch_cost_baseline = dispatch_cost(*baseline.dispatch, grid).total();
    r.dispatch_cost_adapted = dispatch_cost(*adapted.dispatch, grid).total();
    r.nondc_avg_price_baseline = nondc_avg_price(*baseline.dispatch, grid, scenario);
    r.nondc_avg_price = nondc_avg_price(*adapted.dispatch, grid, scenario);
    if (!dcs.empty()) {
        const auto base_metrics = derive_metrics(*baseline.dispatch, grid, scenario, dcs, baseline.dc_caps, rates);
        r.dc_carbon_reduction_pct = dc_carbon_reduction(r.grid_carbon_baseline_kg, r.grid_carbon_adapted_kg,
                                                        base_metrics.aci, baseline.dc_caps);
        r.dc_avg_price_baseline = dc_avg_price(*baseline.dispatch, dcs, baseline.dc_caps);
        r.dc_avg_price = dc_avg_price(*adapted.dispatch, dcs, adapted.dc_caps);
        r.capacity_variation_mw = fleet_capacity_variation(adapted.dc_caps);
        double pct = 0.0;
        for (std::size_t i = 0; i < dcs.size(); ++i) {
            pct += capacity_variation(adapted.dc_caps[i]) / dcs[i].cap_max * 100.0;
        }
        r.capacity_variation_pct = pct / static_cast<double>(dcs.size());
    }
    return r;
}

}  // namespace gridflex
