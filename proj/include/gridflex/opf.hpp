#pragma once

#include "gridflex/emissions.hpp"
#include "gridflex/grid_model.hpp"
#include "gridflex/lp.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gridflex {

/// Solved 24-hour dispatch. Every field is indexed [element][hour].
struct DispatchSolution {
    std::vector<HourlySeries> generation;         // MW per generator
    std::vector<HourlySeries> flow;               // MW per line, positive from -> to
    std::vector<HourlySeries> shed;               // MW per load
    std::vector<HourlySeries> import_curtail;     // MW per import point
    std::vector<HourlySeries> wind_curtail;       // MW per wind farm
    std::vector<HourlySeries> renewable_curtail;  // MW per renewable
    std::vector<HourlySeries> angle;              // rad per bus
    std::vector<HourlySeries> lmp;                // $/MWh per bus
    double objective = 0.0;
    std::size_t iterations = 0;
    lp::Basis basis;  // final basis, usable to warm-start a related solve

    friend bool operator==(const DispatchSolution&, const DispatchSolution&) = default;
};

struct OpfOptions {
    /// Generator outputs just before hour 1. When set, hour-1 output is
    /// limited to one ramp step from these values.
    std::optional<std::vector<double>> initial_output;

    /// Hours 1..pinned_hours are fixed to the values in `pinned`.
    const DispatchSolution* pinned = nullptr;
    std::size_t pinned_hours = 0;

    lp::SolverOptions solver;
};

/// The dispatch LP plus the mapping from model entities to LP ids.
/// Variables are laid out block by block (generation, flow, shed, import,
/// wind, renewable, angle), each block element-major with 24 hours.
class OpfModel {
public:
    lp::LinearProgram program;

    lp::VariableId generation(std::size_t g, std::size_t t) const { return var(0, g, t); }
    lp::VariableId flow(std::size_t l, std::size_t t) const { return var(1, l, t); }
    lp::VariableId shed(std::size_t j, std::size_t t) const { return var(2, j, t); }
    lp::VariableId import_curtail(std::size_t i, std::size_t t) const { return var(3, i, t); }
    lp::VariableId wind_curtail(std::size_t i, std::size_t t) const { return var(4, i, t); }
    lp::VariableId renewable_curtail(std::size_t i, std::size_t t) const { return var(5, i, t); }
    lp::VariableId angle(std::size_t n, std::size_t t) const { return var(6, n, t); }
    lp::ConstraintId balance(std::size_t n, std::size_t t) const { return balance_.at(n * kHours + t); }

private:
    friend OpfModel build_opf(const GridTopology&, const DayScenario&, std::span<const DatacenterConfig>,
                              std::span<const HourlySeries>, const OpfOptions&);

    lp::VariableId var(std::size_t block, std::size_t element, std::size_t t) const
    {
        return lp::VariableId{offset_[block] + element * kHours + t};
    }

    std::array<std::size_t, 8> offset_{};
    std::vector<lp::ConstraintId> balance_;
};

/// `dc_caps[i]` is the hourly capacity (MW) of `dcs[i]`, consumed at its bus.
OpfModel build_opf(const GridTopology& grid, const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                   std::span<const HourlySeries> dc_caps, const OpfOptions& options = {});

/// Throws SolverError when the LP is not solved to optimality (for instance
/// when datacenter load exceeds what the network can deliver).
DispatchSolution solve_opf(const GridTopology& grid, const DayScenario& scenario,
                           std::span<const DatacenterConfig> dcs, std::span<const HourlySeries> dc_caps,
                           const OpfOptions& options = {});

/// Reads a solved model back into a DispatchSolution.
DispatchSolution extract_dispatch(const OpfModel& model, const GridTopology& grid, const lp::LpSolution& solution);

struct GridMetricsSeries {
    HourlySeries aci{};              // kg CO2/MWh
    HourlySeries price{};            // $/MWh, demand-weighted mean LMP
    std::vector<HourlySeries> lmp;   // $/MWh per bus

    friend bool operator==(const GridMetricsSeries&, const GridMetricsSeries&) = default;
};

/// Throws UndefinedMetric for an hour with no served energy.
GridMetricsSeries derive_metrics(const DispatchSolution& solution, const GridTopology& grid,
                                 const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                                 std::span<const HourlySeries> dc_caps, const EmissionRateTable& rates = {});

/// Hourly emissions (kg) of thermal generation, served imports and served
/// non-wind renewables.
HourlySeries hourly_emissions(const DispatchSolution& solution, const GridTopology& grid,
                              const DayScenario& scenario, const EmissionRateTable& rates = {});

/// Hourly served energy: base load minus shedding plus datacenter load.
HourlySeries served_energy(const DispatchSolution& solution, const DayScenario& scenario,
                           std::span<const HourlySeries> dc_caps);

struct CostBreakdown {
    double generation = 0.0;
    double shedding = 0.0;
    double import_curtailment = 0.0;
    double wind_curtailment = 0.0;
    double renewable_curtailment = 0.0;

    double total() const noexcept
    {
        return generation + shedding + import_curtailment + wind_curtailment + renewable_curtailment;
    }
};

CostBreakdown dispatch_cost(const DispatchSolution& solution, const GridTopology& grid);

/// Long format `kind,entity_id,hour,value`; bus quantities use the bus id,
/// other elements their index.
void write_dispatch_csv(std::ostream& out, const DispatchSolution& solution, const GridTopology& grid);

/// Long format `metric,entity_id,hour,value` with entity `grid` for ACI and
/// Price and the bus id for LMP.
void write_metrics_csv(std::ostream& out, const GridMetricsSeries& metrics, const GridTopology& grid);

}  // namespace gridflex
