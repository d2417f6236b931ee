#include "gridflex/opf.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace gridflex {

namespace {

void check_dimensions(const GridTopology& grid, const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                      std::span<const HourlySeries> dc_caps)
{
    scenario.validate(grid);
    if (dcs.size() != dc_caps.size()) {
        throw ValidationError("got " + std::to_string(dc_caps.size()) + " capacity schedules for " +
                              std::to_string(dcs.size()) + " datacenters");
    }
    for (const auto& dc : dcs) {
        if (dc.bus >= grid.buses.size()) {
            throw ValidationError("datacenter '" + dc.id + "' references an undeclared bus");
        }
    }
}

std::string tag(const char* kind, std::size_t element, std::size_t t)
{
    return std::string(kind) + std::to_string(element) + "_h" + std::to_string(t + 1);
}

}  // namespace

OpfModel build_opf(const GridTopology& grid, const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                   std::span<const HourlySeries> dc_caps, const OpfOptions& options)
{
    check_dimensions(grid, scenario, dcs, dc_caps);
    const std::size_t pinned_hours = options.pinned ? std::min(options.pinned_hours, kHours) : 0;
    if (options.initial_output && options.initial_output->size() != grid.generators.size()) {
        throw ValidationError("initial output needs one value per generator");
    }

    OpfModel model;
    auto& lp = model.program;
    const std::array<std::size_t, 7> counts{grid.generators.size(), grid.lines.size(),     grid.loads.size(),
                                            grid.imports.size(),    grid.wind_farms.size(), grid.renewables.size(),
                                            grid.buses.size()};
    for (std::size_t b = 0; b < counts.size(); ++b) {
        model.offset_[b + 1] = model.offset_[b] + counts[b] * kHours;
    }

    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (std::size_t t = 0; t < kHours; ++t) {
            double lo = 0.0;
            double hi = gen.capacity;
            if (t == 0 && options.initial_output) {
                const double p0 = std::clamp((*options.initial_output)[g], 0.0, gen.capacity);
                lo = std::max(lo, p0 - gen.ramp_down);
                hi = std::min(hi, p0 + gen.ramp_up);
            }
            lp.add_variable(tag("p", g, t), lo, hi, gen.cost);
        }
    }
    for (std::size_t l = 0; l < grid.lines.size(); ++l) {
        const double fmax = grid.lines[l].flow_limit;
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_variable(tag("f", l, t), -fmax, fmax);
        }
    }
    for (std::size_t j = 0; j < grid.loads.size(); ++j) {
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_variable(tag("d", j, t), 0.0, scenario.base_load[j][t], grid.loads[j].shed_penalty);
        }
    }
    for (std::size_t i = 0; i < grid.imports.size(); ++i) {
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_variable(tag("m", i, t), 0.0, scenario.imports[i][t], grid.imports[i].curtail_penalty);
        }
    }
    for (std::size_t i = 0; i < grid.wind_farms.size(); ++i) {
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_variable(tag("w", i, t), 0.0, scenario.wind[i][t], grid.wind_farms[i].curtail_penalty);
        }
    }
    for (std::size_t i = 0; i < grid.renewables.size(); ++i) {
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_variable(tag("r", i, t), 0.0, scenario.renewables[i][t], grid.renewables[i].curtail_penalty);
        }
    }
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_variable(tag("theta", n, t), grid.buses[n].angle_min, grid.buses[n].angle_max);
        }
    }

    // bus balance: inflow - outflow + gen - curtailments + shed = net exogenous demand
    std::vector<std::vector<lp::Term>> terms(grid.buses.size() * kHours);
    std::vector<double> rhs(grid.buses.size() * kHours, 0.0);
    auto at = [](std::size_t bus, std::size_t t) { return bus * kHours + t; };
    for (std::size_t t = 0; t < kHours; ++t) {
        for (std::size_t l = 0; l < grid.lines.size(); ++l) {
            terms[at(grid.lines[l].to, t)].push_back({model.flow(l, t), 1.0});
            terms[at(grid.lines[l].from, t)].push_back({model.flow(l, t), -1.0});
        }
        for (std::size_t g = 0; g < grid.generators.size(); ++g) {
            terms[at(grid.generators[g].bus, t)].push_back({model.generation(g, t), 1.0});
        }
        for (std::size_t i = 0; i < grid.imports.size(); ++i) {
            terms[at(grid.imports[i].bus, t)].push_back({model.import_curtail(i, t), -1.0});
            rhs[at(grid.imports[i].bus, t)] -= scenario.imports[i][t];
        }
        for (std::size_t i = 0; i < grid.wind_farms.size(); ++i) {
            terms[at(grid.wind_farms[i].bus, t)].push_back({model.wind_curtail(i, t), -1.0});
            rhs[at(grid.wind_farms[i].bus, t)] -= scenario.wind[i][t];
        }
        for (std::size_t i = 0; i < grid.renewables.size(); ++i) {
            terms[at(grid.renewables[i].bus, t)].push_back({model.renewable_curtail(i, t), -1.0});
            rhs[at(grid.renewables[i].bus, t)] -= scenario.renewables[i][t];
        }
        for (std::size_t j = 0; j < grid.loads.size(); ++j) {
            terms[at(grid.loads[j].bus, t)].push_back({model.shed(j, t), 1.0});
            rhs[at(grid.loads[j].bus, t)] += scenario.base_load[j][t];
        }
        for (std::size_t i = 0; i < dcs.size(); ++i) {
            rhs[at(dcs[i].bus, t)] += dc_caps[i][t];
        }
    }
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        for (std::size_t t = 0; t < kHours; ++t) {
            model.balance_.push_back(
                lp.add_constraint(tag("bal", n, t), std::move(terms[at(n, t)]), lp::Sense::Equal, rhs[at(n, t)]));
        }
    }

    // line flow: f - B (theta_from - theta_to) = 0
    for (std::size_t l = 0; l < grid.lines.size(); ++l) {
        const auto& line = grid.lines[l];
        for (std::size_t t = 0; t < kHours; ++t) {
            lp.add_constraint(tag("flow", l, t),
                              {{model.flow(l, t), 1.0},
                               {model.angle(line.from, t), -line.susceptance},
                               {model.angle(line.to, t), line.susceptance}},
                              lp::Sense::Equal, 0.0);
        }
    }

    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (std::size_t t = 1; t < kHours; ++t) {
            lp.add_constraint(tag("rampup", g, t), {{model.generation(g, t), 1.0}, {model.generation(g, t - 1), -1.0}},
                              lp::Sense::LessEqual, gen.ramp_up);
            lp.add_constraint(tag("rampdn", g, t), {{model.generation(g, t - 1), 1.0}, {model.generation(g, t), -1.0}},
                              lp::Sense::LessEqual, gen.ramp_down);
        }
    }

    if (pinned_hours > 0) {
        const auto& fix = *options.pinned;
        auto pin = [&](lp::VariableId id, double v) { lp.set_bounds(id, v, v); };
        for (std::size_t t = 0; t < pinned_hours; ++t) {
            for (std::size_t g = 0; g < grid.generators.size(); ++g) {
                pin(model.generation(g, t), fix.generation.at(g)[t]);
            }
            for (std::size_t l = 0; l < grid.lines.size(); ++l) {
                pin(model.flow(l, t), fix.flow.at(l)[t]);
            }
            for (std::size_t j = 0; j < grid.loads.size(); ++j) {
                pin(model.shed(j, t), fix.shed.at(j)[t]);
            }
            for (std::size_t i = 0; i < grid.imports.size(); ++i) {
                pin(model.import_curtail(i, t), fix.import_curtail.at(i)[t]);
            }
            for (std::size_t i = 0; i < grid.wind_farms.size(); ++i) {
                pin(model.wind_curtail(i, t), fix.wind_curtail.at(i)[t]);
            }
            for (std::size_t i = 0; i < grid.renewables.size(); ++i) {
                pin(model.renewable_curtail(i, t), fix.renewable_curtail.at(i)[t]);
            }
            for (std::size_t n = 0; n < grid.buses.size(); ++n) {
                pin(model.angle(n, t), fix.angle.at(n)[t]);
            }
        }
    }
    return model;
}

DispatchSolution extract_dispatch(const OpfModel& model, const GridTopology& grid, const lp::LpSolution& solution)
{
    DispatchSolution out;
    auto read = [&](std::size_t count, auto id_of) {
        std::vector<HourlySeries> series(count);
        for (std::size_t e = 0; e < count; ++e) {
            for (std::size_t t = 0; t < kHours; ++t) {
                series[e][t] = solution.primal[id_of(e, t).index];
            }
        }
        return series;
    };
    out.generation = read(grid.generators.size(), [&](auto e, auto t) { return model.generation(e, t); });
    out.flow = read(grid.lines.size(), [&](auto e, auto t) { return model.flow(e, t); });
    out.shed = read(grid.loads.size(), [&](auto e, auto t) { return model.shed(e, t); });
    out.import_curtail = read(grid.imports.size(), [&](auto e, auto t) { return model.import_curtail(e, t); });
    out.wind_curtail = read(grid.wind_farms.size(), [&](auto e, auto t) { return model.wind_curtail(e, t); });
    out.renewable_curtail =
        read(grid.renewables.size(), [&](auto e, auto t) { return model.renewable_curtail(e, t); });
    out.angle = read(grid.buses.size(), [&](auto e, auto t) { return model.angle(e, t); });
    out.lmp.assign(grid.buses.size(), HourlySeries{});
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        for (std::size_t t = 0; t < kHours; ++t) {
            out.lmp[n][t] = solution.dual[model.balance(n, t).index];
        }
    }
    out.objective = solution.objective;
    out.iterations = solution.iterations;
    out.basis = solution.basis;
    return out;
}

DispatchSolution solve_opf(const GridTopology& grid, const DayScenario& scenario,
                           std::span<const DatacenterConfig> dcs, std::span<const HourlySeries> dc_caps,
                           const OpfOptions& options)
{
    const auto model = build_opf(grid, scenario, dcs, dc_caps, options);
    const auto solution = lp::solve(model.program, options.solver);
    switch (solution.status) {
    case lp::Status::Optimal:
        return extract_dispatch(model, grid, solution);
    case lp::Status::Infeasible:
        throw SolverError("dispatch is infeasible: datacenter load or ramp limits cannot be met");
    case lp::Status::Unbounded:
        throw SolverError("dispatch LP is unbounded");
    case lp::Status::NumericalFailure:
        break;
    }
    throw SolverError("dispatch LP failed numerically");
}

HourlySeries hourly_emissions(const DispatchSolution& solution, const GridTopology& grid,
                              const DayScenario& scenario, const EmissionRateTable& rates)
{
    HourlySeries kg{};
    for (std::size_t t = 0; t < kHours; ++t) {
        double s = 0.0;
        for (std::size_t g = 0; g < grid.generators.size(); ++g) {
            s += solution.generation[g][t] * rates.rate(grid.generators[g].fuel);
        }
        for (std::size_t i = 0; i < grid.imports.size(); ++i) {
            s += (scenario.imports[i][t] - solution.import_curtail[i][t]) * rates.rate(FuelKind::Import);
        }
        for (std::size_t i = 0; i < grid.renewables.size(); ++i) {
            const double rate = rates.rate(grid.renewables[i].kind);
            if (rate != 0.0) {
                s += (scenario.renewables[i][t] - solution.renewable_curtail[i][t]) * rate;
            }
        }
        kg[t] = s;
    }
    return kg;
}

HourlySeries served_energy(const DispatchSolution& solution, const DayScenario& scenario,
                           std::span<const HourlySeries> dc_caps)
{
    HourlySeries served{};
    for (std::size_t t = 0; t < kHours; ++t) {
        double s = 0.0;
        for (std::size_t j = 0; j < scenario.base_load.size(); ++j) {
            s += scenario.base_load[j][t] - solution.shed[j][t];
        }
        for (const auto& caps : dc_caps) {
            s += caps[t];
        }
        served[t] = s;
    }
    return served;
}

GridMetricsSeries derive_metrics(const DispatchSolution& solution, const GridTopology& grid,
                                 const DayScenario& scenario, std::span<const DatacenterConfig> dcs,
                                 std::span<const HourlySeries> dc_caps, const EmissionRateTable& rates)
{
    check_dimensions(grid, scenario, dcs, dc_caps);
    GridMetricsSeries out;
    out.lmp = solution.lmp;
    const auto kg = hourly_emissions(solution, grid, scenario, rates);
    const auto served = served_energy(solution, scenario, dc_caps);
    for (std::size_t t = 0; t < kHours; ++t) {
        if (!(served[t] > 0.0)) {
            throw UndefinedMetric("ACI is undefined in hour " + std::to_string(t + 1) + ": no energy served");
        }
        out.aci[t] = kg[t] / served[t];

        std::vector<double> weight(grid.buses.size(), 0.0);
        for (std::size_t j = 0; j < grid.loads.size(); ++j) {
            weight[grid.loads[j].bus] += scenario.base_load[j][t] - solution.shed[j][t];
        }
        for (std::size_t i = 0; i < dcs.size(); ++i) {
            weight[dcs[i].bus] += dc_caps[i][t];
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t n = 0; n < grid.buses.size(); ++n) {
            num += weight[n] * solution.lmp[n][t];
            den += weight[n];
        }
        out.price[t] = num / den;
    }
    return out;
}

CostBreakdown dispatch_cost(const DispatchSolution& solution, const GridTopology& grid)
{
    CostBreakdown c;
    for (std::size_t t = 0; t < kHours; ++t) {
        for (std::size_t g = 0; g < grid.generators.size(); ++g) {
            c.generation += grid.generators[g].cost * solution.generation[g][t];
        }
        for (std::size_t j = 0; j < grid.loads.size(); ++j) {
            c.shedding += grid.loads[j].shed_penalty * solution.shed[j][t];
        }
        for (std::size_t i = 0; i < grid.imports.size(); ++i) {
            c.import_curtailment += grid.imports[i].curtail_penalty * solution.import_curtail[i][t];
        }
        for (std::size_t i = 0; i < grid.wind_farms.size(); ++i) {
            c.wind_curtailment += grid.wind_farms[i].curtail_penalty * solution.wind_curtail[i][t];
        }
        for (std::size_t i = 0; i < grid.renewables.size(); ++i) {
            c.renewable_curtailment += grid.renewables[i].curtail_penalty * solution.renewable_curtail[i][t];
        }
    }
    return c;
}

void write_dispatch_csv(std::ostream& out, const DispatchSolution& solution, const GridTopology& grid)
{
    out << "kind,entity_id,hour,value\n";
    auto rows = [&](const char* kind, const std::vector<HourlySeries>& series, bool by_bus) {
        for (std::size_t e = 0; e < series.size(); ++e) {
            const std::string id = by_bus ? grid.buses[e].id : std::to_string(e);
            for (std::size_t t = 0; t < kHours; ++t) {
                out << kind << ',' << id << ',' << t + 1 << ',' << text::fmt(series[e][t]) << '\n';
            }
        }
    };
    rows("generation", solution.generation, false);
    rows("flow", solution.flow, false);
    rows("shed", solution.shed, false);
    rows("import_curtail", solution.import_curtail, false);
    rows("wind_curtail", solution.wind_curtail, false);
    rows("renewable_curtail", solution.renewable_curtail, false);
    rows("angle", solution.angle, true);
    rows("lmp", solution.lmp, true);
}

void write_metrics_csv(std::ostream& out, const GridMetricsSeries& metrics, const GridTopology& grid)
{
    out << "metric,entity_id,hour,value\n";
    for (std::size_t t = 0; t < kHours; ++t) {
        out << "aci,grid," << t + 1 << ',' << text::fmt(metrics.aci[t]) << '\n';
    }
    for (std::size_t t = 0; t < kHours; ++t) {
        out << "price,grid," << t + 1 << ',' << text::fmt(metrics.price[t]) << '\n';
    }
    for (std::size_t n = 0; n < metrics.lmp.size(); ++n) {
        for (std::size_t t = 0; t < kHours; ++t) {
            out << "lmp," << grid.buses[n].id << ',' << t + 1 << ',' << text::fmt(metrics.lmp[n][t]) << '\n';
        }
    }
}

}  // namespace gridflex
