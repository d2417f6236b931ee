#pragma once

#include "gridflex/grid_model.hpp"

namespace gridflex::test {

// Bus 1 hosts a 50 MW wind farm (curtailment 100 $/MWh); bus 2 a gas unit at
// 4 $/MWh and a 100 MW load. One line joins them.
inline GridTopology two_bus_grid(double flow_limit, double gas_ramp = 1000.0)
{
    GridTopology g;
    g.buses = {Bus{"1"}, Bus{"2"}};
    g.lines = {Line{0, 1, 100.0, flow_limit}};
    g.generators = {Generator{1, FuelKind::Gas, 4.0, 500.0, gas_ramp, gas_ramp}};
    g.wind_farms = {WindFarm{0, 100.0}};
    g.loads = {Load{1, 1000.0}};
    return g;
}

inline HourlySeries constant(double v)
{
    HourlySeries s;
    s.fill(v);
    return s;
}

inline DayScenario two_bus_scenario(double load = 100.0, double wind = 50.0)
{
    DayScenario s;
    s.base_load = {constant(load)};
    s.wind = {constant(wind)};
    return s;
}

inline DatacenterConfig dc_config(std::string id, std::size_t bus, double cap_max = 200.0, double cap_min = 80.0,
                                  double avg = 140.0, std::optional<double> step = std::nullopt)
{
    DatacenterConfig dc;
    dc.id = std::move(id);
    dc.bus = bus;
    dc.cap_max = cap_max;
    dc.cap_min = cap_min;
    dc.avg_cap = avg;
    dc.step_size = step;
    return dc;
}

}  // namespace gridflex::test
