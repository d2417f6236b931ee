#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridflex {

inline constexpr std::size_t kHours = 24;

/// One value per hour of the operating day, index 0 is hour 1.
using HourlySeries = std::array<double, kHours>;

double mean(const HourlySeries& series) noexcept;

enum class FuelKind { Coal, Gas, Oil, DualFuel, Nuclear, Geothermal, Biomass, Hydro, Wind, Import };

std::string_view to_string(FuelKind fuel) noexcept;
std::optional<FuelKind> parse_fuel(std::string_view text) noexcept;

struct Bus {
    std::string id;
    double angle_min = -3.141592653589793;  // rad
    double angle_max = 3.141592653589793;
    friend bool operator==(const Bus&, const Bus&) = default;
};

struct Line {
    std::size_t from = 0;  // bus index
    std::size_t to = 0;
    double susceptance = 1.0;  // MW per rad of angle difference
    double flow_limit = 0.0;   // MW
    friend bool operator==(const Line&, const Line&) = default;
};

struct Generator {
    std::size_t bus = 0;
    FuelKind fuel = FuelKind::Gas;
    double cost = 0.0;       // $/MWh
    double capacity = 0.0;   // MW
    double ramp_up = 0.0;    // MW/h
    double ramp_down = 0.0;  // MW/h
    friend bool operator==(const Generator&, const Generator&) = default;
};

struct ImportPoint {
    std::size_t bus = 0;
    double curtail_penalty = 500.0;
    friend bool operator==(const ImportPoint&, const ImportPoint&) = default;
};

struct Renewable {
    std::size_t bus = 0;
    double curtail_penalty = 1000.0;
    FuelKind kind = FuelKind::Hydro;
    friend bool operator==(const Renewable&, const Renewable&) = default;
};

struct WindFarm {
    std::size_t bus = 0;
    double curtail_penalty = 100.0;
    friend bool operator==(const WindFarm&, const WindFarm&) = default;
};

struct Load {
    std::size_t bus = 0;
    double shed_penalty = 1000.0;
    friend bool operator==(const Load&, const Load&) = default;
};

/// Power network with every parameter the dispatch model needs. Elements
/// other than buses are identified by their position in their list.
struct GridTopology {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<ImportPoint> imports;
    std::vector<Renewable> renewables;
    std::vector<WindFarm> wind_farms;
    std::vector<Load> loads;

    std::optional<std::size_t> find_bus(std::string_view id) const noexcept;

    /// Throws ValidationError naming the first offending element.
    void validate() const;

    /// Breadth-first reachability over lines.
    bool connected() const;

    double thermal_capacity() const noexcept;

    friend bool operator==(const GridTopology&, const GridTopology&) = default;
};

GridTopology parse_grid(std::istream& in, const std::string& source = "<grid>");
GridTopology load_grid(const std::filesystem::path& path);
void write_grid(std::ostream& out, const GridTopology& grid);
void save_grid(const std::filesystem::path& path, const GridTopology& grid);

enum class Season { Spring, Summer, Fall, Winter };
enum class DayKind { Weekday, Weekend };

struct DayType {
    Season season = Season::Spring;
    DayKind kind = DayKind::Weekday;

    /// Days per week represented by this type (5 weekday, 2 weekend).
    double weekly_weight() const noexcept { return kind == DayKind::Weekday ? 5.0 : 2.0; }
    std::string name() const;  // e.g. "SpringWD"
    friend bool operator==(const DayType&, const DayType&) = default;
};

std::optional<DayType> parse_day_type(std::string_view name) noexcept;
std::array<DayType, 8> all_day_types() noexcept;

/// Hourly exogenous inputs of one simulated day.
struct DayScenario {
    DayType day_type;
    std::vector<HourlySeries> base_load;   // per load, MW
    std::vector<HourlySeries> imports;     // per import point, MW
    std::vector<HourlySeries> renewables;  // per non-wind renewable, MW
    std::vector<HourlySeries> wind;        // per wind farm, MW

    double total_base_load(std::size_t hour) const noexcept;
    double total_wind(std::size_t hour) const noexcept;

    /// Mean hourly wind over mean hourly base demand.
    double wind_penetration() const;

    /// Throws ValidationError on a dimension mismatch or a negative entry.
    void validate(const GridTopology& grid) const;

    friend bool operator==(const DayScenario&, const DayScenario&) = default;
};

/// CSV with header `series,element_id,h1..h24`; series is one of
/// load, import, renewable, wind.
DayScenario parse_scenario(std::istream& in, const GridTopology& grid, DayType day_type,
                           const std::string& source = "<scenario>");
DayScenario load_scenario(const std::filesystem::path& path, const GridTopology& grid, DayType day_type);
void write_scenario(std::ostream& out, const DayScenario& scenario);

struct WindScaling {
    DayScenario scenario;
    double factor = 1.0;
};

/// Scales every wind farm by one common factor so the day's wind
/// penetration equals `target_penetration`.
WindScaling scale_wind(const DayScenario& raw, double target_penetration);

/// Knobs of the synthetic network generator. Defaults give a mid-size,
/// gas-dominated system in the spirit of a reduced western US model.
struct SyntheticGridSpec {
    std::size_t buses = 14;
    std::size_t generators = 12;
    std::size_t wind_farms = 3;
    std::size_t loads = 8;
    std::size_t imports = 2;
    std::size_t renewables = 2;
    std::size_t extra_lines = 6;  // on top of the spanning tree

    double thermal_capacity = 20000.0;  // MW, total target
    double nuclear_share = 0.15;
    double coal_share = 0.0;
    double oil_share = 0.1;
    double dual_fuel_share = 0.0;

    double nuclear_cost = 1.0;
    double coal_cost = 2.0;
    double gas_cost = 4.0;
    double oil_cost = 10.0;
    double dual_fuel_cost = 4.0;
    double cost_spread = 0.2;  // unit cost drawn from base * (1 +- spread)

    // hourly ramp limit as a fraction of unit capacity
    double nuclear_ramp = 0.05;
    double coal_ramp = 0.15;
    double gas_ramp = 0.2;
    double oil_ramp = 1.0;
    double dual_fuel_ramp = 0.5;

    double import_penalty = 500.0;
    double wind_penalty = 100.0;
    double renewable_penalty = 1000.0;
    double shed_penalty = 1000.0;

    double line_limit_min = 500.0;  // MW
    double line_limit_max = 2000.0;
};

/// Connected random network (spanning tree plus extra lines); deterministic
/// for a given seed.
GridTopology generate_synthetic_grid(const SyntheticGridSpec& spec, std::uint64_t seed);

/// Default spec with element counts, extra lines and thermal capacity scaled
/// in proportion to `buses`.
SyntheticGridSpec scaled_synthetic_spec(std::size_t buses);

/// Level and shape parameters of the synthetic day profiles.
struct ProfileSpec {
    double mean_load = 11000.0;     // MW, weekday spring system average
    double import_fraction = 0.08;  // of system load
    double renewable_fraction = 0.05;
    double raw_wind_fraction = 0.15;  // nominal, before scaling
    double wind_noise = 0.35;         // log-normal sigma
};

/// Base load, imports and non-wind renewables for a day type, plus one wind
/// scenario drawn with `wind_seed`. Load shares across the network are
/// fixed by `profile_seed`.
DayScenario make_day_scenario(const GridTopology& grid, DayType day_type, const ProfileSpec& spec,
                              std::uint64_t profile_seed, std::uint64_t wind_seed);

struct DatacenterConfig {
    std::string id;
    std::size_t bus = 0;
    double cap_max = 200.0;  // MW
    double cap_min = 80.0;
    double avg_cap = 140.0;
    std::optional<double> step_size;  // MW/h, absent = unbounded

    /// Throws ValidationError unless 0 <= min <= avg <= max and step > 0.
    void validate() const;
    friend bool operator==(const DatacenterConfig&, const DatacenterConfig&) = default;
};

struct PlacementSpec {
    std::size_t count = 10;
    double cap_max = 200.0;
    double utilization = 0.7;
    double range_lo = 0.4;
    double range_hi = 1.0;
    std::optional<double> step_size;
};

/// Samples datacenter buses uniformly with replacement among buses without
/// import points.
std::vector<DatacenterConfig> place_datacenters(const GridTopology& grid, const PlacementSpec& spec,
                                                std::uint64_t seed);

}  // namespace gridflex
