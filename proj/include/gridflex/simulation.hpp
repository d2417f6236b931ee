#pragma once

#include "gridflex/dc_flex.hpp"
#include "gridflex/emissions.hpp"
#include "gridflex/grid_model.hpp"
#include "gridflex/lp.hpp"
#include "gridflex/metrics.hpp"
#include "gridflex/opf.hpp"
#include "gridflex/policies.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gridflex {

enum class PolicyKind { Baseline, Online, Coordinated, PlanShare };
enum class OnlineVariant { Avg, Hourly, SixHourAvg };

std::string_view to_string(PolicyKind kind) noexcept;
std::string_view to_string(OnlineVariant variant) noexcept;
std::optional<PolicyKind> parse_policy_kind(std::string_view text) noexcept;
std::optional<OnlineVariant> parse_variant(std::string_view text) noexcept;

inline constexpr double kUnlimitedQuota = std::numeric_limits<double>::infinity();

struct PolicySpec {
    PolicyKind kind = PolicyKind::Baseline;
    MetricKind metric = MetricKind::LMPrice;
    OnlineVariant variant = OnlineVariant::Avg;
    std::size_t horizon_hours = 6;     // hourly look-ahead of the 6hr+Avg variant
    std::optional<double> step_size;   // unset: 40 MW/h for DP policies, unbounded for Avg
    double quota = kUnlimitedQuota;    // MW/h over all coordinators
    std::size_t coordinators = 1;
    std::size_t plan_length = 24;      // hours of the shared plan visible to the grid
    std::string name;                  // optional display label

    /// e.g. "ACI(Avg)", "LMPrice(Hourly)", "Coord-LMPrice(Avg)-q1200-n2", "PlanShare(6h)".
    std::string label() const;

    /// Step limit the policy actually applies.
    std::optional<double> effective_step() const;

    void validate() const;
};

inline constexpr double kDefaultDpStep = 40.0;

/// Everything a single simulated day needs.
struct DayContext {
    const GridTopology& grid;
    const DayScenario& scenario;
    std::span<const DatacenterConfig> dcs;
    EmissionRateTable rates{};
    lp::SolverOptions solver{};
    double quantum = kDefaultQuantum;
};

struct CoordinatorLogEntry {
    std::size_t hour = 0;
    std::size_t coordinator = 0;
    double quota = 0.0;
    double accepted_change = 0.0;  // counted against the quota
    double override_change = 0.0;  // catch-up moves outside the quota
    std::size_t rejected = 0;
};

struct SimulationRun {
    std::string policy;
    std::vector<CapacityPlan> plans;  // executed capacities
    DispatchSolution dispatch;        // realized day
    GridMetricsSeries metrics;        // realized hourly metrics
    std::size_t opf_solves = 0;
    std::vector<CoordinatorLogEntry> coordinator_log;

    std::vector<HourlySeries> caps() const;
};

/// All datacenters at average capacity; one solve, no ramp anchor.
SimulationRun run_fixed_baseline(const DayContext& ctx);

/// Hourly online adaptation. `baseline` supplies the day-ahead metrics and
/// the ramp anchor; its solve is counted, so a run makes 25 solves.
SimulationRun run_local_online(const DayContext& ctx, const SimulationRun& baseline, MetricKind metric,
                               OnlineVariant variant, const PolicySpec& spec);

/// Online adaptation whose hourly requests pass through quota-limited
/// coordinators before the grid sees them.
SimulationRun run_coordinated(const DayContext& ctx, const SimulationRun& baseline, MetricKind metric,
                              OnlineVariant variant, double quota, std::size_t n_coordinators, std::uint64_t seed,
                              const PolicySpec& spec);

/// Datacenters commit day-ahead LMP plans. With a 24-hour plan the grid
/// solves the day once; shorter plans are revealed to a rolling hourly
/// re-solve.
SimulationRun run_planshare(const DayContext& ctx, const SimulationRun& baseline, std::size_t plan_length,
                            const PolicySpec& spec);

/// Dispatches on `spec.kind`.
SimulationRun run_policy(const DayContext& ctx, const SimulationRun& baseline, const PolicySpec& spec,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// sweeps

struct GridSource {
    std::optional<std::filesystem::path> file;
    SyntheticGridSpec synthetic;
    std::optional<std::uint64_t> seed;  // synthetic grid seed, default derived from the master seed
};

struct RunConfig {
    GridSource grid;
    ProfileSpec profile;
    std::vector<DayType> day_types;
    std::size_t wind_scenarios = 1;
    std::vector<double> penetrations{0.3};
    PlacementSpec datacenters;
    std::optional<std::uint64_t> placement_seed;
    std::vector<PolicySpec> policies;
    EmissionRateTable emissions;
    double quantum = kDefaultQuantum;
    std::uint64_t seed = 1;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// JSON; unknown keys are errors. Relative grid paths resolve against
/// `base_dir`.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Mixes `parts` into `master` (splitmix64 steps).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) noexcept;

struct CellKey {
    DayType day_type;
    std::size_t scenario = 0;
    double penetration = 0.0;

    std::string str() const;  // e.g. "SpringWD_s03_p0.3"
};

struct CellResult {
    CellKey key;
    std::string policy;
    std::size_t policy_index = 0;
    EvaluationReport report;
    std::size_t opf_solves = 0;
};

struct CellFailure {
    CellKey key;
    std::string message;
};

struct AggregateRow {
    std::string policy;
    std::size_t policy_index = 0;
    double penetration = 0.0;
    std::size_t cells = 0;
    std::size_t scenarios = 0;
    // mean and population standard deviation across wind scenarios of the
    // day-type weighted value
    std::vector<std::pair<double, double>> values;
};

struct SweepOutput {
    std::vector<CellResult> cells;
    std::vector<CellFailure> failures;
    std::vector<AggregateRow> aggregate;
};

/// Names of the aggregated report fields, in AggregateRow::values order.
std::span<const std::string_view> aggregate_fields() noexcept;

struct SweepOptions {
    std::size_t jobs = 1;
    /// When set, per-cell CSVs are written below this directory.
    std::optional<std::filesystem::path> cell_dir;
};

/// Runs every (day type, scenario, penetration) cell with the baseline and
/// every configured policy. Failed cells are reported, not fatal.
SweepOutput run_sweep(const RunConfig& config, const SweepOptions& options = {});

/// Builds the grid, datacenter fleet and a cell's scenario exactly as the
/// sweep does.
GridTopology sweep_grid(const RunConfig& config);
std::vector<DatacenterConfig> sweep_datacenters(const RunConfig& config, const GridTopology& grid);
DayScenario sweep_scenario(const RunConfig& config, const GridTopology& grid, const CellKey& key);

/// Weekday types weigh 5, weekend types 2; scenario values are the weighted
/// mean over day types and the row reports mean and population stddev
/// across scenarios.
std::vector<AggregateRow> aggregate(const RunConfig& config, const std::vector<CellResult>& cells);

void write_aggregate_csv(std::ostream& out, const RunConfig& config, const std::vector<AggregateRow>& rows);

}  // namespace gridflex
