#pragma once

#include "gridflex/dc_flex.hpp"
#include "gridflex/grid_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gridflex {

enum class MetricKind { ACI, Price, LMPrice };

std::string_view to_string(MetricKind kind) noexcept;
std::optional<MetricKind> parse_metric(std::string_view text) noexcept;

/// Metric values for hours start_hour..24.
struct PriceVector {
    MetricKind kind = MetricKind::LMPrice;
    std::size_t start_hour = 1;
    std::vector<double> values;

    friend bool operator==(const PriceVector&, const PriceVector&) = default;
};

/// Capacity grid used by the decision algorithms: avg_cap + k * quantum
/// within [cap_min, cap_max].
inline constexpr double kDefaultQuantum = 10.0;

std::vector<double> capacity_levels(const DatacenterConfig& config, double quantum = kDefaultQuantum);

struct DecisionLimits {
    std::optional<double> step_size;  // overrides the datacenter's own limit
    double quantum = kDefaultQuantum;
};

/// Picks among {avg, avg - delta, avg + delta} (delta half the dynamic
/// range, kept symmetric around avg) the feasible capacity minimizing
/// cap * now + (backlog + avg - cap) * daily_avg. Ties go toward avg, then
/// the lower capacity. When a step limit or the backlog rules out every
/// candidate, the best feasible capacity on the quantum grid is used.
double avg_rule_decide(double metric_now, double metric_daily_avg, const BacklogState& state,
                       const DatacenterConfig& config, const DecisionLimits& limits = {});

struct DpResult {
    std::vector<double> plan;  // capacities for hours start_hour..24
    double cost = 0.0;         // sum of cap * price over the horizon
};

/// Exact minimum of sum cap_t * p_t over the capacity grid subject to the
/// range, step and zero-final-backlog rules. Ties are resolved hour by hour
/// toward avg_cap, then toward the lower capacity. `start_cap` is the
/// capacity of the hour before the horizon (for the step limit). Throws
/// InfeasibleError when no completion exists.
DpResult hourly_dp(const PriceVector& prices, const DatacenterConfig& config, double start_backlog,
                   std::optional<double> start_cap, const DecisionLimits& limits = {});

/// Day-ahead values with the realized value substituted at hour j (except
/// at j = 1).
PriceVector blend_prices(const HourlySeries& day_ahead, double realized_now, std::size_t hour,
                         MetricKind kind = MetricKind::LMPrice);

/// Hourly day-ahead values for the next `horizon_hours`, the day-ahead
/// daily average afterwards.
PriceVector partial_horizon_prices(const HourlySeries& day_ahead, std::size_t horizon_hours, std::size_t hour,
                                   MetricKind kind = MetricKind::LMPrice);

struct AdaptationRequest {
    std::string dc_id;
    std::size_t hour = 1;
    double requested = 0.0;  // MW
    double previous = 0.0;   // MW, capacity of the previous hour
    /// Holding `previous` would make the zero final backlog unreachable and
    /// the request moves backlog toward zero.
    bool catch_up = false;

    double change() const noexcept { return requested > previous ? requested - previous : previous - requested; }
};

struct FilterDecision {
    bool accepted = false;
    bool override_used = false;  // accepted outside the quota
};

/// Walks the requests in a seeded random order, accepting each whose change
/// fits the remaining quota. Catch-up requests are always accepted and do
/// not consume quota.
std::vector<FilterDecision> coordinator_filter(const std::vector<AdaptationRequest>& requests, double quota,
                                               std::uint64_t seed);

struct QuotaSplit {
    double quota_per_coordinator = 0.0;
    std::vector<std::vector<std::size_t>> groups;  // datacenter indices
};

/// Equal quota shares and contiguous datacenter groups; when the count does
/// not divide evenly the first groups get one extra member.
QuotaSplit split_quota(double total_quota, std::size_t n_coordinators, std::size_t n_datacenters);

/// Full-day plan from the day-ahead price at the datacenter's bus, starting
/// at zero backlog and average capacity.
CapacityPlan planshare_plan(const HourlySeries& day_ahead_lmp, const DatacenterConfig& config,
                            const DecisionLimits& limits = {});

}  // namespace gridflex
