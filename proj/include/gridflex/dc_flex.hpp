#pragma once

#include "gridflex/grid_model.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridflex {

struct CapacityPlan {
    std::string dc_id;
    HourlySeries cap{};  // MW

    friend bool operator==(const CapacityPlan&, const CapacityPlan&) = default;
};

/// Deferred energy after `hour` hours of the day have been decided.
struct BacklogState {
    std::string dc_id;
    double backlog = 0.0;  // MWh, negative when working ahead
    std::size_t hour = 0;
    std::optional<double> last_cap;  // capacity chosen for `hour`, if any

    friend bool operator==(const BacklogState&, const BacklogState&) = default;
};

enum class PlanRule { CapacityRange, StepSize, FinalBacklog };

std::string_view to_string(PlanRule rule) noexcept;

struct PlanViolation {
    PlanRule rule;
    std::size_t hour;  // 1-based
    std::string message;
};

struct PlanCheck {
    std::vector<PlanViolation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Tolerance (MW or MWh) for range and step comparisons. Plans on an integer
/// MW grid compare exactly; the final backlog is compared against zero with
/// the same slack.
inline constexpr double kPlanTolerance = 1e-9;

/// Checks range, step size (when configured) and zero final backlog.
/// `step_size` overrides the datacenter's own limit when set.
PlanCheck validate_plan(const CapacityPlan& plan, const DatacenterConfig& config,
                        std::optional<double> step_size = std::nullopt);

/// backlog_t = backlog_{t-1} + (avg_cap - cap_t), starting from 0.
HourlySeries backlog_trajectory(const CapacityPlan& plan, const DatacenterConfig& config);

/// Throws ValidationError for a capacity outside [cap_min, cap_max] or when
/// the day is already complete.
BacklogState apply_decision(const BacklogState& state, double cap, const DatacenterConfig& config);

/// Whether a completion with zero final backlog exists from `backlog` with
/// `hours_left` hours to go. With a step limit the completion must also
/// start within one step of `last_cap`.
bool can_complete(const DatacenterConfig& config, double backlog, std::size_t hours_left,
                  std::optional<double> last_cap = std::nullopt, std::optional<double> step_size = std::nullopt);

/// Whether choosing `cap` next keeps the day completable.
bool decision_feasible(const DatacenterConfig& config, const BacklogState& state, double cap,
                       std::optional<double> step_size = std::nullopt);

/// CSV with header `dc_id,h1..h24`.
std::vector<CapacityPlan> parse_plans(std::istream& in, const std::string& source = "<plans>");
void write_plans(std::ostream& out, const std::vector<CapacityPlan>& plans);

/// The plan every datacenter follows without flexibility.
CapacityPlan neutral_plan(const DatacenterConfig& config);

}  // namespace gridflex
