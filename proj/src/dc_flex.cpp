#include "gridflex/dc_flex.hpp"

#include "gridflex/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

namespace gridflex {

std::string_view to_string(PlanRule rule) noexcept
{
    switch (rule) {
    case PlanRule::CapacityRange: return "capacity range";
    case PlanRule::StepSize: return "step size";
    case PlanRule::FinalBacklog: return "final backlog";
    }
    return "unknown";
}

namespace {

std::optional<double> effective_step(const DatacenterConfig& config, std::optional<double> step_size)
{
    return step_size ? step_size : config.step_size;
}

}  // namespace

PlanCheck validate_plan(const CapacityPlan& plan, const DatacenterConfig& config, std::optional<double> step_size)
{
    PlanCheck check;
    const auto step = effective_step(config, step_size);
    auto add = [&](PlanRule rule, std::size_t hour, const std::string& detail) {
        check.violations.push_back(PlanViolation{
            rule, hour, "dc '" + plan.dc_id + "' hour " + std::to_string(hour) + ": " + std::string(to_string(rule)) +
                            " violated, " + detail});
    };
    for (std::size_t t = 0; t < kHours; ++t) {
        const double c = plan.cap[t];
        if (!std::isfinite(c) || c < config.cap_min - kPlanTolerance || c > config.cap_max + kPlanTolerance) {
            add(PlanRule::CapacityRange, t + 1,
                "capacity " + text::fmt(c) + " outside [" + text::fmt(config.cap_min) + ", " +
                    text::fmt(config.cap_max) + "]");
        }
        if (t > 0 && step) {
            const double delta = std::abs(c - plan.cap[t - 1]);
            if (delta > *step + kPlanTolerance) {
                add(PlanRule::StepSize, t + 1,
                    "change " + text::fmt(delta) + " MW exceeds step size " + text::fmt(*step) + " MW/h");
            }
        }
    }
    const double final_backlog = backlog_trajectory(plan, config).back();
    if (!(std::abs(final_backlog) <= kPlanTolerance)) {
        add(PlanRule::FinalBacklog, kHours, "final backlog is " + text::fmt(final_backlog) + " MWh, not 0");
    }
    return check;
}

HourlySeries backlog_trajectory(const CapacityPlan& plan, const DatacenterConfig& config)
{
    HourlySeries out{};
    double b = 0.0;
    for (std::size_t t = 0; t < kHours; ++t) {
        b += config.avg_cap - plan.cap[t];
        out[t] = b;
    }
    return out;
}

BacklogState apply_decision(const BacklogState& state, double cap, const DatacenterConfig& config)
{
    if (state.hour >= kHours) {
        throw ValidationError("dc '" + config.id + "': the day is already complete");
    }
    if (!(cap >= config.cap_min - kPlanTolerance && cap <= config.cap_max + kPlanTolerance)) {
        throw ValidationError("dc '" + config.id + "': capacity " + text::fmt(cap) + " outside [" +
                              text::fmt(config.cap_min) + ", " + text::fmt(config.cap_max) + "]");
    }
    BacklogState next = state;
    next.backlog += config.avg_cap - cap;
    next.hour += 1;
    next.last_cap = cap;
    return next;
}

bool can_complete(const DatacenterConfig& config, double backlog, std::size_t hours_left,
                  std::optional<double> last_cap, std::optional<double> step_size)
{
    const auto step = effective_step(config, step_size);
    if (hours_left == 0) {
        return std::abs(backlog) <= kPlanTolerance;
    }
    // total capacity still to run equals backlog plus the average for each hour left
    const double needed = backlog + static_cast<double>(hours_left) * config.avg_cap;
    double hi = 0.0;
    double lo = 0.0;
    if (step && last_cap) {
        for (std::size_t k = 1; k <= hours_left; ++k) {
            hi += std::min(config.cap_max, *last_cap + static_cast<double>(k) * *step);
            lo += std::max(config.cap_min, *last_cap - static_cast<double>(k) * *step);
        }
    } else {
        hi = static_cast<double>(hours_left) * config.cap_max;
        lo = static_cast<double>(hours_left) * config.cap_min;
    }
    return needed >= lo - kPlanTolerance && needed <= hi + kPlanTolerance;
}

bool decision_feasible(const DatacenterConfig& config, const BacklogState& state, double cap,
                       std::optional<double> step_size)
{
    const auto step = effective_step(config, step_size);
    if (state.hour >= kHours) {
        return false;
    }
    if (cap < config.cap_min - kPlanTolerance || cap > config.cap_max + kPlanTolerance) {
        return false;
    }
    if (step && state.last_cap && std::abs(cap - *state.last_cap) > *step + kPlanTolerance) {
        return false;
    }
    return can_complete(config, state.backlog + config.avg_cap - cap, kHours - state.hour - 1, cap, step);
}

std::vector<CapacityPlan> parse_plans(std::istream& in, const std::string& source)
{
    std::vector<CapacityPlan> plans;
    std::set<std::string> seen;
    std::string raw;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto text = text::trim(raw);
        if (text.empty()) {
            continue;
        }
        const auto fields = text::split_fields(text);
        if (!header) {
            if (fields.size() != kHours + 1 || fields[0] != "dc_id") {
                throw ParseError(source, line_no, "expected header 'dc_id,h1..h24'");
            }
            header = true;
            continue;
        }
        if (fields.size() != kHours + 1) {
            throw ParseError(source, line_no, "expected 25 fields, got " + std::to_string(fields.size()));
        }
        if (fields[0].empty()) {
            throw ParseError(source, line_no, "empty dc_id");
        }
        if (!seen.insert(fields[0]).second) {
            throw ParseError(source, line_no, "plan for '" + fields[0] + "' given twice");
        }
        CapacityPlan plan{fields[0], {}};
        for (std::size_t t = 0; t < kHours; ++t) {
            auto v = text::parse_double(fields[t + 1]);
            if (!v) {
                throw ParseError(source, line_no, "h" + std::to_string(t + 1) + " is not a number");
            }
            plan.cap[t] = *v;
        }
        plans.push_back(std::move(plan));
    }
    if (!header) {
        throw ParseError(source, line_no, "empty plan file");
    }
    return plans;
}

void write_plans(std::ostream& out, const std::vector<CapacityPlan>& plans)
{
    out << "dc_id";
    for (std::size_t t = 1; t <= kHours; ++t) {
        out << ",h" << t;
    }
    out << '\n';
    for (const auto& plan : plans) {
        out << plan.dc_id;
        for (double c : plan.cap) {
            out << ',' << text::fmt(c);
        }
        out << '\n';
    }
}

CapacityPlan neutral_plan(const DatacenterConfig& config)
{
    CapacityPlan plan{config.id, {}};
    plan.cap.fill(config.avg_cap);
    return plan;
}

}  // namespace gridflex
