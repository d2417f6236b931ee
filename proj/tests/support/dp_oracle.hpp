#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

namespace gridflex::test {

struct BruteForcePlan {
    double cost = 0.0;
    std::vector<double> plan;  // the optimum preferred hour by hour
};

// Enumerates every level sequence and keeps those with zero final backlog and
// every hour-to-hour change within `step`. Among optimal plans the one
// preferred at the first differing hour wins, preferring the level closer to
// `avg` and then the lower one.
inline std::optional<BruteForcePlan> brute_force_plan(const std::vector<double>& prices,
                                                      const std::vector<double>& levels, double avg,
                                                      std::optional<double> step, double start_backlog = 0.0,
                                                      std::optional<double> start_cap = std::nullopt)
{
    const std::size_t h = prices.size();
    const std::size_t l = levels.size();
    std::vector<std::size_t> idx(h, 0);
    std::optional<BruteForcePlan> best;
    auto better_ties = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t t = 0; t < a.size(); ++t) {
            if (a[t] == b[t]) {
                continue;
            }
            const double da = std::abs(a[t] - avg);
            const double db = std::abs(b[t] - avg);
            return da != db ? da < db : a[t] < b[t];
        }
        return false;
    };
    while (true) {
        std::vector<double> plan(h);
        double backlog = start_backlog;
        double cost = 0.0;
        bool ok = true;
        std::optional<double> prev = start_cap;
        for (std::size_t t = 0; t < h; ++t) {
            plan[t] = levels[idx[t]];
            if (step && prev && std::abs(plan[t] - *prev) > *step + 1e-12) {
                ok = false;
                break;
            }
            prev = plan[t];
            backlog += avg - plan[t];
            cost += plan[t] * prices[t];
        }
        if (ok && std::abs(backlog) < 1e-9) {
            const double tol = 1e-9 * std::max(1.0, std::abs(cost));
            if (!best || cost < best->cost - tol) {
                best = BruteForcePlan{cost, plan};
            } else if (std::abs(cost - best->cost) <= tol && better_ties(plan, best->plan)) {
                best->plan = plan;
            }
        }
        std::size_t pos = 0;
        while (pos < h && ++idx[pos] == l) {
            idx[pos++] = 0;
        }
        if (pos == h) {
            break;
        }
    }
    return best;
}

}  // namespace gridflex::test
