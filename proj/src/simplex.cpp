// Bounded-variable revised primal simplex.
//
// Rows are carried as a . x - r = 0 with the row activity r bounded by the
// constraint sense, so the all-logical basis (B = -I) is always a valid
// start. Phase 1 minimizes the sum of basic bound violations with costs
// recomputed every iteration; phase 2 minimizes the true objective. The basis
// is held as a sparse LU of a recent basis plus a product-form eta file.

#include "gridflex/lp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

namespace gridflex::lp {
namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr std::size_t kDegenerateBeforeBland = 60;

struct Eta {
    std::size_t pivot = 0;
    double pivot_value = 1.0;
    std::vector<std::pair<std::size_t, double>> entries;  // off-pivot nonzeros
};

class Simplex {
public:
    Simplex(const LinearProgram& program, const SolverOptions& options)
    : program_(program)
    , options_(options)
    {
    }

    LpSolution run();

private:
    bool presolve();
    void initial_basis();
    bool warm_basis(const Basis& basis);
    void set_nonbasic(std::size_t j, BasisStatus preferred);
    bool refactor();
    void recompute_basic_values();
    void ftran(Eigen::VectorXd& v) const;
    void btran(Eigen::VectorXd& v) const;
    void load_column(std::size_t var, Eigen::VectorXd& v) const;
    double column_dot(std::size_t var, const Eigen::VectorXd& y) const;
    double feas_tol(double bound) const { return options_.primal_tolerance * std::max(1.0, std::abs(bound)); }
    LpSolution finish(Status status);

    const LinearProgram& program_;
    SolverOptions options_;

    // presolve maps
    std::vector<std::size_t> col_of_var_;
    std::vector<std::size_t> var_of_col_;
    std::vector<std::size_t> row_of_con_;
    std::vector<std::size_t> con_of_row_;
    std::vector<double> fixed_value_;

    std::size_t m_ = 0;  // active rows
    std::size_t n_ = 0;  // active structural columns
    std::vector<std::size_t> col_start_;
    std::vector<std::size_t> row_index_;
    std::vector<double> value_;

    std::vector<double> lower_, upper_, cost_, x_;
    std::vector<VarState> state_;
    std::vector<std::size_t> head_;

    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
    Eigen::VectorXd y_;
    std::size_t iterations_ = 0;
    bool warm_started_ = false;
};

bool Simplex::presolve()
{
    const auto vars = program_.variables();
    const auto cons = program_.constraints();

    // A warm start keeps fixed columns so that its basis maps one to one.
    const bool keep_fixed = options_.warm_start != nullptr;
    col_of_var_.assign(vars.size(), kNone);
    fixed_value_.assign(vars.size(), 0.0);
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].lower == vars[j].upper && !keep_fixed) {
            fixed_value_[j] = vars[j].lower;
        } else {
            col_of_var_[j] = var_of_col_.size();
            var_of_col_.push_back(j);
        }
    }
    n_ = var_of_col_.size();

    std::vector<std::vector<std::pair<std::size_t, double>>> columns(n_);
    std::vector<double> row_lo, row_hi;
    row_of_con_.assign(cons.size(), kNone);
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const auto& con = cons[i];
        double constant = 0.0;
        bool has_free_term = false;
        for (const auto& term : con.terms) {
            if (term.coef == 0.0) {
                continue;
            }
            if (col_of_var_[term.var.index] == kNone) {
                constant += term.coef * fixed_value_[term.var.index];
            } else {
                has_free_term = true;
            }
        }
        const double rhs = con.rhs - constant;
        // rows left with fixed columns only need to hold to certificate accuracy
        const double tol = std::max(feas_tol(con.rhs), kCertificateTolerance * (1.0 + std::abs(con.rhs)));
        auto holds = [&](double slack) {
            return (con.sense == Sense::LessEqual && slack >= -tol) ||
                   (con.sense == Sense::GreaterEqual && slack <= tol) ||
                   (con.sense == Sense::Equal && std::abs(slack) <= tol);
        };
        if (!has_free_term) {
            if (!holds(rhs)) {
                return false;
            }
            continue;
        }
        bool all_fixed = true;
        double activity = 0.0;
        for (const auto& term : con.terms) {
            const auto& v = vars[term.var.index];
            if (term.coef != 0.0 && col_of_var_[term.var.index] != kNone) {
                all_fixed = all_fixed && v.lower == v.upper;
                activity += term.coef * v.lower;
            }
        }
        if (all_fixed && !holds(rhs - activity)) {
            return false;
        }
        const std::size_t row = con_of_row_.size();
        row_of_con_[i] = row;
        con_of_row_.push_back(i);
        for (const auto& term : con.terms) {
            const std::size_t col = col_of_var_[term.var.index];
            if (term.coef != 0.0 && col != kNone) {
                columns[col].emplace_back(row, term.coef);
            }
        }
        row_lo.push_back(con.sense == Sense::LessEqual ? -kInfinity : rhs);
        row_hi.push_back(con.sense == Sense::GreaterEqual ? kInfinity : rhs);
        if (all_fixed) {
            row_lo.back() = std::min(row_lo.back(), activity);
            row_hi.back() = std::max(row_hi.back(), activity);
        }
    }
    m_ = con_of_row_.size();

    col_start_.assign(n_ + 1, 0);
    for (std::size_t j = 0; j < n_; ++j) {
        auto& col = columns[j];
        std::sort(col.begin(), col.end());
        // merge duplicate (row, var) terms
        std::size_t out = 0;
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (out > 0 && col[out - 1].first == col[k].first) {
                col[out - 1].second += col[k].second;
            } else {
                col[out++] = col[k];
            }
        }
        col.resize(out);
        for (const auto& [row, v] : col) {
            if (v != 0.0) {
                row_index_.push_back(row);
                value_.push_back(v);
            }
        }
        col_start_[j + 1] = row_index_.size();
    }

    const std::size_t total = n_ + m_;
    lower_.resize(total);
    upper_.resize(total);
    cost_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        const auto& v = vars[var_of_col_[j]];
        lower_[j] = v.lower;
        upper_[j] = v.upper;
        cost_[j] = v.cost;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        lower_[n_ + i] = row_lo[i];
        upper_[n_ + i] = row_hi[i];
    }
    return true;
}

void Simplex::initial_basis()
{
    const std::size_t total = n_ + m_;
    x_.assign(total, 0.0);
    state_.assign(total, VarState::Free);
    for (std::size_t j = 0; j < n_; ++j) {
        if (std::isfinite(lower_[j]) && (!std::isfinite(upper_[j]) || std::abs(lower_[j]) <= std::abs(upper_[j]))) {
            state_[j] = VarState::AtLower;
            x_[j] = lower_[j];
        } else if (std::isfinite(upper_[j])) {
            state_[j] = VarState::AtUpper;
            x_[j] = upper_[j];
        }
    }
    head_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        head_[i] = n_ + i;
        state_[n_ + i] = VarState::Basic;
    }
}

void Simplex::set_nonbasic(std::size_t j, BasisStatus preferred)
{
    const bool lo = std::isfinite(lower_[j]);
    const bool hi = std::isfinite(upper_[j]);
    if (preferred == BasisStatus::AtUpper && hi) {
        state_[j] = VarState::AtUpper;
        x_[j] = upper_[j];
    } else if (preferred == BasisStatus::AtLower && lo) {
        state_[j] = VarState::AtLower;
        x_[j] = lower_[j];
    } else if (lo && (!hi || std::abs(lower_[j]) <= std::abs(upper_[j]))) {
        state_[j] = VarState::AtLower;
        x_[j] = lower_[j];
    } else if (hi) {
        state_[j] = VarState::AtUpper;
        x_[j] = upper_[j];
    } else {
        state_[j] = VarState::Free;
        x_[j] = 0.0;
    }
}

// Maps a basis of the unpresolved program onto the active columns and rows.
// Presolve may drop rows and columns, so the basic set is padded with
// binding-row slacks or trimmed of slack columns until it has one entry per
// row; a singular result is caught by the first factorization.
bool Simplex::warm_basis(const Basis& basis)
{
    if (basis.variables.size() != program_.num_variables() ||
        basis.constraints.size() != program_.num_constraints()) {
        return false;
    }
    const std::size_t total = n_ + m_;
    x_.assign(total, 0.0);
    state_.assign(total, VarState::Free);
    std::vector<char> basic(total, 0);
    std::size_t count = 0;
    auto place = [&](std::size_t j, BasisStatus s) {
        if (s == BasisStatus::Basic) {
            basic[j] = 1;
            ++count;
        } else {
            set_nonbasic(j, s);
        }
    };
    for (std::size_t j = 0; j < n_; ++j) {
        place(j, basis.variables[var_of_col_[j]]);
    }
    for (std::size_t i = 0; i < m_; ++i) {
        place(n_ + i, basis.constraints[con_of_row_[i]]);
    }
    for (std::size_t i = m_; count < m_ && i-- > 0;) {
        if (!basic[n_ + i]) {
            basic[n_ + i] = 1;
            ++count;
        }
    }
    for (std::size_t i = m_; count > m_ && i-- > 0;) {
        if (basic[n_ + i]) {
            basic[n_ + i] = 0;
            set_nonbasic(n_ + i, BasisStatus::AtLower);
            --count;
        }
    }
    if (count != m_) {
        return false;
    }
    head_.clear();
    for (std::size_t j = 0; j < total; ++j) {
        if (basic[j]) {
            head_.push_back(j);
            state_[j] = VarState::Basic;
        }
    }
    return true;
}

void Simplex::load_column(std::size_t var, Eigen::VectorXd& v) const
{
    v.setZero(static_cast<Eigen::Index>(m_));
    if (var >= n_) {
        v[static_cast<Eigen::Index>(var - n_)] = -1.0;
        return;
    }
    for (std::size_t k = col_start_[var]; k < col_start_[var + 1]; ++k) {
        v[static_cast<Eigen::Index>(row_index_[k])] = value_[k];
    }
}

double Simplex::column_dot(std::size_t var, const Eigen::VectorXd& y) const
{
    if (var >= n_) {
        return -y[static_cast<Eigen::Index>(var - n_)];
    }
    double s = 0.0;
    for (std::size_t k = col_start_[var]; k < col_start_[var + 1]; ++k) {
        s += value_[k] * y[static_cast<Eigen::Index>(row_index_[k])];
    }
    return s;
}

bool Simplex::refactor()
{
    etas_.clear();
    if (m_ == 0) {
        return true;
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(m_ * 3);
    for (std::size_t p = 0; p < m_; ++p) {
        const std::size_t var = head_[p];
        const auto col = static_cast<int>(p);
        if (var >= n_) {
            triplets.emplace_back(static_cast<int>(var - n_), col, -1.0);
        } else {
            for (std::size_t k = col_start_[var]; k < col_start_[var + 1]; ++k) {
                triplets.emplace_back(static_cast<int>(row_index_[k]), col, value_[k]);
            }
        }
    }
    Eigen::SparseMatrix<double> basis(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    return lu_.info() == Eigen::Success;
}

void Simplex::ftran(Eigen::VectorXd& v) const
{
    if (m_ == 0) {
        return;
    }
    v = lu_.solve(v);
    for (const auto& eta : etas_) {
        const auto r = static_cast<Eigen::Index>(eta.pivot);
        const double vr = v[r] / eta.pivot_value;
        v[r] = vr;
        if (vr != 0.0) {
            for (const auto& [i, a] : eta.entries) {
                v[static_cast<Eigen::Index>(i)] -= a * vr;
            }
        }
    }
}

void Simplex::btran(Eigen::VectorXd& v) const
{
    if (m_ == 0) {
        return;
    }
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        const auto r = static_cast<Eigen::Index>(it->pivot);
        double s = v[r];
        for (const auto& [i, a] : it->entries) {
            s -= a * v[static_cast<Eigen::Index>(i)];
        }
        v[r] = s / it->pivot_value;
    }
    v = lu_.transpose().solve(v);
}

void Simplex::recompute_basic_values()
{
    if (m_ == 0) {
        return;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::Basic || x_[j] == 0.0) {
            continue;
        }
        if (j >= n_) {
            rhs[static_cast<Eigen::Index>(j - n_)] += x_[j];
        } else {
            for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
                rhs[static_cast<Eigen::Index>(row_index_[k])] -= value_[k] * x_[j];
            }
        }
    }
    ftran(rhs);
    for (std::size_t p = 0; p < m_; ++p) {
        x_[head_[p]] = rhs[static_cast<Eigen::Index>(p)];
    }
}

LpSolution Simplex::run()
{
    if (!presolve()) {
        return finish(Status::Infeasible);
    }
    bool need_refactor = true;
    bool fresh = false;
    if (options_.warm_start != nullptr && warm_basis(*options_.warm_start)) {
        bool usable = refactor();
        if (usable) {
            recompute_basic_values();
            usable = std::all_of(x_.begin(), x_.end(), [](double v) { return std::isfinite(v); });
        }
        if (usable) {
            need_refactor = false;
            fresh = true;
            warm_started_ = true;
        }
    }
    if (!warm_started_) {
        initial_basis();
    }

    const std::size_t limit =
        options_.iteration_limit != 0 ? options_.iteration_limit : 200 * (n_ + m_) + 10000;

    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(m_));
    std::vector<double> eff_lo(m_), eff_hi(m_);
    std::size_t degenerate_run = 0;

    while (true) {
        if (need_refactor) {
            if (!refactor()) {
                return finish(Status::NumericalFailure);
            }
            recompute_basic_values();
            need_refactor = false;
            fresh = true;
        }
        if (iterations_ >= limit) {
            return finish(Status::NumericalFailure);
        }

        bool infeasible = false;
        for (std::size_t p = 0; p < m_; ++p) {
            const std::size_t var = head_[p];
            const double xv = x_[var];
            const auto ip = static_cast<Eigen::Index>(p);
            if (xv < lower_[var] - feas_tol(lower_[var])) {
                cb[ip] = -1.0;
                eff_lo[p] = -kInfinity;
                eff_hi[p] = lower_[var];
                infeasible = true;
            } else if (xv > upper_[var] + feas_tol(upper_[var])) {
                cb[ip] = 1.0;
                eff_lo[p] = upper_[var];
                eff_hi[p] = kInfinity;
                infeasible = true;
            } else {
                cb[ip] = 0.0;
                eff_lo[p] = lower_[var];
                eff_hi[p] = upper_[var];
            }
        }
        if (!infeasible) {
            for (std::size_t p = 0; p < m_; ++p) {
                cb[static_cast<Eigen::Index>(p)] = cost_[head_[p]];
            }
        }
        y_ = cb;
        btran(y_);

        // pricing
        const bool bland = degenerate_run >= kDegenerateBeforeBland;
        std::size_t entering = kNone;
        double best = 0.0;
        double entering_d = 0.0;
        for (std::size_t j = 0; j < n_ + m_; ++j) {
            const VarState s = state_[j];
            if (s == VarState::Basic || lower_[j] == upper_[j]) {
                continue;
            }
            const double cj = infeasible ? 0.0 : cost_[j];
            const double d = cj - column_dot(j, y_);
            const double dtol = options_.dual_tolerance * std::max(1.0, std::abs(cj));
            bool eligible = false;
            if (s == VarState::AtLower) {
                eligible = d < -dtol;
            } else if (s == VarState::AtUpper) {
                eligible = d > dtol;
            } else {
                eligible = std::abs(d) > dtol;
            }
            if (!eligible) {
                continue;
            }
            if (bland) {
                entering = j;
                entering_d = d;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                entering = j;
                entering_d = d;
            }
        }

        if (entering == kNone) {
            if (!fresh) {
                need_refactor = true;
                continue;
            }
            return finish(infeasible ? Status::Infeasible : Status::Optimal);
        }

        load_column(entering, alpha);
        ftran(alpha);
        const double dir = entering_d < 0.0 ? 1.0 : -1.0;

        // Harris two-pass ratio test over basic variables
        double theta_max = kInfinity;
        for (std::size_t p = 0; p < m_; ++p) {
            const double a = alpha[static_cast<Eigen::Index>(p)];
            if (std::abs(a) <= options_.pivot_tolerance) {
                continue;
            }
            const double rate = -dir * a;
            const double xv = x_[head_[p]];
            if (rate < 0.0 && std::isfinite(eff_lo[p])) {
                theta_max = std::min(theta_max, (xv - eff_lo[p] + feas_tol(eff_lo[p])) / -rate);
            } else if (rate > 0.0 && std::isfinite(eff_hi[p])) {
                theta_max = std::min(theta_max, (eff_hi[p] + feas_tol(eff_hi[p]) - xv) / rate);
            }
        }
        std::size_t leave = kNone;
        double theta = kInfinity;
        double leave_bound = 0.0;
        double best_pivot = 0.0;
        for (std::size_t p = 0; p < m_; ++p) {
            const double a = alpha[static_cast<Eigen::Index>(p)];
            if (std::abs(a) <= options_.pivot_tolerance) {
                continue;
            }
            const double rate = -dir * a;
            const double xv = x_[head_[p]];
            double ratio = kInfinity;
            double bound = 0.0;
            if (rate < 0.0 && std::isfinite(eff_lo[p])) {
                ratio = (xv - eff_lo[p]) / -rate;
                bound = eff_lo[p];
            } else if (rate > 0.0 && std::isfinite(eff_hi[p])) {
                ratio = (eff_hi[p] - xv) / rate;
                bound = eff_hi[p];
            } else {
                continue;
            }
            ratio = std::max(ratio, 0.0);
            if (bland) {
                if (ratio < theta || (ratio == theta && leave != kNone && head_[p] < head_[leave])) {
                    theta = ratio;
                    leave = p;
                    leave_bound = bound;
                }
            } else if (ratio <= theta_max && std::abs(a) > best_pivot) {
                best_pivot = std::abs(a);
                theta = ratio;
                leave = p;
                leave_bound = bound;
            }
        }

        const double span = upper_[entering] - lower_[entering];
        const bool flip = std::isfinite(span) && span <= theta;
        if (flip) {
            theta = span;
            leave = kNone;
        }
        if (leave == kNone && !flip) {
            if (infeasible) {
                return finish(Status::NumericalFailure);
            }
            return finish(Status::Unbounded);
        }

        ++iterations_;
        fresh = false;
        degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

        if (theta != 0.0) {
            for (std::size_t p = 0; p < m_; ++p) {
                const double a = alpha[static_cast<Eigen::Index>(p)];
                if (a != 0.0) {
                    x_[head_[p]] -= dir * a * theta;
                }
            }
        }
        x_[entering] += dir * theta;

        if (flip) {
            if (state_[entering] == VarState::AtLower) {
                state_[entering] = VarState::AtUpper;
                x_[entering] = upper_[entering];
            } else {
                state_[entering] = VarState::AtLower;
                x_[entering] = lower_[entering];
            }
            continue;
        }

        const std::size_t leaving_var = head_[leave];
        x_[leaving_var] = leave_bound;
        state_[leaving_var] = leave_bound == lower_[leaving_var] ? VarState::AtLower : VarState::AtUpper;
        if (lower_[leaving_var] == upper_[leaving_var]) {
            state_[leaving_var] = VarState::AtLower;
        }
        head_[leave] = entering;
        state_[entering] = VarState::Basic;

        Eta eta;
        eta.pivot = leave;
        eta.pivot_value = alpha[static_cast<Eigen::Index>(leave)];
        for (std::size_t p = 0; p < m_; ++p) {
            const double a = alpha[static_cast<Eigen::Index>(p)];
            if (p != leave && a != 0.0) {
                eta.entries.emplace_back(p, a);
            }
        }
        etas_.push_back(std::move(eta));
        if (etas_.size() >= options_.refactor_interval) {
            need_refactor = true;
        }
    }
}

LpSolution Simplex::finish(Status status)
{
    LpSolution out;
    out.status = status;
    out.iterations = iterations_;
    out.warm_started = warm_started_;
    const std::size_t nvars = program_.num_variables();
    out.primal.assign(nvars, 0.0);
    out.dual.assign(program_.num_constraints(), 0.0);
    if (status != Status::Optimal) {
        return out;
    }
    for (std::size_t j = 0; j < nvars; ++j) {
        const std::size_t col = col_of_var_[j];
        out.primal[j] = col == kNone ? fixed_value_[j] : x_[col];
    }
    for (std::size_t i = 0; i < row_of_con_.size(); ++i) {
        if (row_of_con_[i] != kNone) {
            out.dual[i] = y_[static_cast<Eigen::Index>(row_of_con_[i])];
        }
    }
    out.objective = program_.objective_value(out.primal);

    auto status_of = [&](std::size_t j) {
        switch (state_[j]) {
        case VarState::Basic: return BasisStatus::Basic;
        case VarState::AtLower: return BasisStatus::AtLower;
        case VarState::AtUpper: return BasisStatus::AtUpper;
        case VarState::Free: break;
        }
        return BasisStatus::Free;
    };
    out.basis.variables.assign(nvars, BasisStatus::AtLower);
    for (std::size_t j = 0; j < nvars; ++j) {
        if (col_of_var_[j] != kNone) {
            out.basis.variables[j] = status_of(col_of_var_[j]);
        }
    }
    out.basis.constraints.assign(program_.num_constraints(), BasisStatus::Basic);
    for (std::size_t i = 0; i < row_of_con_.size(); ++i) {
        if (row_of_con_[i] != kNone) {
            out.basis.constraints[i] = status_of(n_ + row_of_con_[i]);
        }
    }
    return out;
}

}  // namespace

LpSolution solve(const LinearProgram& program, const SolverOptions& options)
{
    program.validate();
    Simplex simplex(program, options);
    return simplex.run();
}

}  // namespace gridflex::lp
