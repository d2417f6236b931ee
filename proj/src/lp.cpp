#include "gridflex/lp.hpp"

#include "gridflex/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>

namespace gridflex::lp {

VariableId LinearProgram::add_variable(std::string name, double lower, double upper, double cost)
{
    variables_.push_back(Variable{std::move(name), lower, upper, cost});
    return VariableId{variables_.size() - 1};
}

ConstraintId LinearProgram::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs)
{
    for (const auto& term : terms) {
        if (term.var.index >= variables_.size()) {
            throw InvalidProgram("constraint '" + name + "' references undeclared variable #" +
                                 std::to_string(term.var.index));
        }
    }
    constraints_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
    return ConstraintId{constraints_.size() - 1};
}

void LinearProgram::set_cost(VariableId var, double cost)
{
    variables_.at(var.index).cost = cost;
}

void LinearProgram::set_bounds(VariableId var, double lower, double upper)
{
    auto& v = variables_.at(var.index);
    v.lower = lower;
    v.upper = upper;
}

void LinearProgram::set_rhs(ConstraintId row, double rhs)
{
    constraints_.at(row.index).rhs = rhs;
}

double LinearProgram::objective_value(std::span<const double> x) const
{
    double obj = 0.0;
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        if (variables_[j].cost != 0.0) {
            obj += variables_[j].cost * x[j];
        }
    }
    return obj;
}

double LinearProgram::activity(ConstraintId row, std::span<const double> x) const
{
    double s = 0.0;
    for (const auto& term : constraints_.at(row.index).terms) {
        s += term.coef * x[term.var.index];
    }
    return s;
}

void LinearProgram::validate() const
{
    for (const auto& v : variables_) {
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
            throw InvalidProgram("variable '" + v.name + "' has invalid bounds");
        }
        if (v.lower == kInfinity || v.upper == -kInfinity) {
            throw InvalidProgram("variable '" + v.name + "' has an empty domain");
        }
        if (!std::isfinite(v.cost)) {
            throw InvalidProgram("variable '" + v.name + "' has a non-finite cost");
        }
    }
    for (const auto& c : constraints_) {
        if (!std::isfinite(c.rhs)) {
            throw InvalidProgram("constraint '" + c.name + "' has a non-finite right-hand side");
        }
        for (const auto& term : c.terms) {
            if (term.var.index >= variables_.size()) {
                throw InvalidProgram("constraint '" + c.name + "' references undeclared variable");
            }
            if (!std::isfinite(term.coef)) {
                throw InvalidProgram("constraint '" + c.name + "' has a non-finite coefficient");
            }
        }
    }
}

const char* to_string(Status status) noexcept
{
    switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

CertificateReport check_certificate(const LinearProgram& program, const LpSolution& solution, double tolerance)
{
    CertificateReport report;
    if (!solution.optimal()) {
        report.violations.push_back(std::string("solution status is ") + to_string(solution.status));
        return report;
    }
    const auto vars = program.variables();
    const auto cons = program.constraints();
    const auto& x = solution.primal;
    const auto& y = solution.dual;

    auto note = [&](double measure, double& worst, const std::string& what) {
        worst = std::max(worst, measure);
        if (measure > tolerance) {
            std::ostringstream msg;
            msg << what << " (scaled " << measure << ")";
            report.violations.push_back(msg.str());
        }
    };

    // reduced costs d = c - A^T y
    std::vector<double> reduced(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j) {
        reduced[j] = vars[j].cost;
    }
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const auto& con = cons[i];
        double act = 0.0;
        for (const auto& term : con.terms) {
            act += term.coef * x[term.var.index];
            reduced[term.var.index] -= term.coef * y[i];
        }
        const double scale = 1.0 + std::abs(con.rhs);
        double viol = 0.0;
        if (con.sense != Sense::GreaterEqual) {
            viol = std::max(viol, act - con.rhs);
        }
        if (con.sense != Sense::LessEqual) {
            viol = std::max(viol, con.rhs - act);
        }
        note(viol / scale, report.max_primal_residual, "constraint '" + con.name + "' violated");

        if (con.sense == Sense::GreaterEqual) {
            note(std::max(0.0, -y[i]) / (1.0 + std::abs(y[i])), report.max_dual_infeasibility,
                 "constraint '" + con.name + "' has a negative dual on a >= row");
        } else if (con.sense == Sense::LessEqual) {
            note(std::max(0.0, y[i]) / (1.0 + std::abs(y[i])), report.max_dual_infeasibility,
                 "constraint '" + con.name + "' has a positive dual on a <= row");
        }
        note(std::abs(y[i] * (act - con.rhs)) / (1.0 + std::abs(con.rhs) + std::abs(y[i])),
             report.max_complementarity, "constraint '" + con.name + "' breaks complementary slackness");
        dual_obj += con.rhs * y[i];
    }

    for (std::size_t j = 0; j < vars.size(); ++j) {
        const auto& v = vars[j];
        const double d = reduced[j];
        const double lo_gap = x[j] - v.lower;
        const double hi_gap = v.upper - x[j];
        note(std::max({0.0, -lo_gap, -hi_gap}) / (1.0 + std::abs(x[j])), report.max_primal_residual,
             "variable '" + v.name + "' outside its bounds");

        if (d > 0.0) {
            if (std::isfinite(v.lower)) {
                dual_obj += d * v.lower;
                note(std::abs(d * lo_gap) / (1.0 + std::abs(v.lower) + d), report.max_complementarity,
                     "variable '" + v.name + "' breaks complementary slackness");
            } else {
                note(d / (1.0 + std::abs(v.cost)), report.max_dual_infeasibility,
                     "variable '" + v.name + "' has a positive reduced cost but no lower bound");
            }
        } else if (d < 0.0) {
            if (std::isfinite(v.upper)) {
                dual_obj += d * v.upper;
                note(std::abs(d * hi_gap) / (1.0 + std::abs(v.upper) - d), report.max_complementarity,
                     "variable '" + v.name + "' breaks complementary slackness");
            } else {
                note(-d / (1.0 + std::abs(v.cost)), report.max_dual_infeasibility,
                     "variable '" + v.name + "' has a negative reduced cost but no upper bound");
            }
        }
    }

    report.dual_objective = dual_obj;
    report.duality_gap = std::abs(solution.objective - dual_obj) / (1.0 + std::abs(solution.objective));
    if (report.duality_gap > tolerance) {
        std::ostringstream msg;
        msg << "duality gap " << report.duality_gap << " (primal " << solution.objective << ", dual " << dual_obj
            << ")";
        report.violations.push_back(msg.str());
    }
    report.passed = report.violations.empty();
    return report;
}

namespace {

std::string lp_name(char prefix, std::size_t index, const std::string& name)
{
    std::string out(1, prefix);
    out += std::to_string(index);
    if (!name.empty()) {
        out += '_';
        for (char ch : name) {
            out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
        }
    }
    return out;
}

void write_coef(std::ostream& out, double coef, const std::string& name, bool first)
{
    if (coef < 0.0) {
        out << (first ? "- " : " - ");
    } else if (!first) {
        out << " + ";
    }
    out << std::abs(coef) << ' ' << name;
}

}  // namespace

void write_lp_format(std::ostream& out, const LinearProgram& program)
{
    const auto vars = program.variables();
    const auto cons = program.constraints();
    std::vector<std::string> names;
    names.reserve(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j) {
        names.push_back(lp_name('x', j, vars[j].name));
    }

    out.precision(17);
    out << "\\ gridflex linear program\nMinimize\n obj:";
    bool first = true;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].cost != 0.0) {
            out << (first ? " " : "");
            write_coef(out, vars[j].cost, names[j], first);
            first = false;
        }
    }
    if (first) {
        out << " 0 " << (vars.empty() ? "dummy" : names[0]);
    }
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < cons.size(); ++i) {
        out << ' ' << lp_name('c', i, cons[i].name) << ": ";
        bool lead = true;
        for (const auto& term : cons[i].terms) {
            write_coef(out, term.coef, names[term.var.index], lead);
            lead = false;
        }
        if (lead) {
            out << "0 " << (vars.empty() ? "dummy" : names[0]);
        }
        switch (cons[i].sense) {
        case Sense::LessEqual: out << " <= "; break;
        case Sense::Equal: out << " = "; break;
        case Sense::GreaterEqual: out << " >= "; break;
        }
        out << cons[i].rhs << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const auto& v = vars[j];
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out << ' ' << names[j] << " free\n";
        } else if (v.lower == v.upper) {
            out << ' ' << names[j] << " = " << v.lower << '\n';
        } else {
            out << ' ';
            if (std::isfinite(v.lower)) {
                out << v.lower;
            } else {
                out << "-inf";
            }
            out << " <= " << names[j] << " <= ";
            if (std::isfinite(v.upper)) {
                out << v.upper;
            } else {
                out << "+inf";
            }
            out << '\n';
        }
    }
    out << "End\n";
}

}  // namespace gridflex::lp
