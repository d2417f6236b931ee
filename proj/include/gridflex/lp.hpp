#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace gridflex::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Scaled tolerance used for every optimality and feasibility certificate.
inline constexpr double kCertificateTolerance = 1e-6;

struct VariableId {
    std::size_t index = 0;
    friend auto operator<=>(const VariableId&, const VariableId&) = default;
};

struct ConstraintId {
    std::size_t index = 0;
    friend auto operator<=>(const ConstraintId&, const ConstraintId&) = default;
};

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Term {
    VariableId var;
    double coef = 0.0;
};

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
    double cost = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::Equal;
    double rhs = 0.0;
};

/// A minimization LP over bounded variables and sparse linear rows.
///
/// Programs are built incrementally and are treated as immutable once handed
/// to the solver. Bounds may be infinite; every term must reference a
/// variable that already exists.
class LinearProgram {
public:
    VariableId add_variable(std::string name, double lower, double upper, double cost = 0.0);
    ConstraintId add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

    void set_cost(VariableId var, double cost);
    void set_bounds(VariableId var, double lower, double upper);
    void set_rhs(ConstraintId row, double rhs);

    std::size_t num_variables() const noexcept { return variables_.size(); }
    std::size_t num_constraints() const noexcept { return constraints_.size(); }

    const Variable& variable(VariableId var) const { return variables_.at(var.index); }
    const Constraint& constraint(ConstraintId row) const { return constraints_.at(row.index); }
    std::span<const Variable> variables() const noexcept { return variables_; }
    std::span<const Constraint> constraints() const noexcept { return constraints_; }

    /// Objective value of an arbitrary point.
    double objective_value(std::span<const double> x) const;

    /// Row activity a_i . x.
    double activity(ConstraintId row, std::span<const double> x) const;

    /// Throws InvalidProgram when a term is dangling, a bound pair is
    /// inverted, or a coefficient is not finite.
    void validate() const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
};

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(Status status) noexcept;

enum class BasisStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

/// Final simplex basis in terms of the original program. A constraint's
/// status refers to its row activity.
struct Basis {
    std::vector<BasisStatus> variables;
    std::vector<BasisStatus> constraints;
    friend bool operator==(const Basis&, const Basis&) = default;
};

struct LpSolution {
    Status status = Status::NumericalFailure;
    std::vector<double> primal;  ///< one value per variable
    /// One value per constraint: d(objective)/d(rhs). Under minimization a
    /// binding >= row has a nonnegative dual and a binding <= row a
    /// nonpositive one.
    std::vector<double> dual;
    double objective = 0.0;
    std::size_t iterations = 0;
    Basis basis;  ///< filled when optimal
    bool warm_started = false;

    bool optimal() const noexcept { return status == Status::Optimal; }
};

struct SolverOptions {
    double primal_tolerance = 1e-9;
    double dual_tolerance = 1e-9;
    double pivot_tolerance = 1e-9;
    std::size_t refactor_interval = 64;
    /// Zero means a limit derived from the program size.
    std::size_t iteration_limit = 0;
    /// Starting basis, typically from a solve of a closely related program
    /// with the same variables and constraints. Ignored when it does not fit.
    const Basis* warm_start = nullptr;
};

/// Bounded-variable revised primal simplex with a sparse LU basis.
LpSolution solve(const LinearProgram& program, const SolverOptions& options = {});

struct CertificateReport {
    double max_primal_residual = 0.0;   ///< scaled row/bound violation
    double duality_gap = 0.0;           ///< scaled |primal - dual objective|
    double max_complementarity = 0.0;   ///< scaled |dual x slack|
    double max_dual_infeasibility = 0.0;
    double dual_objective = 0.0;
    bool passed = false;
    std::vector<std::string> violations;  ///< human-readable, names the offender
};

/// Independent optimality check: primal feasibility, dual sign conventions,
/// duality gap and complementary slackness, all scaled by (1 + |magnitude|).
CertificateReport check_certificate(const LinearProgram& program, const LpSolution& solution,
                                    double tolerance = kCertificateTolerance);

/// Writes the program in CPLEX LP text format.
void write_lp_format(std::ostream& out, const LinearProgram& program);

}  // namespace gridflex::lp
