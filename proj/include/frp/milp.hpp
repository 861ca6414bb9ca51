#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace frp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Sense { less_equal, greater_equal, equal };

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = kInfinity;
    double objective = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
};

/// Solver-independent minimization model. Variable and constraint names are
/// unique; every term refers to a declared variable.
class MilpModel {
public:
    int add_variable(std::string name, VarKind kind, double lower, double upper, double objective = 0.0);
    int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

    void set_objective(int var, double coef) { variables_.at(var).objective = coef; }
    void add_objective(int var, double coef) { variables_.at(var).objective += coef; }
    void set_objective_offset(double offset) { objective_offset_ = offset; }
    void set_bounds(int var, double lower, double upper);

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const Variable& variable(int id) const { return variables_.at(id); }
    const Constraint& constraint(int id) const { return constraints_.at(id); }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    double objective_offset() const { return objective_offset_; }

    /// Returns -1 when the name is unknown.
    int find_variable(const std::string& name) const;
    int find_constraint(const std::string& name) const;

    double objective_value(const std::vector<double>& values) const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::unordered_map<std::string, int> variable_index_;
    std::unordered_map<std::string, int> constraint_index_;
    double objective_offset_ = 0.0;
};

enum class SolveStatus { optimal, infeasible, limit };

std::string to_string(SolveStatus status);

struct MilpSolution {
    SolveStatus status = SolveStatus::limit;
    double objective = 0.0;
    std::vector<double> values;
    double mip_gap = 0.0;
    std::string diagnostics;

    bool optimal() const { return status == SolveStatus::optimal; }
    double value(int var) const { return values.at(var); }
};

struct SolveOptions {
    double mip_rel_gap = 1e-4;
    double time_limit = 600.0;  // seconds
    /// Re-solve the LP with binaries fixed at their rounded values so the
    /// returned point is integral and LP-accurate.
    bool polish = true;
};

/// Solves `model` with the HiGHS backend. Backend failures surface as
/// SolveStatus::limit with the reason in `diagnostics`.
MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

struct ConstraintViolation {
    std::string name;
    double magnitude = 0.0;
};

struct ConstraintReport {
    std::vector<ConstraintViolation> violations;

    bool empty() const { return violations.empty(); }
    double worst() const;
};

/// Re-evaluates every constraint, variable bound, and integrality requirement
/// arithmetically. Entries are reported only when strictly above `tol`.
ConstraintReport check_solution(const MilpModel& model, const MilpSolution& solution, double tol = 1e-6);

/// CPLEX LP-format text, for debugging.
std::string to_lp_format(const MilpModel& model);
void write_lp(const MilpModel& model, const std::filesystem::path& path);

}  // namespace frp
