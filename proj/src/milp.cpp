#include "frp/milp.hpp"

#include <cstdlib>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "Highs.h"
#include "frp/csv.hpp"

namespace frp {

int MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper, double objective) {
    if (variable_index_.count(name)) throw std::invalid_argument("duplicate variable name: " + name);
    if (kind == VarKind::binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    const int id = num_variables();
    variable_index_.emplace(name, id);
    variables_.push_back({std::move(name), kind, lower, upper, objective});
    return id;
}

int MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    if (constraint_index_.count(name)) throw std::invalid_argument("duplicate constraint name: " + name);
    for (const auto& term : terms) {
        if (term.var < 0 || term.var >= num_variables()) {
            throw std::invalid_argument(fmt::format("constraint {} references undeclared variable {}", name, term.var));
        }
    }
    const int id = num_constraints();
    constraint_index_.emplace(name, id);
    constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
    return id;
}

void MilpModel::set_bounds(int var, double lower, double upper) {
    variables_.at(var).lower = lower;
    variables_.at(var).upper = upper;
}

int MilpModel::find_variable(const std::string& name) const {
    auto it = variable_index_.find(name);
    return it == variable_index_.end() ? -1 : it->second;
}

int MilpModel::find_constraint(const std::string& name) const {
    auto it = constraint_index_.find(name);
    return it == constraint_index_.end() ? -1 : it->second;
}

double MilpModel::objective_value(const std::vector<double>& values) const {
    double total = objective_offset_;
    for (int j = 0; j < num_variables(); ++j) total += variables_[j].objective * values.at(j);
    return total;
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        case SolveStatus::limit:
            return "limit";
    }
    return "unknown";
}

namespace {

HighsModel to_highs(const MilpModel& model) {
    HighsModel hm;
    HighsLp& lp = hm.lp_;
    lp.num_col_ = model.num_variables();
    lp.num_row_ = model.num_constraints();
    lp.sense_ = ObjSense::kMinimize;
    lp.offset_ = model.objective_offset();
    bool has_integer = false;
    for (const auto& v : model.variables()) {
        lp.col_cost_.push_back(v.objective);
        lp.col_lower_.push_back(v.lower);
        lp.col_upper_.push_back(v.upper);
        const bool integer = v.kind == VarKind::binary;
        has_integer = has_integer || integer;
        lp.integrality_.push_back(integer ? HighsVarType::kInteger : HighsVarType::kContinuous);
    }
    if (!has_integer) lp.integrality_.clear();

    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = lp.num_col_;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_.assign(1, 0);
    std::map<int, double> merged;
    for (const auto& c : model.constraints()) {
        merged.clear();
        for (const auto& t : c.terms) merged[t.var] += t.coef;
        for (const auto& [var, coef] : merged) {
            if (coef == 0.0) continue;
            lp.a_matrix_.index_.push_back(var);
            lp.a_matrix_.value_.push_back(coef);
        }
        lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
        switch (c.sense) {
            case Sense::less_equal:
                lp.row_lower_.push_back(-kHighsInf);
                lp.row_upper_.push_back(c.rhs);
                break;
            case Sense::greater_equal:
                lp.row_lower_.push_back(c.rhs);
                lp.row_upper_.push_back(kHighsInf);
                break;
            case Sense::equal:
                lp.row_lower_.push_back(c.rhs);
                lp.row_upper_.push_back(c.rhs);
                break;
        }
    }
    return hm;
}

bool has_values(HighsModelStatus status) {
    return status == HighsModelStatus::kOptimal || status == HighsModelStatus::kTimeLimit ||
           status == HighsModelStatus::kIterationLimit || status == HighsModelStatus::kSolutionLimit ||
           status == HighsModelStatus::kInterrupt;
}

}  // namespace

MilpSolution solve(const MilpModel& model, const SolveOptions& options) {
    MilpSolution out;
    Highs highs;
    highs.setOptionValue("output_flag", std::getenv("FRP_HIGHS_LOG") != nullptr);
    highs.setOptionValue("mip_rel_gap", options.mip_rel_gap);
    highs.setOptionValue("time_limit", options.time_limit);
    highs.setOptionValue("primal_feasibility_tolerance", 1e-8);
    highs.setOptionValue("mip_feasibility_tolerance", 1e-8);
    highs.setOptionValue("random_seed", 0);

    if (highs.passModel(to_highs(model)) == HighsStatus::kError) {
        out.diagnostics = "HiGHS rejected the model";
        return out;
    }
    if (const char* dump = std::getenv("FRP_HIGHS_DUMP")) highs.writeModel(dump);
    if (highs.run() == HighsStatus::kError) {
        out.diagnostics = "HiGHS run failed: " + highs.modelStatusToString(highs.getModelStatus());
        return out;
    }
    const HighsModelStatus status = highs.getModelStatus();
    out.diagnostics = highs.modelStatusToString(status);
    if (status == HighsModelStatus::kInfeasible) {
        out.status = SolveStatus::infeasible;
        return out;
    }
    if (status == HighsModelStatus::kUnboundedOrInfeasible) {
        out.status = SolveStatus::infeasible;
        out.diagnostics = "unbounded or infeasible";
        return out;
    }
    if (!has_values(status) || !highs.getSolution().value_valid) {
        out.status = SolveStatus::limit;
        return out;
    }
    out.status = status == HighsModelStatus::kOptimal ? SolveStatus::optimal : SolveStatus::limit;
    out.values = highs.getSolution().col_value;
    out.mip_gap = highs.getInfo().mip_gap;
    if (!std::isfinite(out.mip_gap)) out.mip_gap = 0.0;

    bool any_integer = false;
    for (const auto& v : model.variables()) any_integer = any_integer || v.kind == VarKind::binary;

    if (options.polish && any_integer) {
        for (int j = 0; j < model.num_variables(); ++j) {
            if (model.variable(j).kind != VarKind::binary) continue;
            const double fixed = std::round(out.values[j]);
            highs.changeColBounds(j, fixed, fixed);
            highs.changeColIntegrality(j, HighsVarType::kContinuous);
        }
        if (highs.run() != HighsStatus::kError && highs.getModelStatus() == HighsModelStatus::kOptimal) {
            out.values = highs.getSolution().col_value;
            for (int j = 0; j < model.num_variables(); ++j) {
                if (model.variable(j).kind == VarKind::binary) out.values[j] = std::round(out.values[j]);
            }
        }
    }
    out.objective = model.objective_value(out.values);
    return out;
}

double ConstraintReport::worst() const {
    double w = 0.0;
    for (const auto& v : violations) w = std::max(w, v.magnitude);
    return w;
}

ConstraintReport check_solution(const MilpModel& model, const MilpSolution& solution, double tol) {
    if (static_cast<int>(solution.values.size()) != model.num_variables()) {
        throw std::invalid_argument(fmt::format("check_solution: solution has {} values for {} variables",
                                                solution.values.size(), model.num_variables()));
    }
    ConstraintReport report;
    for (int j = 0; j < model.num_variables(); ++j) {
        const Variable& v = model.variable(j);
        const double x = solution.values[j];
        const double below = v.lower - x;
        const double above = x - v.upper;
        if (below > tol) report.violations.push_back({"bound:" + v.name, below});
        if (above > tol) report.violations.push_back({"bound:" + v.name, above});
        if (v.kind == VarKind::binary) {
            const double frac = std::abs(x - std::round(x));
            if (frac > tol) report.violations.push_back({"integrality:" + v.name, frac});
        }
    }
    for (const auto& c : model.constraints()) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coef * solution.values[t.var];
        double violation = 0.0;
        switch (c.sense) {
            case Sense::less_equal:
                violation = lhs - c.rhs;
                break;
            case Sense::greater_equal:
                violation = c.rhs - lhs;
                break;
            case Sense::equal:
                violation = std::abs(lhs - c.rhs);
                break;
        }
        if (violation > tol) report.violations.push_back({c.name, violation});
    }
    return report;
}

namespace {

// Square brackets are reserved in the LP grammar.
std::string lp_name(std::string name) {
    for (char& ch : name) {
        if (ch == '[') ch = '(';
        if (ch == ']') ch = ')';
    }
    return name;
}

}  // namespace

std::string to_lp_format(const MilpModel& model) {
    std::ostringstream out;
    auto write_terms = [&](const std::vector<Term>& terms) {
        bool first = true;
        for (const auto& t : terms) {
            out << (t.coef < 0 ? " - " : (first ? " " : " + ")) << exact(std::abs(t.coef)) << ' '
                << lp_name(model.variable(t.var).name);
            first = false;
        }
        if (first) out << " 0";
    };
    out << "\\ objective offset " << exact(model.objective_offset()) << "\nMinimize\n obj:";
    std::vector<Term> objective;
    for (int j = 0; j < model.num_variables(); ++j) {
        if (model.variable(j).objective != 0.0) objective.push_back({j, model.variable(j).objective});
    }
    write_terms(objective);
    out << "\nSubject To\n";
    for (const auto& c : model.constraints()) {
        out << ' ' << lp_name(c.name) << ':';
        write_terms(c.terms);
        out << (c.sense == Sense::less_equal ? " <= " : c.sense == Sense::greater_equal ? " >= " : " = ")
            << exact(c.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : model.variables()) {
        if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) continue;
        out << ' ' << (std::isinf(v.lower) ? "-inf" : exact(v.lower)) << " <= " << lp_name(v.name)
            << " <= " << (std::isinf(v.upper) ? "+inf" : exact(v.upper)) << '\n';
    }
    out << "Binaries\n";
    for (const auto& v : model.variables()) {
        if (v.kind == VarKind::binary) out << ' ' << lp_name(v.name) << '\n';
    }
    out << "End\n";
    return out.str();
}

void write_lp(const MilpModel& model, const std::filesystem::path& path) {
    write_text_file(path, to_lp_format(model));
}

}  // namespace frp
