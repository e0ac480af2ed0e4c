#ifndef MDRSP_LP_HPP
#define MDRSP_LP_HPP

#include <optional>
#include <string>
#include <vector>

namespace mdrsp::lp {

enum class Sense : char { LE, GE, EQ };

struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (column, value)
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

enum class ColStatus : char { Basic, AtLower, AtUpper };

/// Column statuses over structural columns followed by one slack per row.
/// The number of Basic entries must equal the number of rows.
struct Basis {
    std::vector<ColStatus> status;
};

enum class SolveStatus : char { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    SolveStatus status = SolveStatus::IterationLimit;
    double objective = 0.0;
    std::vector<double> values;  // structural columns only
    Basis basis;
    long iterations = 0;         // total simplex pivots
    long phase1_iterations = 0;  // pivots spent restoring feasibility
};

class LpModel {
public:
    /// Returns the new column's index.
    int add_column(double objective, double lower, double upper);
    void add_row(Row row);
    void add_rows(const std::vector<Row>& rows);
    void set_lower(int col, double v);
    void set_upper(int col, double v);

    int num_cols() const { return static_cast<int>(obj_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    double objective_coeff(int j) const { return obj_[j]; }
    double lower(int j) const { return lo_[j]; }
    double upper(int j) const { return hi_[j]; }
    const Row& row(int i) const { return rows_[i]; }

    std::optional<Basis> basis_hint;

private:
    std::vector<double> obj_, lo_, hi_;
    std::vector<Row> rows_;
};

struct SolveParams {
    double feas_tol = 1e-6;
    double opt_tol = 1e-7;
    long max_iterations = -1;        // -1 = effectively unlimited
    long bland_after_degenerate = 5000;
};

/// Bounded-variable primal simplex. Uses model.basis_hint when present and
/// structurally compatible; after add_rows or bound changes a re-solve
/// resumes from the hinted basis instead of restarting.
LpSolution solve(const LpModel& model, const SolveParams& params = {});

/// Debug dump in LP file format for cross-checking with external solvers.
std::string to_lp_format(const LpModel& model);

}  // namespace mdrsp::lp

#endif
