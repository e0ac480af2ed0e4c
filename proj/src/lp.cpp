#include "mdrsp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

namespace mdrsp::lp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int LpModel::add_column(double objective, double lower, double upper) {
    obj_.push_back(objective);
    lo_.push_back(lower);
    hi_.push_back(upper);
    return num_cols() - 1;
}

void LpModel::add_row(Row row) { rows_.push_back(std::move(row)); }

void LpModel::add_rows(const std::vector<Row>& rows) {
    for (const auto& r : rows) rows_.push_back(r);
}

void LpModel::set_lower(int col, double v) { lo_.at(col) = v; }
void LpModel::set_upper(int col, double v) { hi_.at(col) = v; }

// ---------------------------------------------------------------------------

namespace {

// Primal simplex over structural columns followed by one slack per row.
// Slack bounds encode the sense: <= gives [0, inf), >= gives (-inf, 0],
// = gives [0, 0], so every row reads a.x + s = rhs.
class Simplex {
public:
    Simplex(const LpModel& model, const SolveParams& params)
        : mdl_(model), prm_(params), n_(model.num_cols()), m_(model.num_rows()) {
        cols_.resize(n_ + m_);
        lo_.resize(n_ + m_);
        hi_.resize(n_ + m_);
        obj_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = mdl_.lower(j);
            hi_[j] = mdl_.upper(j);
            obj_[j] = mdl_.objective_coeff(j);
        }
        b_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const Row& r = mdl_.row(i);
            for (auto [c, v] : r.coeffs) cols_[c].push_back({i, v});
            cols_[n_ + i].push_back({i, 1.0});
            switch (r.sense) {
                case Sense::LE: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
                case Sense::GE: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
                case Sense::EQ: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
            }
            b_[i] = r.rhs;
        }
    }

    LpSolution run() {
        LpSolution out;
        for (int j = 0; j < n_ + m_; ++j) {
            if (lo_[j] > hi_[j] + prm_.feas_tol) {
                out.status = SolveStatus::Infeasible;
                return out;
            }
        }
        init_basis();
        if (!factorize()) {
            reset_to_slack_basis();
            factorize();
        }
        compute_basic_values();

        long iters_left = prm_.max_iterations < 0
                              ? std::numeric_limits<long>::max()
                              : prm_.max_iterations;
        const long start_iters = iters_left;
        SolveStatus st = iterate(/*phase1=*/true, iters_left);
        out.phase1_iterations = start_iters - iters_left;
        if (st == SolveStatus::Optimal && infeasibility() > prm_.feas_tol)
            st = SolveStatus::Infeasible;
        if (st == SolveStatus::Optimal) st = iterate(/*phase1=*/false, iters_left);
        // re-prove optimality against the true bounds after any
        // anti-stalling shifts; each pass may shift again, so cap it
        for (int pass = 0; st == SolveStatus::Optimal && bounds_perturbed_ && pass < 3;
             ++pass) {
            restore_bounds();
            st = iterate(/*phase1=*/true, iters_left);
            if (st == SolveStatus::Optimal && infeasibility() > prm_.feas_tol)
                st = SolveStatus::Infeasible;
            if (st == SolveStatus::Optimal) st = iterate(/*phase1=*/false, iters_left);
        }
        if (bounds_perturbed_) {
            restore_bounds();
            if (st == SolveStatus::Optimal) st = SolveStatus::IterationLimit;
        }
        out.iterations = start_iters - iters_left;

        factorize();
        compute_basic_values();
        out.status = st;
        out.values.assign(x_.begin(), x_.begin() + n_);
        out.objective = 0.0;
        for (int j = 0; j < n_; ++j) out.objective += obj_[j] * x_[j];
        out.basis.status = status_;
        if (st == SolveStatus::Optimal && infeasibility() > 10 * prm_.feas_tol)
            out.status = SolveStatus::IterationLimit;  // numerical failure, be honest
        return out;
    }

private:
    const LpModel& mdl_;
    const SolveParams& prm_;
    int n_, m_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lo_, hi_, obj_, b_;

    std::vector<ColStatus> status_;
    std::vector<int> basic_;      // basis columns, aligned with Binv rows
    std::vector<int> pos_in_basis_;
    Eigen::MatrixXd binv_;
    std::vector<double> x_;
    int pivots_since_refactor_ = 0;
    int unstable_retries_ = 0;
    long degenerate_streak_ = 0;
    std::mt19937_64 tie_rng_{0x5eed1234abcdULL};  // fixed seed: deterministic solves
    std::vector<int> candidates_;
    std::vector<double> devex_;  // Devex reference weights, one per column

    // Anti-stalling bound shifts. Primal degeneracy means many basics sit
    // exactly on a bound, so whole plateaus of bases share one vertex and the
    // simplex can wander them for 10^5 pivots. Randomly widening the bounds a
    // hair makes those ties vanish; run() removes the shifts and re-proves
    // optimality against the true bounds before reporting Optimal.
    bool bounds_perturbed_ = false;
    int perturbs_used_ = 0;
    std::vector<double> orig_lo_, orig_hi_;

    void perturb_bounds() {
        if (!bounds_perturbed_) {
            orig_lo_ = lo_;
            orig_hi_ = hi_;
        }
        std::uniform_real_distribution<double> un(0.5, 1.0);
        for (int j = 0; j < n_ + m_; ++j) {
            if (lo_[j] == hi_[j]) continue;  // keep fixed columns exact
            if (std::isfinite(lo_[j])) lo_[j] -= 1e-7 * un(tie_rng_);
            if (std::isfinite(hi_[j])) hi_[j] += 1e-7 * un(tie_rng_);
        }
        bounds_perturbed_ = true;
        ++perturbs_used_;
        compute_basic_values();
    }

    void restore_bounds() {
        lo_ = orig_lo_;
        hi_ = orig_hi_;
        bounds_perturbed_ = false;
        compute_basic_values();
    }

    void reset_to_slack_basis() {
        status_.assign(n_ + m_, ColStatus::AtLower);
        for (int j = 0; j < n_; ++j)
            status_[j] = std::isfinite(lo_[j]) ? ColStatus::AtLower : ColStatus::AtUpper;
        for (int i = 0; i < m_; ++i) status_[n_ + i] = ColStatus::Basic;
    }

    void init_basis() {
        const auto& hint = mdl_.basis_hint;
        if (hint && static_cast<int>(hint->status.size()) <= n_ + m_) {
            status_ = hint->status;
            // rows added after the hint was taken: their slacks enter basic
            status_.resize(n_ + m_, ColStatus::Basic);
            // a hint over fewer structural columns cannot be aligned
            int nb = 0;
            for (auto s : status_)
                if (s == ColStatus::Basic) ++nb;
            if (nb == m_) {
                for (int j = 0; j < n_ + m_; ++j)
                    if (status_[j] == ColStatus::AtUpper && !std::isfinite(hi_[j]))
                        status_[j] = ColStatus::AtLower;
                return;
            }
        }
        reset_to_slack_basis();
    }

    bool factorize() {
        basic_.clear();
        pos_in_basis_.assign(n_ + m_, -1);
        for (int j = 0; j < n_ + m_; ++j)
            if (status_[j] == ColStatus::Basic) {
                pos_in_basis_[j] = static_cast<int>(basic_.size());
                basic_.push_back(j);
            }
        if (static_cast<int>(basic_.size()) != m_) return false;
        if (m_ == 0) {
            binv_.resize(0, 0);
            pivots_since_refactor_ = 0;
            return true;
        }
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
        for (int r = 0; r < m_; ++r)
            for (auto [row, v] : cols_[basic_[r]]) B(row, r) = v;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        const double scale = B.cwiseAbs().maxCoeff();
        const double worst_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (!(worst_pivot > 1e-10 * std::max(scale, 1.0))) {
            // near-singular for partial pivoting; let full pivoting decide
            Eigen::FullPivLU<Eigen::MatrixXd> flu(B);
            if (!flu.isInvertible()) return false;
            binv_ = flu.inverse();
        } else {
            binv_ = lu.inverse();
        }
        pivots_since_refactor_ = 0;
        return true;
    }

    double nonbasic_value(int j) const {
        if (status_[j] == ColStatus::AtUpper && std::isfinite(hi_[j])) return hi_[j];
        return std::isfinite(lo_[j]) ? lo_[j] : 0.0;
    }

    void compute_basic_values() {
        x_.assign(n_ + m_, 0.0);
        Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(b_.data(), m_);
        for (int j = 0; j < n_ + m_; ++j) {
            if (status_[j] == ColStatus::Basic) continue;
            const double v = nonbasic_value(j);
            x_[j] = v;
            if (v != 0.0)
                for (auto [row, a] : cols_[j]) r(row) -= a * v;
        }
        Eigen::VectorXd xb = binv_ * r;
        for (int k = 0; k < m_; ++k) x_[basic_[k]] = xb(k);
    }

    // worst bound violation among the basics
    double infeasibility() const {
        double worst = 0.0;
        for (int k = 0; k < m_; ++k) {
            const int j = basic_[k];
            if (x_[j] < lo_[j]) worst = std::max(worst, lo_[j] - x_[j]);
            if (x_[j] > hi_[j]) worst = std::max(worst, x_[j] - hi_[j]);
        }
        return worst;
    }

    // phase-1 cost of a basic variable given its current value
    double phase1_cost(int j) const {
        if (x_[j] < lo_[j] - prm_.feas_tol) return -1.0;
        if (x_[j] > hi_[j] + prm_.feas_tol) return 1.0;
        return 0.0;
    }

    SolveStatus iterate(bool phase1, long& iters_left) {
        degenerate_streak_ = 0;
        devex_.assign(n_ + m_, 1.0);
        while (true) {
            if (iters_left-- <= 0) return SolveStatus::IterationLimit;
            if (phase1 && infeasibility() <= prm_.feas_tol) return SolveStatus::Optimal;
            if (!phase1 && degenerate_streak_ >= 200 && perturbs_used_ < 3) {
                perturb_bounds();
                degenerate_streak_ = 0;
            }

            // duals for the current (possibly piecewise phase-1) objective
            Eigen::VectorXd cb(m_);
            for (int k = 0; k < m_; ++k)
                cb(k) = phase1 ? phase1_cost(basic_[k]) : obj_[basic_[k]];
            Eigen::VectorXd y = binv_.transpose() * cb;

            // Devex pricing; after a long degenerate streak switch to a
            // random improving column, which escapes degenerate plateaus
            // faster than any fixed rule. Bland stays as the termination
            // guarantee of last resort.
            const bool bland = degenerate_streak_ >= prm_.bland_after_degenerate;
            const bool randomized = !bland && degenerate_streak_ >= 300;
            int enter = -1;
            double best = 0.0;
            if (randomized) candidates_.clear();
            for (int j = 0; j < n_ + m_; ++j) {
                if (status_[j] == ColStatus::Basic) continue;
                if (lo_[j] == hi_[j]) continue;  // fixed
                double dj = (phase1 ? 0.0 : obj_[j]);
                for (auto [row, a] : cols_[j]) dj -= y(row) * a;
                bool eligible = false;
                if (status_[j] == ColStatus::AtLower && dj < -prm_.opt_tol)
                    eligible = true;
                else if (status_[j] == ColStatus::AtUpper && dj > prm_.opt_tol)
                    eligible = true;
                if (eligible) {
                    if (bland) { enter = j; break; }
                    if (randomized) candidates_.push_back(j);
                    const double score = dj * dj / devex_[j];
                    if (score > best * (1.0 + 1e-12)) { best = score; enter = j; }
                }
            }
            if (randomized && !candidates_.empty())
                enter = candidates_[tie_rng_() % candidates_.size()];
            if (enter < 0) {
                if (phase1)
                    return infeasibility() <= prm_.feas_tol ? SolveStatus::Optimal
                                                            : SolveStatus::Infeasible;
                return SolveStatus::Optimal;
            }

            // direction in the basics as the entering variable moves by +theta
            // along its improving sign
            const double sgn = status_[enter] == ColStatus::AtLower ? 1.0 : -1.0;
            Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
            for (auto [row, a] : cols_[enter]) w += a * binv_.col(row);

            const double flip_limit =
                std::isfinite(lo_[enter]) && std::isfinite(hi_[enter])
                    ? hi_[enter] - lo_[enter]
                    : kInf;
            // Harris-style two-pass ratio test. Pass one finds the step limit
            // with every bound relaxed by the feasibility tolerance; pass two
            // picks the largest pivot among the rows whose true limit fits
            // under it. Tiny pivots are what corrupt the eta-updated inverse,
            // so trading a tolerance-sized bound overshoot for a healthy
            // pivot is the right deal.
            const double rtol = prm_.feas_tol;
            double theta_relaxed = kInf;
            for (int k = 0; k < m_; ++k) {
                const int j = basic_[k];
                const double delta = -sgn * w(k);
                if (std::abs(delta) < 1e-11) continue;
                const bool below = x_[j] < lo_[j] - prm_.feas_tol;
                const bool above = x_[j] > hi_[j] + prm_.feas_tol;
                double lim = kInf;
                if (phase1 && below) {
                    if (delta > 0) lim = (lo_[j] + rtol - x_[j]) / delta;
                } else if (phase1 && above) {
                    if (delta < 0) lim = (hi_[j] - rtol - x_[j]) / delta;
                } else {
                    if (delta > 0 && std::isfinite(hi_[j]))
                        lim = (hi_[j] + rtol - x_[j]) / delta;
                    else if (delta < 0 && std::isfinite(lo_[j]))
                        lim = (lo_[j] - rtol - x_[j]) / delta;
                }
                if (lim < theta_relaxed) theta_relaxed = std::max(lim, 0.0);
            }

            double theta = kInf;
            int leave_pos = -1;
            double leave_to = 0.0;  // bound the leaving variable lands on
            double leave_w = 0.0;

            for (int k = 0; theta_relaxed < kInf && k < m_; ++k) {
                const int j = basic_[k];
                const double delta = -sgn * w(k);
                if (std::abs(delta) < 1e-11) continue;
                double limit = kInf, to = 0.0;
                const bool below = x_[j] < lo_[j] - prm_.feas_tol;
                const bool above = x_[j] > hi_[j] + prm_.feas_tol;
                if (phase1 && below) {
                    if (delta > 0) { limit = (lo_[j] - x_[j]) / delta; to = lo_[j]; }
                } else if (phase1 && above) {
                    if (delta < 0) { limit = (hi_[j] - x_[j]) / delta; to = hi_[j]; }
                } else {
                    if (delta > 0 && std::isfinite(hi_[j])) {
                        limit = (hi_[j] - x_[j]) / delta;
                        to = hi_[j];
                    } else if (delta < 0 && std::isfinite(lo_[j])) {
                        limit = (lo_[j] - x_[j]) / delta;
                        to = lo_[j];
                    }
                }
                if (limit == kInf) continue;
                limit = std::max(limit, 0.0);
                if (limit > theta_relaxed + 1e-12) continue;
                bool take;
                if (leave_pos < 0) {
                    take = true;
                } else if (bland) {
                    take = j < basic_[leave_pos];
                } else {
                    take = std::abs(w(k)) > std::abs(leave_w);
                }
                if (take) {
                    theta = limit;
                    leave_pos = k;
                    leave_to = to;
                    leave_w = w(k);
                }
            }

            if (flip_limit <= theta) {
                // the entering variable hits its opposite bound first
                theta = flip_limit;
                x_[enter] = status_[enter] == ColStatus::AtLower ? hi_[enter]
                                                                 : lo_[enter];
                status_[enter] = status_[enter] == ColStatus::AtLower
                                     ? ColStatus::AtUpper
                                     : ColStatus::AtLower;
                for (int k = 0; k < m_; ++k) x_[basic_[k]] -= sgn * theta * w(k);
                degenerate_streak_ = theta < 1e-9 ? degenerate_streak_ + 1 : 0;
                continue;
            }

            if (theta == kInf) {
                return phase1 ? SolveStatus::Infeasible : SolveStatus::Unbounded;
            }

            degenerate_streak_ = theta < 1e-9 ? degenerate_streak_ + 1 : 0;

            // apply the step
            x_[enter] = nonbasic_value(enter) + sgn * theta;
            for (int k = 0; k < m_; ++k) x_[basic_[k]] -= sgn * theta * w(k);

            const int leave = basic_[leave_pos];
            if (std::abs(w(leave_pos)) < 1e-9) {
                // unstable pivot: refactor and retry, but only a couple of
                // times — if the same choice keeps coming back, deprioritize
                // the entering column instead of refactoring forever
                if (++unstable_retries_ <= 2) {
                    if (!factorize()) reset_and_refactor();
                    compute_basic_values();
                } else {
                    devex_[enter] = std::max(devex_[enter], 1.0) * 1e6;
                    ++degenerate_streak_;
                }
                continue;
            }
            unstable_retries_ = 0;
            status_[leave] = std::abs(leave_to - hi_[leave]) < std::abs(leave_to - lo_[leave])
                                 ? ColStatus::AtUpper
                                 : ColStatus::AtLower;
            x_[leave] = leave_to;
            status_[enter] = ColStatus::Basic;
            basic_[leave_pos] = enter;
            pos_in_basis_[leave] = -1;
            pos_in_basis_[enter] = leave_pos;

            // Devex weight update against the pivot row of the old inverse
            const double piv = w(leave_pos);
            {
                const Eigen::RowVectorXd sigma = binv_.row(leave_pos);
                const double wq = devex_[enter];
                const double ratio_base = wq / (piv * piv);
                if (ratio_base > 1e8) {
                    devex_.assign(n_ + m_, 1.0);  // reference framework degraded
                } else {
                    for (int j = 0; j < n_ + m_; ++j) {
                        if (status_[j] == ColStatus::Basic || lo_[j] == hi_[j])
                            continue;
                        double alpha = 0.0;
                        for (auto [row, a] : cols_[j]) alpha += sigma(row) * a;
                        if (alpha != 0.0)
                            devex_[j] = std::max(devex_[j], alpha * alpha * ratio_base);
                    }
                    devex_[leave] = std::max(ratio_base, 1.0);
                }
            }
            binv_.row(leave_pos) /= piv;
            for (int k = 0; k < m_; ++k) {
                if (k == leave_pos) continue;
                const double f = w(k);
                if (f != 0.0) binv_.row(k) -= f * binv_.row(leave_pos);
            }

            if (++pivots_since_refactor_ >= 100) {
                if (!factorize()) reset_and_refactor();
                compute_basic_values();
            }
        }
    }

    void reset_and_refactor() {
        reset_to_slack_basis();
        factorize();
        compute_basic_values();
    }
};

}  // namespace

LpSolution solve(const LpModel& model, const SolveParams& params) {
    Simplex s(model, params);
    return s.run();
}

std::string to_lp_format(const LpModel& model) {
    std::ostringstream os;
    os << "Minimize\n obj:";
    for (int j = 0; j < model.num_cols(); ++j) {
        const double c = model.objective_coeff(j);
        if (c != 0.0) os << (c >= 0 ? " +" : " ") << c << " x" << j;
    }
    os << "\nSubject To\n";
    for (int i = 0; i < model.num_rows(); ++i) {
        const Row& r = model.row(i);
        os << " r" << i << ":";
        for (auto [c, v] : r.coeffs)
            os << (v >= 0 ? " +" : " ") << v << " x" << c;
        os << (r.sense == Sense::LE ? " <= " : r.sense == Sense::GE ? " >= " : " = ")
           << r.rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < model.num_cols(); ++j)
        os << " " << model.lower(j) << " <= x" << j << " <= " << model.upper(j)
           << "\n";
    os << "End\n";
    return os.str();
}

}  // namespace mdrsp::lp
