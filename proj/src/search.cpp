#include "mdrsp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mdrsp/heuristic.hpp"

namespace mdrsp::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string row_key(const lp::Row& row) {
    std::ostringstream out;
    out.precision(17);
    for (auto [col, coef] : row.coeffs) out << col << ':' << coef << ',';
    out << (int)row.sense << '|' << row.rhs;
    return out.str();
}

class Solver {
  public:
    Solver(const Instance& inst, const Params& params)
        : inst_(inst), params_(params), rng_(params.seed) {}

    Report run();

  private:
    using Clock = std::chrono::steady_clock;

    void build_base_lp();
    double elapsed() const {
        return std::chrono::duration<double>(Clock::now() - start_).count();
    }
    bool out_of_time() const { return elapsed() >= params_.time_limit; }

    void apply_node_bounds(const Node& node);
    void revert_node_bounds(const Node& node);

    bool try_incumbent(const Solution& sol);
    bool integral(const std::vector<double>& v) const;

    /// One separation round in the fixed family order; first family that
    /// yields new rows wins. Returns the number of rows added.
    int separation_round(const cuts::FractionalPoint& point, bool force);
    int add_family(std::vector<cuts::Cut> cs, int cap);

    /// Full cut loop at a node; returns the final LP solution, or nullopt
    /// when the node was fathomed (bound/infeasible).
    std::optional<lp::LpSolution> cut_loop(Node& node, bool at_root);

    int select_branch_var(const std::vector<double>& v, double node_obj,
                          const Node& node);
    double child_bound_estimate(int col, double lo, double hi,
                                const Node& node);

    void log_line(const Node& node) const;
    double fathom_cutoff() const {
        return ub_ - 1e-6 * std::max(1.0, std::abs(ub_));
    }

    const Instance& inst_;
    Params params_;
    std::mt19937_64 rng_;
    Clock::time_point start_;

    lp::LpModel model_;
    int base_rows_ = 0;
    std::vector<double> base_lo_, base_hi_;
    std::set<std::string> cut_keys_;
    // per cut row, aligned with model_ rows after base_rows_
    std::vector<std::string> cut_row_keys_;
    std::vector<long> cut_row_ids_;
    std::vector<int> cut_row_age_;  // consecutive solves with positive slack
    long next_cut_id_ = 0;
    FamilyStats stats_;

    void purge_slack_cuts(const lp::LpSolution& sol);
    std::optional<lp::Basis> make_hint(const Node& node) const;

    double ub_ = kInf;
    std::optional<Solution> incumbent_;

    long next_id_ = 0;
    long explored_ = 0;
    std::map<long, Node> nodes_;
    std::set<std::pair<double, long>> open_;  // (bound, id)
};

void Solver::build_base_lp() {
    int u = inst_.num_customers(), nv = inst_.num_vertices();
    for (int col = 0; col < inst_.num_vars(); ++col) {
        if (inst_.is_edge_col(col)) {
            auto [i, j] = inst_.edge_of(col);
            double hi = (inst_.is_depot(i) || inst_.is_depot(j)) ? 2.0 : 1.0;
            model_.add_column(inst_.routing_cost(i, j), 0.0, hi);
        } else {
            auto [i, j] = inst_.arc_of(col);
            if (inst_.is_depot(i)) {
                // y_dd = 1, y_dj = 0
                double v = (i == j) ? 1.0 : 0.0;
                model_.add_column(0.0, v, v);
            } else {
                model_.add_column(i == j ? 0.0 : inst_.assign_cost(i, j), 0.0,
                                  1.0);
            }
        }
    }
    for (int i = 0; i < u; ++i) {
        lp::Row deg;  // x(delta(i)) - 2 y_ii = 0
        for (int w = 0; w < nv; ++w)
            if (w != i) deg.coeffs.emplace_back(inst_.edge_index(i, w), 1.0);
        deg.coeffs.emplace_back(inst_.arc_index(i, i), -2.0);
        deg.sense = lp::Sense::EQ;
        deg.rhs = 0.0;
        model_.add_row(std::move(deg));

        lp::Row asg;  // sum_j y_ij = 1
        for (int j = 0; j < nv; ++j)
            asg.coeffs.emplace_back(inst_.arc_index(i, j), 1.0);
        asg.sense = lp::Sense::EQ;
        asg.rhs = 1.0;
        model_.add_row(std::move(asg));
    }
    // depot-edge strengthening x_dj <= 2 y_jj, static (u*n rows)
    for (int j = 0; j < u; ++j)
        for (int d = u; d < nv; ++d) {
            lp::Row row;
            row.coeffs.emplace_back(inst_.edge_index(j, d), 1.0);
            row.coeffs.emplace_back(inst_.arc_index(j, j), -2.0);
            row.sense = lp::Sense::LE;
            row.rhs = 0.0;
            model_.add_row(std::move(row));
        }
    base_rows_ = model_.num_rows();
    base_lo_.resize(model_.num_cols());
    base_hi_.resize(model_.num_cols());
    for (int c = 0; c < model_.num_cols(); ++c) {
        base_lo_[c] = model_.lower(c);
        base_hi_[c] = model_.upper(c);
    }
}

void Solver::apply_node_bounds(const Node& node) {
    for (auto [col, v] : node.lower_changes) model_.set_lower(col, v);
    for (auto [col, v] : node.upper_changes) model_.set_upper(col, v);
}

void Solver::revert_node_bounds(const Node& node) {
    for (auto [col, v] : node.lower_changes)
        model_.set_lower(col, base_lo_[col]);
    for (auto [col, v] : node.upper_changes)
        model_.set_upper(col, base_hi_[col]);
}

bool Solver::try_incumbent(const Solution& sol) {
    if (!check_feasible(inst_, sol).empty()) return false;
    double cost = solution_cost(inst_, sol);
    if (cost < ub_ - 1e-12) {
        ub_ = cost;
        incumbent_ = sol;
        return true;
    }
    return false;
}

bool Solver::integral(const std::vector<double>& v) const {
    for (double x : v)
        if (std::abs(x - std::round(x)) > params_.int_tol) return false;
    return true;
}

// Drops cut rows that have been strictly inactive (positive basic slack)
// for several consecutive solves. A row whose slack is basic can be removed
// together with that slack without invalidating the rest of the basis.
void Solver::purge_slack_cuts(const lp::LpSolution& sol) {
    const int ncols = model_.num_cols();
    const int nrows = model_.num_rows();
    std::vector<bool> drop(nrows - base_rows_, false);
    int ndrop = 0;
    for (int r = base_rows_; r < nrows; ++r) {
        double slack =
            model_.row(r).rhs - cuts::row_lhs(model_.row(r), sol.values);
        bool slack_basic = sol.basis.status[ncols + r] == lp::ColStatus::Basic;
        int idx = r - base_rows_;
        if (slack_basic && std::abs(slack) > 1e-7) {
            if (++cut_row_age_[idx] >= 3) {
                drop[idx] = true;
                ++ndrop;
            }
        } else {
            cut_row_age_[idx] = 0;
        }
    }
    if (ndrop == 0) return;

    lp::LpModel next;
    for (int c = 0; c < ncols; ++c) {
        next.add_column(model_.objective_coeff(c), model_.lower(c),
                        model_.upper(c));
    }
    std::vector<std::string> keys;
    std::vector<long> ids;
    std::vector<int> ages;
    for (int r = 0; r < nrows; ++r) {
        if (r >= base_rows_ && drop[r - base_rows_]) {
            cut_keys_.erase(cut_row_keys_[r - base_rows_]);
            continue;
        }
        next.add_row(model_.row(r));
        if (r >= base_rows_) {
            keys.push_back(cut_row_keys_[r - base_rows_]);
            ids.push_back(cut_row_ids_[r - base_rows_]);
            ages.push_back(cut_row_age_[r - base_rows_]);
        }
    }
    model_ = std::move(next);
    cut_row_keys_ = std::move(keys);
    cut_row_ids_ = std::move(ids);
    cut_row_age_ = std::move(ages);
}

std::optional<lp::Basis> Solver::make_hint(const Node& node) const {
    if (!node.basis) return std::nullopt;
    const auto& st = node.basis->status;
    const int ncols = model_.num_cols();
    const int fixed = ncols + base_rows_;
    if ((int)st.size() != fixed + (int)node.basis_row_ids.size())
        return std::nullopt;
    lp::Basis hint;
    hint.status.assign(st.begin(), st.begin() + fixed);
    std::map<long, lp::ColStatus> by_id;
    for (size_t i = 0; i < node.basis_row_ids.size(); ++i)
        by_id[node.basis_row_ids[i]] = st[fixed + i];
    for (long id : cut_row_ids_) {
        auto it = by_id.find(id);
        // cut rows unknown to the node start out inactive (slack basic)
        hint.status.push_back(it == by_id.end() ? lp::ColStatus::Basic
                                                : it->second);
    }
    return hint;
}

int Solver::add_family(std::vector<cuts::Cut> cs, int cap) {
    int added = 0;
    for (auto& c : cs) {
        if (cap >= 0 && added >= cap) break;
        auto key = row_key(c.row);
        if (!cut_keys_.insert(key).second) continue;
        model_.add_row(c.row);
        cut_row_keys_.push_back(std::move(key));
        cut_row_ids_.push_back(next_cut_id_++);
        cut_row_age_.push_back(0);
        ++added;
        switch (c.family) {
            case cuts::Family::PAIR: ++stats_.pair; break;
            case cuts::Family::SEC:
                if ((int)c.witness.S.size() > 2) ++stats_.sec;
                break;
            case cuts::Family::PEC2:
            case cuts::Family::PEC: ++stats_.pec; break;
            case cuts::Family::TWO_MATCH: ++stats_.two_match; break;
            case cuts::Family::ODD_HOLE: ++stats_.odd_hole; break;
            case cuts::Family::SSP_SEC: ++stats_.ssp_sec; break;
        }
    }
    return added;
}

int Solver::separation_round(const cuts::FractionalPoint& point, bool force) {
    int added = 0;
    if (params_.enable_pair || force)
        added = add_family(cuts::sep_pairs(point), -1);
    if (!added && (params_.enable_sec || force))
        added = add_family(cuts::sep_sec(point), cuts::kMaxSecPerRound);
    if (!added && (params_.enable_pec || force)) {
        auto cs = cuts::sep_pec_2path(point);
        if (cs.empty()) cs = cuts::sep_pec_long(point);
        added = add_family(std::move(cs), cuts::kMaxPecPerRound);
    }
    if (!added && params_.enable_two_match)
        added = add_family(cuts::sep_two_matching(point),
                           cuts::kMaxTwoMatchPerRound);
    if (!added && params_.enable_odd_hole)
        added = add_family(cuts::sep_odd_hole(point), -1);
    if (!added && params_.enable_ssp_sec)
        added = add_family(cuts::sep_ssp_sec(point), -1);
    return added;
}

std::optional<lp::LpSolution> Solver::cut_loop(Node& node, bool at_root) {
    int round = 0;
    int stalled = 0;
    double prev_obj = -kInf;
    std::optional<lp::LpSolution> last_good;
    for (;;) {
        model_.basis_hint = make_hint(node);
        // a sane warm start resolves in a few hundred pivots; a stale one can
        // wander a degenerate plateau for 100k+, so cap it and restart cold
        lp::SolveParams warm;
        warm.max_iterations = 10000;
        lp::LpSolution sol = lp::solve(model_, warm);
        if (sol.status != lp::SolveStatus::Optimal &&
            sol.status != lp::SolveStatus::Infeasible) {
            model_.basis_hint.reset();
            lp::SolveParams cold;
            cold.max_iterations = 200000;
            sol = lp::solve(model_, cold);
        }
        if (sol.status == lp::SolveStatus::Infeasible) {
            node.status = Node::Status::FathomedInfeasible;
            return std::nullopt;
        }
        if (sol.status != lp::SolveStatus::Optimal) {
            // the LP refuses to converge on this cut set; stop cutting and
            // branch on the last point we could actually prove optimal
            if (last_good) return last_good;
            throw Error("node LP did not solve to optimality");
        }
        last_good = sol;
        node.basis = sol.basis;
        node.basis_row_ids = cut_row_ids_;
        node.bound = std::max(node.bound, sol.objective);
        if (at_root && params_.log) {
            std::cerr << "m=" << model_.num_rows() << " it=" << sol.iterations
                      << " p1=" << sol.phase1_iterations << ' ';
            log_line(node);
        }
        if (node.bound >= fathom_cutoff()) {
            node.status = Node::Status::FathomedBound;
            return std::nullopt;
        }

        purge_slack_cuts(sol);

        cuts::FractionalPoint point;
        point.inst = &inst_;
        point.v = sol.values;

        bool is_int = integral(sol.values);
        if (is_int) {
            IncidenceVector vec(sol.values.size());
            for (size_t i = 0; i < vec.size(); ++i)
                vec[i] = (int)std::lround(sol.values[i]);
            try {
                Solution cand = from_incidence(inst_, vec, true);
                if (check_feasible(inst_, cand).empty()) {
                    try_incumbent(cand);
                    node.status = Node::Status::Integral;
                    return sol;
                }
            } catch (const Error&) {
                // integral but infeasible: separation below must cut it off
            }
        }

        ++round;
        double rel = 1e-7 * std::max(1.0, std::abs(sol.objective));
        stalled = sol.objective > prev_obj + rel ? 0 : stalled + 1;
        prev_obj = sol.objective;
        if (at_root && params_.heuristic && round % 3 == 0) {
            Solution h = heuristic::lp_heuristic(inst_, point, rng_);
            try_incumbent(h);
            if (node.bound >= fathom_cutoff()) {
                node.status = Node::Status::FathomedBound;
                return std::nullopt;
            }
        }

        // interior nodes stop cutting once the bound stalls or after a fixed
        // number of rounds and branch instead; the root runs to completion
        // so its lower bound is the true cutting-plane bound. Integral
        // infeasible points are always cut, regardless of round or family
        // limits, or the search would terminate wrongly.
        if (!is_int && !at_root && (round >= 15 || stalled >= 3)) return sol;
        if (!is_int && at_root && stalled >= 10) return sol;

        int added = separation_round(point, /*force=*/is_int);
        if (added == 0) {
            if (is_int)
                throw Error("integral infeasible point survived separation");
            return sol;
        }
        if (out_of_time()) return sol;
    }
}

double Solver::child_bound_estimate(int col, double lo, double hi,
                                    const Node& node) {
    double old_lo = model_.lower(col), old_hi = model_.upper(col);
    model_.set_lower(col, lo);
    model_.set_upper(col, hi);
    model_.basis_hint = make_hint(node);
    lp::SolveParams sp;
    sp.max_iterations = params_.strong_branch_iterations;
    lp::LpSolution sol = lp::solve(model_, sp);
    model_.set_lower(col, old_lo);
    model_.set_upper(col, old_hi);
    if (sol.status == lp::SolveStatus::Infeasible) return kInf;
    return sol.objective;
}

int Solver::select_branch_var(const std::vector<double>& v, double node_obj,
                              const Node& node) {
    std::vector<int> candidates;
    for (int i = 0; i < inst_.num_customers(); ++i) {
        int col = inst_.arc_index(i, i);
        if (std::abs(v[col] - std::round(v[col])) > params_.int_tol)
            candidates.push_back(col);
    }
    if (candidates.empty()) {
        for (int col = 0; col < inst_.num_edges(); ++col)
            if (std::abs(v[col] - std::round(v[col])) > params_.int_tol)
                candidates.push_back(col);
    }
    if (candidates.empty())
        throw Error("select_branch_var called on an integral point");
    auto frac = [&](int col) {
        return std::abs(v[col] - std::round(v[col]));
    };
    // strong branching is worth full LPs only while the tree is small; deep
    // in the tree the most-fractional variable is picked directly
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return frac(a) > frac(b) + 1e-12; });
    if (explored_ > 100) return candidates.front();
    if (candidates.size() > 8) candidates.resize(8);
    int best = -1;
    double best_score = -1.0;
    for (int col : candidates) {
        double f = std::floor(v[col]), c = std::ceil(v[col]);
        double down = child_bound_estimate(col, model_.lower(col), f, node);
        double up = child_bound_estimate(col, c, model_.upper(col), node);
        double big = std::abs(node_obj) + 1e6;
        double dd = std::min(down == kInf ? big : down - node_obj, big);
        double du = std::min(up == kInf ? big : up - node_obj, big);
        double score = std::max(dd, 1e-6) * std::max(du, 1e-6);
        if (score > best_score + 1e-12) {  // ties: lowest column index
            best_score = score;
            best = col;
        }
    }
    return best;
}

void Solver::log_line(const Node& node) const {
    double lb = node.bound;
    double gap = ub_ == kInf ? 1.0 : (ub_ - lb) / std::max(1.0, std::abs(ub_));
    std::cerr << "node=" << node.id << " lb=" << lb << " ub=" << ub_
              << " gap=" << gap << " cuts=" << stats_.pair << '/'
              << stats_.sec << '/' << stats_.pec << '/' << stats_.two_match
              << '\n';
}

Report Solver::run() {
    start_ = Clock::now();
    build_base_lp();
    try_incumbent(nearest_depot_solution(inst_));

    Report report;
    Node root;
    root.id = next_id_++;
    root.bound = -kInf;
    nodes_[root.id] = root;
    open_.insert({-kInf, root.id});

    double root_lb = 0.0;
    bool root_done = false;

    while (!open_.empty() && !out_of_time() &&
           (params_.node_limit < 0 || explored_ < params_.node_limit)) {
        auto it = open_.begin();
        long id = it->second;
        open_.erase(it);
        Node& node = nodes_[id];
        ++explored_;
        if (node.bound >= fathom_cutoff()) {
            node.status = Node::Status::FathomedBound;
            continue;
        }
        apply_node_bounds(node);
        std::optional<lp::LpSolution> sol;
        try {
            sol = cut_loop(node, id == 0);
        } catch (...) {
            revert_node_bounds(node);
            throw;
        }
        if (id == 0) {
            root_lb = node.bound;
            root_done = true;
        }
        if (sol && params_.heuristic &&
            node.status != Node::Status::Integral) {
            cuts::FractionalPoint point;
            point.inst = &inst_;
            point.v = sol->values;
            try_incumbent(heuristic::lp_heuristic(inst_, point, rng_));
        }
        if (params_.log) log_line(node);
        if (sol && node.status != Node::Status::Integral && out_of_time()) {
            // interrupted mid-node: keep it open so the dual bound is valid
            open_.insert({node.bound, node.id});
        } else if (sol && node.status != Node::Status::Integral) {
            // branch
            int col =
                select_branch_var(sol->values, sol->objective, node);
            double v = sol->values[col];
            for (int side = 0; side < 2; ++side) {
                Node child;
                child.id = next_id_++;
                child.parent = node.id;
                child.bound = node.bound;
                child.lower_changes = node.lower_changes;
                child.upper_changes = node.upper_changes;
                child.basis = node.basis;
                child.basis_row_ids = node.basis_row_ids;
                if (side == 0)
                    child.upper_changes.emplace_back(col, std::floor(v));
                else
                    child.lower_changes.emplace_back(col, std::ceil(v));
                open_.insert({child.bound, child.id});
                nodes_[child.id] = std::move(child);
            }
            node.status = Node::Status::Branched;
        }
        revert_node_bounds(node);
    }

    report.nodes = explored_;
    report.upper_bound = ub_;
    report.incumbent = incumbent_;
    report.cuts = stats_;
    report.root_lb = root_done ? root_lb : -kInf;
    if (open_.empty() && !out_of_time()) {
        report.termination = Termination::Optimal;
        report.lower_bound = ub_;
    } else {
        report.termination = Termination::TimeLimit;
        double lb = ub_;
        for (auto [bound, id] : open_) lb = std::min(lb, bound);
        report.lower_bound = lb;
    }
    report.wall_seconds = elapsed();
    return report;
}

}  // namespace

Solution nearest_depot_solution(const Instance& inst) {
    Solution sol;
    int u = inst.num_customers(), n = inst.num_depots();
    for (int i = 0; i < u; ++i) {
        int best = u;
        for (int d = u; d < u + n; ++d)
            if (inst.assign_cost(i, d) < inst.assign_cost(i, best)) best = d;
        sol.assignment[i] = best;
    }
    return sol;
}

Report branch_and_cut(const Instance& inst, const Params& params) {
    return Solver(inst, params).run();
}

std::string report_to_json(const Instance& inst, const Report& report) {
    nlohmann::json j;
    j["upper_bound"] = report.upper_bound;
    j["lower_bound"] = report.lower_bound;
    j["root_lb"] = report.root_lb;
    j["nodes"] = report.nodes;
    j["wall_seconds"] = report.wall_seconds;
    j["termination"] =
        report.termination == Termination::Optimal ? "optimal" : "time-limit";
    j["cuts"] = {{"pair", report.cuts.pair},
                 {"sec", report.cuts.sec},
                 {"two_match", report.cuts.two_match},
                 {"pec", report.cuts.pec},
                 {"odd_hole", report.cuts.odd_hole},
                 {"ssp_sec", report.cuts.ssp_sec}};
    if (report.incumbent)
        j["solution"] =
            nlohmann::json::parse(solution_to_json(inst, *report.incumbent));
    return j.dump(2);
}

}  // namespace mdrsp::search
