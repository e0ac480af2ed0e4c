#include "mdrsp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mdrsp {

// ---------------------------------------------------------------------------
// CostModel

CostModel CostModel::from_coords(std::vector<Point> pts) {
    if (pts.empty()) throw Error("cost model needs at least one point");
    CostModel m;
    m.size_ = static_cast<int>(pts.size());
    m.coords_ = std::move(pts);
    return m;
}

CostModel CostModel::from_matrix(std::vector<std::vector<double>> mat) {
    const int n = static_cast<int>(mat.size());
    if (n == 0) throw Error("cost model needs a nonempty matrix");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(mat[i].size()) != n)
            throw Error("cost matrix is not square");
        if (mat[i][i] != 0.0) throw Error("cost matrix diagonal must be zero");
        for (int j = 0; j < n; ++j) {
            if (mat[i][j] < 0.0) throw Error("cost matrix entries must be nonnegative");
            if (std::abs(mat[i][j] - mat[j][i]) > 1e-12)
                throw Error("cost matrix must be symmetric");
        }
    }
    CostModel m;
    m.size_ = n;
    m.matrix_ = std::move(mat);
    return m;
}

double CostModel::base_distance(int i, int j) const {
    if (i == j) return 0.0;
    if (!coords_.empty()) {
        const double dx = coords_[i].x - coords_[j].x;
        const double dy = coords_[i].y - coords_[j].y;
        return std::sqrt(dx * dx + dy * dy);
    }
    return matrix_[i][j];
}

// ---------------------------------------------------------------------------
// TSPLIB subset parser

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw Error("malformed numeric token '" + tok + "'");
    }
    if (pos != tok.size()) throw Error("malformed numeric token '" + tok + "'");
    return v;
}

}  // namespace

CostModel parse_tsplib(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int dimension = -1;
    std::string weight_type, weight_format;
    std::vector<std::string> body_tokens;
    enum { NONE, COORDS, WEIGHTS } section = NONE;
    std::vector<std::pair<int, Point>> coord_rows;

    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t == "EOF") break;

        auto colon = t.find(':');
        std::string key = trim(colon == std::string::npos ? t : t.substr(0, colon));
        std::string val = colon == std::string::npos ? "" : trim(t.substr(colon + 1));

        if (key == "DIMENSION") {
            dimension = static_cast<int>(parse_number(val));
            continue;
        }
        if (key == "EDGE_WEIGHT_TYPE") { weight_type = val; continue; }
        if (key == "EDGE_WEIGHT_FORMAT") { weight_format = val; continue; }
        if (key == "NODE_COORD_SECTION") { section = COORDS; continue; }
        if (key == "EDGE_WEIGHT_SECTION") { section = WEIGHTS; continue; }
        if (key == "NAME" || key == "COMMENT" || key == "TYPE" ||
            key == "DISPLAY_DATA_TYPE" || key == "NODE_COORD_TYPE")
            continue;
        if (key == "DISPLAY_DATA_SECTION") { section = NONE; continue; }

        if (section == COORDS) {
            std::istringstream ls(t);
            std::string a, b, c;
            if (!(ls >> a >> b >> c)) throw Error("malformed coordinate line: " + t);
            coord_rows.push_back({static_cast<int>(parse_number(a)),
                                  {parse_number(b), parse_number(c)}});
        } else if (section == WEIGHTS) {
            std::istringstream ls(t);
            std::string tok;
            while (ls >> tok) body_tokens.push_back(tok);
        }
    }

    if (dimension <= 0) throw Error("missing or invalid DIMENSION");

    if (!coord_rows.empty()) {
        if (weight_type != "EUC_2D")
            throw Error("unsupported weight type '" + weight_type + "'");
        if (static_cast<int>(coord_rows.size()) != dimension)
            throw Error("dimension mismatch in NODE_COORD_SECTION");
        std::vector<Point> pts(dimension);
        std::vector<bool> seen(dimension, false);
        for (auto& [id, p] : coord_rows) {
            if (id < 1 || id > dimension || seen[id - 1])
                throw Error("bad node id in NODE_COORD_SECTION");
            seen[id - 1] = true;
            pts[id - 1] = p;
        }
        return CostModel::from_coords(std::move(pts));
    }

    if (weight_type != "EXPLICIT")
        throw Error("unsupported weight type '" + weight_type + "'");

    std::vector<std::vector<double>> mat(dimension, std::vector<double>(dimension, 0.0));
    std::size_t k = 0;
    auto next = [&]() -> double {
        if (k >= body_tokens.size()) throw Error("dimension mismatch in EDGE_WEIGHT_SECTION");
        return parse_number(body_tokens[k++]);
    };
    if (weight_format == "FULL_MATRIX") {
        for (int i = 0; i < dimension; ++i)
            for (int j = 0; j < dimension; ++j) mat[i][j] = next();
    } else if (weight_format == "LOWER_DIAG_ROW") {
        for (int i = 0; i < dimension; ++i)
            for (int j = 0; j <= i; ++j) mat[i][j] = mat[j][i] = next();
    } else {
        throw Error("unsupported weight format '" + weight_format + "'");
    }
    if (k != body_tokens.size()) throw Error("dimension mismatch in EDGE_WEIGHT_SECTION");
    for (int i = 0; i < dimension; ++i) mat[i][i] = 0.0;
    return CostModel::from_matrix(std::move(mat));
}

// ---------------------------------------------------------------------------
// Instance

Instance::Instance(int num_customers, int num_depots,
                   std::vector<std::vector<double>> routing_cost,
                   std::vector<std::vector<double>> assign_cost,
                   InstanceClass cls, int alpha, std::string name,
                   std::uint64_t seed)
    : u_(num_customers),
      n_(num_depots),
      c_(std::move(routing_cost)),
      d_(std::move(assign_cost)),
      class_(cls),
      alpha_(alpha),
      name_(std::move(name)),
      seed_(seed) {
    if (u_ < 1 || n_ < 1) throw Error("instance needs at least one customer and one depot");
    const int v = u_ + n_;
    if (static_cast<int>(c_.size()) != v || static_cast<int>(d_.size()) != v)
        throw Error("cost matrix size mismatch");
    for (int i = 0; i < v; ++i) {
        if (static_cast<int>(c_[i].size()) != v || static_cast<int>(d_[i].size()) != v)
            throw Error("cost matrix size mismatch");
        for (int j = 0; j < v; ++j) {
            if (c_[i][j] < 0 || d_[i][j] < 0) throw Error("costs must be nonnegative");
            if (std::abs(c_[i][j] - c_[j][i]) > 1e-12)
                throw Error("routing costs must be symmetric");
        }
    }
}

int Instance::edge_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (j < u_) {  // customer-customer
        return i * u_ - i * (i + 1) / 2 + (j - i - 1);
    }
    if (i >= u_) throw Error("no depot-depot edges");
    return num_cc_edges() + i * n_ + (j - u_);
}

bool Instance::arc_exists(int i, int j) const {
    if (i < u_) return true;
    return j == i || j < u_;
}

int Instance::arc_index(int i, int j) const {
    const int base = num_edges();
    if (i < u_) return base + i * (u_ + n_) + j;
    if (!arc_exists(i, j)) throw Error("no such arc");
    const int d = i - u_;
    return base + u_ * (u_ + n_) + d * (u_ + 1) + (j < u_ ? j : u_);
}

std::pair<int, int> Instance::edge_of(int col) const {
    if (col < num_cc_edges()) {
        int i = 0;
        while (col >= u_ - i - 1) {
            col -= u_ - i - 1;
            ++i;
        }
        return {i, i + 1 + col};
    }
    col -= num_cc_edges();
    return {col / n_, u_ + col % n_};
}

std::pair<int, int> Instance::arc_of(int col) const {
    col -= num_edges();
    if (col < u_ * (u_ + n_)) return {col / (u_ + n_), col % (u_ + n_)};
    col -= u_ * (u_ + n_);
    const int d = u_ + col / (u_ + 1);
    const int j = col % (u_ + 1);
    return {d, j < u_ ? j : d};
}

// ---------------------------------------------------------------------------
// Generation

Instance generate_instance(const CostModel& base, int n_depots,
                           InstanceClass cls, int alpha, std::uint64_t seed,
                           const std::string& name) {
    if (n_depots < 1) throw Error("need at least one depot");
    if (cls == InstanceClass::II && alpha != 3 && alpha != 5 && alpha != 7 && alpha != 9)
        throw Error("class II alpha must be in {3,5,7,9}");
    if (!base.has_coords())
        throw Error("cannot place depots on a coordinate-free base");

    const auto& cust = base.coords();
    double xmin = cust[0].x, xmax = cust[0].x, ymin = cust[0].y, ymax = cust[0].y;
    for (const auto& p : cust) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }

    std::mt19937_64 rng(seed);
    auto uniform01 = [&]() { return (rng() >> 11) * 0x1.0p-53; };

    std::vector<Point> pts = cust;
    for (int k = 0; k < n_depots; ++k) {
        pts.push_back({xmin + uniform01() * (xmax - xmin),
                       ymin + uniform01() * (ymax - ymin)});
    }

    const int v = static_cast<int>(pts.size());
    std::vector<std::vector<double>> c(v, std::vector<double>(v, 0.0));
    std::vector<std::vector<double>> d(v, std::vector<double>(v, 0.0));
    for (int i = 0; i < v; ++i)
        for (int j = 0; j < v; ++j) {
            if (i == j) continue;
            const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            const double l = std::sqrt(dx * dx + dy * dy);
            if (cls == InstanceClass::I) {
                c[i][j] = l;
                d[i][j] = l;
            } else {
                c[i][j] = alpha * l;
                d[i][j] = (10 - alpha) * l;
            }
        }

    Instance inst(static_cast<int>(cust.size()), n_depots, std::move(c),
                  std::move(d), cls, cls == InstanceClass::II ? alpha : 0, name,
                  seed);
    inst.set_coords(std::move(pts));
    return inst;
}

// ---------------------------------------------------------------------------
// Solution handling

double solution_cost(const Instance& inst, const Solution& sol) {
    double total = 0.0;
    for (const auto& r : sol.rings) {
        if (r.customers.empty()) continue;
        if (r.customers.size() == 1) {
            total += 2.0 * inst.routing_cost(r.depot, r.customers[0]);
            continue;
        }
        total += inst.routing_cost(r.depot, r.customers.front());
        for (std::size_t k = 0; k + 1 < r.customers.size(); ++k)
            total += inst.routing_cost(r.customers[k], r.customers[k + 1]);
        total += inst.routing_cost(r.customers.back(), r.depot);
    }
    for (const auto& [i, j] : sol.assignment)
        if (i != j) total += inst.assign_cost(i, j);
    return total;
}

std::vector<std::string> check_feasible(const Instance& inst, const Solution& sol) {
    std::vector<std::string> bad;
    auto add = [&](const std::string& rule) {
        if (std::find(bad.begin(), bad.end(), rule) == bad.end()) bad.push_back(rule);
    };

    std::set<int> on_ring;
    for (const auto& r : sol.rings) {
        if (!inst.is_depot(r.depot)) add("ring-depot");
        if (r.customers.empty()) add("ring-empty");
        for (int t : r.customers) {
            if (inst.is_depot(t)) {
                add("path-elimination");  // a cycle touching a second depot
                continue;
            }
            if (!on_ring.insert(t).second) add("unique-assignment");
        }
        // a simple cycle never repeats an edge or vertex
        std::set<std::pair<int, int>> edges;
        if (r.customers.size() >= 2) {
            std::vector<int> cyc = r.customers;
            cyc.insert(cyc.begin(), r.depot);
            for (std::size_t k = 0; k < cyc.size(); ++k) {
                int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
                if (a > b) std::swap(a, b);
                if (!edges.insert({a, b}).second) add("degree");
            }
        }
    }

    for (const auto& [i, j] : sol.assignment) {
        if (!inst.is_customer(i)) add("unique-assignment");
        if (on_ring.count(i)) add("unique-assignment");
        if (i == j) {
            add("assignment-target");  // self-assignment means "on a ring"
            continue;
        }
        if (!inst.is_depot(j) && !on_ring.count(j)) add("assignment-target");
    }

    for (int t = 0; t < inst.num_customers(); ++t)
        if (!on_ring.count(t) && !sol.assignment.count(t)) add("unique-assignment");

    return bad;
}

IncidenceVector to_incidence(const Instance& inst, const Solution& sol) {
    if (!check_feasible(inst, sol).empty())
        throw Error("to_incidence requires a feasible solution");
    IncidenceVector v(inst.num_vars(), 0);
    for (int d = inst.num_customers(); d < inst.num_vertices(); ++d)
        v[inst.arc_index(d, d)] = 1;
    for (const auto& r : sol.rings) {
        for (int t : r.customers) v[inst.arc_index(t, t)] = 1;
        if (r.customers.size() == 1) {
            v[inst.edge_index(r.depot, r.customers[0])] = 2;
            continue;
        }
        v[inst.edge_index(r.depot, r.customers.front())] += 1;
        for (std::size_t k = 0; k + 1 < r.customers.size(); ++k)
            v[inst.edge_index(r.customers[k], r.customers[k + 1])] += 1;
        v[inst.edge_index(r.customers.back(), r.depot)] += 1;
    }
    for (const auto& [i, j] : sol.assignment) v[inst.arc_index(i, j)] = 1;
    return v;
}

Solution from_incidence(const Instance& inst, const IncidenceVector& vec,
                        bool repair_two_paths) {
    const int u = inst.num_customers(), nv = inst.num_vertices();
    if (static_cast<int>(vec.size()) != inst.num_vars())
        throw Error("incidence vector has wrong length");

    // remaining multiplicity per edge
    std::vector<std::vector<int>> mult(nv, std::vector<int>(nv, 0));
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j) {
            if (inst.is_depot(i) && inst.is_depot(j)) continue;
            mult[i][j] = mult[j][i] = vec[inst.edge_index(i, j)];
        }

    Solution sol;
    for (int d = u; d < nv; ++d) {
        for (int start = 0; start < nv; ++start) {
            while (start != d && mult[d][start] > 0) {
                // walk a closed route leaving d through start
                std::vector<int> walk;
                int cur = start;
                --mult[d][start];
                --mult[start][d];
                while (inst.is_customer(cur)) {
                    walk.push_back(cur);
                    int nxt = -1;
                    for (int j = 0; j < nv; ++j)
                        if (mult[cur][j] > 0) { nxt = j; break; }
                    if (nxt == -1) throw Error("incidence vector: dangling path");
                    --mult[cur][nxt];
                    --mult[nxt][cur];
                    cur = nxt;
                }
                if (cur == d) {
                    sol.rings.push_back({d, walk});
                } else if (walk.size() == 1 && repair_two_paths) {
                    const int t = walk[0];
                    const int best = inst.routing_cost(d, t) <= inst.routing_cost(cur, t)
                                         ? d : cur;
                    sol.rings.push_back({best, {t}});
                } else {
                    throw Error("incidence vector: route visits two depots");
                }
            }
        }
    }
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            if (!(inst.is_depot(i) && inst.is_depot(j)) && mult[i][j] > 0)
                throw Error("incidence vector: edges disconnected from all depots");

    for (int i = 0; i < u; ++i) {
        int target = -1;
        int count = 0;
        for (int j = 0; j < nv; ++j) {
            if (vec[inst.arc_index(i, j)]) {
                target = j;
                ++count;
            }
        }
        if (count != 1) throw Error("incidence vector: assignment row sum != 1");
        if (target != i) sol.assignment[i] = target;
    }

    auto verdict = check_feasible(inst, sol);
    if (!verdict.empty())
        throw Error("incidence vector decodes to infeasible solution: " + verdict[0]);
    return sol;
}

Solution from_incidence(const Instance& inst, const IncidenceVector& vec) {
    return from_incidence(inst, vec, false);
}

double incidence_cost(const Instance& inst, const std::vector<double>& v) {
    double total = 0.0;
    for (int col = 0; col < inst.num_vars(); ++col) {
        if (v[col] == 0.0) continue;
        if (inst.is_edge_col(col)) {
            auto [i, j] = inst.edge_of(col);
            total += inst.routing_cost(i, j) * v[col];
        } else {
            auto [i, j] = inst.arc_of(col);
            if (i != j) total += inst.assign_cost(i, j) * v[col];
        }
    }
    return total;
}

double incidence_cost(const Instance& inst, const IncidenceVector& v) {
    return incidence_cost(inst, std::vector<double>(v.begin(), v.end()));
}

// ---------------------------------------------------------------------------
// JSON files

namespace {

// 10 significant digits, locale independent, stable across runs
double round10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::strtod(buf, nullptr);
}

nlohmann::json points_json(const std::vector<Point>& pts, int from, int to) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = from; i < to; ++i)
        arr.push_back({round10(pts[i].x), round10(pts[i].y)});
    return arr;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["name"] = inst.name();
    j["class"] = inst.klass() == InstanceClass::I ? "I" : "II";
    j["alpha"] = inst.alpha();
    j["seed"] = inst.seed();
    if (!inst.coords().empty()) {
        j["customers"] = points_json(inst.coords(), 0, inst.num_customers());
        j["depots"] = points_json(inst.coords(), inst.num_customers(),
                                  inst.num_vertices());
    } else {
        j["customers"] = inst.num_customers();
        j["depots"] = inst.num_depots();
        nlohmann::json c = nlohmann::json::array(), d = nlohmann::json::array();
        for (int a = 0; a < inst.num_vertices(); ++a) {
            nlohmann::json rc = nlohmann::json::array(), ra = nlohmann::json::array();
            for (int b = 0; b < inst.num_vertices(); ++b) {
                rc.push_back(round10(inst.routing_cost(a, b)));
                ra.push_back(round10(inst.assign_cost(a, b)));
            }
            c.push_back(rc);
            d.push_back(ra);
        }
        j["routing"] = c;
        j["assignment"] = d;
    }
    return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("invalid instance JSON: ") + e.what());
    }
    const std::string cls_s = j.value("class", "I");
    const InstanceClass cls = cls_s == "II" ? InstanceClass::II : InstanceClass::I;
    const int alpha = j.value("alpha", 0);
    const std::string name = j.value("name", "");
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});

    if (j["customers"].is_array()) {
        std::vector<Point> pts;
        for (const auto& p : j["customers"]) pts.push_back({p[0], p[1]});
        const int u = static_cast<int>(pts.size());
        for (const auto& p : j["depots"]) pts.push_back({p[0], p[1]});
        const int n = static_cast<int>(pts.size()) - u;
        const int v = u + n;
        std::vector<std::vector<double>> c(v, std::vector<double>(v, 0.0));
        std::vector<std::vector<double>> d(v, std::vector<double>(v, 0.0));
        for (int a = 0; a < v; ++a)
            for (int b = 0; b < v; ++b) {
                if (a == b) continue;
                const double dx = pts[a].x - pts[b].x, dy = pts[a].y - pts[b].y;
                const double l = std::sqrt(dx * dx + dy * dy);
                c[a][b] = cls == InstanceClass::I ? l : alpha * l;
                d[a][b] = cls == InstanceClass::I ? l : (10 - alpha) * l;
            }
        Instance inst(u, n, std::move(c), std::move(d), cls, alpha, name, seed);
        inst.set_coords(std::move(pts));
        return inst;
    }

    const int u = j["customers"].get<int>();
    const int n = j["depots"].get<int>();
    std::vector<std::vector<double>> c = j["routing"];
    std::vector<std::vector<double>> d = j["assignment"];
    return Instance(u, n, std::move(c), std::move(d), cls, alpha, name, seed);
}

std::string solution_to_json(const Instance& inst, const Solution& sol) {
    nlohmann::json j;
    j["cost"] = round10(solution_cost(inst, sol));
    nlohmann::json rings = nlohmann::json::array();
    for (const auto& r : sol.rings)
        rings.push_back({{"depot", r.depot}, {"customers", r.customers}});
    j["rings"] = rings;
    nlohmann::json asg = nlohmann::json::object();
    for (const auto& [i, t] : sol.assignment) asg[std::to_string(i)] = t;
    j["assignments"] = asg;
    return j.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("invalid solution JSON: ") + e.what());
    }
    Solution sol;
    for (const auto& r : j["rings"]) {
        Ring ring;
        ring.depot = r["depot"];
        for (int t : r["customers"]) ring.customers.push_back(t);
        sol.rings.push_back(std::move(ring));
    }
    for (auto it = j["assignments"].begin(); it != j["assignments"].end(); ++it)
        sol.assignment[std::stoi(it.key())] = it.value();
    return sol;
}

}  // namespace mdrsp
