// Command-line front end: instance generation, solving, benchmarking and
// polyhedral verification.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdrsp/cuts.hpp"
#include "mdrsp/instance.hpp"
#include "mdrsp/polylab.hpp"
#include "mdrsp/search.hpp"

namespace {

using nlohmann::json;
using namespace mdrsp;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

struct BenchRow {
    std::string name;
    int depots = 0;
    int alpha = 0;  // 0 when Class I: printed empty
    bool timed_out = false;
    double opt = 0.0;
    double pct_lb = 0.0;
    long pair = 0, sec = 0, two_mat = 0, pec = 0, nodes = 0;
    double time_seconds = 0.0;
};

BenchRow row_of(const Instance& inst, const search::Report& rep) {
    BenchRow r;
    r.name = inst.name().empty() ? "unnamed" : inst.name();
    r.depots = inst.num_depots();
    r.alpha = inst.klass() == InstanceClass::II ? inst.alpha() : 0;
    r.timed_out = rep.termination != search::Termination::Optimal;
    r.opt = rep.upper_bound;
    r.pct_lb = rep.upper_bound != 0.0 ? 100.0 * rep.root_lb / rep.upper_bound
                                      : 100.0;
    r.pair = rep.cuts.pair;
    r.sec = rep.cuts.sec;
    r.two_mat = rep.cuts.two_match;
    r.pec = rep.cuts.pec;
    r.nodes = rep.nodes;
    r.time_seconds = rep.wall_seconds;
    return r;
}

std::string fixed(double v, int prec) {
    std::ostringstream ss;
    ss.imbue(std::locale::classic());
    ss << std::fixed << std::setprecision(prec) << v;
    return ss.str();
}

json row_to_json(const BenchRow& r) {
    json j;
    j["name"] = r.name;
    j["depots"] = r.depots;
    if (r.alpha) j["alpha"] = r.alpha;
    j["opt"] = r.opt;
    j["pct_lb"] = r.pct_lb;
    j["pair"] = r.pair;
    j["sec"] = r.sec;
    j["two_mat"] = r.two_mat;
    j["pec"] = r.pec;
    j["nodes"] = r.nodes;
    j["time_seconds"] = r.time_seconds;
    j["timed_out"] = r.timed_out;
    return j;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& base_path, int depots,
                 const std::string& cls, int alpha, std::uint64_t seed,
                 const std::string& out) {
    std::string text0 = read_file(base_path);
    CostModel base = parse_tsplib(text0);
    InstanceClass k = cls == "II" ? InstanceClass::II : InstanceClass::I;
    // name the instance after the TSPLIB base and depot count, e.g. tiny8/2
    std::string stem;
    if (auto pos = text0.find("NAME"); pos != std::string::npos) {
        std::istringstream line(text0.substr(pos + 4));
        char colon;
        line >> colon >> stem;
        if (colon != ':') stem.clear();
    }
    if (stem.empty()) {
        auto slash = base_path.find_last_of('/');
        stem = base_path.substr(slash == std::string::npos ? 0 : slash + 1);
        if (auto dot = stem.find_last_of('.'); dot != std::string::npos)
            stem.resize(dot);
    }
    Instance inst = generate_instance(base, depots, k, alpha, seed,
                                      stem + "/" + std::to_string(depots));
    std::string text = instance_to_json(inst);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_file(out, text);
    return 0;
}

search::Params solve_params(double time_limit, std::uint64_t seed,
                            bool no_heuristic, bool enable_oddhole) {
    search::Params p;
    p.time_limit = time_limit;
    p.seed = seed;
    p.heuristic = !no_heuristic;
    p.enable_odd_hole = enable_oddhole;
    p.enable_ssp_sec = enable_oddhole;
    return p;
}

int cmd_solve(const std::string& path, const search::Params& params,
              const std::string& out, bool log) {
    Instance inst = instance_from_json(read_file(path));
    search::Params p = params;
    p.log = log;
    search::Report rep = search::branch_and_cut(inst, p);
    json j = json::parse(search::report_to_json(inst, rep));
    j["time_limit"] = p.time_limit;
    j["bench"] = row_to_json(row_of(inst, rep));
    std::string text = j.dump(2);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_file(out, text);
    return rep.termination == search::Termination::Optimal ? 0 : 2;
}

int bench_threads() {
    if (const char* env = std::getenv("MDRSP_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream csv;
    csv.imbue(std::locale::classic());
    csv << "Name,|D|,α,opt,%-LB,Pair,SEC,2mat,PEC,Nodes,Time\n";
    double sum_lb = 0, sum_nodes = 0, sum_time = 0;
    int solved = 0;
    for (const auto& r : rows) {
        csv << r.name << ',' << r.depots << ','
            << (r.alpha ? std::to_string(r.alpha) : "") << ',';
        if (r.timed_out) {
            csv << "TIMEOUT," << ',' << r.pair << ',' << r.sec << ','
                << r.two_mat << ',' << r.pec << ',' << r.nodes << ','
                << fixed(r.time_seconds, 2) << '\n';
            continue;
        }
        csv << fixed(r.opt, 4) << ',' << fixed(r.pct_lb, 2) << ',' << r.pair
            << ',' << r.sec << ',' << r.two_mat << ',' << r.pec << ','
            << r.nodes << ',' << fixed(r.time_seconds, 2) << '\n';
        sum_lb += r.pct_lb;
        sum_nodes += (double)r.nodes;
        sum_time += r.time_seconds;
        ++solved;
    }
    csv << "Averages,,,,";
    if (solved > 0)
        csv << fixed(sum_lb / solved, 2) << ",,,,," << fixed(sum_nodes / solved, 2)
            << ',' << fixed(sum_time / solved, 2);
    else
        csv << ",,,,,,";
    csv << '\n';
    return csv.str();
}

int cmd_bench(const std::string& manifest, const search::Params& params,
              const std::string& out) {
    std::vector<std::string> paths;
    {
        std::istringstream in(read_file(manifest));
        // entries are resolved relative to the manifest's directory
        std::string dir;
        if (auto slash = manifest.find_last_of('/'); slash != std::string::npos)
            dir = manifest.substr(0, slash + 1);
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            paths.push_back(line[0] == '/' ? line : dir + line);
        }
    }
    std::vector<Instance> insts;
    insts.reserve(paths.size());
    for (const auto& p : paths) insts.push_back(instance_from_json(read_file(p)));

    std::vector<BenchRow> rows(insts.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= insts.size()) return;
            search::Report rep = search::branch_and_cut(insts[i], params);
            rows[i] = row_of(insts[i], rep);
        }
    };
    int nthreads = std::min<int>(bench_threads(), (int)insts.size());
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string csv = bench_csv(rows);
    if (out.empty())
        std::cout << csv;
    else
        write_file(out, csv);
    return 0;
}

// ---------------------------------------------------------------------------

Instance unit_instance(int u, int n) {
    int v = u + n;
    std::vector<std::vector<double>> c(v, std::vector<double>(v, 1.0)), d = c;
    return Instance(u, n, std::move(c), std::move(d));
}

json facet_to_json(const polylab::FacetReport& rep) {
    return json{{"face_rank", rep.face_rank},
                {"target", rep.target},
                {"pass", rep.pass},
                {"note", rep.note}};
}

json check_facets(const std::string& prop, int u, int n, bool& ok) {
    json j;
    j["prop"] = prop;
    j["u"] = u;
    j["n"] = n;
    if (prop == "prop2") {
        // nonnegativity of a customer-customer edge; hypothesis needs |T| >= 4
        if (u < 4) {
            j["pass"] = false;
            j["note"] = "requires |T| >= 4";
            ok = false;
            return j;
        }
        Instance inst = unit_instance(u, n);
        lp::Row row;
        row.coeffs.emplace_back(inst.edge_index(0, 1), 1.0);
        row.sense = lp::Sense::GE;
        row.rhs = 0.0;
        auto rep = polylab::verify_facet(row, u, n);
        j.update(facet_to_json(rep));
        ok = ok && rep.pass;
    } else if (prop == "prop3") {
        Instance inst = unit_instance(u, n);
        auto rep = polylab::verify_facet(
            cuts::make_sec_cut(inst, {0, 1}, 0).row, u, n);
        j["S"] = {0, 1};
        j.update(facet_to_json(rep));
        ok = ok && rep.pass;
    } else if (prop == "prop4") {
        Instance inst = unit_instance(u, n);
        auto rep = polylab::verify_facet(
            cuts::make_pec2_cut(inst, 0, 1, {u}).row, u, n);
        j["depots"] = {u};
        j.update(facet_to_json(rep));
        ok = ok && rep.pass;
    } else if (prop == "prop5") {
        Instance inst = unit_instance(u, n);
        auto rep = polylab::verify_facet(
            cuts::make_pec_cut(inst, 0, 1, 2, {2, 3}, {u}).row, u, n);
        j["S"] = {2, 3};
        j.update(facet_to_json(rep));
        ok = ok && rep.pass;
    } else {
        throw Error("unknown proposition " + prop +
                    " (expected prop2..prop5)");
    }
    return j;
}

json check_validity(int u, int n, bool& ok) {
    Instance inst = unit_instance(u, n);
    polylab::PolytopeSample sample = polylab::enumerate_sample(u, n);
    std::vector<std::pair<std::string, lp::Row>> rows = {
        {"pair", cuts::make_pair_cut(inst, 0, 1).row},
        {"sec", cuts::make_sec_cut(inst, {0, 1, 2}, 0).row},
        {"pec2", cuts::make_pec2_cut(inst, 0, 1, {u}).row},
        {"two_matching",
         cuts::make_two_matching_cut(inst, {0, 1, 2},
                                     {{0, 3}, {1, u}, {2, u + n - 1}})
             .row},
        {"odd_hole", cuts::make_odd_hole_cut(inst, 0, 1, 2).row},
        {"ssp_sec", cuts::make_ssp_sec_cut(inst, {0, 1}, 0, 1, 2).row},
    };
    if (u >= 4 && n >= 2)
        rows.emplace_back("pec",
                          cuts::make_pec_cut(inst, 0, 1, 2, {2, 3}, {u}).row);
    json checks = json::array();
    for (auto& [name, row] : rows) {
        auto rep = polylab::verify_valid(row, sample);
        checks.push_back({{"family", name}, {"pass", rep.pass}});
        ok = ok && rep.pass;
    }
    return json{{"u", u},
                {"n", n},
                {"sample_size", sample.vectors.size()},
                {"checks", checks}};
}

json oracle_suite(int count, bool& ok) {
    json runs = json::array();
    const int alphas[] = {3, 5, 7, 9};
    for (int s = 0; s < count; ++s) {
        int u = 4 + s % 5;
        int n = 2 + s % 2;
        InstanceClass cls = s % 2 ? InstanceClass::II : InstanceClass::I;
        int alpha = alphas[s % 4];
        std::mt19937_64 rng(s);
        auto uni = [&]() { return (rng() >> 11) * 0x1.0p-53 * 100.0; };
        std::vector<Point> pts(u);
        for (auto& p : pts) p = {uni(), uni()};
        Instance inst = generate_instance(CostModel::from_coords(pts), n, cls,
                                          alpha, s * 7919 + 1);
        Solution oracle = polylab::brute_force_opt(inst);
        double want = solution_cost(inst, oracle);
        search::Report rep = search::branch_and_cut(inst, {});
        bool match = rep.termination == search::Termination::Optimal &&
                     std::abs(rep.upper_bound - want) <=
                         1e-6 * std::max(1.0, std::abs(want));
        ok = ok && match;
        runs.push_back({{"seed", s},
                        {"u", u},
                        {"n", n},
                        {"class", cls == InstanceClass::II ? "II" : "I"},
                        {"alpha", alpha},
                        {"oracle", want},
                        {"solver", rep.upper_bound},
                        {"match", match}});
    }
    return json{{"count", count}, {"runs", runs}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact branch-and-cut solver for the multiple depot "
                 "ring-star problem"};
    app.require_subcommand(1);

    // generate
    std::string gen_base, gen_class = "I", gen_out;
    int gen_depots = 0, gen_alpha = 0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate",
                                   "Generate an instance from a TSPLIB base");
    gen->add_option("base", gen_base, "TSPLIB file")->required();
    gen->add_option("--depots", gen_depots, "number of depots")->required();
    gen->add_option("--class", gen_class, "cost class (I or II)")
        ->check(CLI::IsMember({"I", "II"}));
    gen->add_option("--alpha", gen_alpha, "Class II alpha in {3,5,7,9}");
    gen->add_option("--seed", gen_seed, "depot placement seed");
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // solve
    std::string solve_path, solve_out;
    double time_limit = 7200.0;
    std::uint64_t solve_seed = 0;
    bool no_heuristic = false, enable_oddhole = false, solve_log = false;
    auto* slv = app.add_subcommand("solve", "Solve an instance file");
    slv->add_option("instance", solve_path, "instance JSON")->required();
    slv->add_option("--time-limit", time_limit, "seconds (default 7200)");
    slv->add_option("--seed", solve_seed, "heuristic seed");
    slv->add_flag("--no-heuristic", no_heuristic, "disable the LP heuristic");
    slv->add_flag("--enable-oddhole", enable_oddhole,
                  "also separate odd-hole / SSP subtour cuts");
    slv->add_flag("--log", solve_log, "print search progress to stderr");
    slv->add_option("--out", solve_out, "report path (default stdout)");

    // bench
    std::string bench_manifest, bench_out;
    double bench_limit = 7200.0;
    auto* bch = app.add_subcommand("bench",
                                   "Solve a manifest of instances, emit CSV");
    bch->add_option("manifest", bench_manifest, "file listing instance paths")
        ->required();
    bch->add_option("--time-limit", bench_limit, "seconds per instance");
    bch->add_option("--out", bench_out, "CSV path (default stdout)");

    // verify
    std::vector<int> dim_args, validity_args;
    std::string facets_prop;
    int oracle_count = -1;
    bool slow = false;
    auto* ver = app.add_subcommand("verify", "Polyhedral verification runs");
    ver->add_option("--dim", dim_args, "u n: dimension check")->expected(2);
    ver->add_option("--facets", facets_prop, "prop2|prop3|prop4|prop5");
    ver->add_option("--validity", validity_args, "u n: cut validity")
        ->expected(2);
    ver->add_option("--oracle-suite", oracle_count, "N seeded solves");
    ver->add_flag("--slow", slow, "allow the slow prop5 size (u=6)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (gen_class == "II" && gen_alpha == 0)
                throw Error("--alpha is required with --class II");
            if (gen_class == "I" && gen_alpha != 0)
                throw Error("--alpha only applies to --class II");
            return cmd_generate(gen_base, gen_depots, gen_class, gen_alpha,
                                gen_seed, gen_out);
        }
        if (slv->parsed()) {
            return cmd_solve(solve_path,
                             solve_params(time_limit, solve_seed, no_heuristic,
                                          enable_oddhole),
                             solve_out, solve_log);
        }
        if (bch->parsed()) {
            return cmd_bench(bench_manifest,
                             solve_params(bench_limit, 0, false, false),
                             bench_out);
        }
        if (ver->parsed()) {
            bool ok = true;
            json j;
            bool any = false;
            if (dim_args.size() == 2) {
                auto rep = polylab::verify_dimension(dim_args[0], dim_args[1]);
                j["dim"] = {{"u", rep.u},
                            {"n", rep.n},
                            {"m", rep.m},
                            {"dim_formula", rep.dim_formula},
                            {"dim_measured", rep.dim_measured},
                            {"pass", rep.pass}};
                ok = ok && rep.pass;
                any = true;
            }
            if (!facets_prop.empty()) {
                int u = facets_prop == "prop5" ? 6 : 4, n = 2;
                if (facets_prop == "prop5" && !slow)
                    throw Error("prop5 runs at u=6 and needs --slow");
                j["facets"] = check_facets(facets_prop, u, n, ok);
                any = true;
            }
            if (validity_args.size() == 2) {
                j["validity"] =
                    check_validity(validity_args[0], validity_args[1], ok);
                any = true;
            }
            if (oracle_count >= 0) {
                j["oracle_suite"] = oracle_suite(oracle_count, ok);
                any = true;
            }
            if (!any) throw Error("verify needs at least one check flag");
            j["pass"] = ok;
            std::cout << j.dump(2) << "\n";
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
