#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "mdrsp/cuts.hpp"
#include "mdrsp/polylab.hpp"
#include "mdrsp/search.hpp"

namespace py = pybind11;
using namespace mdrsp;

PYBIND11_MODULE(_mdrsp, m) {
    m.doc() = "Exact branch-and-cut solver for the multiple depot "
              "ring-star problem";

    py::register_exception<Error>(m, "MdrspError");

    py::class_<Instance>(m, "Instance")
        .def_static("from_json",
                    [](const std::string& text) {
                        return instance_from_json(text);
                    })
        .def_static(
            "generate",
            [](const std::string& tsplib_text, int depots,
               const std::string& cls, int alpha, std::uint64_t seed,
               const std::string& name) {
                return generate_instance(
                    parse_tsplib(tsplib_text), depots,
                    cls == "II" ? InstanceClass::II : InstanceClass::I, alpha,
                    seed, name);
            },
            py::arg("tsplib_text"), py::arg("depots"), py::arg("cls") = "I",
            py::arg("alpha") = 0, py::arg("seed") = 0, py::arg("name") = "")
        .def_property_readonly("num_customers", &Instance::num_customers)
        .def_property_readonly("num_depots", &Instance::num_depots)
        .def_property_readonly("num_vars", &Instance::num_vars)
        .def_property_readonly("name", &Instance::name)
        .def("routing_cost", &Instance::routing_cost)
        .def("assign_cost", &Instance::assign_cost)
        .def("to_json", [](const Instance& inst) {
            return instance_to_json(inst);
        });

    m.def(
        "solve",
        [](const Instance& inst, double time_limit, std::uint64_t seed,
           bool heuristic, bool log) {
            search::Params p;
            p.time_limit = time_limit;
            p.seed = seed;
            p.heuristic = heuristic;
            p.log = log;
            search::Report rep;
            {
                py::gil_scoped_release release;
                rep = search::branch_and_cut(inst, p);
            }
            return search::report_to_json(inst, rep);
        },
        py::arg("instance"), py::arg("time_limit") = 7200.0,
        py::arg("seed") = 0, py::arg("heuristic") = true,
        py::arg("log") = false,
        "Solve to proven optimality; returns the report as a JSON string.");

    m.def("brute_force_opt", [](const Instance& inst) {
        Solution s = polylab::brute_force_opt(inst);
        return py::make_tuple(solution_cost(inst, s),
                              solution_to_json(inst, s));
    });

    m.def("check_solution",
          [](const Instance& inst, const std::string& solution_json) {
              Solution s = solution_from_json(solution_json);
              return check_feasible(inst, s);
          });

    m.def("separate",
          [](const Instance& inst, const std::vector<double>& values) {
              cuts::FractionalPoint p;
              p.inst = &inst;
              p.v = values;
              std::vector<std::pair<std::string, double>> out;
              auto take = [&](std::vector<cuts::Cut> cs) {
                  for (auto& c : cs)
                      out.emplace_back(cuts::family_name(c.family),
                                       c.violation);
              };
              take(cuts::sep_pairs(p));
              take(cuts::sep_sec(p));
              take(cuts::sep_pec_2path(p));
              take(cuts::sep_pec_long(p));
              take(cuts::sep_two_matching(p));
              return out;
          },
          "All violated cuts at a fractional point as (family, violation).");

    m.def("verify_dimension", [](int u, int n) {
        auto rep = polylab::verify_dimension(u, n);
        return py::dict(py::arg("u") = rep.u, py::arg("n") = rep.n,
                        py::arg("m") = rep.m,
                        py::arg("dim_formula") = rep.dim_formula,
                        py::arg("dim_measured") = rep.dim_measured,
                        py::arg("pass") = rep.pass);
    });
}
