// Python bindings. Structured documents cross the boundary as JSON strings;
// the package __init__ turns them into dicts.

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "kocycle/homotopy.hpp"
#include "kocycle/kgraph.hpp"
#include "kocycle/ktheory.hpp"
#include "kocycle/skeleton.hpp"
#include "kocycle/unitary_cocycle.hpp"
#include "kocycle/validation.hpp"

namespace py = pybind11;
using namespace kocycle;

namespace {

using SkeletonPtr = std::shared_ptr<const Skeleton>;

nlohmann::json parse(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

IntMatrix to_int_matrix(const std::vector<std::vector<long long>>& rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.front().size();
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c)
      throw InvalidArgument("matrix rows must all have the same length");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

UnitaryCocycle cocycle_from(const SkeletonPtr& s, const std::string& text) {
  return UnitaryCocycle::from_json(s, parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "k-coloured skeletons, factorisation rules, unitary cocycles";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument",
                                          PyExc_ValueError);

  py::class_<Skeleton, std::shared_ptr<Skeleton>>(m, "Skeleton")
      .def(py::init([](const std::string& json_text) {
             return std::make_shared<Skeleton>(
                 Skeleton::from_json(parse(json_text)));
           }),
           py::arg("json_text"))
      .def_static(
          "load",
          [](const std::string& path) {
            return std::make_shared<Skeleton>(Skeleton::load(path));
          },
          py::arg("path"))
      .def_property_readonly("rank", &Skeleton::rank)
      .def_property_readonly("vertices",
                             [](const Skeleton& s) {
                               std::vector<std::string> out;
                               for (std::size_t v = 0; v < s.vertex_count();
                                    ++v)
                                 out.push_back(s.vertex_id(v));
                               return out;
                             })
      .def("adjacency",
           [](const Skeleton& s, int color) {
             CountMatrix m = adjacency_matrix(s, color);
             std::vector<std::vector<long long>> rows(
                 static_cast<std::size_t>(m.rows()));
             for (Eigen::Index r = 0; r < m.rows(); ++r)
               for (Eigen::Index c = 0; c < m.cols(); ++c)
                 rows[static_cast<std::size_t>(r)].push_back(m(r, c));
             return rows;
           },
           py::arg("color"))
      .def("to_json", [](const Skeleton& s) { return s.to_json().dump(); })
      .def("validate",
           [](const Skeleton& s) { return validate_skeleton(s).to_json().dump(); });

  m.def("tensor_rule",
        [](const SkeletonPtr& s) { return tensor_rule(*s).to_json(*s).dump(); },
        py::arg("skeleton"));

  m.def("validate_rule",
        [](const SkeletonPtr& s, const std::string& rule) {
          FactorisationRule r = FactorisationRule::from_json(*s, parse(rule));
          return validate_factorisation(*s, r).to_json().dump();
        },
        py::arg("skeleton"), py::arg("rule"));

  m.def("validate_phases",
        [](const SkeletonPtr& s, const std::string& rule,
           const std::string& phases) {
          FactorisationRule r = FactorisationRule::from_json(*s, parse(rule));
          CubicalCocycle phi = CubicalCocycle::from_json(*s, parse(phases));
          return validate_cubical_cocycle(*s, r, phi).to_json().dump();
        },
        py::arg("skeleton"), py::arg("rule"), py::arg("phases"));

  m.def("constant_phases",
        [](const SkeletonPtr& s, std::complex<double> z) {
          return constant_cocycle(*s, z).to_json(*s).dump();
        },
        py::arg("skeleton"), py::arg("z"));

  m.def("enumerate_rules",
        [](const SkeletonPtr& s, std::uint64_t limit) {
          EnumerationOptions opts;
          opts.limit = limit;
          std::vector<std::string> rules;
          EnumerationResult res = enumerate_factorisations(
              *s, opts,
              [&](const FactorisationRule& r) {
                rules.push_back(r.to_json(*s).dump());
              });
          const char* status =
              res.status == EnumerationStatus::Complete ? "complete"
              : res.status == EnumerationStatus::LimitReached ? "limit_reached"
                                                              : "truncated";
          return py::make_tuple(rules, std::string(status));
        },
        py::arg("skeleton"),
        py::arg("limit") = EnumerationOptions{}.limit);

  m.def("derive_cocycle",
        [](const SkeletonPtr& s, const std::string& rule,
           const std::string& phases) {
          FactorisationRule r = FactorisationRule::from_json(*s, parse(rule));
          CubicalCocycle phi = CubicalCocycle::from_json(*s, parse(phases));
          return from_kgraph(s, r, phi).to_json().dump();
        },
        py::arg("skeleton"), py::arg("rule"), py::arg("phases"));

  m.def("random_cocycle",
        [](const SkeletonPtr& s, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          return random_unitary_family(s, rng).to_json().dump();
        },
        py::arg("skeleton"), py::arg("seed") = 0);

  m.def("cocycle_residual",
        [](const SkeletonPtr& s, const std::string& unitary) {
          return cocycle_residual(cocycle_from(s, unitary));
        },
        py::arg("skeleton"), py::arg("unitary"));

  m.def("residual_report",
        [](const SkeletonPtr& s, const std::string& unitary) {
          return residual_report(cocycle_from(s, unitary)).to_json(*s).dump();
        },
        py::arg("skeleton"), py::arg("unitary"));

  m.def("gauge_orbit_sample",
        [](const SkeletonPtr& s, const std::string& unitary,
           std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          Gauge q = Gauge::random(*s, rng);
          return gauge_transform(cocycle_from(s, unitary), q).to_json().dump();
        },
        py::arg("skeleton"), py::arg("unitary"), py::arg("seed") = 0);

  m.def("geodesic",
        [](const SkeletonPtr& s, const std::string& u0, const std::string& u1,
           int samples) {
          return geodesic_path(cocycle_from(s, u0), cocycle_from(s, u1),
                               samples)
              .to_json()
              .dump();
        },
        py::arg("skeleton"), py::arg("u0"), py::arg("u1"),
        py::arg("samples") = 64);

  m.def("search_path",
        [](const SkeletonPtr& s, const std::string& u0, const std::string& u1,
           int samples, double tol, std::uint64_t seed) {
          PathSearchOptions opts;
          opts.samples = samples;
          opts.tol = tol;
          opts.seed = seed;
          PathSearchResult res =
              path_search(cocycle_from(s, u0), cocycle_from(s, u1), opts);
          std::string doc = res.success ? res.path.to_json().dump()
                                        : res.failure_report().dump();
          return py::make_tuple(res.success, doc, res.message);
        },
        py::arg("skeleton"), py::arg("u0"), py::arg("u1"),
        py::arg("samples") = 64, py::arg("tol") = 1e-8, py::arg("seed") = 0);

  m.def("ktheory",
        [](const std::vector<std::vector<long long>>& m1,
           const std::vector<std::vector<long long>>& m2) {
          return ktheory_2graph(to_int_matrix(m1), to_int_matrix(m2))
              .to_json()
              .dump();
        },
        py::arg("m1"), py::arg("m2"));

  m.def("smith",
        [](const std::vector<std::vector<long long>>& rows) {
          SmithDecomposition snf = smith_normal_form(to_int_matrix(rows));
          std::vector<std::string> factors;
          for (const BigInt& f : snf.invariant_factors())
            factors.push_back(f.str());
          auto dump = [](const IntMatrix& m) {
            nlohmann::json out = nlohmann::json::array();
            for (std::size_t r = 0; r < m.rows(); ++r) {
              nlohmann::json row = nlohmann::json::array();
              for (std::size_t c = 0; c < m.cols(); ++c)
                row.push_back(m(r, c).str());
              out.push_back(row);
            }
            return out;
          };
          nlohmann::json doc = {{"d", dump(snf.d)},
                                {"l", dump(snf.l)},
                                {"r", dump(snf.r)},
                                {"invariant_factors", factors}};
          return doc.dump();
        },
        py::arg("matrix"));
}
