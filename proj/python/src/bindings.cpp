#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jetcount/diagnostics.hpp"
#include "jetcount/presburger.hpp"
#include "jetcount/residue.hpp"

namespace py = pybind11;
using namespace jetcount;

namespace {

py::object to_py_int(const Int& z) {
    return py::module_::import("builtins").attr("int")(z.get_str());
}

py::object to_py_fraction(const Rat& r) {
    // deliberately leaked so no python object outlives the interpreter
    static auto* fraction =
        new py::object(py::module_::import("fractions").attr("Fraction"));
    return (*fraction)(to_py_int(r.get_num()), to_py_int(r.get_den()));
}

Int int_from_py(const py::object& o) {
    return Int(py::cast<std::string>(py::str(o)));
}

Rat rat_from_py(const py::object& o) {
    if (py::hasattr(o, "numerator") && py::hasattr(o, "denominator")) {
        Rat r(int_from_py(o.attr("numerator")), int_from_py(o.attr("denominator")));
        r.canonicalize();
        return r;
    }
    return Rat(int_from_py(o));
}

std::vector<Int> point_from_py(const py::sequence& seq) {
    std::vector<Int> out;
    for (auto item : seq) out.push_back(int_from_py(py::reinterpret_borrow<py::object>(item)));
    return out;
}

CountMethod method_from_name(const std::string& name) {
    if (name == "naive") return CountMethod::Naive;
    if (name == "tree") return CountMethod::Tree;
    if (name == "auto") return CountMethod::Auto;
    throw ValidationError("unknown method '" + name + "'");
}

const char* method_name(CountMethod m) {
    switch (m) {
        case CountMethod::Naive: return "naive";
        case CountMethod::Tree: return "tree";
        case CountMethod::Auto: return "auto";
    }
    return "auto";
}

py::dict count_result_dict(const CountResult& r) {
    py::dict d;
    d["count"] = to_py_int(r.count);
    d["nodes_visited"] = r.nodes_visited;
    d["method"] = method_name(r.method_used);
    d["wall_seconds"] = r.wall_seconds;
    return d;
}

py::dict record_dict(const GHRecord& r) {
    py::dict d;
    d["p"] = r.p;
    d["k"] = r.k;
    py::list y;
    for (const auto& yi : r.y) y.append(to_py_int(yi));
    d["y"] = y;
    d["raw_count"] = to_py_int(r.raw_count);
    d["singular_count"] = to_py_int(r.singular_count);
    d["g"] = to_py_fraction(r.g);
    d["h"] = to_py_fraction(r.h);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "jet prolongations, Z/p^k point counting, and g/h diagnostics";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

    py::class_<IntPoly>(m, "Poly")
        .def("__str__", &IntPoly::to_string)
        .def("__repr__", [](const IntPoly& f) { return "Poly(" + f.to_string() + ")"; })
        .def("__eq__", [](const IntPoly& a, const IntPoly& b) { return a == b; })
        .def_property_readonly("variables", [](const IntPoly& f) { return f.vars(); })
        .def_property_readonly("degree", &IntPoly::degree)
        .def("partial_derivative",
             py::overload_cast<const std::string&>(&IntPoly::partial_derivative, py::const_))
        .def("jet_coefficient",
             [](const IntPoly& f, unsigned u, unsigned k) { return jet_coefficient(f, u, k); },
             py::arg("u"), py::arg("k"))
        .def("eval_mod", [](const IntPoly& f, const py::sequence& point, const py::object& m) {
            return to_py_int(eval_mod(f, point_from_py(point), int_from_py(m)));
        });

    m.def("parse_poly", &parse_poly, py::arg("text"), py::arg("variables"));
    m.def("jet_variables", &jet_variables, py::arg("variables"), py::arg("k"));

    py::class_<AffineScheme>(m, "Scheme")
        .def(py::init([](const std::string& name, const std::vector<std::string>& vars,
                         const std::vector<std::string>& eqs, unsigned dim, bool ci) {
                 std::vector<IntPoly> polys;
                 for (const auto& e : eqs) polys.push_back(parse_poly(e, vars));
                 return make_scheme(name, vars, std::move(polys), dim, ci);
             }),
             py::arg("name"), py::arg("variables"), py::arg("equations"), py::arg("dim"),
             py::arg("ci") = false)
        .def_readonly("name", &AffineScheme::name)
        .def_readonly("variables", &AffineScheme::vars)
        .def_readonly("dim", &AffineScheme::declared_dim)
        .def_readonly("ci", &AffineScheme::complete_intersection)
        .def_property_readonly("equations",
                               [](const AffineScheme& s) {
                                   std::vector<std::string> out;
                                   for (const auto& f : s.equations)
                                       out.push_back(f.to_string());
                                   return out;
                               })
        .def("__repr__", [](const AffineScheme& s) { return "Scheme(" + s.name + ")"; });

    m.def("affine_space", &affine_space, py::arg("name"), py::arg("variables"));

    py::class_<PolyMorphism>(m, "Morphism")
        .def(py::init([](const AffineScheme& src, const AffineScheme& tgt,
                         const std::vector<std::string>& maps) {
                 std::vector<IntPoly> comps;
                 for (const auto& t : maps) comps.push_back(parse_poly(t, src.vars));
                 return make_morphism(src, tgt, std::move(comps));
             }),
             py::arg("source"), py::arg("target"), py::arg("maps"))
        .def_readonly("source", &PolyMorphism::source)
        .def_readonly("target", &PolyMorphism::target)
        .def_property_readonly("maps",
                               [](const PolyMorphism& phi) {
                                   std::vector<std::string> out;
                                   for (const auto& f : phi.components)
                                       out.push_back(f.to_string());
                                   return out;
                               })
        .def_property_readonly("relative_dim", &PolyMorphism::relative_dim);

    m.def("jet_prolong",
          [](const AffineScheme& x, unsigned k) { return jet_prolong(x, k).scheme; },
          py::arg("scheme"), py::arg("k"));
    m.def("jet_morphism",
          [](const PolyMorphism& phi, unsigned k) { return *jet_morphism(phi, k).morphism; },
          py::arg("morphism"), py::arg("k"));

    m.def("is_singular_point", &is_singular_point, py::arg("morphism"), py::arg("point"),
          py::arg("p"));
    m.def("singular_reduction_set",
          [](const PolyMorphism& phi, unsigned p, unsigned floor, std::uint64_t budget) {
              return singular_reduction_set(phi, p, floor, Budget{budget});
          },
          py::arg("morphism"), py::arg("p"), py::arg("prime_floor") = 3,
          py::arg("budget") = 100000000ull);
    m.def("validate_morphism", &validate_morphism, py::arg("morphism"), py::arg("p") = 97,
          py::arg("samples") = 64, py::arg("seed") = 1);

    m.def("count_points",
          [](const AffineScheme& x, unsigned p, unsigned k, const std::string& method,
             const std::string& ring, std::uint64_t budget) {
              Budget b{budget};
              CountResult res;
              if (ring == "tseries")
                  res = count_points_jetring(x, p, k, b);
              else if (method_from_name(method) == CountMethod::Naive)
                  res = count_points_naive(x, p, k, b);
              else
                  res = count_points_tree(x, p, k, b);
              return count_result_dict(res);
          },
          py::arg("scheme"), py::arg("p"), py::arg("k"), py::arg("method") = "auto",
          py::arg("ring") = "zpk", py::arg("budget") = 100000000ull);

    m.def("count_fiber",
          [](const PolyMorphism& phi, const py::sequence& y, unsigned p, unsigned k,
             const std::string& filter, const std::string& method, std::uint64_t budget,
             unsigned floor) {
              FiberFilter ff = filter == "singular" ? FiberFilter::SingularReduction
                                                    : FiberFilter::All;
              return count_result_dict(count_fiber(phi, point_from_py(y), p, k, ff,
                                                   method_from_name(method), Budget{budget},
                                                   floor));
          },
          py::arg("morphism"), py::arg("y"), py::arg("p"), py::arg("k"),
          py::arg("filter") = "all", py::arg("method") = "auto",
          py::arg("budget") = 100000000ull, py::arg("prime_floor") = 3);

    m.def("g_value",
          [](const PolyMorphism& phi, const py::sequence& y, unsigned p, unsigned k,
             const std::string& method) {
              return to_py_fraction(
                  g_value(phi, point_from_py(y), p, k, method_from_name(method)));
          },
          py::arg("morphism"), py::arg("y"), py::arg("p"), py::arg("k"),
          py::arg("method") = "auto");
    m.def("h_value",
          [](const PolyMorphism& phi, const py::sequence& y, unsigned p, unsigned k,
             const std::string& method, unsigned floor) {
              return to_py_fraction(h_value(phi, point_from_py(y), p, k,
                                            method_from_name(method), Budget{}, floor));
          },
          py::arg("morphism"), py::arg("y"), py::arg("p"), py::arg("k"),
          py::arg("method") = "auto", py::arg("prime_floor") = 3);

    m.def("estimate_components",
          [](const AffineScheme& z, const std::vector<unsigned>& primes,
             std::uint64_t budget, unsigned floor) {
              auto est = estimate_components(z, primes, Budget{budget}, floor);
              py::dict d;
              d["primes"] = est.primes;
              py::list ratios;
              for (const auto& r : est.ratios) ratios.append(to_py_fraction(r));
              d["ratios"] = ratios;
              d["C"] = to_py_int(est.C);
              d["stable"] = est.stable;
              return d;
          },
          py::arg("scheme"), py::arg("primes"), py::arg("budget") = 100000000ull,
          py::arg("prime_floor") = 3);

    m.def("estimate_dimension",
          [](const AffineScheme& z, const std::vector<unsigned>& primes,
             std::uint64_t budget, unsigned floor) {
              auto est = estimate_dimension(z, primes, Budget{budget}, floor);
              py::dict d;
              d["slope"] = est.slope;
              d["residual"] = est.residual;
              d["lower_bound_only"] = est.lower_bound_only;
              return d;
          },
          py::arg("scheme"), py::arg("primes"), py::arg("budget") = 100000000ull,
          py::arg("prime_floor") = 3);

    m.def("langweil_check",
          [](const AffineScheme& z, const py::object& c, const std::vector<unsigned>& primes,
             std::uint64_t budget, unsigned floor) {
              auto rep = langweil_check(z, int_from_py(c), primes, Budget{budget}, floor);
              py::dict d;
              d["C"] = to_py_int(rep.C);
              d["max_scaled"] = rep.max_scaled;
              py::list rows;
              for (const auto& row : rep.rows) {
                  py::dict rd;
                  rd["p"] = row.p;
                  rd["count"] = to_py_int(row.count);
                  rd["ratio"] = to_py_fraction(row.ratio);
                  rd["deviation"] = to_py_fraction(row.deviation);
                  rd["scaled"] = row.scaled;
                  rows.append(rd);
              }
              d["rows"] = rows;
              return d;
          },
          py::arg("scheme"), py::arg("C"), py::arg("primes"),
          py::arg("budget") = 100000000ull, py::arg("prime_floor") = 3);

    py::class_<GHTable>(m, "Table")
        .def_property_readonly("rows",
                               [](const GHTable& t) {
                                   py::list out;
                                   for (const auto& r : t.rows) out.append(record_dict(r));
                                   return out;
                               })
        .def_readonly("truncated", &GHTable::truncated)
        .def_readonly("notes", &GHTable::notes)
        .def("to_csv", &table_to_csv);

    m.def("scan_gh",
          [](const PolyMorphism& phi, const std::vector<unsigned>& primes, unsigned k_max,
             std::uint64_t cap, std::uint64_t seed, std::uint64_t budget, unsigned floor,
             const std::string& method, unsigned jobs, const std::string& label) {
              ScanSpec spec;
              spec.morphism = phi;
              spec.label = label;
              spec.primes = primes;
              spec.k_max = k_max;
              spec.fiber_cap = cap;
              spec.seed = seed;
              spec.budget = Budget{budget};
              spec.prime_floor = floor;
              spec.method = method_from_name(method);
              spec.jobs = jobs;
              return scan_gh(spec);
          },
          py::arg("morphism"), py::arg("primes"), py::arg("k_max"), py::arg("cap") = 200,
          py::arg("seed") = 0, py::arg("budget") = 100000000ull,
          py::arg("prime_floor") = 3, py::arg("method") = "auto", py::arg("jobs") = 1,
          py::arg("label") = "scan");

    auto verdict_json = [](const Verdict& v, const GHTable& t) {
        py::object loads = py::module_::import("json").attr("loads");
        return loads(verdict_to_json_text(v, t));
    };
    m.def("frs_diagnostic",
          [verdict_json](const GHTable& t) { return verdict_json(frs_diagnostic(t), t); });
    m.def("esmooth_diagnostic", [verdict_json](const GHTable& t) {
        return verdict_json(esmooth_diagnostic(t), t);
    });
    m.def("jetflat_diagnostic", [verdict_json](const GHTable& t, unsigned dim_y) {
        return verdict_json(jetflat_diagnostic(t, dim_y), t);
    }, py::arg("table"), py::arg("dim_y"));

    m.def("parse_definition_file",
          [](const std::string& text) {
              auto defs = parse_definition_file(text);
              py::dict schemes, morphisms;
              for (const auto& [name, s] : defs.schemes) schemes[name.c_str()] = s;
              for (const auto& [name, phi] : defs.morphisms) morphisms[name.c_str()] = phi;
              py::dict out;
              out["schemes"] = schemes;
              out["morphisms"] = morphisms;
              return out;
          },
          py::arg("text"));

    py::class_<MotivicSummand>(m, "MotivicSummand")
        .def(py::init([](const AffineScheme& scheme, std::size_t param_count,
                         const ConstructibleFunction& factor) {
                 return MotivicSummand{scheme, param_count, factor};
             }),
             py::arg("scheme"), py::arg("param_count"), py::arg("factor"));

    m.def("eval_motivic",
          [](const std::vector<MotivicSummand>& summands, unsigned p,
             const py::sequence& params, const py::object& s, unsigned floor) {
              MotivicFunctionDesc desc{summands};
              return to_py_fraction(
                  eval_motivic(desc, p, point_from_py(params), int_from_py(s), Budget{}, floor));
          },
          py::arg("summands"), py::arg("p"), py::arg("params"), py::arg("s"),
          py::arg("prime_floor") = 3);

    py::class_<ConstructibleFunction>(m, "Constructible")
        .def("__str__", &constructible_to_text)
        .def("__repr__", [](const ConstructibleFunction& f) {
            return "Constructible(" + constructible_to_text(f) + ")";
        });

    m.def("parse_constructible", &parse_constructible, py::arg("text"));
    m.def("eval_constructible",
          [](const ConstructibleFunction& f, const py::object& q, const py::object& s) {
              return to_py_fraction(eval_constructible(f, rat_from_py(q), int_from_py(s)));
          },
          py::arg("f"), py::arg("q"), py::arg("s"));
    m.def("classify_nonneg",
          [](const ConstructibleFunction& f) {
              auto rep = classify_nonneg(f);
              py::dict d;
              switch (rep.answer) {
                  case NonnegAnswer::Yes: d["answer"] = "yes"; break;
                  case NonnegAnswer::Unknown: d["answer"] = "unknown"; break;
                  case NonnegAnswer::Counterexample:
                      d["answer"] = "counterexample";
                      d["s"] = to_py_int(rep.s);
                      d["q"] = to_py_fraction(rep.q);
                      d["value"] = to_py_fraction(rep.value);
                      break;
              }
              return d;
          },
          py::arg("f"));
    m.def("sup_over_domain",
          [](const ConstructibleFunction& f, const py::object& q) {
              auto res = sup_over_domain(f, rat_from_py(q));
              py::dict d;
              d["bounded"] = res.bounded;
              if (res.bounded) {
                  d["sup"] = to_py_fraction(res.sup);
                  d["argmax"] = to_py_int(res.argmax);
                  d["tail_bound"] = to_py_int(res.tail_bound);
              } else {
                  d["witness_term"] = res.witness_term;
              }
              return d;
          },
          py::arg("f"), py::arg("q"));
}
