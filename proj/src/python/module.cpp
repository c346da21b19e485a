#include <iostream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hofa/cli.hpp"
#include "hofa/io.hpp"
#include "hofa/tester.hpp"

namespace py = pybind11;
using namespace hofa;

namespace {

FunctionTable make_table(const std::string& kind, int p, int n, const py::object& values) {
  const Kind k = parse_kind(kind);
  if (k == Kind::Torus) {
    std::vector<TorusValue> vals;
    for (const auto& v : values) vals.push_back(TorusValue::parse(p, v.cast<std::string>()));
    return FunctionTable::torus(p, n, std::move(vals));
  }
  if (k == Kind::Complex)
    return FunctionTable::complex_(p, n, values.cast<std::vector<std::complex<double>>>());
  auto vals = values.cast<std::vector<double>>();
  switch (k) {
    case Kind::Boolean: return FunctionTable::boolean(p, n, std::move(vals));
    case Kind::Unit: return FunctionTable::unit(p, n, std::move(vals));
    default: return FunctionTable::signed_(p, n, std::move(vals));
  }
}

py::object table_values(const FunctionTable& f) {
  if (f.kind() == Kind::Torus) {
    py::list out;
    for (const auto& v : f.torus_values()) out.append(v.str());
    return out;
  }
  if (f.kind() == Kind::Complex) return py::cast(f.cplx());
  return py::cast(f.real());
}

py::dict gowers_dict(const GowersEstimate& g) {
  py::dict d;
  d["value"] = g.value;
  d["pre_root"] = g.pre_root;
  d["order"] = g.order;
  d["exact"] = g.exact;
  d["samples"] = g.samples;
  d["half_width"] = g.half_width;
  return d;
}

py::dict verdict_dict(const TesterVerdict& v) {
  py::dict d;
  d["decision"] = decision_name(v.decision);
  d["acceptance"] = v.acceptance;
  d["half_width"] = v.half_width;
  d["queries"] = v.queries;
  d["trials"] = v.trials;
  d["surrogate"] = v.surrogate;
  py::list t;
  for (const auto& rec : v.transcript) {
    py::dict e;
    e["index"] = rec.index;
    e["outcome"] = decision_name(rec.outcome);
    e["note"] = rec.note;
    t.append(e);
  }
  d["transcript"] = t;
  d["exit_code"] = v.exit_code();
  return d;
}

py::dict trace_dict(const DriveTrace& t) {
  py::dict d;
  d["sampled"] = t.sampled;
  d["accepted"] = t.accepted;
  d["norms"] = t.norms;
  d["l1_moved"] = t.l1_moved;
  d["reached_goal"] = t.reached_goal;
  return d;
}

std::vector<LinearForm> make_forms(const std::vector<std::vector<int>>& rows) {
  std::vector<LinearForm> forms;
  for (const auto& row : rows) {
    LinearForm L;
    for (int c : row) L.coeffs.push_back(static_cast<std::uint8_t>(c));
    forms.push_back(std::move(L));
  }
  return forms;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact-arithmetic toolkit for uniformity norms, non-classical polynomials, "
            "polynomial factors, restriction distributions, and property testers over F_p^n";

  // Translators run newest-first, so the base class is registered first and
  // the most derived kinds last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<QueryCapError>(m, "QueryCapError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ShiftError>(m, "ShiftError", PyExc_ValueError);

  py::class_<FunctionTable>(m, "Table")
      .def_property_readonly("kind", [](const FunctionTable& f) { return kind_name(f.kind()); })
      .def_property_readonly("p", [](const FunctionTable& f) { return f.dom().p(); })
      .def_property_readonly("n", [](const FunctionTable& f) { return f.dom().n(); })
      .def("__len__", &FunctionTable::size)
      .def("values", &table_values)
      .def("text", &table_to_text);

  m.def("table", &make_table, py::arg("kind"), py::arg("p"), py::arg("n"), py::arg("values"),
        "build a function table; torus values as strings, others as numbers");
  m.def("table_from_text", [](const std::string& text) { return table_from_text(text); });
  m.def("phase", &phase_table, "lift a torus table to the complex phase e(2 pi i x)");
  m.def("norm_l1", &norm_l1);
  m.def("norm_l2_sq", &norm_l2);
  m.def("norm_linf", &norm_linf);

  py::class_<NcPolynomial>(m, "Poly")
      .def(py::init<int, int>(), py::arg("p"), py::arg("n"))
      .def_static("parse", &NcPolynomial::parse, py::arg("p"), py::arg("n"), py::arg("text"))
      .def_property_readonly("p", &NcPolynomial::p)
      .def_property_readonly("n", &NcPolynomial::n)
      .def("degree", &NcPolynomial::degree)
      .def("depth", &NcPolynomial::depth)
      .def("table",
           [](const NcPolynomial& P) {
             py::list out;
             for (const auto& v : P.evaluate_table()) out.append(v.str());
             return out;
           })
      .def("__str__", &NcPolynomial::str)
      .def("__eq__", [](const NcPolynomial& a, const NcPolynomial& b) { return a == b; });

  m.def("interpolate",
        [](int p, int n, const std::vector<std::string>& values) {
          std::vector<TorusValue> tab;
          for (const auto& s : values) tab.push_back(TorusValue::parse(p, s));
          return interpolate(p, n, tab);
        },
        py::arg("p"), py::arg("n"), py::arg("values"),
        "exact canonical-form fit of a torus table given as strings");

  m.def("gowers_exact",
        [](const FunctionTable& f, int d, std::uint64_t budget, int threads) {
          return gowers_dict(gowers_norm_exact(f, d, budget, threads));
        },
        py::arg("f"), py::arg("d"), py::arg("budget") = kDefaultOpBudget,
        py::arg("threads") = 1);
  m.def("gowers_mc",
        [](const FunctionTable& f, int d, std::uint64_t samples, std::uint64_t seed) {
          return gowers_dict(gowers_norm_mc(f, d, samples, seed));
        },
        py::arg("f"), py::arg("d"), py::arg("samples"), py::arg("seed") = 0);

  m.def("atom_report",
        [](const std::vector<NcPolynomial>& polys) {
          const AtomDistribution ad = atom_distribution_report(PolyFactor(polys));
          py::dict d;
          d["order"] = ad.order;
          d["points"] = ad.points;
          d["deviation"] = ad.max_deviation;
          py::dict rows;
          for (const auto& [label, count] : ad.nonempty) rows[py::str(label)] = count;
          d["nonempty"] = rows;
          return d;
        },
        py::arg("polys"));

  m.def("rank_search",
        [](const std::vector<NcPolynomial>& polys, int r_max, std::uint64_t budget,
           int threads) {
          const RankReport rr = factor_rank_search(PolyFactor(polys), r_max, budget, threads);
          py::dict d;
          switch (rr.kind) {
            case RankReport::Kind::Exact: d["kind"] = "exact"; break;
            case RankReport::Kind::Infinite: d["kind"] = "infinite"; break;
            case RankReport::Kind::AtMost: d["kind"] = "at_most"; break;
            case RankReport::Kind::AtLeast: d["kind"] = "at_least"; break;
            default: d["kind"] = "inconclusive";
          }
          d["r"] = rr.r;
          d["summary"] = rr.str();
          return d;
        },
        py::arg("polys"), py::arg("r_max") = 3, py::arg("budget") = kDefaultOpBudget,
        py::arg("threads") = 1);

  m.def("dependency",
        [](int p, const std::vector<std::vector<int>>& forms, int d, int h, int n_check,
           std::uint64_t budget) {
          const DependencySet dep = dependency_set(p, make_forms(forms), d, h, n_check, budget);
          py::dict out;
          out["modulus"] = dep.modulus();
          out["lambdas"] = dep.lambdas;
          out["consistent_count"] = dep.consistent_count();
          return out;
        },
        py::arg("p"), py::arg("forms"), py::arg("d"), py::arg("h") = 0, py::arg("n_check") = 2,
        py::arg("budget") = kDefaultOpBudget);

  py::class_<RestrictionDistribution>(m, "Distribution")
      .def_readonly("p", &RestrictionDistribution::p)
      .def_readonly("m", &RestrictionDistribution::m)
      .def_readonly("exact", &RestrictionDistribution::exact)
      .def_readonly("samples", &RestrictionDistribution::samples)
      .def("total", &RestrictionDistribution::total)
      .def("mass",
           [](const RestrictionDistribution& mu) {
             py::dict out;
             for (const auto& [bits, prob] : mu.mass) out[py::str(mu.table_str(bits))] = prob;
             return out;
           })
      .def("to_json", [](const RestrictionDistribution& mu) {
        return dump_json(distribution_to_json(mu), FloatStyle::Shortest);
      });

  m.def("restriction",
        [](const FunctionTable& f, int mm, std::uint64_t trials, std::uint64_t seed,
           std::uint64_t budget) {
          if (trials == 0) return restriction_distribution(f, mm, nullptr, 0, budget);
          Rng rng(seed);
          return restriction_distribution(f, mm, &rng, trials, budget);
        },
        py::arg("f"), py::arg("m"), py::arg("trials") = 0, py::arg("seed") = 0,
        py::arg("budget") = kDefaultOpBudget);
  m.def("tv", &tv_distance, py::arg("a"), py::arg("b"));
  m.def("distribution_from_json", [](const std::string& text) {
    return distribution_from_json(nlohmann::json::parse(text));
  });

  py::class_<RegularityInstance>(m, "Instance")
      .def(py::init<>())
      .def_readwrite("gamma", &RegularityInstance::gamma)
      .def_readwrite("d", &RegularityInstance::d)
      .def_readwrite("degrees", &RegularityInstance::degrees)
      .def_readwrite("depths", &RegularityInstance::depths)
      .def_readwrite("rank", &RegularityInstance::rank)
      .def_property_readonly("C", &RegularityInstance::complexity)
      .def("complexity_measure", &RegularityInstance::complexity_measure)
      .def("validate", &RegularityInstance::validate)
      .def("lint", &RegularityInstance::lint)
      .def("to_json", [](const RegularityInstance& I) {
        return dump_json(instance_to_json(I), FloatStyle::Shortest);
      });

  m.def("instance_from_json",
        [](const std::string& text) { return instance_from_json(nlohmann::json::parse(text)); });
  m.def("low_degree_family", &low_degree_family, py::arg("p"), py::arg("d"), py::arg("gamma"));
  m.def("instance_mu",
        [](const RegularityInstance& I, int mm, int n_check, std::uint64_t budget) {
          return instance_distribution(I, mm, n_check, budget);
        },
        py::arg("instance"), py::arg("m"), py::arg("n_check") = 2,
        py::arg("budget") = kDefaultOpBudget);

  m.def("search_witness",
        [](const FunctionTable& f, const RegularityInstance& I, std::uint64_t budget,
           int threads) {
          const WitnessSearchResult r = search_witness(f, I, budget, threads);
          py::dict d;
          d["tuples_tried"] = r.tuples_tried;
          d["exhausted"] = r.exhausted;
          d["found"] = r.best.has_value();
          if (r.best) {
            d["satisfied"] = r.best->satisfied;
            d["residual_l1"] = r.best->residual_l1;
            d["residual_norm"] = r.best->residual_norm.value;
            py::list polys;
            for (const auto& P : r.best->witness.polys) polys.append(P.str());
            d["polys"] = polys;
            py::list shifts;
            for (std::size_t i = 0; i < r.best->witness.polys.size(); ++i)
              shifts.append(r.best->witness.shift(i).str());
            d["shifts"] = shifts;
          }
          return d;
        },
        py::arg("f"), py::arg("instance"), py::arg("budget") = kDefaultOpBudget,
        py::arg("threads") = 1);

  m.def("drive",
        [](const FunctionTable& f, const FunctionTable& target, double delta, double gamma,
           int d, std::uint64_t samples, std::uint64_t seed, std::uint64_t budget, int threads) {
          Rng rng(seed);
          auto [moved, trace] =
              small_perturbation_drive(f, target, delta, gamma, d, samples, rng, budget, threads);
          return py::make_tuple(std::move(moved), trace_dict(trace));
        },
        py::arg("f"), py::arg("target"), py::arg("delta"), py::arg("gamma") = 0.1,
        py::arg("d") = 2, py::arg("samples") = 200, py::arg("seed") = 0,
        py::arg("budget") = kDefaultOpBudget, py::arg("threads") = 1);

  m.def("degree_rejection",
        [](const FunctionTable& f, int d, std::uint64_t budget, int threads) {
          return degree_rejection_exact(f, d, budget, threads);
        },
        py::arg("f"), py::arg("d"), py::arg("budget") = kDefaultOpBudget, py::arg("threads") = 1);

  m.def("test_degree",
        [](const FunctionTable& f, int d, std::uint64_t reps, std::uint64_t seed,
           std::optional<std::uint64_t> cap) {
          QueryOracle oracle(f, cap);
          Rng rng(seed);
          return verdict_dict(classical_degree_tester(oracle, d, reps, rng));
        },
        py::arg("f"), py::arg("d"), py::arg("reps") = 100, py::arg("seed") = 0,
        py::arg("cap") = std::nullopt);

  m.def("test_instance",
        [](const FunctionTable& f, const RegularityInstance& I, double eps, double delta, int mm,
           std::uint64_t witness_budget, std::uint64_t seed, std::uint64_t trials,
           std::uint64_t drive_samples, int threads, std::optional<std::uint64_t> cap) {
          QueryOracle oracle(f, cap);
          Rng rng(seed);
          return verdict_dict(instance_tester(oracle, I, eps, delta, mm, witness_budget, rng,
                                              trials, drive_samples, threads));
        },
        py::arg("f"), py::arg("instance"), py::arg("eps"), py::arg("delta"), py::arg("m"),
        py::arg("witness_budget") = kDefaultOpBudget, py::arg("seed") = 0, py::arg("trials") = 1,
        py::arg("drive_samples") = 200, py::arg("threads") = 1, py::arg("cap") = std::nullopt);

  m.def("test_family",
        [](const FunctionTable& f, const std::vector<RegularityInstance>& family, double eps,
           int mm, std::uint64_t witness_budget, std::uint64_t seed, std::uint64_t drive_samples,
           int threads, std::optional<std::uint64_t> cap) {
          QueryOracle oracle(f, cap);
          Rng rng(seed);
          return verdict_dict(
              family_tester(oracle, family, eps, mm, witness_budget, rng, drive_samples, threads));
        },
        py::arg("f"), py::arg("family"), py::arg("eps"), py::arg("m"),
        py::arg("witness_budget") = kDefaultOpBudget, py::arg("seed") = 0,
        py::arg("drive_samples") = 200, py::arg("threads") = 1, py::arg("cap") = std::nullopt);

  m.def("repetitions_for_majority", &repetitions_for_majority, py::arg("single_fail"),
        py::arg("target"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::vector<const char*> argv;
          argv.push_back("hofa");
          for (const auto& a : args) argv.push_back(a.c_str());
          const int code = run_cli(static_cast<int>(argv.size()), argv.data());
          std::cout.flush();  // hand the report to the embedding process now
          return code;
        },
        py::arg("args"), "run a CLI subcommand in-process; prints the report on stdout");
}
