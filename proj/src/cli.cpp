#include "hofa/cli.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hofa/forms.hpp"
#include "hofa/io.hpp"
#include "hofa/tester.hpp"

namespace hofa {

namespace {

struct Ctx {
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultOpBudget;
  int threads = 1;
  bool timing = false;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  int code = 0;
};

std::string slurp(Ctx& ctx, const std::string& flag, const std::string& path) {
  std::string bytes = read_text_file(path);
  ctx.inputs[flag] = content_digest(bytes);
  return bytes;
}

FunctionTable load_table(Ctx& ctx, const std::string& flag, const std::string& path) {
  return table_from_text(slurp(ctx, flag, path));
}

PolyFile load_polys(Ctx& ctx, const std::string& flag, const std::string& path) {
  return polys_from_text(slurp(ctx, flag, path));
}

RegularityInstance load_instance(Ctx& ctx, const std::string& flag, const std::string& path) {
  return instance_from_json(nlohmann::json::parse(slurp(ctx, flag, path)));
}

std::vector<RegularityInstance> load_family(Ctx& ctx, const std::string& flag,
                                            const std::string& path) {
  return family_from_json(nlohmann::json::parse(slurp(ctx, flag, path)));
}

RestrictionDistribution load_distribution(Ctx& ctx, const std::string& flag,
                                          const std::string& path) {
  return distribution_from_json(nlohmann::json::parse(slurp(ctx, flag, path)));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    const std::size_t j = std::min(text.find(',', i), text.size());
    const std::string tok = text.substr(i, j - i);
    if (tok.empty()) throw ParseError("empty entry in integer list '" + text + "'");
    out.push_back(std::stoi(tok));
    i = j + 1;
  }
  return out;
}

nlohmann::json gowers_json(const GowersEstimate& g) {
  nlohmann::json r;
  r["value"] = g.value;
  r["pre_root"] = g.pre_root;
  r["order"] = g.order;
  r["exact"] = g.exact;
  r["samples"] = g.samples;
  r["half_width"] = g.half_width;
  return r;
}

nlohmann::json verdict_json(const TesterVerdict& v) {
  nlohmann::json r;
  r["decision"] = decision_name(v.decision);
  r["acceptance"] = v.acceptance;
  r["half_width"] = v.half_width;
  r["queries"] = v.queries;
  r["trials"] = v.trials;
  r["surrogate"] = v.surrogate;
  nlohmann::json t = nlohmann::json::array();
  for (const auto& rec : v.transcript) {
    nlohmann::json e;
    e["index"] = rec.index;
    e["outcome"] = decision_name(rec.outcome);
    e["note"] = rec.note;
    t.push_back(std::move(e));
  }
  r["transcript"] = std::move(t);
  return r;
}

std::string rank_kind_name(RankReport::Kind k) {
  switch (k) {
    case RankReport::Kind::Exact: return "exact";
    case RankReport::Kind::Infinite: return "infinite";
    case RankReport::Kind::AtMost: return "at_most";
    case RankReport::Kind::AtLeast: return "at_least";
    default: return "inconclusive";
  }
}

std::string clause_status_name(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::Pass: return "pass";
    case ClauseStatus::Fail: return "fail";
    default: return "inconclusive";
  }
}

std::optional<std::uint64_t> cap_opt(std::uint64_t cap) {
  return cap == 0 ? std::nullopt : std::optional<std::uint64_t>(cap);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  Ctx ctx;
  CLI::App app{"desk-scale toolkit for uniformity norms, non-classical polynomials, "
               "polynomial factors, restriction distributions, and property testers "
               "over F_p^n"};
  app.require_subcommand(1);
  app.add_option("--seed", ctx.seed, "master random seed (default 0)");
  app.add_option("--budget", ctx.budget, "cap on exponential enumeration cost");
  app.add_option("--threads", ctx.threads, "worker threads (default 1)");
  app.add_flag("--timing", ctx.timing, "include wall-clock timing in the report");

  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  // gowers
  struct {
    std::string fn;
    int order = 2;
    std::string mode = "exact";
    std::uint64_t trials = 4096;
    bool phase = false;
  } gw;
  {
    CLI::App* s = sub("gowers", "uniformity norm of a function table");
    s->add_option("--fn", gw.fn, "function file")->required();
    s->add_option("--order", gw.order, "norm order d >= 1")->required();
    s->add_option("--mode", gw.mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    s->add_option("--trials", gw.trials, "mc sample count (default 4096)");
    s->add_flag("--phase", gw.phase, "lift a torus table to e(2 pi i x) first");
    s->callback([&] {
      FunctionTable f = load_table(ctx, "fn", gw.fn);
      if (gw.phase) f = phase_table(f);
      const GowersEstimate est = gw.mode == "exact"
                                     ? gowers_norm_exact(f, gw.order, ctx.budget, ctx.threads)
                                     : gowers_norm_mc(f, gw.order, gw.trials, ctx.seed);
      ctx.results = gowers_json(est);
    });
  }

  // norms
  struct {
    std::string fn;
  } nm;
  {
    CLI::App* s = sub("norms", "mean absolute, mean square, and max norms");
    s->add_option("--fn", nm.fn, "function file")->required();
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", nm.fn);
      ctx.results["l1"] = norm_l1(f);
      ctx.results["l2_sq"] = norm_l2(f);
      ctx.results["linf"] = norm_linf(f);
    });
  }

  // poly-eval
  struct {
    std::string poly;
  } pe;
  {
    CLI::App* s = sub("poly-eval", "evaluate polynomials to torus tables");
    s->add_option("--poly", pe.poly, "polynomial file")->required();
    s->callback([&] {
      const PolyFile pf = load_polys(ctx, "poly", pe.poly);
      nlohmann::json vals = nlohmann::json::array();
      nlohmann::json degs = nlohmann::json::array();
      nlohmann::json deps = nlohmann::json::array();
      for (const auto& P : pf.polys) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& v : P.evaluate_table()) row.push_back(v.str());
        vals.push_back(std::move(row));
        degs.push_back(P.degree());
        deps.push_back(P.depth());
      }
      ctx.results["p"] = pf.p;
      ctx.results["n"] = pf.n;
      ctx.results["count"] = pf.polys.size();
      ctx.results["values"] = std::move(vals);
      ctx.results["degrees"] = std::move(degs);
      ctx.results["depths"] = std::move(deps);
    });
  }

  // poly-fit
  struct {
    std::string fn;
  } pf_opt;
  {
    CLI::App* s = sub("poly-fit", "interpolate a torus table to canonical form");
    s->add_option("--fn", pf_opt.fn, "torus function file")->required();
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", pf_opt.fn);
      const auto& tab = f.torus_values();
      const TorusValue shift = tab[0];
      std::vector<TorusValue> rest;
      rest.reserve(tab.size());
      for (const auto& v : tab) rest.push_back(v - shift);
      const NcPolynomial P = interpolate(f.dom().p(), f.dom().n(), rest);
      ctx.results["polynomial"] = P.str();
      ctx.results["degree"] = P.degree();
      ctx.results["depth"] = P.depth();
      ctx.results["shift"] = shift.str();
    });
  }

  // atoms
  struct {
    std::string factor;
  } at;
  {
    CLI::App* s = sub("atoms", "atom distribution of a polynomial factor");
    s->add_option("--factor", at.factor, "polynomial file")->required();
    s->callback([&] {
      const PolyFile pf = load_polys(ctx, "factor", at.factor);
      const PolyFactor B(pf.polys);
      const AtomDistribution ad = atom_distribution_report(B);
      ctx.results["order"] = ad.order;
      ctx.results["points"] = ad.points;
      ctx.results["deviation"] = ad.max_deviation;
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& [label, count] : ad.nonempty) {
        nlohmann::json e;
        e["label"] = label;
        e["count"] = count;
        rows.push_back(std::move(e));
      }
      ctx.results["nonempty"] = std::move(rows);
    });
  }

  // rank
  struct {
    std::string factor;
    int rmax = 3;
  } rk;
  {
    CLI::App* s = sub("rank", "budgeted factor rank search");
    s->add_option("--factor", rk.factor, "polynomial file")->required();
    s->add_option("--rmax", rk.rmax, "largest rank to search (default 3)");
    s->callback([&] {
      const PolyFile pf = load_polys(ctx, "factor", rk.factor);
      const PolyFactor B(pf.polys);
      const RankReport rr = factor_rank_search(B, rk.rmax, ctx.budget, ctx.threads);
      ctx.results["kind"] = rank_kind_name(rr.kind);
      ctx.results["r"] = rr.r;
      ctx.results["summary"] = rr.str();
      if (rr.required_budget) ctx.results["required_budget"] = rr.required_budget;
    });
  }

  // depset
  struct {
    std::string forms;
    int degree = 1;
    int depth = 0;
    int p = 2;
    int ncheck = 2;
  } ds;
  {
    CLI::App* s = sub("depset", "dependency set of linear forms at one degree and depth");
    s->add_option("--forms", ds.forms, "linear forms, e.g. '1,0;0,1;1,1'")->required();
    s->add_option("--degree", ds.degree, "slot degree")->required();
    s->add_option("--depth", ds.depth, "slot depth (default 0)");
    s->add_option("--p", ds.p, "prime modulus (default 2)");
    s->add_option("--ncheck", ds.ncheck, "certification dimension (default 2)");
    s->callback([&] {
      const std::vector<LinearForm> forms = parse_forms(ds.p, ds.forms);
      const DependencySet dep =
          dependency_set(ds.p, forms, ds.degree, ds.depth, ds.ncheck, ctx.budget, ctx.threads);
      ctx.results["modulus"] = dep.modulus();
      ctx.results["count"] = dep.lambdas.size();
      ctx.results["consistent_count"] = dep.consistent_count();
      ctx.results["n_check"] = dep.n_check;
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& lam : dep.lambdas) rows.push_back(lam);
      ctx.results["lambdas"] = std::move(rows);
    });
  }

  // consistent
  struct {
    std::string forms;
    std::string degrees;
    std::string depths;
    int p = 2;
    int ncheck = 2;
  } cs;
  {
    CLI::App* s = sub("consistent", "atom-label tuples consistent with linear forms");
    s->add_option("--forms", cs.forms, "linear forms, e.g. '1,0;0,1;1,1'")->required();
    s->add_option("--degrees", cs.degrees, "per-slot degrees, e.g. '1,2'")->required();
    s->add_option("--depths", cs.depths, "per-slot depths, e.g. '0,0'")->required();
    s->add_option("--p", cs.p, "prime modulus (default 2)");
    s->add_option("--ncheck", cs.ncheck, "certification dimension (default 2)");
    s->callback([&] {
      const std::vector<LinearForm> forms = parse_forms(cs.p, cs.forms);
      const ConsistentSet set = enumerate_consistent(cs.p, forms, parse_int_list(cs.degrees),
                                                     parse_int_list(cs.depths), cs.ncheck,
                                                     ctx.budget);
      ctx.results["conceivable"] = set.conceivable;
      ctx.results["count"] = set.tuples.size();
      nlohmann::json lam = nlohmann::json::array();
      for (const auto& dep : set.deps) lam.push_back(dep.lambdas.size());
      ctx.results["lambda_counts"] = std::move(lam);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& tuple : set.tuples) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& label : tuple) row.push_back(label_str(label));
        rows.push_back(std::move(row));
      }
      ctx.results["tuples"] = std::move(rows);
    });
  }

  // equidist
  struct {
    std::string factor;
    std::string forms;
    std::uint64_t trials = 0;
    int ncheck = 2;
  } eq;
  {
    CLI::App* s = sub("equidist", "joint atom distribution against the consistency formula");
    s->add_option("--factor", eq.factor, "polynomial file")->required();
    s->add_option("--forms", eq.forms, "linear forms")->required();
    s->add_option("--trials", eq.trials, "sampling trials (default 0: exact)");
    s->add_option("--ncheck", eq.ncheck, "certification dimension (default 2)");
    s->callback([&] {
      const PolyFile pf = load_polys(ctx, "factor", eq.factor);
      const PolyFactor B(pf.polys);
      const std::vector<LinearForm> forms = parse_forms(pf.p, eq.forms);
      Rng rng(ctx.seed);
      const EquidistReport er = equidistribution_report(B, forms, eq.trials ? &rng : nullptr,
                                                        eq.trials, eq.ncheck, ctx.budget);
      ctx.results["order"] = er.order;
      ctx.results["ell"] = er.ell;
      ctx.results["formula"] = er.formula;
      ctx.results["consistent_count"] = er.consistent_count;
      ctx.results["max_deviation"] = er.max_deviation;
      ctx.results["inconsistent_mass"] = er.inconsistent_mass;
      ctx.results["exact"] = er.exact;
      ctx.results["samples"] = er.samples;
    });
  }

  // mu
  struct {
    std::string fn;
    int m = 1;
    std::uint64_t trials = 0;
    std::string out;
  } mu;
  {
    CLI::App* s = sub("mu", "restriction distribution of a function table");
    s->add_option("--fn", mu.fn, "function file")->required();
    s->add_option("--m", mu.m, "restriction dimension")->required();
    s->add_option("--trials", mu.trials, "sampling trials (default 0: exact)");
    s->add_option("--out", mu.out, "write the distribution JSON to this path");
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", mu.fn);
      Rng rng(ctx.seed);
      const RestrictionDistribution dist =
          restriction_distribution(f, mu.m, mu.trials ? &rng : nullptr, mu.trials, ctx.budget);
      const nlohmann::json dj = distribution_to_json(dist);
      if (!mu.out.empty()) write_text_file(mu.out, dump_json(dj, FloatStyle::Shortest) + "\n");
      ctx.results["distribution"] = dj;
      ctx.results["total"] = dist.total();
    });
  }

  // mu-instance
  struct {
    std::string instance;
    int m = 1;
    int ncheck = 2;
    std::string out;
  } mi;
  {
    CLI::App* s = sub("mu-instance", "idealized restriction distribution of an instance");
    s->add_option("--instance", mi.instance, "instance JSON file")->required();
    s->add_option("--m", mi.m, "restriction dimension")->required();
    s->add_option("--ncheck", mi.ncheck, "certification dimension (default 2)");
    s->add_option("--out", mi.out, "write the distribution JSON to this path");
    s->callback([&] {
      const RegularityInstance I = load_instance(ctx, "instance", mi.instance);
      const RestrictionDistribution dist = instance_distribution(I, mi.m, mi.ncheck, ctx.budget);
      const nlohmann::json dj = distribution_to_json(dist);
      if (!mi.out.empty()) write_text_file(mi.out, dump_json(dj, FloatStyle::Shortest) + "\n");
      ctx.results["distribution"] = dj;
      ctx.results["total"] = dist.total();
    });
  }

  // tv
  struct {
    std::string a;
    std::string b;
  } tv;
  {
    CLI::App* s = sub("tv", "total variation distance between two distribution files");
    s->add_option("--a", tv.a, "distribution JSON file")->required();
    s->add_option("--b", tv.b, "distribution JSON file")->required();
    s->callback([&] {
      const RestrictionDistribution da = load_distribution(ctx, "a", tv.a);
      const RestrictionDistribution db = load_distribution(ctx, "b", tv.b);
      ctx.results["tv"] = tv_distance(da, db);
    });
  }

  // perturb
  struct {
    std::string fn;
    std::string target;
    double delta = 0.1;
    double gamma = 0.1;
    int order = 2;
    std::uint64_t samples = 200;
    std::string out;
  } pb;
  {
    CLI::App* s = sub("perturb", "drive a table toward a structured target by small steps");
    s->add_option("--fn", pb.fn, "function file")->required();
    s->add_option("--target", pb.target, "target function file")->required();
    s->add_option("--delta", pb.delta, "perturbation size")->required();
    s->add_option("--gamma", pb.gamma, "norm goal (default 0.1)");
    s->add_option("--order", pb.order, "Gowers order d (default 2)");
    s->add_option("--samples", pb.samples, "perturbation draws (default 200)");
    s->add_option("--out", pb.out, "write the moved table to this path");
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", pb.fn);
      const FunctionTable target = load_table(ctx, "target", pb.target);
      Rng rng(ctx.seed);
      const auto [moved, trace] = small_perturbation_drive(
          f, target, pb.delta, pb.gamma, pb.order, pb.samples, rng, ctx.budget, ctx.threads);
      if (!pb.out.empty()) write_text_file(pb.out, table_to_text(moved));
      ctx.results["sampled"] = trace.sampled;
      ctx.results["accepted"] = trace.accepted;
      ctx.results["l1_moved"] = trace.l1_moved;
      ctx.results["reached_goal"] = trace.reached_goal;
      ctx.results["norms"] = trace.norms;
    });
  }

  // test-degree
  struct {
    std::string fn;
    int degree = 1;
    std::uint64_t reps = 100;
    std::string mode = "sample";
    std::uint64_t cap = 0;
  } td;
  {
    CLI::App* s = sub("test-degree", "one-sided tester for classical degree <= d");
    s->add_option("--fn", td.fn, "function file (boolean or torus)")->required();
    s->add_option("--degree", td.degree, "degree bound d")->required();
    s->add_option("--reps", td.reps, "repetitions (default 100)");
    s->add_option("--mode", td.mode, "sample or exact")
        ->check(CLI::IsMember({"sample", "exact"}));
    s->add_option("--cap", td.cap, "query cap (default unlimited)");
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", td.fn);
      if (td.mode == "exact") {
        const double rej = degree_rejection_exact(f, td.degree, ctx.budget, ctx.threads);
        ctx.results["mode"] = "exact";
        ctx.results["rejection"] = rej;
        ctx.results["decision"] = rej == 0.0 ? "accept" : "reject";
        ctx.code = rej == 0.0 ? 0 : 1;
        return;
      }
      QueryOracle oracle(f, cap_opt(td.cap));
      Rng rng(ctx.seed);
      const TesterVerdict v = classical_degree_tester(oracle, td.degree, td.reps, rng);
      ctx.results = verdict_json(v);
      ctx.code = v.exit_code();
    });
  }

  // test-instance
  struct {
    std::string fn;
    std::string instance;
    double eps = 0.1;
    double delta = 0.025;
    int m = 1;
    std::uint64_t trials = 1;
    std::uint64_t witness_budget = 0;
    std::uint64_t drive_samples = 200;
    std::uint64_t cap = 0;
  } ti;
  {
    CLI::App* s = sub("test-instance", "surrogate tester for closeness to one instance");
    s->add_option("--fn", ti.fn, "function file (boolean or unit)")->required();
    s->add_option("--instance", ti.instance, "instance JSON file")->required();
    s->add_option("--eps", ti.eps, "distance parameter")->required();
    s->add_option("--delta", ti.delta, "closeness budget")->required();
    s->add_option("--m", ti.m, "restriction dimension")->required();
    s->add_option("--trials", ti.trials, "odd trial count (default 1)");
    s->add_option("--witness-budget", ti.witness_budget,
                  "witness search budget (default: --budget)");
    s->add_option("--drive-samples", ti.drive_samples, "perturbation draws (default 200)");
    s->add_option("--cap", ti.cap, "query cap (default unlimited)");
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", ti.fn);
      const RegularityInstance I = load_instance(ctx, "instance", ti.instance);
      QueryOracle oracle(f, cap_opt(ti.cap));
      Rng rng(ctx.seed);
      const std::uint64_t wb = ti.witness_budget ? ti.witness_budget : ctx.budget;
      const TesterVerdict v = instance_tester(oracle, I, ti.eps, ti.delta, ti.m, wb, rng,
                                              ti.trials, ti.drive_samples, ctx.threads);
      ctx.results = verdict_json(v);
      ctx.code = v.exit_code();
    });
  }

  // test-family
  struct {
    std::string fn;
    std::string family;
    int low_degree = -1;
    double family_gamma = 0.1;
    double eps = 0.1;
    int m = 1;
    std::uint64_t witness_budget = 0;
    std::uint64_t drive_samples = 200;
    std::uint64_t cap = 0;
  } tf;
  {
    CLI::App* s = sub("test-family", "amplified membership tester for an instance family");
    s->add_option("--fn", tf.fn, "function file (boolean or unit)")->required();
    s->add_option("--family", tf.family, "family JSON file");
    s->add_option("--low-degree", tf.low_degree,
                  "use the built-in low-degree family of this degree instead");
    s->add_option("--family-gamma", tf.family_gamma,
                  "gamma for the built-in family (default 0.1)");
    s->add_option("--eps", tf.eps, "distance parameter")->required();
    s->add_option("--m", tf.m, "restriction dimension")->required();
    s->add_option("--witness-budget", tf.witness_budget,
                  "witness search budget (default: --budget)");
    s->add_option("--drive-samples", tf.drive_samples, "perturbation draws (default 200)");
    s->add_option("--cap", tf.cap, "query cap (default unlimited)");
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", tf.fn);
      if (tf.family.empty() == (tf.low_degree < 0))
        throw ParseError("give exactly one of --family and --low-degree");
      const std::vector<RegularityInstance> family =
          tf.family.empty() ? low_degree_family(f.dom().p(), tf.low_degree, tf.family_gamma)
                            : load_family(ctx, "family", tf.family);
      QueryOracle oracle(f, cap_opt(tf.cap));
      Rng rng(ctx.seed);
      const std::uint64_t wb = tf.witness_budget ? tf.witness_budget : ctx.budget;
      const TesterVerdict v = family_tester(oracle, family, tf.eps, tf.m, wb, rng,
                                            tf.drive_samples, ctx.threads);
      ctx.results = verdict_json(v);
      ctx.results["family_size"] = family.size();
      ctx.code = v.exit_code();
    });
  }

  // validate-decomp
  struct {
    std::string fn;
    std::string f1;
    std::string f2;
    std::string f3;
    std::string factor;
    int order = 2;
    double zeta = 0.1;
    double eta = 0.1;
    int rank = 1;
  } vd;
  {
    CLI::App* s = sub("validate-decomp", "clause-by-clause check of f = f1 + f2 + f3");
    s->add_option("--fn", vd.fn, "function file")->required();
    s->add_option("--f1", vd.f1, "structured part file")->required();
    s->add_option("--f2", vd.f2, "small part file")->required();
    s->add_option("--f3", vd.f3, "uniform part file")->required();
    s->add_option("--factor", vd.factor, "polynomial file defining the factor")->required();
    s->add_option("--order", vd.order, "uniformity order d")->required();
    s->add_option("--zeta", vd.zeta, "mean-square bound on f2")->required();
    s->add_option("--eta", vd.eta, "order d+1 norm bound on f3")->required();
    s->add_option("--rank", vd.rank, "required factor rank")->required();
    s->callback([&] {
      const FunctionTable f = load_table(ctx, "fn", vd.fn);
      const FunctionTable f1 = load_table(ctx, "f1", vd.f1);
      const FunctionTable f2 = load_table(ctx, "f2", vd.f2);
      const FunctionTable f3 = load_table(ctx, "f3", vd.f3);
      const PolyFile pf = load_polys(ctx, "factor", vd.factor);
      const PolyFactor B(pf.polys);
      const DecompositionReport dr = validate_decomposition(
          f, f1, f2, f3, B, vd.order, vd.zeta, vd.eta, vd.rank, ctx.budget, ctx.threads);
      ctx.results["all_pass"] = dr.all_pass;
      nlohmann::json rows = nlohmann::json::array();
      bool any_fail = false, any_unsettled = false;
      for (const auto& c : dr.clauses) {
        nlohmann::json e;
        e["name"] = c.name;
        e["status"] = clause_status_name(c.status);
        e["measured"] = c.measured;
        rows.push_back(std::move(e));
        any_fail |= c.status == ClauseStatus::Fail;
        any_unsettled |= c.status == ClauseStatus::Inconclusive;
      }
      ctx.results["clauses"] = std::move(rows);
      ctx.code = any_fail ? 1 : any_unsettled ? 2 : 0;
    });
  }

  // report-embedding-stability
  struct {
    std::string factor;
    int m = 2;
    int trials = 100;
    int rmax = 3;
  } es;
  {
    CLI::App* s = sub("report-embedding-stability",
                      "degree, depth, and rank survival under random embeddings");
    s->add_option("--factor", es.factor, "polynomial file")->required();
    s->add_option("--m", es.m, "embedding dimension")->required();
    s->add_option("--trials", es.trials, "embeddings to draw (default 100)");
    s->add_option("--rmax", es.rmax, "rank search bound (default 3)");
    s->callback([&] {
      const PolyFile pf = load_polys(ctx, "factor", es.factor);
      const PolyFactor B(pf.polys);
      Rng rng(ctx.seed);
      const StabilityReport sr =
          embedding_stability_report(B, es.m, es.trials, rng, es.rmax, ctx.budget);
      ctx.results["trials"] = sr.trials;
      ctx.results["degree_drop"] = sr.degree_drop;
      ctx.results["depth_drop"] = sr.depth_drop;
      ctx.results["rank_drop"] = sr.rank_drop;
      ctx.results["rank_conclusive"] = sr.rank_conclusive;
    });
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  nlohmann::json report;
  report["command"] = app.get_subcommands().front()->get_name();
  nlohmann::json args = nlohmann::json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  report["argv"] = std::move(args);
  report["seed"] = ctx.seed;
  report["inputs"] = ctx.inputs;
  report["results"] = ctx.results;
  if (ctx.timing) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    report["timing"] = nlohmann::json{{"total_ms", ms}};
  }
  std::cout << dump_json(report, FloatStyle::Fixed12) << "\n";
  return ctx.code;
}

}  // namespace hofa
