#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "hofa/io.hpp"
#include "hofa/tester.hpp"

using namespace hofa;

// Each case below is one release gate. It computes a single aggregate verdict
// with its tolerances written out literally, prints one human-scannable line,
// and only then asserts, so a failing gate still reports its name.

namespace {

void report(int index, const char* name, bool ok) {
  std::printf("[acceptance] C%d %s: %s\n", index, name, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NcPolynomial coord(int p, int n, int i) {
  NcPolynomial P(p, n);
  std::vector<std::uint8_t> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i - 1)] = 1;
  P.set_coeff(e, TorusValue::iota(p, 1));
  return P;
}

NcPolynomial bilinear12(int p, int n) {
  NcPolynomial P(p, n);
  std::vector<std::uint8_t> e(static_cast<std::size_t>(n), 0);
  e[0] = e[1] = 1;
  P.set_coeff(e, TorusValue::iota(p, 1));
  return P;
}

FunctionTable torus_table(const NcPolynomial& P) {
  return FunctionTable::torus(P.p(), P.n(), P.evaluate_table());
}

FunctionTable random_boolean(int p, int n, Rng& rng) {
  Domain dom(p, n);
  std::vector<double> v(dom.size());
  for (auto& x : v) x = rng.below(2) ? 1.0 : 0.0;
  return FunctionTable::boolean(p, n, std::move(v));
}

RegularityInstance linear_instance(double gamma) {
  RegularityInstance I;
  I.gamma = gamma;
  I.gamma_table = GammaTable::identity(2, 0);
  I.d = 2;
  I.degrees = {1};
  I.depths = {0};
  return I;
}

FunctionTable structured_x1(int n) {
  return compose_gamma(GammaTable::identity(2, 0), PolyFactor({coord(2, n, 1)}));
}

// Exhaustive difference oracle, independent of the canonical-form grading:
// degree is the least d whose (d+1)-fold additive derivatives all vanish,
// depth the least h putting every table value inside U_{h+1}.
bool derivatives_vanish(const Domain& dom, const std::vector<TorusValue>& table, int k) {
  if (k == 0) {
    for (const auto& v : table)
      if (!v.is_zero()) return false;
    return true;
  }
  for (std::uint64_t h = 0; h < dom.size(); ++h) {
    std::vector<TorusValue> diff;
    diff.reserve(table.size());
    for (std::uint64_t x = 0; x < dom.size(); ++x)
      diff.push_back(table[dom.add(x, h)] - table[x]);
    if (!derivatives_vanish(dom, diff, k - 1)) return false;
  }
  return true;
}

int oracle_degree(const Domain& dom, const std::vector<TorusValue>& table) {
  for (int d = 0; d <= 8; ++d)
    if (derivatives_vanish(dom, table, d + 1)) return d;
  return -1;
}

int oracle_depth(const std::vector<TorusValue>& table) {
  int k_max = 1;
  for (const auto& v : table) k_max = std::max(k_max, v.k());
  return k_max - 1;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(HOFA_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WEXITSTATUS(status);
  return r;
}

// The argv echo at the top of a report is the only part allowed to differ
// between runs that vary --threads; everything from the command name on must
// match byte for byte.
std::string from_command_key(const std::string& report) {
  const auto pos = report.find("\"command\"");
  REQUIRE(pos != std::string::npos);
  return report.substr(pos);
}

void write_acceptance_fixtures() {
  static bool done = false;
  if (done) return;
  done = true;

  Rng rng(20260816);
  write_text_file("acc_ones.fpfn",
                  table_to_text(FunctionTable::constant(2, 4, Kind::Signed, 1.0)));
  write_text_file("acc_quad.fpfn", table_to_text(torus_table(bilinear12(2, 2))));
  write_text_file("acc_fit.fpfn", "fpfn 1 2 1 torus\n0/1 1/4\n");
  write_text_file("acc_factor.fppoly",
                  polys_to_text(2, 3, {coord(2, 3, 1), coord(2, 3, 2)}));
  write_text_file("acc_x1only.fppoly", polys_to_text(2, 3, {coord(2, 3, 1)}));
  write_text_file("acc_bool4.fpfn", table_to_text(random_boolean(2, 4, rng)));
  write_text_file("acc_bool6.fpfn", table_to_text(random_boolean(2, 6, rng)));
  write_text_file("acc_half6.fpfn",
                  table_to_text(FunctionTable::constant(2, 6, Kind::Unit, 0.5)));
  write_text_file("acc_boolx1_3.fpfn",
                  table_to_text(FunctionTable::boolean(2, 3, {0, 1, 0, 1, 0, 1, 0, 1})));
  write_text_file("acc_structured3.fpfn", table_to_text(structured_x1(3)));
  write_text_file("acc_structured6.fpfn", table_to_text(structured_x1(6)));
  write_text_file("acc_zero3.fpfn",
                  table_to_text(FunctionTable::constant(2, 3, Kind::Signed, 0.0)));
  write_text_file("acc_inst.json",
                  dump_json(instance_to_json(linear_instance(0.1)), FloatStyle::Shortest) + "\n");
  const auto mu_a =
      restriction_distribution(FunctionTable::boolean(2, 3, {0, 1, 0, 1, 0, 1, 0, 1}), 1);
  write_text_file("acc_mu_a.json",
                  dump_json(distribution_to_json(mu_a), FloatStyle::Shortest) + "\n");
  const auto mu_b = instance_distribution(linear_instance(0.1), 1);
  write_text_file("acc_mu_b.json",
                  dump_json(distribution_to_json(mu_b), FloatStyle::Shortest) + "\n");
}

}  // namespace

TEST_CASE("C1 uniformity norms never exceed the L1 root bound") {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  bool ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(16);
    for (auto& x : v) x = 2.0 * rng.unit() - 1.0;
    const FunctionTable f = FunctionTable::signed_(2, 4, std::move(v));
    const double l1 = norm_l1(f);
    for (int d = 1; d <= 3; ++d) {
      const double bound = std::pow(l1, 1.0 / static_cast<double>(1 << d));
      const double value = gowers_norm_exact(f, d).value;
      ok = ok && value <= bound + 1e-10;
    }
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed <= 30.0;
  report(1, "uniformity norms within the L1 root bound on 500 tables", ok);
  CHECK(ok);
}

TEST_CASE("C2 phase polynomials are exactly the norm-one extremizers") {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  PolynomialFamily fam(2, 2, 2);
  for (std::uint64_t i = 0; i < fam.size(); ++i) {
    const FunctionTable f = phase_table(torus_table(fam.at(i)));
    ok = ok && std::abs(gowers_norm_exact(f, 3).value - 1.0) <= 1e-9;
  }
  Rng rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::complex<double>> v(4);
    for (auto& z : v) {
      const double theta = 2.0 * 3.14159265358979323846 * rng.unit();
      z = {std::cos(theta), std::sin(theta)};
    }
    const FunctionTable f = FunctionTable::complex_(2, 2, std::move(v));
    ok = ok && gowers_norm_exact(f, 3).value < 1.0 - 1e-6;
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed <= 60.0;
  report(2, "full third-order norm exactly on enumerated phase polynomials", ok);
  CHECK(ok);
}

TEST_CASE("C3 canonical forms round trip and match the difference oracle") {
  bool ok = true;
  for (int n : {1, 2}) {
    const Domain dom(2, n);
    PolynomialFamily fam(2, n, 3);
    for (std::uint64_t i = 0; i < fam.size(); ++i) {
      const NcPolynomial P = fam.at(i);
      const auto table = P.evaluate_table();
      ok = ok && interpolate(2, n, table) == P;
      ok = ok && P.degree() == oracle_degree(dom, table);
      ok = ok && P.depth() == oracle_depth(table);
    }
  }
  report(3, "interpolation identity and oracle-matched grading", ok);
  CHECK(ok);
}

TEST_CASE("C4 consistency counts satisfy the exact mass balance") {
  bool ok = true;
  for (int m : {1, 2}) {
    const std::uint64_t nonzero = (1ull << m) - 1;
    const std::vector<std::vector<int>> slot_degrees = {{1}, {2}, {1, 1}, {1, 2}, {2, 2}};
    for (std::size_t ell = 1; ell <= 3; ++ell) {
      std::vector<std::uint64_t> pick(ell, 1);
      while (true) {
        std::vector<LinearForm> forms;
        for (std::uint64_t code : pick) {
          LinearForm L;
          for (int j = 0; j < m; ++j)
            L.coeffs.push_back(static_cast<std::uint8_t>((code >> j) & 1));
          forms.push_back(std::move(L));
        }
        for (const auto& degrees : slot_degrees) {
          const std::vector<int> depths(degrees.size(), 0);
          const ConsistentSet cs = enumerate_consistent(2, forms, degrees, depths);
          std::uint64_t order = 1;
          for (int h : depths) order *= 1ull << (h + 1);
          std::uint64_t rhs = 1;
          for (std::size_t i = 0; i < ell; ++i) rhs *= order;
          std::uint64_t lambda_product = 1;
          for (const auto& dep : cs.deps) lambda_product *= dep.lambdas.size();
          ok = ok && cs.tuples.size() * lambda_product == rhs;
          ok = ok && cs.conceivable == rhs;
        }
        std::size_t j = 0;
        while (j < ell && pick[j] == nonzero) pick[j++] = 1;
        if (j == ell) break;
        ++pick[j];
      }
    }
  }
  const DependencySet dep =
      dependency_set(2, parse_forms(2, "1,0;0,1;1,1"), 1, 0);
  const std::vector<std::vector<std::uint64_t>> expected = {{0, 0, 0}, {1, 1, 1}};
  ok = ok && dep.lambdas == expected;
  ok = ok && dep.consistent_count() == 4;
  report(4, "consistent tuples times dependency sizes equals the order power", ok);
  CHECK(ok);
}

TEST_CASE("C5 coordinate factors have exactly uniform atoms") {
  bool ok = true;
  for (int n = 1; n <= 4; ++n) {
    for (int C = 1; C <= n; ++C) {
      std::vector<NcPolynomial> polys;
      for (int i = 1; i <= C; ++i) polys.push_back(coord(2, n, i));
      const AtomDistribution ad = atom_distribution_report(PolyFactor(polys));
      ok = ok && ad.max_deviation == 0.0;
      ok = ok && ad.nonempty.size() == (1ull << C);
      const std::uint64_t per_atom = 1ull << (n - C);
      for (const auto& [label, count] : ad.nonempty) ok = ok && count == per_atom;
    }
  }
  report(5, "atom masses exactly 1/2^C for coordinate factors", ok);
  CHECK(ok);
}

TEST_CASE("C6 one-shot perturbations move little and contract often enough") {
  const auto t0 = std::chrono::steady_clock::now();
  const double delta = 0.1;
  const FunctionTable target = FunctionTable::constant(2, 6, Kind::Unit, 0.5);
  int within_l1 = 0;
  int contracted = 0;
  for (int seed = 0; seed < 200; ++seed) {
    Rng table_rng(9000 + static_cast<std::uint64_t>(seed));
    const FunctionTable f = random_boolean(2, 6, table_rng);
    Rng perturb_rng(500 + static_cast<std::uint64_t>(seed));
    const FunctionTable g = perturb_toward_structure(f, target, delta, perturb_rng);
    if (norm_l1(table_sub(f, g)) <= 2.0 * delta) ++within_l1;
    const double before = gowers_norm_exact(table_sub(f, target), 2).value;
    const double after = gowers_norm_exact(table_sub(g, target), 2).value;
    if (after <= (1.0 - delta / 3.0) * before) ++contracted;
  }
  const double elapsed = seconds_since(t0);
  bool ok = within_l1 >= 190;  // 95% of 200
  ok = ok && static_cast<double>(contracted) / 200.0 >= delta / 2.0 - 0.05;
  ok = ok && elapsed <= 120.0;
  report(6, "small-movement and contraction rates over 200 perturbations", ok);
  CHECK(ok);
}

TEST_CASE("C7 degree tester is exact on rejection and complete on polynomials") {
  bool ok = degree_rejection_exact(torus_table(bilinear12(2, 2)), 1) == 0.375;
  PolynomialFamily fam(2, 3, 2);
  const TorusValue half(2, 1, 1);
  for (std::uint64_t i = 0; i < fam.size(); ++i) {
    const NcPolynomial P = fam.at(i);
    if (P.depth() != 0) continue;  // classical polynomials only
    auto table = P.evaluate_table();
    ok = ok && degree_rejection_exact(FunctionTable::torus(2, 3, table), 2) == 0.0;
    for (auto& v : table) v = v + half;  // constant shifts stay classical
    ok = ok && degree_rejection_exact(FunctionTable::torus(2, 3, std::move(table)), 2) == 0.0;
  }
  report(7, "rejection exactly 3/8 and zero over classical polynomials", ok);
  CHECK(ok);
}

TEST_CASE("C8 query counts depend on trials and m only, never on n") {
  bool ok = true;
  const RegularityInstance I = linear_instance(0.1);
  for (int n : {6, 8, 10}) {
    const FunctionTable f = structured_x1(n);
    for (std::uint64_t trials : {1ull, 3ull}) {
      QueryOracle oracle(f);
      Rng rng(7);
      instance_tester(oracle, I, 0.3, 0.1, 3, kDefaultOpBudget, rng, trials);
      ok = ok && oracle.queries() == trials * 8;  // trials * 2^3
    }
    Rng table_rng(40 + static_cast<std::uint64_t>(n));
    QueryOracle oracle(random_boolean(2, n, table_rng));
    Rng rng(11);
    const TableProperty everything = [](const FunctionTable&) { return true; };
    canonical_run(oracle, 2, everything, 10, rng);
    ok = ok && oracle.queries() == 10 * 4;  // trials * 2^2
  }
  report(8, "tester query counts equal trials times p^m across n", ok);
  CHECK(ok);
}

TEST_CASE("C9 instance distribution matches a concrete table restriction") {
  const RestrictionDistribution ideal = instance_distribution(linear_instance(0.1), 1);
  const FunctionTable f = structured_x1(8);
  Rng rng(909);
  const RestrictionDistribution sampled = restriction_distribution(f, 1, &rng, 100000);
  const double tv = tv_distance(ideal, sampled);
  const bool ok = tv <= 0.05;
  report(9, "idealized and sampled restriction measures within 0.05", ok);
  CHECK(ok);
}

TEST_CASE("C10 every report is byte-stable across runs and thread counts") {
  write_acceptance_fixtures();
  const std::vector<std::string> commands = {
      "gowers --fn acc_ones.fpfn --order 2 --mode exact",
      "gowers --fn acc_bool4.fpfn --order 2 --mode mc --trials 2000 --seed 11",
      "norms --fn acc_bool4.fpfn",
      "poly-eval --poly acc_factor.fppoly",
      "poly-fit --fn acc_fit.fpfn",
      "atoms --factor acc_factor.fppoly",
      "rank --factor acc_factor.fppoly --rmax 2",
      "depset --forms '1,0;0,1;1,1' --degree 1",
      "consistent --forms '1,0;0,1;1,1' --degrees 1 --depths 0",
      "equidist --factor acc_factor.fppoly --forms '1,0;0,1;1,1'",
      "mu --fn acc_boolx1_3.fpfn --m 1",
      "mu --fn acc_bool6.fpfn --m 2 --trials 5000 --seed 13",
      "mu-instance --instance acc_inst.json --m 1",
      "tv --a acc_mu_a.json --b acc_mu_b.json",
      "perturb --fn acc_bool6.fpfn --target acc_half6.fpfn --delta 0.1 --seed 5",
      "test-degree --fn acc_quad.fpfn --degree 1 --reps 100 --seed 7",
      "test-degree --fn acc_quad.fpfn --degree 1 --mode exact",
      "test-instance --fn acc_structured6.fpfn --instance acc_inst.json "
      "--eps 0.3 --delta 0.1 --m 3 --seed 3",
      "test-family --fn acc_boolx1_3.fpfn --low-degree 1 --eps 0.3 --m 3 --seed 5",
      "validate-decomp --fn acc_structured3.fpfn --f1 acc_structured3.fpfn "
      "--f2 acc_zero3.fpfn --f3 acc_zero3.fpfn --factor acc_x1only.fppoly "
      "--order 1 --zeta 0.1 --eta 0.1 --rank 1",
      "report-embedding-stability --factor acc_factor.fppoly --m 2 --trials 50 --seed 9",
  };
  bool ok = true;
  for (const auto& cmd : commands) {
    const RunResult first = run_cli(cmd);
    const RunResult second = run_cli(cmd);
    ok = ok && first.code == second.code && first.out == second.out;
    ok = ok && !first.out.empty();
    const RunResult one = run_cli(cmd + " --threads 1");
    const RunResult two = run_cli(cmd + " --threads 2");
    ok = ok && one.code == two.code;
    ok = ok && from_command_key(one.out) == from_command_key(two.out);
  }
  report(10, "byte-identical reports over reruns and thread counts", ok);
  CHECK(ok);
}
