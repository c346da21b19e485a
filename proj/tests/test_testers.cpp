#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hofa/tester.hpp"

using namespace hofa;

namespace {

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

NcPolynomial triple123(int n) {
  NcPolynomial P(2, n);
  std::vector<std::uint8_t> e(static_cast<std::size_t>(n), 0);
  e[0] = e[1] = e[2] = 1;
  P.set_coeff(e, TorusValue::iota(2, 1));
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

RegularityInstance constant_instance(int p, double value, double gamma) {
  RegularityInstance I;
  I.gamma = gamma;
  I.gamma_table = GammaTable::constant(p, {}, value);
  I.d = 1;
  return I;
}

bool nonconstant(const FunctionTable& g) {
  if (g.kind() == Kind::Torus) {
    const auto& v = g.torus_values();
    for (const auto& x : v)
      if (x != v[0]) return true;
    return false;
  }
  const auto& v = g.real();
  for (double x : v)
    if (x != v[0]) return true;
  return false;
}

}  // namespace

TEST_CASE("query oracle counts every request and stops at the cap") {
  QueryOracle o(FunctionTable::constant(2, 3, Kind::Boolean, 1.0), 5);
  CHECK(o.queries() == 0);
  CHECK(o.at(0) == 1.0);
  CHECK(o.at(0) == 1.0);  // repeats count: no dedup
  CHECK(o.queries() == 2);
  o.at(1);
  o.at(2);
  o.at(3);
  CHECK(o.queries() == 5);
  CHECK_THROWS_AS(o.at(4), QueryCapError);
  CHECK(o.queries() == 5);  // the cap is never passed

  QueryOracle open(FunctionTable::constant(2, 3, Kind::Boolean, 0.0));
  for (int i = 0; i < 100; ++i) open.at(0);
  CHECK(open.queries() == 100);

  CHECK_THROWS_AS(open.at_torus(0), DimensionError);  // wrong kind, not charged
  CHECK_THROWS_AS(open.at(8), DimensionError);        // out of range, not charged
  CHECK(open.queries() == 100);

  QueryOracle tor(torus_table(coord(2, 2, 1)));
  CHECK(tor.at_torus(0).is_zero());
  CHECK_THROWS_AS(tor.at(0), DimensionError);
  CHECK(tor.queries() == 1);
}

TEST_CASE("canonical run settles the trivial properties") {
  Rng rng(1);
  QueryOracle all(random_boolean(2, 4, rng));
  const TesterVerdict va =
      canonical_run(all, 2, [](const FunctionTable&) { return true; }, 40, rng);
  CHECK(va.decision == Decision::Accept);
  CHECK(va.acceptance == 1.0);
  CHECK(va.trials == 40);
  CHECK(va.queries == 40 * 4);
  CHECK(va.transcript.size() == 40);
  CHECK(!va.surrogate);
  CHECK(va.exit_code() == 0);

  QueryOracle none(random_boolean(2, 4, rng));
  const TesterVerdict vr =
      canonical_run(none, 2, [](const FunctionTable&) { return false; }, 40, rng);
  CHECK(vr.decision == Decision::Reject);
  CHECK(vr.acceptance == 0.0);
  CHECK(vr.exit_code() == 1);

  CHECK_THROWS_AS(canonical_run(all, 0, nonconstant, 4, rng), DimensionError);
  CHECK_THROWS_AS(canonical_run(all, 5, nonconstant, 4, rng), DimensionError);
  CHECK_THROWS_AS(canonical_run(all, 2, nonconstant, 0, rng), DimensionError);
  CHECK_THROWS_AS(canonical_run(all, 2, TableProperty{}, 4, rng), DimensionError);
}

TEST_CASE("canonical run matches the exact separation fraction") {
  // f = iota(x_1) on F_2^4: a 2-point restriction is non-constant exactly
  // when the direction's first coordinate is 1, giving 8 of 15 directions
  const FunctionTable f = torus_table(coord(2, 4, 1));
  const Domain dom(2, 4);
  std::uint64_t separated = 0, pairs = 0;
  for (std::uint64_t c = 1; c < 16; ++c)
    for (std::uint64_t s = 0; s < 16; ++s) {
      ++pairs;
      if (f.torus_values()[s] != f.torus_values()[dom.add(s, c)]) ++separated;
    }
  REQUIRE(pairs == 240);
  REQUIRE(separated == 128);  // 8 directions x 16 shifts
  const double exact = static_cast<double>(separated) / static_cast<double>(pairs);
  REQUIRE(exact == doctest::Approx(8.0 / 15).epsilon(1e-15));

  QueryOracle o(f);
  Rng rng(2026);
  const TesterVerdict v = canonical_run(o, 1, nonconstant, 4000, rng);
  CHECK(v.decision == Decision::Accept);  // 8/15 > 1/2
  CHECK(std::abs(v.acceptance - exact) < 0.03);
  CHECK(v.queries == 4000 * 2);
  CHECK(v.half_width > 0.0);
  CHECK(v.half_width < 0.05);
}

TEST_CASE("canonical run accepts explicit mask sets") {
  QueryOracle ones(FunctionTable::constant(2, 3, Kind::Boolean, 1.0));
  Rng rng(7);
  const TesterVerdict v =
      canonical_run(ones, 1, property_from_masks(2, 1, {3}), 20, rng);
  CHECK(v.decision == Decision::Accept);
  CHECK(v.acceptance == 1.0);

  QueryOracle ones2(FunctionTable::constant(2, 3, Kind::Boolean, 1.0));
  const TesterVerdict v0 =
      canonical_run(ones2, 1, property_from_masks(2, 1, {0, 1, 2}), 20, rng);
  CHECK(v0.decision == Decision::Reject);

  // mask properties insist on boolean restrictions
  QueryOracle u(FunctionTable::constant(2, 3, Kind::Unit, 0.5));
  CHECK_THROWS_AS(canonical_run(u, 1, property_from_masks(2, 1, {0}), 4, rng),
                  DimensionError);
  CHECK_THROWS_AS(property_from_masks(2, 7, {0}), DimensionError);
}

TEST_CASE("canonical run is deterministic across thread counts") {
  Rng fgen(99);
  const FunctionTable f = random_boolean(2, 5, fgen);
  QueryOracle o1(f);
  QueryOracle o4(f);
  Rng r1(1234), r4(1234);
  const TesterVerdict v1 = canonical_run(o1, 2, nonconstant, 64, r1, 1);
  const TesterVerdict v4 = canonical_run(o4, 2, nonconstant, 64, r4, 4);
  CHECK(v1.decision == v4.decision);
  CHECK(v1.acceptance == v4.acceptance);
  CHECK(v1.queries == v4.queries);
  REQUIRE(v1.transcript.size() == v4.transcript.size());
  for (std::size_t i = 0; i < v1.transcript.size(); ++i) {
    CHECK(v1.transcript[i].outcome == v4.transcript[i].outcome);
    CHECK(v1.transcript[i].note == v4.transcript[i].note);
  }
}

TEST_CASE("a capped oracle stops canonical runs mid-flight") {
  for (int threads : {1, 4}) {
    QueryOracle o(FunctionTable::constant(2, 4, Kind::Boolean, 1.0), 10);
    Rng r(42);
    CHECK_THROWS_AS(
        canonical_run(o, 1, [](const FunctionTable&) { return true; }, 10, r, threads),
        QueryCapError);
    CHECK(o.queries() == 10);
  }
}

TEST_CASE("degree tester accepts every classical polynomial exhaustively") {
  for (int n = 1; n <= 3; ++n) {
    for (int d = 0; d <= 2; ++d) {
      const PolynomialFamily fam(2, n, d);
      std::uint64_t classical = 0;
      for (std::uint64_t j = 0; j < fam.size(); ++j) {
        const NcPolynomial P = fam.at(j);
        if (P.depth() > 0) continue;  // the classical members have depth 0
        ++classical;
        const FunctionTable f = torus_table(P);
        CHECK(degree_rejection_exact(f, d) == 0.0);

        QueryOracle o(f);
        Rng rng(500 + static_cast<std::uint64_t>(j));
        const TesterVerdict v = classical_degree_tester(o, d, 20, rng);
        CHECK(v.decision == Decision::Accept);
        CHECK(v.acceptance == 1.0);
        CHECK(v.queries == 20ULL * (1ULL << (d + 1)));
      }
      CHECK(classical >= 1);
    }
  }

  // a constant shift keeps every derivative of order >= 1 intact
  std::vector<TorusValue> tab = coord(2, 2, 1).evaluate_table();
  for (auto& v : tab) v = v + TorusValue::iota(2, 1);
  CHECK(degree_rejection_exact(FunctionTable::torus(2, 2, std::move(tab)), 1) == 0.0);
}

TEST_CASE("degree tester rejection rates freeze the worked examples") {
  // order-2 derivative of x1x2 is iota(det) over the direction matrix:
  // 6 invertible of 16 matrices over F_2
  const FunctionTable f12 = torus_table(bilinear12(2, 2));
  CHECK(degree_rejection_exact(f12, 1) == doctest::Approx(0.375).epsilon(1e-15));

  // order-3 derivative of x1x2x3: invertible 3x3 count 168 of 512
  const FunctionTable f123 = torus_table(triple123(3));
  CHECK(degree_rejection_exact(f123, 2) == doctest::Approx(21.0 / 64).epsilon(1e-15));

  // threads do not change the exhaustive count
  CHECK(degree_rejection_exact(f123, 2, kDefaultOpBudget, 4) ==
        degree_rejection_exact(f123, 2));

  // the sampled tester converges on the same rate
  QueryOracle o(f12);
  Rng rng(2718);
  const TesterVerdict v = classical_degree_tester(o, 1, 4000, rng);
  CHECK(v.decision == Decision::Reject);
  CHECK(std::abs((1.0 - v.acceptance) - 0.375) < 0.03);
  CHECK(v.queries == 4000 * 4);

  try {
    degree_rejection_exact(f123, 2, 100);
    FAIL("budget gate did not fire");
  } catch (const BudgetError& e) {
    CHECK(e.required > 100);
  }
  QueryOracle u(FunctionTable::constant(2, 2, Kind::Unit, 0.5));
  Rng r2(1);
  CHECK_THROWS_AS(classical_degree_tester(u, 1, 4, r2), DimensionError);
}

TEST_CASE("degree tester rejection grows with planted noise") {
  // base: a degree-1 table; flip k of 16 points by a half turn
  NcPolynomial P = coord(2, 4, 1) + coord(2, 4, 2);
  const std::vector<TorusValue> base = P.evaluate_table();
  Rng flip_rng(90210);
  std::vector<double> rejection;
  for (std::uint64_t flips : {0ULL, 1ULL, 2ULL, 4ULL}) {
    std::vector<TorusValue> tab = base;
    std::vector<std::uint64_t> order(tab.size());
    for (std::uint64_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::uint64_t i = 0; i < flips; ++i)
      std::swap(order[i], order[i + flip_rng.below(order.size() - i)]);
    for (std::uint64_t i = 0; i < flips; ++i)
      tab[order[i]] = tab[order[i]] + TorusValue::iota(2, 1);

    QueryOracle o(FunctionTable::torus(2, 4, std::move(tab)));
    Rng rng(60 + flips);
    const TesterVerdict v = classical_degree_tester(o, 1, 200, rng);
    rejection.push_back(1.0 - v.acceptance);
  }
  CHECK(rejection[0] == 0.0);                // one-sided completeness
  CHECK(rejection[3] > rejection[0]);        // 20% noise must be caught
  CHECK(rejection[3] > 0.3);                 // and caught often
}

TEST_CASE("instance tester accepts an exact global witness on every seed") {
  const PolyFactor B(std::vector<NcPolynomial>{coord(2, 3, 1)});
  const FunctionTable f = compose_gamma(GammaTable::identity(2, 0), B);
  const RegularityInstance I = linear_instance(0.1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    QueryOracle o(f);
    Rng rng = Rng::for_trial(31415, seed);
    const TesterVerdict v = instance_tester(o, I, 0.3, 0.1, 3, kDefaultOpBudget, rng);
    CHECK(v.decision == Decision::Accept);
    CHECK(v.surrogate);
    CHECK(v.queries == 8);
    CHECK(v.trials == 1);
    REQUIRE(v.transcript.size() == 1);
    CHECK(v.transcript[0].note == "exact witness within gamma");
    CHECK(v.exit_code() == 0);
  }
}

TEST_CASE("instance tester rejects far random tables") {
  const RegularityInstance I = linear_instance(0.01);
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng fgen = Rng::for_trial(8086, seed);
    QueryOracle o(random_boolean(2, 8, fgen));
    Rng rng = Rng::for_trial(68000, seed);
    const TesterVerdict v = instance_tester(o, I, 0.2, 0.05, 3, kDefaultOpBudget, rng);
    CHECK(v.queries == 8);
    if (v.decision == Decision::Reject) ++rejects;
  }
  CHECK(rejects >= 45);
}

TEST_CASE("instance tester query counts ignore the ambient dimension") {
  const RegularityInstance I = linear_instance(0.1);
  for (int n : {6, 8, 10}) {
    Rng fgen(17);
    QueryOracle o(random_boolean(2, n, fgen));
    Rng rng(19);
    const TesterVerdict v = instance_tester(o, I, 0.3, 0.1, 3, kDefaultOpBudget, rng);
    CHECK(v.queries == 8);
    CHECK(o.queries() == 8);
  }
}

TEST_CASE("instance tester surfaces budget exhaustion as inconclusive") {
  Rng fgen(23);
  QueryOracle o(random_boolean(2, 4, fgen));
  Rng rng(29);
  const TesterVerdict v = instance_tester(o, linear_instance(0.1), 0.3, 0.1, 3, 10, rng);
  CHECK(v.decision == Decision::Inconclusive);
  CHECK(v.exit_code() == 2);
  CHECK(v.queries == 8);  // the restriction was read before the search gave up
  REQUIRE(v.transcript.size() == 1);
  CHECK(v.transcript[0].note.find("budget") != std::string::npos);
}

TEST_CASE("instance tester majority trials and guards") {
  const PolyFactor B(std::vector<NcPolynomial>{coord(2, 3, 1)});
  const FunctionTable f = compose_gamma(GammaTable::identity(2, 0), B);
  const RegularityInstance I = linear_instance(0.1);
  QueryOracle o(f);
  Rng rng(5);
  const TesterVerdict v = instance_tester(o, I, 0.3, 0.1, 3, kDefaultOpBudget, rng, 3);
  CHECK(v.decision == Decision::Accept);
  CHECK(v.trials == 3);
  CHECK(v.queries == 24);

  Rng r2(6);
  CHECK_THROWS_AS(instance_tester(o, I, 0.3, 0.1, 3, kDefaultOpBudget, r2, 2),
                  DimensionError);
  CHECK_THROWS_AS(instance_tester(o, I, 1.5, 0.1, 3, kDefaultOpBudget, r2),
                  DimensionError);
  CHECK_THROWS_AS(instance_tester(o, I, 0.3, 0.0, 3, kDefaultOpBudget, r2),
                  DimensionError);
  CHECK_THROWS_AS(instance_tester(o, I, 0.3, 0.1, 4, kDefaultOpBudget, r2),
                  DimensionError);
  QueryOracle tor(torus_table(coord(2, 3, 1)));
  CHECK_THROWS_AS(instance_tester(tor, I, 0.3, 0.1, 3, kDefaultOpBudget, r2),
                  DimensionError);
}

TEST_CASE("instance tester is deterministic across thread counts") {
  Rng fgen(101);
  const FunctionTable f = random_boolean(2, 6, fgen);
  const RegularityInstance I = linear_instance(0.05);
  QueryOracle o1(f), o2(f);
  Rng r1(77), r2(77);
  const TesterVerdict v1 =
      instance_tester(o1, I, 0.3, 0.1, 3, kDefaultOpBudget, r1, 3, 200, 1);
  const TesterVerdict v2 =
      instance_tester(o2, I, 0.3, 0.1, 3, kDefaultOpBudget, r2, 3, 200, 2);
  CHECK(v1.decision == v2.decision);
  CHECK(v1.acceptance == v2.acceptance);
  REQUIRE(v1.transcript.size() == v2.transcript.size());
  for (std::size_t i = 0; i < v1.transcript.size(); ++i)
    CHECK(v1.transcript[i].note == v2.transcript[i].note);
}

TEST_CASE("amplification majority votes and bookkeeps") {
  const SingleRun always = [](Rng&) {
    TesterVerdict v;
    v.decision = Decision::Accept;
    v.trials = 1;
    v.queries = 5;
    v.acceptance = 1.0;
    v.transcript.push_back({0, Decision::Accept, "ok"});
    return v;
  };
  Rng rng(11);
  const TesterVerdict v = amplify(always, 3, rng);
  CHECK(v.decision == Decision::Accept);
  CHECK(v.acceptance == 1.0);
  CHECK(v.queries == 15);
  CHECK(v.trials == 3);
  REQUIRE(v.transcript.size() == 3);
  CHECK(v.transcript[0].index == 0);
  CHECK(v.transcript[1].index == 1);
  CHECK(v.transcript[2].index == 2);

  const SingleRun unsure = [](Rng&) {
    TesterVerdict v;
    v.decision = Decision::Inconclusive;
    return v;
  };
  Rng r2(12);
  CHECK(amplify(unsure, 3, r2).decision == Decision::Inconclusive);

  Rng r3(13);
  CHECK_THROWS_AS(amplify(always, 2, r3), DimensionError);
  CHECK_THROWS_AS(amplify(always, 0, r3), DimensionError);
  CHECK_THROWS_AS(amplify(SingleRun{}, 3, r3), DimensionError);
}

TEST_CASE("one amplified repetition equals a single run") {
  const SingleRun coin = [](Rng& r) {
    TesterVerdict v;
    v.decision = r.unit() < 2.0 / 3.0 ? Decision::Accept : Decision::Reject;
    v.trials = 1;
    return v;
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a = Rng::for_trial(404, seed);
    const std::uint64_t master = a.next_u64();
    Rng sub = Rng::for_trial(master, 0);
    const Decision expected = coin(sub).decision;
    Rng b = Rng::for_trial(404, seed);
    CHECK(amplify(coin, 1, b).decision == expected);
  }
}

TEST_CASE("twenty-one repetitions lift a two-thirds coin above 93 percent") {
  const SingleRun coin = [](Rng& r) {
    TesterVerdict v;
    v.decision = r.unit() < 2.0 / 3.0 ? Decision::Accept : Decision::Reject;
    v.trials = 1;
    return v;
  };
  int accepted = 0;
  const int sims = 10000;
  for (int s = 0; s < sims; ++s) {
    Rng rng = Rng::for_trial(112358, static_cast<std::uint64_t>(s));
    if (amplify(coin, 21, rng).decision == Decision::Accept) ++accepted;
  }
  CHECK(static_cast<double>(accepted) / sims >= 0.93);
}

TEST_CASE("repetition counts follow the exact binomial tail") {
  CHECK(repetitions_for_majority(1.0 / 3, 1.0 / 3) == 1);
  CHECK(repetitions_for_majority(0.2, 0.3) == 1);
  CHECK(repetitions_for_majority(1.0 / 3, 1.0 / 6) == 9);
  CHECK(repetitions_for_majority(1.0 / 3, 1.0 / 12) == 17);
  CHECK(repetitions_for_majority(1.0 / 3, 1.0 / 9) >=
        repetitions_for_majority(1.0 / 3, 1.0 / 6));
  CHECK_THROWS_AS(repetitions_for_majority(0.5, 0.1), DimensionError);
  CHECK_THROWS_AS(repetitions_for_majority(0.1, 0.0), DimensionError);
}

TEST_CASE("family tester accepts through the exactly satisfied member") {
  const PolyFactor B(std::vector<NcPolynomial>{coord(2, 3, 1)});
  const FunctionTable f = compose_gamma(GammaTable::identity(2, 0), B);
  const std::vector<RegularityInstance> family = {constant_instance(2, 0.0, 0.1),
                                                  linear_instance(0.1)};
  QueryOracle o(f);
  Rng rng(21);
  const TesterVerdict v = family_tester(o, family, 0.4, 3, kDefaultOpBudget, rng);
  CHECK(v.decision == Decision::Accept);
  CHECK(v.surrogate);
  REQUIRE(v.transcript.size() == 2);
  CHECK(v.transcript[0].outcome == Decision::Reject);
  CHECK(v.transcript[1].outcome == Decision::Accept);
  CHECK(v.queries == 144);  // two instances at nine repetitions of eight queries
}

TEST_CASE("family tester rejects far random tables") {
  const std::vector<RegularityInstance> family = {linear_instance(0.01)};
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng fgen = Rng::for_trial(55555, seed);
    QueryOracle o(random_boolean(2, 8, fgen));
    Rng rng = Rng::for_trial(66666, seed);
    const TesterVerdict v = family_tester(o, family, 0.2, 3, kDefaultOpBudget, rng);
    if (v.decision == Decision::Reject) ++rejects;
  }
  CHECK(rejects >= 18);
}

TEST_CASE("the low-degree family accepts classical polynomials through its lift") {
  const std::vector<RegularityInstance> family = low_degree_family(2, 2, 0.1);
  REQUIRE(family.size() == 4);
  for (const auto& I : family) I.validate();
  CHECK(!family[0].rank.has_value());
  CHECK(family[2].degrees == std::vector<int>{1});
  CHECK(family[3].degrees == std::vector<int>{2});
  CHECK(family[3].d == 3);

  // f = x1 * x2 as a boolean table: degree-2, so the last member certifies it
  const Domain dom(2, 3);
  std::vector<double> fv(dom.size());
  for (std::uint64_t x = 0; x < dom.size(); ++x) {
    const auto pt = dom.decode(x);
    fv[x] = pt[0] && pt[1] ? 1.0 : 0.0;
  }
  QueryOracle o(FunctionTable::boolean(2, 3, std::move(fv)));
  Rng rng(31);
  const TesterVerdict v = family_tester(o, family, 0.4, 3, kDefaultOpBudget, rng);
  CHECK(v.decision == Decision::Accept);
  REQUIRE(v.transcript.size() == 4);
  CHECK(v.transcript[3].outcome == Decision::Accept);

  // the p = 3 variant scales its residue labels into the unit interval
  const std::vector<RegularityInstance> f3 = low_degree_family(3, 1, 0.2);
  REQUIRE(f3.size() == 4);
  for (const auto& I : f3) I.validate();
  CHECK(f3[3].gamma_table.values() == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("family tester propagates inconclusive constituents") {
  Rng fgen(41);
  QueryOracle o(random_boolean(2, 4, fgen));
  Rng rng(43);
  const std::vector<RegularityInstance> family = {linear_instance(0.1)};
  const TesterVerdict v = family_tester(o, family, 0.4, 3, 10, rng);
  CHECK(v.decision == Decision::Inconclusive);
  CHECK(v.exit_code() == 2);

  Rng r2(44);
  CHECK_THROWS_AS(family_tester(o, {}, 0.4, 3, kDefaultOpBudget, r2), DimensionError);
  CHECK_THROWS_AS(family_tester(o, family, 1.4, 3, kDefaultOpBudget, r2),
                  DimensionError);
}
