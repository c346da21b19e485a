#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unordered_map>

#include "hofa/factor.hpp"
#include "hofa/gowers.hpp"

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

// depth-1 polynomial |x_1| / 4 over F_2
NcPolynomial quarter(int n) {
  NcPolynomial P(2, n);
  std::vector<std::uint8_t> e(static_cast<std::size_t>(n), 0);
  e[0] = 1;
  P.set_coeff(e, TorusValue(2, 1, 2));
  return P;
}

FunctionTable coord_table(int p, int n, int i) {
  Domain dom(p, n);
  std::vector<double> v(dom.size());
  for (std::uint64_t x = 0; x < dom.size(); ++x)
    v[x] = dom.decode(x)[static_cast<std::size_t>(i - 1)] == 1 ? 1.0 : 0.0;
  return FunctionTable::boolean(p, n, std::move(v));
}

// Independent function-of check between two atom maps.
bool semantic_oracle(const PolyFactor& fine, const PolyFactor& coarse) {
  std::unordered_map<std::uint64_t, std::uint64_t> seen;
  for (std::uint64_t x = 0; x < fine.dom().size(); ++x) {
    const auto [it, fresh] = seen.emplace(fine.atom_code(x), coarse.atom_code(x));
    if (!fresh && it->second != coarse.atom_code(x)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("atom labels at explicit points") {
  const PolyFactor B1({coord(2, 2, 1)});
  CHECK(label_str(B1.atom_of(std::vector<std::uint8_t>{1, 0})) == "(1/2)");
  const PolyFactor B2({coord(2, 2, 1), coord(2, 2, 2)});
  CHECK(label_str(B2.atom_of(std::vector<std::uint8_t>{0, 1})) == "(0/1, 1/2)");
  CHECK(B2.order() == 4);
  CHECK(B2.complexity() == 2);

  const PolyFactor Bq({quarter(1)});
  CHECK(Bq.order() == 4);
  CHECK(label_str(Bq.atom_of(std::vector<std::uint8_t>{0})) == "(0/1)");
  CHECK(label_str(Bq.atom_of(std::vector<std::uint8_t>{1})) == "(1/4)");
  const auto dist = atom_distribution_report(Bq);
  CHECK(dist.nonempty.size() == 2);  // only 2 of the 4 conceivable labels
  CHECK(dist.max_deviation == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("conditional expectation on explicit tables") {
  const auto f = coord_table(2, 2, 1);

  const PolyFactor trivial(2, 2);
  const auto e0 = conditional_expectation(f, trivial);
  for (std::uint64_t x = 0; x < 4; ++x) CHECK(e0.real()[x] == 0.5);

  const PolyFactor B2({coord(2, 2, 2)});
  const auto e2 = conditional_expectation(f, B2);
  for (std::uint64_t x = 0; x < 4; ++x) CHECK(e2.real()[x] == 0.5);

  const PolyFactor B1({coord(2, 2, 1)});
  const auto e1 = conditional_expectation(f, B1);
  for (std::uint64_t x = 0; x < 4; ++x) CHECK(e1.real()[x] == f.real()[x]);

  const auto t = FunctionTable::torus(2, 2, std::vector<TorusValue>(4, TorusValue::zero(2)));
  CHECK_THROWS_AS(conditional_expectation(t, B1), DimensionError);
}

TEST_CASE("averaging is idempotent and mean preserving on random pairs") {
  const PolynomialFamily fam(2, 3, 2);
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(3000 + s);
    std::vector<double> vals(8);
    for (auto& v : vals) v = 2.0 * rng.unit() - 1.0;
    const auto f = FunctionTable::signed_(2, 3, std::move(vals));
    std::vector<NcPolynomial> polys;
    const int C = 1 + static_cast<int>(rng.below(2));
    for (int i = 0; i < C; ++i) polys.push_back(fam.at(1 + rng.below(fam.size() - 1)));
    const PolyFactor B(polys);

    const auto e = conditional_expectation(f, B);
    const auto ee = conditional_expectation(e, B);
    for (std::uint64_t x = 0; x < 8; ++x) CHECK(ee.real()[x] == e.real()[x]);

    double mf = 0, me = 0;
    for (std::uint64_t x = 0; x < 8; ++x) {
      mf += f.real()[x];
      me += e.real()[x];
    }
    // equal as exact averages; the two summation orders round independently
    CHECK(me == doctest::Approx(mf).epsilon(1e-13));

    std::unordered_map<std::uint64_t, double> per_atom;
    for (std::uint64_t x = 0; x < 8; ++x) {
      const auto [it, fresh] = per_atom.emplace(B.atom_code(x), e.real()[x]);
      CHECK((fresh || it->second == e.real()[x]));  // constant on each atom
    }
  }
}

TEST_CASE("refinement relation on explicit factors") {
  const auto x1 = coord(2, 2, 1);
  const auto x2 = coord(2, 2, 2);
  CHECK(refinement_relation(PolyFactor({x1, x2}), PolyFactor({x1})) == Refinement::Syntactic);
  CHECK(refinement_relation(PolyFactor({x2, x1}), PolyFactor({x1})) == Refinement::Semantic);
  CHECK(refinement_relation(PolyFactor({x1}), PolyFactor({x2})) == Refinement::Neither);
  CHECK(refinement_relation(PolyFactor({x1}), PolyFactor(2, 2)) == Refinement::Syntactic);
  CHECK(refinement_relation(PolyFactor(2, 2), PolyFactor({x1})) == Refinement::Neither);
}

TEST_CASE("syntactic extension always passes the semantic scan") {
  const PolynomialFamily fam(2, 2, 2);
  for (std::uint64_t i = 1; i < fam.size(); ++i) {
    const PolyFactor coarse({fam.at(i)});
    CHECK(semantic_oracle(coarse, PolyFactor(2, 2)));
    for (std::uint64_t j = 1; j < fam.size(); ++j) {
      const PolyFactor fine({fam.at(i), fam.at(j)});
      CHECK(refinement_relation(fine, coarse) == Refinement::Syntactic);
      CHECK(semantic_oracle(fine, coarse));
    }
  }
}

TEST_CASE("nonempty atom count is bounded by the order") {
  for (int n = 1; n <= 4; ++n) {
    for (int C = 1; C <= n; ++C) {
      std::vector<NcPolynomial> polys;
      for (int i = 1; i <= C; ++i) polys.push_back(coord(2, n, i));
      const PolyFactor B(polys);
      const auto dist = atom_distribution_report(B);
      CHECK(dist.nonempty.size() == B.order());  // coordinate factors fill every label
      CHECK(dist.max_deviation == 0.0);
      for (const auto& [label, count] : dist.nonempty)
        CHECK(count * B.order() == B.dom().size());
    }
  }
  const PolyFactor deep({quarter(2)});
  const auto dist = atom_distribution_report(deep);
  CHECK(dist.nonempty.size() <= deep.order());
  const PolyFactor trivial(2, 3);
  const auto td = atom_distribution_report(trivial);
  CHECK(td.nonempty.size() == 1);
  CHECK(td.nonempty[0].second == 8);
  CHECK(td.max_deviation == 0.0);
}

TEST_CASE("order-1 rank cases") {
  const auto z = NcPolynomial(2, 2);
  const auto r0 = rank_d_search(z, 1, 3);
  CHECK(r0.kind == RankReport::Kind::Exact);
  CHECK(r0.r == 0);
  const auto r1 = rank_d_search(coord(2, 2, 1), 1, 3);
  CHECK(r1.kind == RankReport::Kind::Infinite);
  CHECK(r1.str() == "infinite");
}

TEST_CASE("bilinear phase polynomial has order-2 rank two") {
  const auto P = bilinear12(2, 2);
  const auto rep = rank_d_search(P, 2, 3);
  REQUIRE(rep.kind == RankReport::Kind::Exact);
  CHECK(rep.r == 2);  // no single linear polynomial determines x1*x2
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->decomposition.size() == 2);
  for (const auto& Q : rep.witness->decomposition) CHECK(Q.degree() <= 1);
  CHECK(verify_rank_witness(P, *rep.witness));
}

TEST_CASE("rank witnesses re-verify on random searches") {
  const PolynomialFamily fam(2, 3, 2);
  Rng rng(515);
  int found = 0;
  for (int t = 0; t < 25; ++t) {
    const auto P = fam.at(1 + rng.below(fam.size() - 1));
    const auto rep = rank_d_search(P, 2, 3);
    if (rep.witness.has_value()) {
      ++found;
      CHECK(verify_rank_witness(P, *rep.witness));
      CHECK(rep.kind == RankReport::Kind::Exact);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("threaded rank search matches serial") {
  const PolynomialFamily fam(2, 3, 2);
  for (std::uint64_t i : {5ULL, 77ULL, 200ULL, 341ULL}) {
    const auto P = fam.at(i);
    const auto a = rank_d_search(P, 2, 3, kDefaultOpBudget, 1);
    const auto b = rank_d_search(P, 2, 3, kDefaultOpBudget, 4);
    CHECK(a.kind == b.kind);
    CHECK(a.r == b.r);
    if (a.witness.has_value()) {
      REQUIRE(b.witness.has_value());
      for (std::size_t j = 0; j < a.witness->decomposition.size(); ++j)
        CHECK(a.witness->decomposition[j] == b.witness->decomposition[j]);
    }
  }
}

TEST_CASE("rank search respects its budget") {
  const auto rep = rank_d_search(bilinear12(2, 2), 2, 3, 30);
  CHECK(rep.kind == RankReport::Kind::Inconclusive);
  CHECK(rep.required_budget > 30);
}

TEST_CASE("factor rank on explicit factors") {
  const auto inf = factor_rank_search(PolyFactor({coord(2, 2, 1)}), 3);
  CHECK(inf.kind == RankReport::Kind::Infinite);

  // duplicated polynomial: lambda = (1,1) sums to zero, rank collapses to 0
  const auto dup = factor_rank_search(PolyFactor({coord(2, 2, 1), coord(2, 2, 1)}), 3);
  REQUIRE(dup.kind == RankReport::Kind::Exact);
  CHECK(dup.r == 0);
  REQUIRE(dup.lambda.has_value());
  CHECK(*dup.lambda == std::vector<std::uint64_t>{1, 1});

  const auto pair = factor_rank_search(PolyFactor({coord(2, 2, 1), coord(2, 2, 2)}), 3);
  CHECK(pair.kind == RankReport::Kind::Infinite);

  // scaling |x|/4 by 2 lands on the coordinate polynomial; the unscaled
  // combinations have order-2 rank 1 via that same coordinate
  const auto deep = factor_rank_search(PolyFactor({quarter(1)}), 3);
  REQUIRE(deep.kind == RankReport::Kind::Exact);
  CHECK(deep.r == 1);
  REQUIRE(deep.lambda.has_value());
  CHECK(*deep.lambda == std::vector<std::uint64_t>{1});

  const auto bil = factor_rank_search(PolyFactor({bilinear12(2, 2)}), 3);
  REQUIRE(bil.kind == RankReport::Kind::Exact);
  CHECK(bil.r == 2);

  const auto trivial = factor_rank_search(PolyFactor(2, 2), 3);
  CHECK(trivial.kind == RankReport::Kind::Infinite);
}

TEST_CASE("embedding stability frequencies") {
  // Exact drop probability for B(iota(x1)) under F_2^4 <- F_2^2: the degree
  // drops exactly when the first matrix row vanishes.
  int zero_row = 0, full_rank_total = 0;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      std::vector<std::vector<std::uint8_t>> cols = {
          {static_cast<std::uint8_t>(a & 1), static_cast<std::uint8_t>(a >> 1 & 1),
           static_cast<std::uint8_t>(a >> 2 & 1), static_cast<std::uint8_t>(a >> 3 & 1)},
          {static_cast<std::uint8_t>(b & 1), static_cast<std::uint8_t>(b >> 1 & 1),
           static_cast<std::uint8_t>(b >> 2 & 1), static_cast<std::uint8_t>(b >> 3 & 1)}};
      if (column_rank_mod_p(2, 4, cols) != 2) continue;
      ++full_rank_total;
      if (cols[0][0] == 0 && cols[1][0] == 0) ++zero_row;
    }
  const double exact = static_cast<double>(zero_row) / full_rank_total;
  CHECK(exact == doctest::Approx(0.2).epsilon(1e-12));

  Rng rng(99);
  const auto rep = embedding_stability_report(PolyFactor({coord(2, 4, 1)}), 2, 400, rng);
  CHECK(rep.trials == 400);
  CHECK(rep.depth_drop == 0.0);
  CHECK(rep.rank_conclusive);
  CHECK(rep.degree_drop == doctest::Approx(exact).epsilon(0.35));
  CHECK(rep.rank_drop == rep.degree_drop);  // rank falls to 0 exactly when degree does

  Rng rng2(100);
  const auto same = embedding_stability_report(PolyFactor({bilinear12(2, 3)}), 3, 20, rng2);
  CHECK(same.degree_drop == 0.0);  // m = n embeddings are invertible
  CHECK(same.depth_drop == 0.0);
  CHECK(same.rank_drop == 0.0);

  Rng rng3(101);
  const auto none = embedding_stability_report(PolyFactor(2, 4), 2, 10, rng3);
  CHECK(none.degree_drop == 0.0);
  CHECK(none.depth_drop == 0.0);
  CHECK(none.rank_drop == 0.0);
  CHECK(none.rank_conclusive);
}

TEST_CASE("decomposition validator clause by clause") {
  const auto f = coord_table(2, 2, 1);
  const PolyFactor B({coord(2, 2, 1)});
  const auto zero = FunctionTable::constant(2, 2, Kind::Signed, 0.0);
  const auto f1 = FunctionTable::unit(2, 2, std::vector<double>(f.real()));

  const auto ok = validate_decomposition(f, f1, zero, zero, B, 2, 0.1, 0.1, 1);
  CHECK(ok.all_pass);
  REQUIRE(ok.clauses.size() == 6);
  for (const auto& c : ok.clauses) CHECK(c.status == ClauseStatus::Pass);

  // wrong structured part: that clause fails, the others still evaluate
  const auto bad1 = FunctionTable::constant(2, 2, Kind::Unit, 0.25);
  const auto r1 = validate_decomposition(f, bad1, zero, zero, B, 2, 0.1, 0.1, 1);
  CHECK_FALSE(r1.all_pass);
  CHECK(r1.clauses[0].status == ClauseStatus::Fail);  // sum no longer matches
  CHECK(r1.clauses[1].status == ClauseStatus::Fail);
  CHECK(r1.clauses[2].status == ClauseStatus::Pass);
  CHECK(r1.clauses[3].status == ClauseStatus::Pass);

  // boundary: ||f2||_2 equal to zeta fails the strict inequality
  const auto half = FunctionTable::constant(2, 2, Kind::Signed, 0.5);
  const auto fq = FunctionTable::constant(2, 2, Kind::Unit, 0.75);
  const auto f1q = FunctionTable::constant(2, 2, Kind::Unit, 0.25);
  const auto r2 = validate_decomposition(fq, f1q, half, zero, B, 2, 0.25, 0.1, 1);
  CHECK(r2.clauses[0].status == ClauseStatus::Pass);
  CHECK(r2.clauses[2].status == ClauseStatus::Fail);
  CHECK(r2.clauses[2].measured == doctest::Approx(0.25).epsilon(1e-15));

  // rank clause: a duplicated-polynomial factor has rank 0 < 1
  const PolyFactor dup({coord(2, 2, 1), coord(2, 2, 1)});
  const auto r3 = validate_decomposition(f, f1, zero, zero, dup, 2, 0.1, 0.1, 1);
  CHECK(r3.clauses[5].status == ClauseStatus::Fail);
  CHECK(r3.clauses[5].measured == 0.0);

  // range clause: f1 + f3 escaping [0,1] is flagged
  const auto r4 = validate_decomposition(f, f1, table_sub(zero, half), half, B, 2, 0.3, 1.1, 1);
  CHECK(r4.clauses[4].status == ClauseStatus::Fail);
  CHECK(r4.clauses[4].measured == doctest::Approx(0.5).epsilon(1e-12));
}
