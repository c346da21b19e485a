#include "hofa/forms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "hofa/instance.hpp"

namespace hofa {

namespace {

std::size_t checked_arity(int p, const std::vector<LinearForm>& forms) {
  if (p < 2) throw DimensionError("the modulus must be at least 2");
  if (forms.empty()) throw DimensionError("at least one linear form is required");
  const std::size_t m = forms[0].arity();
  if (m == 0) throw DimensionError("linear forms need at least one variable");
  for (const LinearForm& L : forms) {
    if (L.arity() != m) throw DimensionError("linear forms must share one arity");
    for (std::uint8_t c : L.coeffs)
      if (c >= p) throw DimensionError("form coefficients must be reduced mod p");
  }
  return m;
}

// q-ary digits of code, most significant first, so ascending codes walk the
// tuples in lexicographic order.
std::vector<std::uint64_t> digits_msd(std::uint64_t code, std::uint64_t q, std::size_t len) {
  std::vector<std::uint64_t> out(len, 0);
  for (std::size_t j = len; j-- > 0;) {
    out[j] = code % q;
    code /= q;
  }
  return out;
}

bool annihilates(const std::vector<std::uint64_t>& lam, const std::uint64_t* tuple,
                 std::size_t ell, std::uint64_t q) {
  std::uint64_t acc = 0;
  for (std::size_t j = 0; j < ell; ++j) acc += lam[j] * tuple[j];
  return acc % q == 0;
}

std::string lambda_str(const std::vector<std::uint64_t>& lam) {
  std::string s = "(";
  for (std::size_t j = 0; j < lam.size(); ++j) {
    if (j) s += ", ";
    s += std::to_string(lam[j]);
  }
  return s + ")";
}

// Scalar tuples in [0, q)^ell killed by every lambda, in lexicographic order.
std::vector<std::vector<std::uint64_t>> consistent_codes(const DependencySet& dep,
                                                         std::uint64_t budget) {
  const std::size_t ell = dep.forms.size();
  const std::uint64_t q = dep.modulus();
  const std::uint64_t total = pow_u64(q, ell);
  const std::uint64_t sweep =
      mul_sat_u64(total, mul_sat_u64(std::max<std::uint64_t>(dep.lambdas.size(), 1), ell));
  if (sweep > budget)
    throw BudgetError("consistent-tuple sweep exceeds the budget", sweep);
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<std::uint64_t> tup = digits_msd(code, q, ell);
    bool ok = true;
    for (const auto& lam : dep.lambdas)
      if (!annihilates(lam, tup.data(), ell, q)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(std::move(tup));
  }
  // finite duality: the consistent tuples and the annihilators multiply out
  // to the whole conceivable space
  if (out.size() * dep.lambdas.size() != total)
    throw Error("consistency count violates the duality identity");
  return out;
}

}  // namespace

std::string LinearForm::str() const {
  std::string s;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(int(coeffs[i]));
  }
  return s;
}

std::vector<LinearForm> parse_forms(int p, const std::string& text) {
  if (p < 2) throw DimensionError("the modulus must be at least 2");
  std::vector<LinearForm> forms;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ';')) {
    LinearForm L;
    std::stringstream ps(part);
    std::string tok;
    while (std::getline(ps, tok, ',')) {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(tok, &pos);
      } catch (const std::exception&) {
        throw ParseError("unreadable form coefficient '" + tok + "'");
      }
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size()) throw ParseError("unreadable form coefficient '" + tok + "'");
      const long long r = ((v % p) + p) % p;
      L.coeffs.push_back(static_cast<std::uint8_t>(r));
    }
    if (L.coeffs.empty()) throw ParseError("empty linear form in '" + text + "'");
    forms.push_back(std::move(L));
  }
  if (forms.empty()) throw ParseError("no linear forms in '" + text + "'");
  checked_arity(p, forms);
  return forms;
}

std::uint64_t apply_form(const Domain& dom, const LinearForm& L,
                         std::span<const std::uint64_t> points) {
  if (points.size() != L.arity())
    throw DimensionError("point count differs from the form arity");
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] >= dom.size()) throw DimensionError("point index out of range");
    acc = dom.add(acc, dom.scale(points[i], L.coeffs[i]));
  }
  return acc;
}

std::uint64_t DependencySet::modulus() const { return pow_u64(p, h + 1); }

std::uint64_t DependencySet::consistent_count() const {
  const std::uint64_t total = pow_u64(modulus(), forms.size());
  if (lambdas.empty() || total % lambdas.size() != 0)
    throw Error("annihilator count does not divide the conceivable space");
  return total / lambdas.size();
}

DependencySet dependency_set(int p, const std::vector<LinearForm>& forms, int d, int h,
                             int n_check, std::uint64_t budget, int threads) {
  const std::size_t m = checked_arity(p, forms);
  if (d < 1 || h < 0) throw DimensionError("need degree >= 1 and depth >= 0");
  if (d <= h * (p - 1))
    throw DimensionError("the degree must exceed depth*(p-1); no such polynomial exists");
  if (n_check < 1) throw DimensionError("n_check must be positive");

  DependencySet dep;
  dep.p = p;
  dep.d = d;
  dep.h = h;
  dep.n_check = n_check;
  dep.forms = forms;

  const std::vector<NcPolynomial> family = exact_degree_family(p, n_check, d, h, budget);
  if (family.empty())
    throw DimensionError(
        "no polynomial of this degree and depth fits on n_check variables; raise n_check");

  const Domain dom(p, n_check);
  const std::size_t ell = forms.size();
  const std::uint64_t tuple_count = pow_u64(dom.size(), m);
  const std::uint64_t q = pow_u64(p, h + 1);
  const std::uint64_t lam_count = pow_u64(q, ell);
  const std::uint64_t eval_cost =
      mul_sat_u64(mul_sat_u64(tuple_count, family.size()), ell);
  if (eval_cost > budget)
    throw BudgetError("dependency-set evaluation exceeds the budget", eval_cost);

  // every value tuple the form pattern attains over the check domain
  std::set<std::vector<std::uint64_t>> achieved;
  std::vector<std::uint64_t> pts(m);
  std::vector<std::uint64_t> s(ell);
  for (const NcPolynomial& P : family) {
    const std::vector<TorusValue> tab = P.evaluate_table();
    for (std::uint64_t t = 0; t < tuple_count; ++t) {
      std::uint64_t rest = t;
      for (std::size_t i = 0; i < m; ++i) {
        pts[i] = rest % dom.size();
        rest /= dom.size();
      }
      for (std::size_t j = 0; j < ell; ++j)
        s[j] = static_cast<std::uint64_t>(tab[apply_form(dom, forms[j], pts)].code(h + 1));
      achieved.insert(s);
    }
  }

  const std::uint64_t sweep_cost =
      mul_sat_u64(lam_count, mul_sat_u64(achieved.size(), ell));
  if (sweep_cost > budget || eval_cost + sweep_cost > budget)
    throw BudgetError("dependency-set lambda sweep exceeds the budget",
                      eval_cost + sweep_cost);

  // candidate checks write disjoint slots; collection below restores the
  // lexicographic order regardless of the thread count
  const std::vector<std::vector<std::uint64_t>> tuples(achieved.begin(), achieved.end());
  std::vector<std::uint8_t> keep(lam_count, 0);
  parallel_for(lam_count, threads, [&](std::uint64_t code) {
    const std::vector<std::uint64_t> lam = digits_msd(code, q, ell);
    for (const auto& tup : tuples)
      if (!annihilates(lam, tup.data(), ell, q)) return;
    keep[code] = 1;
  });
  for (std::uint64_t code = 0; code < lam_count; ++code)
    if (keep[code]) dep.lambdas.push_back(digits_msd(code, q, ell));
  return dep;
}

bool is_consistent(const std::vector<TorusValue>& b, const DependencySet& dep,
                   std::string* reason) {
  if (b.size() != dep.forms.size())
    throw DimensionError("value count differs from the form count");
  const std::uint64_t q = dep.modulus();
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j].p() != dep.p) throw DimensionError("torus prime differs from the set's");
    if (b[j].k() > dep.h + 1) {
      if (reason)
        *reason = "value " + std::to_string(j + 1) + " = " + b[j].str() +
                  " lies outside U_" + std::to_string(dep.h + 1);
      return false;
    }
  }
  std::vector<std::uint64_t> codes(b.size());
  for (std::size_t j = 0; j < b.size(); ++j)
    codes[j] = static_cast<std::uint64_t>(b[j].code(dep.h + 1));
  for (const auto& lam : dep.lambdas) {
    if (!annihilates(lam, codes.data(), codes.size(), q)) {
      if (reason) *reason = "lambda " + lambda_str(lam) + " does not vanish on the values";
      return false;
    }
  }
  if (reason) reason->clear();
  return true;
}

bool is_consistent(const std::vector<AtomLabel>& b, const std::vector<DependencySet>& deps,
                   std::string* reason) {
  const std::size_t C = deps.size();
  for (const AtomLabel& lab : b)
    if (lab.size() != C) throw DimensionError("label width differs from the slot count");
  for (std::size_t i = 0; i < C; ++i) {
    std::vector<TorusValue> slot;
    slot.reserve(b.size());
    for (const AtomLabel& lab : b) slot.push_back(lab[i]);
    std::string why;
    if (!is_consistent(slot, deps[i], reason ? &why : nullptr)) {
      if (reason) *reason = "slot " + std::to_string(i + 1) + ": " + why;
      return false;
    }
  }
  if (reason) reason->clear();
  return true;
}

ConsistentSet enumerate_consistent(int p, const std::vector<LinearForm>& forms,
                                   const std::vector<int>& degrees,
                                   const std::vector<int>& depths, int n_check,
                                   std::uint64_t budget) {
  if (degrees.size() != depths.size())
    throw DimensionError("degree and depth lists differ in length");
  checked_arity(p, forms);
  const std::size_t ell = forms.size();
  const std::size_t C = degrees.size();

  ConsistentSet out;
  out.conceivable = 1;
  std::vector<std::vector<std::vector<std::uint64_t>>> slot_codes(C);
  std::uint64_t combined = 1;
  for (std::size_t i = 0; i < C; ++i) {
    DependencySet dep = dependency_set(p, forms, degrees[i], depths[i], n_check, budget);
    slot_codes[i] = consistent_codes(dep, budget);
    out.conceivable = mul_sat_u64(out.conceivable, pow_u64(dep.modulus(), ell));
    combined = mul_sat_u64(combined, slot_codes[i].size());
    out.deps.push_back(std::move(dep));
  }
  if (combined > budget)
    throw BudgetError("combined consistent set exceeds the budget", combined);

  out.tuples.reserve(combined);
  std::vector<std::size_t> idx(C, 0);
  bool more = true;
  while (more) {
    std::vector<AtomLabel> tuple(ell);
    for (std::size_t j = 0; j < ell; ++j) {
      AtomLabel lab;
      lab.reserve(C);
      for (std::size_t i = 0; i < C; ++i)
        lab.push_back(TorusValue::from_code(
            p, static_cast<std::int64_t>(slot_codes[i][idx[i]][j]), depths[i] + 1));
      tuple[j] = std::move(lab);
    }
    out.tuples.push_back(std::move(tuple));
    more = false;
    for (std::size_t i = C; i-- > 0;) {
      if (++idx[i] < slot_codes[i].size()) {
        more = true;
        break;
      }
      idx[i] = 0;
    }
  }
  return out;
}

EquidistReport equidistribution_report(const PolyFactor& B,
                                       const std::vector<LinearForm>& forms, Rng* rng,
                                       std::uint64_t trials, int n_check,
                                       std::uint64_t budget) {
  const std::size_t m = checked_arity(B.p(), forms);
  const std::size_t ell = forms.size();
  EquidistReport rep;
  rep.order = B.order();
  rep.ell = ell;

  if (pow_u64(B.order(), ell) == UINT64_MAX)
    throw BudgetError("the atom-tuple key space overflows", UINT64_MAX);

  const ConsistentSet cons =
      enumerate_consistent(B.p(), forms, B.degrees(), B.depths(), n_check, budget);
  double lam_product = 1.0;
  for (const auto& dep : cons.deps) lam_product *= static_cast<double>(dep.lambdas.size());
  rep.formula = lam_product / static_cast<double>(cons.conceivable);
  rep.consistent_count = cons.tuples.size();

  const Domain& dom = B.dom();
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> pts(m);
  const auto tally = [&]() {
    std::uint64_t key = 0;
    std::uint64_t stride = 1;
    for (std::size_t j = 0; j < ell; ++j) {
      key += B.atom_code(apply_form(dom, forms[j], pts)) * stride;
      stride *= B.order();
    }
    ++counts[key];
    ++total;
  };

  if (rng == nullptr) {
    const std::uint64_t tuple_count = pow_u64(dom.size(), m);
    const std::uint64_t cost = mul_sat_u64(tuple_count, ell);
    if (cost > budget)
      throw BudgetError("the exact equidistribution sweep exceeds the budget", cost);
    for (std::uint64_t t = 0; t < tuple_count; ++t) {
      std::uint64_t rest = t;
      for (std::size_t i = 0; i < m; ++i) {
        pts[i] = rest % dom.size();
        rest /= dom.size();
      }
      tally();
    }
    rep.exact = true;
    rep.samples = 0;
  } else {
    if (trials == 0) throw DimensionError("sampling mode needs a positive trial count");
    for (std::uint64_t t = 0; t < trials; ++t) {
      for (auto& v : pts) v = rng->below(dom.size());
      tally();
    }
    rep.exact = false;
    rep.samples = trials;
  }

  std::set<std::uint64_t> consistent_keys;
  for (const auto& tuple : cons.tuples) {
    std::uint64_t key = 0;
    std::uint64_t stride = 1;
    for (std::size_t j = 0; j < ell; ++j) {
      std::uint64_t code = 0;
      std::uint64_t cstride = 1;
      for (std::size_t i = 0; i < tuple[j].size(); ++i) {
        code += static_cast<std::uint64_t>(tuple[j][i].code(B.depths()[i] + 1)) * cstride;
        cstride *= pow_u64(B.p(), B.depths()[i] + 1);
      }
      key += code * stride;
      stride *= B.order();
    }
    consistent_keys.insert(key);
  }

  double dev = 0.0;
  std::uint64_t on_count = 0;
  for (std::uint64_t key : consistent_keys) {
    const auto it = counts.find(key);
    const std::uint64_t c = it == counts.end() ? 0 : it->second;
    on_count += c;
    dev = std::max(dev,
                   std::abs(static_cast<double>(c) / static_cast<double>(total) - rep.formula));
  }
  rep.max_deviation = dev;
  rep.inconsistent_mass =
      static_cast<double>(total - on_count) / static_cast<double>(total);
  return rep;
}

TransferReport gamma_transfer_report(const GammaTable& G, const PolyFactor& P,
                                     const PolyFactor& Q, int d, std::uint64_t budget,
                                     int threads) {
  if (d < 1) throw DimensionError("the uniformity order must be at least 1");
  if (P.p() != Q.p() || P.p() != G.p()) throw DimensionError("prime moduli differ");
  if (P.degrees() != Q.degrees()) throw DimensionError("degree signatures differ");
  if (P.depths() != Q.depths() || P.depths() != G.depths())
    throw DimensionError("depth signatures differ");

  TransferReport rep;
  const FunctionTable gp = compose_gamma(G, P);
  const FunctionTable gq = compose_gamma(G, Q);
  if (P.n() == Q.n()) {
    rep.value = gowers_norm_exact(table_sub(gp, gq), d, budget, threads).value;
    rep.via_tv = false;
    rep.m = 0;
  } else {
    // order-d uniformity is carried by restrictions to dimension-d affine
    // images, so that is the scale at which the two composites are compared
    rep.m = d;
    const RestrictionDistribution a = restriction_distribution(gp, d, nullptr, 0, budget);
    const RestrictionDistribution b = restriction_distribution(gq, d, nullptr, 0, budget);
    rep.value = tv_distance(a, b);
    rep.via_tv = true;
  }
  return rep;
}

}  // namespace hofa
