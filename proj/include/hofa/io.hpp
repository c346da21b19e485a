#ifndef HOFA_IO_HPP
#define HOFA_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hofa/instance.hpp"
#include "hofa/table.hpp"

namespace hofa {

// Function tables as text: header "fpfn 1 <p> <n> <kind>", then p^n
// whitespace-separated values in canonical point order. Booleans print as
// 0/1, unit and signed values as shortest round-trip decimals, torus values
// as "a/p^k" with the denominator evaluated, complex values as "re,im".
std::string table_to_text(const FunctionTable& f);
FunctionTable table_from_text(std::string_view text);

// Polynomial lists as text: header "fppoly 1 <p> <n>", then one canonical
// polynomial per line in the term grammar of NcPolynomial::str.
struct PolyFile {
  int p = 2;
  int n = 1;
  std::vector<NcPolynomial> polys;
};
std::string polys_to_text(int p, int n, const std::vector<NcPolynomial>& polys);
PolyFile polys_from_text(std::string_view text);

// Regularity-instances as JSON objects with fields p, gamma, C, degree_bound,
// degrees, depths, optional rank, and gamma_table as a list of {atom, value}
// entries in code order; atoms are bit-exact torus strings. Reading validates
// the instance and accepts the entries in any order.
nlohmann::json instance_to_json(const RegularityInstance& I);
RegularityInstance instance_from_json(const nlohmann::json& j);

// A family is {"instances": [...]}; a bare array is accepted on read.
nlohmann::json family_to_json(const std::vector<RegularityInstance>& family);
std::vector<RegularityInstance> family_from_json(const nlohmann::json& j);

// Restriction distributions as JSON: p, m, exact, samples, and mass as a
// list of {table, prob} entries sorted by table, each table a 0/1 string over
// the p^m points in canonical order.
nlohmann::json distribution_to_json(const RestrictionDistribution& mu);
RestrictionDistribution distribution_from_json(const nlohmann::json& j);

// Deterministic JSON text: sorted keys, two-space indent, LF only. Fixed12
// prints every real with exactly twelve fixed decimals (diff-stable reports);
// Shortest prints the shortest decimal that reads back to the same double
// (files whose round trip must be the identity).
enum class FloatStyle { Fixed12, Shortest };
std::string dump_json(const nlohmann::json& j, FloatStyle style);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit content digest as 16 hex digits.
std::string content_digest(std::string_view bytes);

}  // namespace hofa

#endif
