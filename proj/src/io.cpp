#include "hofa/io.hpp"

#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hofa/factor.hpp"

namespace hofa {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_real(const std::string& tok) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw ParseError("bad real literal '" + tok + "'");
  return v;
}

long long parse_int_tok(const std::string& tok) {
  long long v = 0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw ParseError("bad integer literal '" + tok + "'");
  return v;
}

std::string shortest_real(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("real serialization failed");
  return std::string(buf, ptr);
}

std::string fixed12_real(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.12f", v);
  return buf;
}

void dump_rec(const nlohmann::json& j, FloatStyle style, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(it.key()).dump() + ": ";
        dump_rec(it.value(), style, depth + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_rec(v, style, depth + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      out += style == FloatStyle::Fixed12 ? fixed12_real(v) : shortest_real(v);
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string table_to_text(const FunctionTable& f) {
  std::string out = "fpfn 1 " + std::to_string(f.dom().p()) + " " +
                    std::to_string(f.dom().n()) + " " + kind_name(f.kind()) + "\n";
  for (std::uint64_t i = 0; i < f.size(); ++i) {
    std::string tok;
    switch (f.kind()) {
      case Kind::Boolean:
        tok = f.real()[i] != 0.0 ? "1" : "0";
        break;
      case Kind::Unit:
      case Kind::Signed:
        tok = shortest_real(f.real()[i]);
        break;
      case Kind::Torus:
        tok = f.torus_values()[i].str();
        break;
      case Kind::Complex:
        tok = shortest_real(f.cplx()[i].real()) + "," + shortest_real(f.cplx()[i].imag());
        break;
    }
    out += tok;
    out += (i + 1) % 16 == 0 || i + 1 == f.size() ? '\n' : ' ';
  }
  return out;
}

FunctionTable table_from_text(std::string_view text) {
  const std::vector<std::string> toks = tokenize(text);
  if (toks.size() < 5 || toks[0] != "fpfn")
    throw ParseError("expected a 'fpfn <version> <p> <n> <kind>' header");
  if (toks[1] != "1") throw ParseError("unsupported fpfn version " + toks[1]);
  const int p = static_cast<int>(parse_int_tok(toks[2]));
  const int n = static_cast<int>(parse_int_tok(toks[3]));
  const Kind kind = parse_kind(toks[4]);
  const Domain dom(p, n);
  if (toks.size() != 5 + dom.size())
    throw ParseError("expected " + std::to_string(dom.size()) + " values, found " +
                     std::to_string(toks.size() - 5));

  if (kind == Kind::Torus) {
    std::vector<TorusValue> vals;
    vals.reserve(dom.size());
    for (std::uint64_t i = 0; i < dom.size(); ++i)
      vals.push_back(TorusValue::parse(p, toks[5 + i]));
    return FunctionTable::torus(p, n, std::move(vals));
  }
  if (kind == Kind::Complex) {
    std::vector<std::complex<double>> vals;
    vals.reserve(dom.size());
    for (std::uint64_t i = 0; i < dom.size(); ++i) {
      const std::string& tok = toks[5 + i];
      const auto comma = tok.find(',');
      if (comma == std::string::npos)
        throw ParseError("complex values read as 're,im', got '" + tok + "'");
      vals.emplace_back(parse_real(tok.substr(0, comma)), parse_real(tok.substr(comma + 1)));
    }
    return FunctionTable::complex_(p, n, std::move(vals));
  }

  std::vector<double> vals;
  vals.reserve(dom.size());
  for (std::uint64_t i = 0; i < dom.size(); ++i) {
    const std::string& tok = toks[5 + i];
    if (kind == Kind::Boolean && tok != "0" && tok != "1")
      throw ParseError("boolean values are 0 or 1, got '" + tok + "'");
    vals.push_back(parse_real(tok));
  }
  switch (kind) {
    case Kind::Boolean: return FunctionTable::boolean(p, n, std::move(vals));
    case Kind::Unit: return FunctionTable::unit(p, n, std::move(vals));
    default: return FunctionTable::signed_(p, n, std::move(vals));
  }
}

std::string polys_to_text(int p, int n, const std::vector<NcPolynomial>& polys) {
  std::string out = "fppoly 1 " + std::to_string(p) + " " + std::to_string(n) + "\n";
  for (const auto& P : polys) {
    if (P.p() != p || P.n() != n) throw DimensionError("polynomial outside the header space");
    out += P.str() + "\n";
  }
  return out;
}

PolyFile polys_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty polynomial file");
  const std::vector<std::string> toks = tokenize(header);
  if (toks.size() != 4 || toks[0] != "fppoly")
    throw ParseError("expected a 'fppoly <version> <p> <n>' header");
  if (toks[1] != "1") throw ParseError("unsupported fppoly version " + toks[1]);
  PolyFile out;
  out.p = static_cast<int>(parse_int_tok(toks[2]));
  out.n = static_cast<int>(parse_int_tok(toks[3]));
  std::string line;
  while (std::getline(in, line)) {
    if (tokenize(line).empty()) continue;
    out.polys.push_back(NcPolynomial::parse(out.p, out.n, line));
  }
  return out;
}

nlohmann::json instance_to_json(const RegularityInstance& I) {
  nlohmann::json j;
  j["p"] = I.gamma_table.p();
  j["gamma"] = I.gamma;
  j["C"] = I.complexity();
  j["degree_bound"] = I.d;
  j["degrees"] = I.degrees;
  j["depths"] = I.depths;
  if (I.rank) j["rank"] = *I.rank;
  nlohmann::json table = nlohmann::json::array();
  for (std::uint64_t code = 0; code < I.gamma_table.order(); ++code) {
    nlohmann::json entry;
    nlohmann::json atom = nlohmann::json::array();
    for (const auto& t : I.gamma_table.label_of_code(code)) atom.push_back(t.str());
    entry["atom"] = std::move(atom);
    entry["value"] = I.gamma_table.values()[code];
    table.push_back(std::move(entry));
  }
  j["gamma_table"] = std::move(table);
  return j;
}

RegularityInstance instance_from_json(const nlohmann::json& j) {
  for (const char* field : {"p", "gamma", "C", "degree_bound", "degrees", "depths", "gamma_table"})
    if (!j.contains(field)) throw ParseError(std::string("instance field '") + field + "' missing");
  const int p = j.at("p").get<int>();
  RegularityInstance I;
  I.gamma = j.at("gamma").get<double>();
  I.d = j.at("degree_bound").get<int>();
  I.degrees = j.at("degrees").get<std::vector<int>>();
  I.depths = j.at("depths").get<std::vector<int>>();
  if (j.contains("rank")) I.rank = j.at("rank").get<int>();
  if (j.at("C").get<std::uint64_t>() != I.degrees.size())
    throw ParseError("instance field C disagrees with the degree list");

  // Lay values out in code order by matching each entry's canonical atom
  // string against a scratch table over the same depth signature.
  std::uint64_t order = 1;
  for (int h : I.depths) {
    if (h < 0) throw ParseError("negative depth");
    std::uint64_t q = 1;
    for (int i = 0; i <= h; ++i) q *= static_cast<std::uint64_t>(p);
    order *= q;
  }
  const GammaTable scratch(p, I.depths, std::vector<double>(order, 0.0));
  std::map<std::string, std::uint64_t> code_of;
  for (std::uint64_t code = 0; code < order; ++code)
    code_of[label_str(scratch.label_of_code(code))] = code;

  std::vector<double> values(order, 0.0);
  std::vector<bool> seen(order, false);
  for (const auto& entry : j.at("gamma_table")) {
    AtomLabel label;
    for (const auto& s : entry.at("atom")) label.push_back(TorusValue::parse(p, s.get<std::string>()));
    const auto it = code_of.find(label_str(label));
    if (it == code_of.end())
      throw ParseError("atom " + label_str(label) + " is outside the label domain");
    if (seen[it->second]) throw ParseError("atom " + label_str(label) + " appears twice");
    seen[it->second] = true;
    values[it->second] = entry.at("value").get<double>();
  }
  for (std::uint64_t code = 0; code < order; ++code)
    if (!seen[code])
      throw ParseError("atom " + label_str(scratch.label_of_code(code)) + " is missing");
  I.gamma_table = GammaTable(p, I.depths, std::move(values));
  I.validate();
  return I;
}

nlohmann::json family_to_json(const std::vector<RegularityInstance>& family) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& I : family) arr.push_back(instance_to_json(I));
  nlohmann::json j;
  j["instances"] = std::move(arr);
  return j;
}

std::vector<RegularityInstance> family_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : j.at("instances");
  if (!arr.is_array()) throw ParseError("a family is a list of instances");
  std::vector<RegularityInstance> out;
  for (const auto& e : arr) out.push_back(instance_from_json(e));
  return out;
}

nlohmann::json distribution_to_json(const RestrictionDistribution& mu) {
  nlohmann::json j;
  j["p"] = mu.p;
  j["m"] = mu.m;
  j["exact"] = mu.exact;
  j["samples"] = mu.samples;
  nlohmann::json mass = nlohmann::json::array();
  for (const auto& [bits, prob] : mu.mass) {
    nlohmann::json entry;
    entry["table"] = mu.table_str(bits);
    entry["prob"] = prob;
    mass.push_back(std::move(entry));
  }
  j["mass"] = std::move(mass);
  return j;
}

RestrictionDistribution distribution_from_json(const nlohmann::json& j) {
  for (const char* field : {"p", "m", "exact", "samples", "mass"})
    if (!j.contains(field))
      throw ParseError(std::string("distribution field '") + field + "' missing");
  RestrictionDistribution mu;
  mu.p = j.at("p").get<int>();
  mu.m = j.at("m").get<int>();
  mu.exact = j.at("exact").get<bool>();
  mu.samples = j.at("samples").get<std::uint64_t>();
  const std::uint64_t points = mu.points();
  if (points > 63) throw ParseError("distribution tables need p^m <= 63");
  for (const auto& entry : j.at("mass")) {
    const std::string table = entry.at("table").get<std::string>();
    if (table.size() != points)
      throw ParseError("table '" + table + "' has the wrong point count");
    std::uint64_t bits = 0;
    for (std::uint64_t i = 0; i < points; ++i) {
      if (table[i] != '0' && table[i] != '1')
        throw ParseError("table '" + table + "' is not a 0/1 string");
      if (table[i] == '1') bits |= 1ULL << i;
    }
    if (mu.mass.count(bits)) throw ParseError("table '" + table + "' appears twice");
    mu.mass[bits] = entry.at("prob").get<double>();
  }
  return mu;
}

std::string dump_json(const nlohmann::json& j, FloatStyle style) {
  std::string out;
  dump_rec(j, style, 0, out);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ParseError("short write to '" + path + "'");
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace hofa
