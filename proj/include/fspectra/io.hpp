#pragma once
// JSON documents for kernels, filters, S_f relations, curves and walks, and
// CSV output with 17 significant digits.
//
//   {"type":"kernel","breakpoints":["0","1/2","1"],"coeffs":[[i,j,a,b,re,im],...]}
//   {"type":"filter","entries":[[i,j,value],...]}
//   {"type":"rational","numerator":[c0,c1,...],"denominator":[...]}
//   {"type":"relation","coeffs":[[dm,dT,value],...]}
//   {"coeffs":[[dx,dy,"p/q"],...]}                       (curve in lambda, S)
//   {"type":"walk","l":1,"z":[[re,im],...],"t_max":60}
//
// Exact values may be JSON integers or strings holding "p/q" or a decimal;
// JSON floats are read as their shortest round-trip decimal (0.1 is 1/10).

#include "fspectra/algebra.hpp"
#include "fspectra/kernel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace fspectra {

using Json = nlohmann::json;

inline Rational rational_from_json(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(std::to_string(v.get<std::int64_t>()));
  if (v.is_number_unsigned()) return Rational(std::to_string(v.get<std::uint64_t>()));
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw PreconditionError("expected a number or a rational string, got " + v.dump());
}

inline Json rational_to_json(const Rational& q) { return q.get_str(); }

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline std::string document_type(const Json& doc) {
  if (!doc.is_object()) throw PreconditionError("expected a JSON object");
  return doc.value("type", std::string{});
}

inline Kernel kernel_from_json(const Json& doc) {
  if (document_type(doc) != "kernel") throw PreconditionError("expected a document with \"type\":\"kernel\"");
  std::vector<Rational> bps{Rational(0), Rational(1)};
  if (doc.contains("breakpoints")) {
    bps.clear();
    for (const auto& v : doc.at("breakpoints")) bps.push_back(rational_from_json(v));
  }
  const auto& coeffs = doc.at("coeffs");
  int band = doc.value("band", 0);
  for (const auto& row : coeffs) {
    if (!row.is_array() || row.size() != 6) throw PreconditionError("kernel coefficient rows are [i,j,a,b,re,im]: " + row.dump());
    band = std::max({band, std::abs(row[0].get<int>()), std::abs(row[1].get<int>())});
  }
  Kernel k(IntervalPartition(bps), band);
  for (const auto& row : coeffs) {
    const int a = row[2].get<int>(), b = row[3].get<int>();
    if (a < 0 || b < 0) throw PreconditionError("negative interval index in " + row.dump());
    k.set(row[0].get<int>(), row[1].get<int>(), static_cast<std::size_t>(a), static_cast<std::size_t>(b),
          QComplex(rational_from_json(row[4]), rational_from_json(row[5])));
  }
  return k;
}

inline Json kernel_to_json(const Kernel& k) {
  Json doc{{"type", "kernel"}, {"band", k.band()}};
  Json bps = Json::array();
  for (const auto& b : k.partition().breakpoints()) bps.push_back(rational_to_json(b));
  doc["breakpoints"] = bps;
  Json coeffs = Json::array();
  const int K = k.band();
  for (int i = -K; i <= K; ++i)
    for (int j = -K; j <= K; ++j)
      for (std::size_t a = 0; a < k.intervals(); ++a)
        for (std::size_t b = 0; b < k.intervals(); ++b) {
          const auto& v = k.exact(i, j, a, b);
          if (!v.is_zero()) coeffs.push_back({i, j, a, b, rational_to_json(v.re), rational_to_json(v.im)});
        }
  doc["coeffs"] = coeffs;
  return doc;
}

inline Filter filter_from_json(const Json& doc) {
  if (document_type(doc) != "filter") throw PreconditionError("expected a document with \"type\":\"filter\"");
  Filter::Entries entries;
  for (const auto& row : doc.at("entries")) {
    if (!row.is_array() || row.size() != 3) throw PreconditionError("filter entries are [i,j,value]: " + row.dump());
    entries[{row[0].get<int>(), row[1].get<int>()}] = rational_from_json(row[2]);
  }
  return Filter(std::move(entries));
}

inline Json filter_to_json(const Filter& h) {
  Json entries = Json::array();
  for (const auto& [ij, v] : h.entries()) entries.push_back({ij.first, ij.second, rational_to_json(v)});
  return Json{{"type", "filter"}, {"entries", entries}};
}

/// Kernel of a kernel or filter document.
inline Kernel kernel_from_document(const Json& doc) {
  const auto type = document_type(doc);
  if (type == "kernel") return kernel_from_json(doc);
  if (type == "filter") return kernel_from_filter(filter_from_json(doc));
  throw PreconditionError("expected a kernel or filter document, got type \"" + type + "\"");
}

inline UPoly upoly_from_json(const Json& coeffs) {
  std::vector<Rational> c;
  for (const auto& v : coeffs) c.push_back(rational_from_json(v));
  return UPoly(std::move(c));
}

inline BivariatePolynomial bivariate_from_json(const Json& coeffs) {
  Polynomial p(2);
  for (const auto& row : coeffs) {
    if (!row.is_array() || row.size() != 3) throw PreconditionError("bivariate terms are [dx,dy,value]: " + row.dump());
    const int dx = row[0].get<int>(), dy = row[1].get<int>();
    if (dx < 0 || dy < 0) throw PreconditionError("negative exponent in " + row.dump());
    p.add_term({dx, dy}, rational_from_json(row[2]));
  }
  return p;
}

inline Json bivariate_to_json(const BivariatePolynomial& p) {
  Json coeffs = Json::array();
  for (const auto& [e, v] : p.terms()) coeffs.push_back({e[0], e[1], rational_to_json(v)});
  return coeffs;
}

/// R(m, T) from a "rational" or "relation" document.
inline BivariatePolynomial relation_from_json(const Json& doc) {
  const auto type = document_type(doc);
  if (type == "rational") return UnivariateRationalFunction(upoly_from_json(doc.at("numerator")), upoly_from_json(doc.at("denominator"))).relation();
  if (type == "relation") return bivariate_from_json(doc.at("coeffs"));
  throw PreconditionError("expected a \"rational\" or \"relation\" document, got type \"" + type + "\"");
}

inline BivariatePolynomial curve_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("coeffs")) throw PreconditionError("curve documents are {\"coeffs\":[[dx,dy,\"p/q\"],...]}");
  return bivariate_from_json(doc.at("coeffs"));
}

inline Json curve_to_json(const BivariatePolynomial& F) { return Json{{"coeffs", bivariate_to_json(F)}}; }

struct WalkConfig {
  int l = 1;
  std::vector<Complex> z;
  int t_max = 60;
};

inline WalkConfig walk_from_json(const Json& doc) {
  if (document_type(doc) != "walk") throw PreconditionError("expected a document with \"type\":\"walk\"");
  WalkConfig w;
  w.l = doc.at("l").get<int>();
  w.t_max = doc.value("t_max", 60);
  for (const auto& v : doc.at("z")) {
    if (v.is_array() && v.size() == 2)
      w.z.emplace_back(v[0].get<double>(), v[1].get<double>());
    else
      w.z.emplace_back(v.get<double>(), 0.0);
  }
  return w;
}

/// "%.17g"
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// Comma-separated table with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(double v) { return add(format_double(v)); }
    Row& operator<<(int v) { return add(std::to_string(v)); }
    Row& operator<<(long v) { return add(std::to_string(v)); }
    Row& operator<<(std::size_t v) { return add(std::to_string(v)); }
    Row& operator<<(bool v) { return add(v ? "true" : "false"); }
    Row& operator<<(const std::string& v) { return add(v); }
    Row& operator<<(const char* v) { return add(v); }

   private:
    friend class CsvTable;
    Row& add(std::string cell) {
      cells_.push_back(std::move(cell));
      return *this;
    }
    std::vector<std::string> cells_;
  };

  Row& row() {
    rows_.emplace_back();
    return rows_.back();
  }

  std::string str() const {
    std::ostringstream os;
    write_line(os, header_);
    for (const auto& r : rows_) {
      if (r.cells_.size() != header_.size()) throw Error("internal: CSV row width differs from header");
      write_line(os, r.cells_);
    }
    return os.str();
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      if (cells[i].find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char c : cells[i]) os << (c == '"' ? "\"\"" : std::string(1, c));
        os << '"';
      } else {
        os << cells[i];
      }
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace fspectra
