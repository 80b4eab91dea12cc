#pragma once

// JSON ingestion of schemes, windows, weights, measures and finite mixed
// measures; JSON/CSV/SVG serialization with shortest round-trip doubles.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "meyer/expr.hpp"
#include "meyer/measures.hpp"
#include "meyer/transform.hpp"

namespace meyer::io {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

/// Rejects keys outside `allowed`.
inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where, "unknown field '" + key + "'");
  }
}

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

/// A number or an exact expression string such as "(1+sqrt(5))/2".
inline double number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return eval_expression(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(where, e.what());
    }
  }
  fail(where, "expected a number or expression string");
}

inline double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0) || !std::isfinite(v)) fail(where, "must be positive");
  return v;
}

/// A real number or a pair [re, im].
inline Complex complex_number(const json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) fail(where, "complex values are [re, im]");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
  }
  return number(j, where);
}

inline std::vector<double> numbers(const json& j, const std::string& where, std::optional<std::size_t> len = {}) {
  if (!j.is_array()) fail(where, "expected an array");
  if (len && j.size() != *len) fail(where, "expected " + std::to_string(*len) + " entries");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline std::vector<long long> integers(const json& j, const std::string& where, std::size_t len) {
  if (!j.is_array() || j.size() != len) fail(where, "expected " + std::to_string(len) + " integers");
  std::vector<long long> v;
  for (std::size_t i = 0; i < len; ++i) {
    if (!j[i].is_number_integer()) fail(where + "[" + std::to_string(i) + "]", "expected an integer");
    v.push_back(j[i].get<long long>());
  }
  return v;
}

inline std::pair<double, double> interval_pair(const json& j, const std::string& where) {
  const auto v = numbers(j, where, 2);
  if (!(v[1] > v[0])) fail(where, "interval needs lo < hi");
  return {v[0], v[1]};
}

/// Box as a list of m [lo, hi] pairs; a bare [lo, hi] when m = 1.
inline Box parse_box(const json& j, int m, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a box");
  if (m == 1 && j.size() == 2 && !j[0].is_array()) {
    const auto [a, b] = interval_pair(j, where);
    return interval(a, b);
  }
  if (static_cast<int>(j.size()) != m) fail(where, "box needs " + std::to_string(m) + " intervals");
  Box b{Vector(m), Vector(m)};
  for (int i = 0; i < m; ++i) std::tie(b.lo[i], b.hi[i]) = interval_pair(j[i], where + "[" + std::to_string(i) + "]");
  return b;
}

inline Window parse_window(const json& j, int m, int z, const std::string& where = "window") {
  check_keys(j, {"boxes", "discrete", "margin"}, where);
  Window w;
  if (j.contains("boxes")) {
    const auto& bs = j.at("boxes");
    if (!bs.is_array()) fail(where + ".boxes", "expected an array of boxes");
    for (std::size_t i = 0; i < bs.size(); ++i) w.boxes.push_back(parse_box(bs[i], m, where + ".boxes[" + std::to_string(i) + "]"));
  }
  if (j.contains("discrete")) {
    const auto& ds = j.at("discrete");
    if (!ds.is_array()) fail(where + ".discrete", "expected an array of integer vectors");
    for (std::size_t i = 0; i < ds.size(); ++i)
      w.discrete.push_back(integers(ds[i], where + ".discrete[" + std::to_string(i) + "]", z));
  }
  if (j.contains("margin")) w.margin = number(j.at("margin"), where + ".margin");
  try {
    w.validate(m, z);
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return w;
}

struct SchemeInput {
  EuclideanCPS cps;
  std::optional<Window> window;
};

/// {"n","m","z","basis": N*N row-major entries (numbers or exact strings), "window"?}
inline SchemeInput parse_cps(const json& j, const std::string& where = "cps") {
  check_keys(j, {"n", "m", "z", "basis", "window", "name"}, where);
  auto dim = [&](const char* k) {
    const auto& v = need(j, k, where);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where + "." + k, "expected a non-negative integer");
    return static_cast<int>(v.get<long long>());
  };
  const int n = dim("n"), m = dim("m"), z = dim("z");
  const int N = n + m + z;
  if (n < 1) fail(where + ".n", "must be at least 1");
  const auto entries = numbers(need(j, "basis", where), where + ".basis", static_cast<std::size_t>(N * N));
  Eigen::MatrixXd b(N, N);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) b(r, c) = entries[r * N + c];
  SchemeInput s;
  s.cps = make_cps(n, m, z, b);
  if (j.contains("window")) s.window = parse_window(j.at("window"), m, z, where + ".window");
  return s;
}

inline DiscreteProfile parse_discrete(const json& j, int z, const std::string& where) {
  check_keys(j, {"type", "support", "values"}, where);
  const auto& sup = need(j, "support", where);
  const auto& val = need(j, "values", where);
  if (!sup.is_array() || !val.is_array() || sup.size() != val.size()) fail(where, "support and values must be equal-length arrays");
  DiscreteProfile d;
  for (std::size_t i = 0; i < sup.size(); ++i)
    d.values[integers(sup[i], where + ".support[" + std::to_string(i) + "]", z)] =
        complex_number(val[i], where + ".values[" + std::to_string(i) + "]");
  return d;
}

inline BoxChain parse_chain(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty list of [a, b] boxes");
  std::vector<std::pair<double, double>> boxes;
  for (std::size_t i = 0; i < j.size(); ++i) boxes.push_back(interval_pair(j[i], where + "[" + std::to_string(i) + "]"));
  return BoxChain(boxes);
}

/// Weight descriptors: bspline, gaussian, discrete, bump (needs a window), or an array (sum).
inline WeightProfile parse_weight(const json& j, int m, int z, const Window* window = nullptr,
                                  const std::string& where = "weight") {
  if (j.is_array()) {
    if (j.empty()) fail(where, "empty weight sum");
    WeightProfile w = parse_weight(j[0], m, z, window, where + "[0]");
    for (std::size_t i = 1; i < j.size(); ++i) w = w + parse_weight(j[i], m, z, window, where + "[" + std::to_string(i) + "]");
    return w;
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) fail(where, "expected an object with a 'type'");
  const std::string type = j.at("type").get<std::string>();
  auto coefficient = [&](const json& o) -> Complex {
    if (!o.contains("coeffs")) return 1.0;
    const auto& c = o.at("coeffs");
    if (!c.is_array() || c.size() != 1) fail(where + ".coeffs", "expected one coefficient");
    return complex_number(c[0], where + ".coeffs[0]");
  };
  auto discrete_factor = [&](const json& o) {
    if (z == 0) {
      if (o.contains("discrete")) fail(where + ".discrete", "scheme has no discrete factor");
      return DiscreteProfile{};
    }
    return parse_discrete(need(o, "discrete", where), z, where + ".discrete");
  };
  try {
    if (type == "bspline") {
      check_keys(j, {"type", "boxes", "coeffs", "discrete"}, where);
      if (m < 1) fail(where, "bspline weights need m >= 1");
      const auto& bx = need(j, "boxes", where);
      std::vector<BoxChain> chains;
      if (m == 1 && bx.is_array() && !bx.empty() && bx[0].is_array() && !bx[0].empty() && !bx[0][0].is_array())
        chains.push_back(parse_chain(bx, where + ".boxes"));
      else {
        if (!bx.is_array() || static_cast<int>(bx.size()) != m) fail(where + ".boxes", "expected one chain per real axis");
        for (int i = 0; i < m; ++i) chains.push_back(parse_chain(bx[i], where + ".boxes[" + std::to_string(i) + "]"));
      }
      return bspline_profile(std::move(chains), coefficient(j), z, discrete_factor(j));
    }
    if (type == "gaussian") {
      check_keys(j, {"type", "sigma", "poly", "coeffs", "discrete"}, where);
      if (m != 1) fail(where, "gaussian weights need m = 1");
      Gaussian1D g{positive(need(j, "sigma", where), where + ".sigma"),
                   j.contains("poly") ? numbers(j.at("poly"), where + ".poly") : std::vector<double>{1.0}};
      if (g.poly.empty()) fail(where + ".poly", "empty polynomial");
      ProfileTerm t{coefficient(j), {g}, discrete_factor(j)};
      return WeightProfile(1, z, {t});
    }
    if (type == "discrete") {
      if (m != 0) fail(where, "pure discrete weights need m = 0");
      ProfileTerm t{1.0, {}, parse_discrete(j, z, where)};
      return WeightProfile(0, z, {t});
    }
    if (type == "bump") {
      check_keys(j, {"type", "margin"}, where);
      if (!window) fail(where, "bump weights need a window");
      return build_bump(*window, m, z, positive(need(j, "margin", where), where + ".margin"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(where, e.what());
  }
  fail(where + ".type", "unknown weight type '" + type + "'");
}

/// {"n", "pp": [{"x", "mass"}], "ac": [{"coeff", "boxes"}], "sc": [{"ratio", "mass", "scale", "shift"}]}
inline FiniteMixedMeasure parse_nu(const json& j, const std::string& where = "nu") {
  check_keys(j, {"n", "pp", "ac", "sc"}, where);
  const auto& nj = need(j, "n", where);
  if (!nj.is_number_integer() || nj.get<long long>() < 1) fail(where + ".n", "expected a positive integer");
  const int n = static_cast<int>(nj.get<long long>());
  std::vector<PointMass> pp;
  std::vector<AcComponent> ac;
  std::vector<CantorComponent> sc;
  auto list = [&](const char* key) -> const json& {
    static const json empty = json::array();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_array()) fail(where + "." + key, "expected an array");
    return j.at(key);
  };
  const auto& pj = list("pp");
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const std::string w = where + ".pp[" + std::to_string(i) + "]";
    check_keys(pj[i], {"x", "mass"}, w);
    pp.push_back({numbers(need(pj[i], "x", w), w + ".x", n), complex_number(need(pj[i], "mass", w), w + ".mass")});
  }
  const auto& aj = list("ac");
  for (std::size_t i = 0; i < aj.size(); ++i) {
    const std::string w = where + ".ac[" + std::to_string(i) + "]";
    check_keys(aj[i], {"coeff", "boxes"}, w);
    ac.push_back({aj[i].contains("coeff") ? complex_number(aj[i].at("coeff"), w + ".coeff") : Complex(1.0),
                  parse_chain(need(aj[i], "boxes", w), w + ".boxes")});
  }
  const auto& sj = list("sc");
  for (std::size_t i = 0; i < sj.size(); ++i) {
    const std::string w = where + ".sc[" + std::to_string(i) + "]";
    check_keys(sj[i], {"ratio", "mass", "scale", "shift"}, w);
    CantorComponent c;
    if (sj[i].contains("ratio")) c.ratio = number(sj[i].at("ratio"), w + ".ratio");
    if (sj[i].contains("mass")) c.mass = complex_number(sj[i].at("mass"), w + ".mass");
    if (sj[i].contains("scale")) c.scale = number(sj[i].at("scale"), w + ".scale");
    if (sj[i].contains("shift")) c.shift = number(sj[i].at("shift"), w + ".shift");
    sc.push_back(c);
  }
  try {
    return FiniteMixedMeasure(n, std::move(pp), std::move(ac), std::move(sc));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

/// {"n", "regions": [{"center", "radius"}] | "radius", "atoms": [[x..., re, im]]}
inline AtomicMeasure parse_measure(const json& j, const std::string& where = "measure") {
  check_keys(j, {"n", "radius", "regions", "atoms", "provenance"}, where);
  const auto& nj = need(j, "n", where);
  if (!nj.is_number_integer() || nj.get<long long>() < 1) fail(where + ".n", "expected a positive integer");
  const int n = static_cast<int>(nj.get<long long>());
  std::vector<SafeBall> regions;
  if (j.contains("radius")) regions.push_back({Vector(n, 0.0), number(j.at("radius"), where + ".radius")});
  if (j.contains("regions")) {
    const auto& rs = j.at("regions");
    if (!rs.is_array()) fail(where + ".regions", "expected an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string w = where + ".regions[" + std::to_string(i) + "]";
      check_keys(rs[i], {"center", "radius"}, w);
      regions.push_back({numbers(need(rs[i], "center", w), w + ".center", n), number(need(rs[i], "radius", w), w + ".radius")});
    }
  }
  if (regions.empty()) fail(where, "a measure needs 'radius' or 'regions'");
  const auto& aj = need(j, "atoms", where);
  if (!aj.is_array()) fail(where + ".atoms", "expected an array");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < aj.size(); ++i) {
    const auto v = numbers(aj[i], where + ".atoms[" + std::to_string(i) + "]", n + 2);
    atoms.push_back({Vector(v.begin(), v.begin() + n), Complex(v[n], v[n + 1])});
  }
  try {
    AtomicMeasure mu(n, std::move(atoms), std::move(regions));
    if (j.contains("provenance") && j.at("provenance").is_string()) mu.provenance = j.at("provenance").get<std::string>();
    return mu;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

// ---- serialization --------------------------------------------------------

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad number '" + std::string(s) + "'");
  return v;
}

inline json to_json(const Box& b) {
  json a = json::array();
  for (int i = 0; i < b.dim(); ++i) a.push_back(json::array({b.lo[i], b.hi[i]}));
  return a;
}

inline json to_json(const AtomicMeasure& mu) {
  json j;
  j["n"] = mu.n();
  json regions = json::array();
  for (const auto& r : mu.regions()) regions.push_back({{"center", r.center}, {"radius", r.radius}});
  j["regions"] = regions;
  json atoms = json::array();
  for (const auto& a : mu.atoms()) {
    json row = json::array();
    for (double x : a.x) row.push_back(x);
    row.push_back(a.w.real());
    row.push_back(a.w.imag());
    atoms.push_back(std::move(row));
  }
  j["atoms"] = std::move(atoms);
  if (!mu.provenance.empty()) j["provenance"] = mu.provenance;
  return j;
}

inline json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

/// Header k_1..k_n,re,im,intensity; one row per peak in list order.
inline std::string peaks_csv(const PeakList& pl) {
  std::string out;
  for (int i = 0; i < pl.n; ++i) out += "k_" + std::to_string(i + 1) + ",";
  out += "re,im,intensity\n";
  for (std::size_t i = 0; i < pl.size(); ++i) {
    for (int j = 0; j < pl.n; ++j) out += format_double(pl.k(i)[j]) + ",";
    out += format_double(pl.amp(i).real()) + "," + format_double(pl.amp(i).imag()) + "," +
           format_double(pl.intensity(i)) + "\n";
  }
  return out;
}

/// Positions and amplitudes from peaks_csv output (internal coordinates are not stored).
inline PeakList read_peaks_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty peak table");
  int n = 0;
  for (std::size_t p = 0; (p = line.find("k_", p)) != std::string::npos; ++p) ++n;
  if (n < 1) throw Error(ErrorCode::ParseError, "peak table header lacks k_ columns");
  PeakList pl;
  pl.n = n;
  pl.m = pl.z = 0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> v;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      v.push_back(parse_double(std::string_view(line).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(v.size()) != n + 3) throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": wrong column count");
    pl.push(v.data(), nullptr, Complex(v[n], v[n + 1]));
  }
  return pl;
}

/// Stem plot of intensity against k (n = 1) with the amplitude floor marked.
inline std::string peaks_svg(const PeakList& pl, const std::string& title = "") {
  if (pl.n != 1) throw Error(ErrorCode::UnsupportedDimension, "plots are 1D only");
  const double W = 800, H = 400, L = 70, R = 20, T = 40, B = 50;
  const double kmax = pl.K_max > 0 ? pl.K_max : 1.0;
  double imax = 0;
  for (std::size_t i = 0; i < pl.size(); ++i) imax = std::max(imax, pl.intensity(i));
  if (!(imax > 0)) imax = 1.0;
  auto X = [&](double k) { return L + (k + kmax) / (2 * kmax) * (W - L - R); };
  auto Y = [&](double I) { return H - B - I / imax * (H - T - B); };
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto g = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n";
  s += "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
  if (!title.empty()) s += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + f(L) + "\" y1=\"" + f(H - B) + "\" x2=\"" + f(W - R) + "\" y2=\"" + f(H - B) + "\"/>\n";
  s += "<line x1=\"" + f(L) + "\" y1=\"" + f(T) + "\" x2=\"" + f(L) + "\" y2=\"" + f(H - B) + "\"/>\n";
  s += "</g>\n<g font-size=\"11\" text-anchor=\"middle\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double k = -kmax + i * kmax / 2;
    s += "<text x=\"" + f(X(k)) + "\" y=\"" + f(H - B + 16) + "\">" + g(k) + "</text>\n";
    s += "<text x=\"" + f(L - 30) + "\" y=\"" + f(Y(imax * i / 4) + 4) + "\">" + g(imax * i / 4) + "</text>\n";
  }
  s += "<text x=\"" + f((L + W - R) / 2) + "\" y=\"" + f(H - 10) + "\" font-size=\"13\">k</text>\n";
  s += "<text x=\"18\" y=\"" + f((T + H - B) / 2) + "\" font-size=\"13\" transform=\"rotate(-90 18 " +
       f((T + H - B) / 2) + ")\">intensity</text>\n</g>\n";
  const double floor_I = pl.amp_floor * pl.amp_floor;
  s += "<line x1=\"" + f(L) + "\" y1=\"" + f(Y(floor_I)) + "\" x2=\"" + f(W - R) + "\" y2=\"" + f(Y(floor_I)) +
       "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  s += "<text x=\"" + f(W - R) + "\" y=\"" + f(Y(floor_I) - 4) +
       "\" font-size=\"10\" text-anchor=\"end\" fill=\"gray\">amplitude floor " + g(pl.amp_floor) + "</text>\n";
  s += "<g stroke=\"steelblue\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < pl.size(); ++i) {
    const double x = X(pl.k(i)[0]);
    s += "<line x1=\"" + f(x) + "\" y1=\"" + f(H - B) + "\" x2=\"" + f(x) + "\" y2=\"" + f(Y(pl.intensity(i))) + "\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

// ---- files ----------------------------------------------------------------

/// Parses a JSON file; syntax errors carry line and column.
inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

/// Output files collected in memory and written only once a run has finished.
class OutputSet {
 public:
  void add(std::filesystem::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }
  void add_json(std::filesystem::path path, const json& j) { add(std::move(path), j.dump(2) + "\n"); }

  void commit() const {
    for (const auto& [path, content] : files_) {
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      const auto tmp = path.string() + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorCode::ParseError, path.string() + ": cannot write");
        out << content;
      }
      std::filesystem::rename(tmp, path);
    }
  }

  const std::vector<std::pair<std::filesystem::path, std::string>>& files() const { return files_; }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

}  // namespace meyer::io
