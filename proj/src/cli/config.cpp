#include "torus/cli/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "torus/default_config.hpp"
#include "torus/errors.hpp"
#include "torus/observability.hpp"
#include "torus/time_rules.hpp"

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

namespace torus::cli {

namespace {

class Reader {
 public:
  Reader(std::vector<Diagnostic>& diags, std::string dir) : d_(diags), dir_(std::move(dir)) {}

  /// Directory against which relative file names in the config resolve.
  const std::string& dir() const noexcept { return dir_; }

  void error(const std::string& path, const std::string& msg) { d_.push_back({path, msg}); }

  static std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
  }

  void allow(const toml::table& t, const std::string& base, std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : t) {
      (void)v;
      const std::string key(k.str());
      if (!ok.count(key)) error(join(base, key), "unknown key");
    }
  }

  bool number(const toml::node& n, const std::string& path, double& out) {
    if (auto v = n.value<double>(); v && (n.is_integer() || n.is_floating_point())) {
      out = *v;
      return true;
    }
    error(path, "expected a number");
    return false;
  }

  bool integer(const toml::node& n, const std::string& path, std::int64_t& out) {
    if (n.is_integer()) {
      out = *n.value<std::int64_t>();
      return true;
    }
    error(path, "expected an integer");
    return false;
  }

  void get(const toml::table& t, const std::string& base, const char* key, double& out) {
    if (const toml::node* n = t.get(key)) number(*n, join(base, key), out);
  }

  template <class I>
  requires std::is_integral_v<I> && (!std::is_same_v<I, bool>)
  void get(const toml::table& t, const std::string& base, const char* key, I& out) {
    if (const toml::node* n = t.get(key)) {
      std::int64_t v = 0;
      if (!integer(*n, join(base, key), v)) return;
      if constexpr (std::is_unsigned_v<I>) {
        if (v < 0) {
          error(join(base, key), "must be non-negative");
          return;
        }
      }
      if (v < static_cast<std::int64_t>(std::numeric_limits<int>::min()) && sizeof(I) <= 4) {
        error(join(base, key), "out of range");
        return;
      }
      if (v > static_cast<std::int64_t>(std::numeric_limits<int>::max()) && sizeof(I) <= 4) {
        error(join(base, key), "out of range");
        return;
      }
      out = static_cast<I>(v);
    }
  }

  void get(const toml::table& t, const std::string& base, const char* key, bool& out) {
    if (const toml::node* n = t.get(key)) {
      if (n->is_boolean())
        out = *n->value<bool>();
      else
        error(join(base, key), "expected true or false");
    }
  }

  void get(const toml::table& t, const std::string& base, const char* key, std::string& out) {
    if (const toml::node* n = t.get(key)) {
      if (n->is_string())
        out = *n->value<std::string>();
      else
        error(join(base, key), "expected a string");
    }
  }

  void get(const toml::table& t, const std::string& base, const char* key, Vec2& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    const std::string path = join(base, key);
    const toml::array* a = n->as_array();
    if (!a || a->size() != 2) {
      error(path, "expected a pair [x, y]");
      return;
    }
    Vec2 v{};
    if (number(*a->get(0), path + "[0]", v[0]) && number(*a->get(1), path + "[1]", v[1])) out = v;
  }

  void get(const toml::table& t, const std::string& base, const char* key, std::vector<double>& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    const std::string path = join(base, key);
    const toml::array* a = n->as_array();
    if (!a) {
      error(path, "expected a list of numbers");
      return;
    }
    std::vector<double> v;
    bool ok = true;
    for (std::size_t i = 0; i < a->size(); ++i) {
      double x = 0.0;
      ok = number(*a->get(i), path + "[" + std::to_string(i) + "]", x) && ok;
      v.push_back(x);
    }
    if (ok) out = std::move(v);
  }

  const toml::table* section(const toml::table& root, const char* key) {
    const toml::node* n = root.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) {
      error(key, "expected a table");
      return nullptr;
    }
    return n->as_table();
  }

 private:
  std::vector<Diagnostic>& d_;
  std::string dir_;
};

std::string mode_name(int k, int l) {
  return "(" + std::to_string(k) + "," + std::to_string(l) + ")";
}

// ((k, l, re, im)) rows; entries with im omitted are real.
std::vector<PotentialTerm> read_terms(Reader& r, const toml::node& n, const std::string& path,
                                      int dims) {
  std::vector<PotentialTerm> out;
  const toml::array* a = n.as_array();
  if (!a) {
    r.error(path, "expected a list of coefficient rows");
    return out;
  }
  for (std::size_t i = 0; i < a->size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const toml::array* row = a->get(i)->as_array();
    const std::size_t need = static_cast<std::size_t>(dims);
    if (!row || row->size() < need + 1 || row->size() > need + 2) {
      r.error(p, dims == 2 ? "expected [k, l, re] or [k, l, re, im]" : "expected [k, re] or [k, re, im]");
      continue;
    }
    std::int64_t k = 0, l = 0;
    double re = 0.0, im = 0.0;
    bool ok = r.integer(*row->get(0), p + "[0]", k);
    if (dims == 2) ok = r.integer(*row->get(1), p + "[1]", l) && ok;
    ok = r.number(*row->get(need), p + "[" + std::to_string(need) + "]", re) && ok;
    if (row->size() == need + 2)
      ok = r.number(*row->get(need + 1), p + "[" + std::to_string(need + 1) + "]", im) && ok;
    if (!ok) continue;
    if (std::abs(k) > 100000 || std::abs(l) > 100000) {
      r.error(p, "mode index out of range");
      continue;
    }
    out.push_back({static_cast<int>(k), static_cast<int>(l), cplx(re, im)});
  }
  return out;
}

void check_real(Reader& r, const std::vector<PotentialTerm>& terms, const std::string& path,
                bool one_dim) {
  std::map<std::pair<int, int>, cplx> c;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto key = std::make_pair(terms[i].k, terms[i].l);
    if (c.count(key)) {
      r.error(path + "[" + std::to_string(i) + "]",
              "duplicate coefficient " + (one_dim ? std::to_string(key.first) : mode_name(key.first, key.second)));
      continue;
    }
    c[key] = terms[i].c;
  }
  const auto name = [&](int k, int l) { return one_dim ? "k=" + std::to_string(k) : mode_name(k, l); };
  for (const auto& [key, v] : c) {
    const auto [k, l] = key;
    const auto partner = std::make_pair(-k, -l);
    if (key == partner) {
      if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v)))
        r.error(path, "coefficient " + name(k, l) + " must be real for a real potential");
      continue;
    }
    if (partner < key) continue;  // each pair reported once, from its smaller member
    const auto it = c.find(partner);
    if (it == c.end()) {
      r.error(path, "coefficient " + name(k, l) + " has no conjugate partner " + name(-k, -l));
    } else if (std::abs(it->second - std::conj(v)) > 1e-12 * (1.0 + std::abs(v))) {
      r.error(path, "coefficient " + name(-k, -l) + " is not the conjugate of " + name(k, l));
    }
  }
  for (const auto& [key, v] : c) {
    const auto partner = std::make_pair(-key.first, -key.second);
    if (partner < key && !c.count(partner))
      r.error(path, "coefficient " + name(key.first, key.second) + " has no conjugate partner " +
                        name(partner.first, partner.second));
  }
}

// Rows of '0'/'1' characters; blanks are ignored.
bool mask_from_rows(Reader& r, const std::vector<std::string>& rows, const std::string& path,
                    Eigen::MatrixXi& out) {
  std::vector<std::string> clean;
  for (const auto& row : rows) {
    std::string c;
    for (char ch : row) {
      if (ch == '0' || ch == '1') {
        c.push_back(ch);
      } else if (ch != ' ' && ch != '\t' && ch != '\r') {
        r.error(path, "raster mask rows may only contain 0 and 1");
        return false;
      }
    }
    if (!c.empty()) clean.push_back(std::move(c));
  }
  if (clean.empty()) {
    r.error(path, "raster mask is empty");
    return false;
  }
  const std::size_t cols = clean.front().size();
  for (const auto& c : clean) {
    if (c.size() != cols) {
      r.error(path, "raster mask rows must have equal length");
      return false;
    }
  }
  out.resize(static_cast<Eigen::Index>(clean.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < clean.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = clean[i][j] == '1';
  return true;
}

void read_raster(Reader& r, const toml::table& t, const std::string& base, RegionSpec& s) {
  const toml::node* inline_rows = t.get("mask");
  const toml::node* file = t.get("file");
  if ((inline_rows != nullptr) == (file != nullptr)) {
    r.error(base, "a raster region needs exactly one of 'mask' or 'file'");
    return;
  }
  std::vector<std::string> rows;
  if (inline_rows) {
    const std::string path = Reader::join(base, "mask");
    const toml::array* a = inline_rows->as_array();
    if (!a) {
      r.error(path, "expected a list of strings");
      return;
    }
    for (std::size_t i = 0; i < a->size(); ++i) {
      if (!a->get(i)->is_string()) {
        r.error(path + "[" + std::to_string(i) + "]", "expected a string");
        return;
      }
      rows.push_back(*a->get(i)->value<std::string>());
    }
    mask_from_rows(r, rows, path, s.mask);
    return;
  }
  const std::string path = Reader::join(base, "file");
  if (!file->is_string()) {
    r.error(path, "expected a string");
    return;
  }
  std::filesystem::path fp(*file->value<std::string>());
  if (fp.is_relative() && !r.dir().empty()) fp = std::filesystem::path(r.dir()) / fp;
  std::ifstream in(fp);
  if (!in) {
    r.error(path, "cannot read raster mask file '" + fp.string() + "'");
    return;
  }
  for (std::string line; std::getline(in, line);)
    if (line.empty() || line[0] != '#') rows.push_back(line);
  mask_from_rows(r, rows, path, s.mask);
}

RegionSpec read_region(Reader& r, const toml::table& t, const std::string& base, int depth) {
  RegionSpec s;
  r.allow(t, base, {"kind", "center", "radius", "corner", "widths", "n", "m", "lo", "hi", "taper", "parts", "inner",
                    "mask", "file"});
  r.get(t, base, "kind", s.kind);
  r.get(t, base, "center", s.center);
  r.get(t, base, "radius", s.radius);
  r.get(t, base, "corner", s.corner);
  r.get(t, base, "widths", s.widths);
  r.get(t, base, "n", s.n);
  r.get(t, base, "m", s.m);
  r.get(t, base, "lo", s.lo);
  r.get(t, base, "hi", s.hi);
  r.get(t, base, "taper", s.taper);
  if (depth > 8) {
    r.error(base, "region nesting too deep");
    return s;
  }
  if (s.kind == "union") {
    const toml::node* p = t.get("parts");
    const toml::array* a = p ? p->as_array() : nullptr;
    if (!a || a->empty()) {
      r.error(Reader::join(base, "parts"), "a union needs a non-empty list of regions");
    } else {
      for (std::size_t i = 0; i < a->size(); ++i) {
        const std::string pp = Reader::join(base, "parts") + "[" + std::to_string(i) + "]";
        if (const toml::table* sub = a->get(i)->as_table())
          s.parts.push_back(read_region(r, *sub, pp, depth + 1));
        else
          r.error(pp, "expected a region table");
      }
    }
  } else if (s.kind == "complement") {
    const toml::node* p = t.get("inner");
    if (!p || !p->is_table())
      r.error(Reader::join(base, "inner"), "a complement needs an inner region table");
    else
      s.parts.push_back(read_region(r, *p->as_table(), Reader::join(base, "inner"), depth + 1));
  } else if (s.kind == "disc") {
    if (!(s.radius > 0.0)) r.error(Reader::join(base, "radius"), "disc radius must be positive");
  } else if (s.kind == "rectangle") {
    if (!(s.widths[0] > 0.0 && s.widths[1] > 0.0))
      r.error(Reader::join(base, "widths"), "rectangle widths must be positive");
  } else if (s.kind == "strip") {
    if ((s.n == 0 && s.m == 0) || std::gcd(s.n, s.m) != 1)
      r.error(base, "strip direction (n, m) must be coprime and non-zero");
    if (!(s.hi > s.lo)) r.error(Reader::join(base, "hi"), "strip needs hi > lo");
  } else if (s.kind == "raster") {
    read_raster(r, t, base, s);
  } else if (s.kind != "whole") {
    r.error(Reader::join(base, "kind"), "unknown region kind '" + s.kind + "'");
  }
  if (!(s.taper >= 0.0)) r.error(Reader::join(base, "taper"), "taper width must be non-negative");
  return s;
}

bool positive_list(const std::vector<double>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

std::string default_config_text() { return kDefaultConfig; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

Region build_region(const RegionSpec& s) {
  Region out = Region::whole();
  if (s.kind == "disc") {
    out = Region::disc(s.center, s.radius);
  } else if (s.kind == "rectangle") {
    out = Region::rectangle(s.corner, s.widths);
  } else if (s.kind == "strip") {
    out = Region::strip(s.n, s.m, s.lo, s.hi);
  } else if (s.kind == "union") {
    std::vector<Region> parts;
    for (const auto& p : s.parts) parts.push_back(build_region(p));
    out = Region::unite(std::move(parts));
  } else if (s.kind == "complement") {
    out = Region::complement(build_region(s.parts.at(0)));
  } else if (s.kind == "raster") {
    out = Region::raster(s.mask);
  } else if (s.kind != "whole") {
    throw InvalidArgument("unknown region kind '" + s.kind + "'");
  }
  return s.taper > 0.0 ? out.tapered(s.taper) : out;
}

namespace {

FourierField field_from_terms(const TorusLattice& lat, const std::vector<PotentialTerm>& terms) {
  int band = 0;
  for (const auto& t : terms) band = std::max({band, std::abs(t.k), std::abs(t.l)});
  FourierField V(lat, std::max(band, 1));
  for (const auto& t : terms) V += FourierField::mode(lat, V.truncation(), t.k, t.l, t.c);
  return V;
}

}  // namespace

FourierField ExperimentConfig::potential_field() const { return field_from_terms(lattice(), potential); }

FourierField ExperimentConfig::normalform_potential() const {
  return field_from_terms(normalform_lattice(), normalform.potential);
}

Region ExperimentConfig::region_value() const { return build_region(region); }

int ExperimentConfig::grid() const { return solver.M > 0 ? solver.M : default_grid(N); }

FourierField ExperimentConfig::initial_field() const {
  const TorusLattice lat = lattice();
  if (initial.kind == "mode") {
    FourierField u = FourierField::mode(lat, N, initial.k, initial.l);
    return FourierField(lat, N, u.coeffs() / norm_l2(u));
  }
  if (initial.kind == "coherent") return coherent_state(lat, N, initial.z0, initial.xi0, initial.h);
  RandomProfile prof = FlatProfile{};
  if (initial.profile == "sobolev") prof = SobolevProfile{initial.s};
  return random_field(lat, std::min(initial.band, N), seed_for(1), prof).resized(N);
}

CircleField ExperimentConfig::floquet_potential() const {
  int band = 1;
  for (const auto& [k, c] : floquet.W) band = std::max(band, std::abs(k));
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * band + 1);
  if (floquet.W.empty()) {
    c[band - 1] = 0.5;
    c[band + 1] = 0.5;
  }
  for (const auto& [k, v] : floquet.W) c[k + band] += v;
  return CircleField(floquet.length, band, std::move(c));
}

std::vector<TestSymbol> ExperimentConfig::test_symbols() const {
  std::vector<TestSymbol> out;
  if (measure.symbols.empty()) {
    // A z-dependent symbol whose profile varies across xi0.
    out.push_back(TestSymbol{"smooth",
                             {SymbolTerm{{{0, 0, 1.0}, {1, 0, 0.25}, {-1, 0, 0.25}, {0, 1, cplx(0.0, 0.2)},
                                          {0, -1, cplx(0.0, -0.2)}},
                                         profile_disc({measure.xi0[0] + 0.3, measure.xi0[1] + 0.2}, 0.8)}}});
    return out;
  }
  for (const auto& s : measure.symbols) {
    ZetaProfile p = s.profile == "disc"      ? profile_disc(s.center, s.r)
                    : s.profile == "annulus" ? profile_annulus(s.rho, s.w)
                                             : profile_one();
    out.push_back(TestSymbol{s.name, {SymbolTerm{s.harmonics, std::move(p)}}});
  }
  return out;
}

ParseResult parse_config(std::string_view text, std::string_view source) {
  ParseResult res;
  auto& d = res.diagnostics;
  const std::string src(source);
  Reader r(d, !src.empty() && src.front() != '<' ? std::filesystem::path(src).parent_path().string()
                                                 : std::string());
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ", column "
       << e.source().begin.column << ")";
    d.push_back({"", os.str()});
    return res;
  }
  ExperimentConfig c;
  c.text = std::string(text);
  c.sha256 = sha256_hex(text);

  r.allow(root, "", {"seed", "N", "T", "torus", "potential", "region", "solver", "initial", "eig", "evolve",
                     "observe", "sweep_obs", "hum", "normalform", "floquet", "measure"});
  r.get(root, "", "seed", c.seed);
  r.get(root, "", "N", c.N);
  r.get(root, "", "T", c.T);
  if (const auto* t = r.section(root, "torus")) {
    r.allow(*t, "torus", {"A", "B"});
    r.get(*t, "torus", "A", c.A);
    r.get(*t, "torus", "B", c.B);
  }
  if (const auto* t = r.section(root, "potential")) {
    r.allow(*t, "potential", {"terms"});
    if (const toml::node* n = t->get("terms")) c.potential = read_terms(r, *n, "potential.terms", 2);
  }
  if (const auto* t = r.section(root, "region")) c.region = read_region(r, *t, "region", 0);
  if (const auto* t = r.section(root, "solver")) {
    r.allow(*t, "solver", {"M", "nt", "rule", "tol", "maxit", "singular_tol", "memory_gb"});
    r.get(*t, "solver", "M", c.solver.M);
    r.get(*t, "solver", "nt", c.solver.nt);
    r.get(*t, "solver", "rule", c.solver.rule);
    r.get(*t, "solver", "tol", c.solver.tol);
    r.get(*t, "solver", "maxit", c.solver.maxit);
    r.get(*t, "solver", "singular_tol", c.solver.singular_tol);
    r.get(*t, "solver", "memory_gb", c.solver.memory_gb);
  }
  if (const auto* t = r.section(root, "initial")) {
    r.allow(*t, "initial", {"kind", "band", "profile", "s", "k", "l", "z0", "xi0", "h"});
    r.get(*t, "initial", "kind", c.initial.kind);
    r.get(*t, "initial", "band", c.initial.band);
    r.get(*t, "initial", "profile", c.initial.profile);
    r.get(*t, "initial", "s", c.initial.s);
    r.get(*t, "initial", "k", c.initial.k);
    r.get(*t, "initial", "l", c.initial.l);
    r.get(*t, "initial", "z0", c.initial.z0);
    r.get(*t, "initial", "xi0", c.initial.xi0);
    r.get(*t, "initial", "h", c.initial.h);
  }
  if (const auto* t = r.section(root, "eig")) {
    r.allow(*t, "eig", {"count"});
    r.get(*t, "eig", "count", c.eig.count);
  }
  if (const auto* t = r.section(root, "evolve")) {
    r.allow(*t, "evolve", {"times"});
    r.get(*t, "evolve", "times", c.evolve.times);
  }
  if (const auto* t = r.section(root, "observe")) {
    r.allow(*t, "observe", {"eigen_count", "random_count", "random_band", "refine"});
    r.get(*t, "observe", "eigen_count", c.observe.eigen_count);
    r.get(*t, "observe", "random_count", c.observe.random_count);
    r.get(*t, "observe", "random_band", c.observe.random_band);
    r.get(*t, "observe", "refine", c.observe.refine);
  }
  if (const auto* t = r.section(root, "sweep_obs")) {
    r.allow(*t, "sweep_obs", {"T"});
    r.get(*t, "sweep_obs", "T", c.sweep_obs.T);
  }
  if (const auto* t = r.section(root, "hum")) {
    r.allow(*t, "hum", {"dense_check", "min_norm_trials"});
    r.get(*t, "hum", "dense_check", c.hum.dense_check);
    r.get(*t, "hum", "min_norm_trials", c.hum.min_norm_trials);
  }
  if (const auto* t = r.section(root, "normalform")) {
    auto& s = c.normalform;
    r.allow(*t, "normalform", {"torus", "terms", "frame", "direction", "variant", "h", "window", "bound_ratio"});
    Vec2 tor{s.A, s.B};
    r.get(*t, "normalform", "torus", tor);
    s.A = tor[0];
    s.B = tor[1];
    if (const toml::node* n = t->get("terms")) s.potential = read_terms(r, *n, "normalform.terms", 2);
    r.get(*t, "normalform", "frame", s.frame);
    if (const toml::node* n = t->get("direction")) {
      const toml::array* a = n->as_array();
      if (!a || a->size() != 2 || !r.integer(*a->get(0), "normalform.direction[0]", s.n) ||
          !r.integer(*a->get(1), "normalform.direction[1]", s.m))
        r.error("normalform.direction", "expected an integer pair [n, m]");
    }
    r.get(*t, "normalform", "variant", s.variant);
    r.get(*t, "normalform", "h", s.h);
    r.get(*t, "normalform", "bound_ratio", s.bound_ratio);
    if (const toml::node* n = t->get("window")) {
      if (const toml::table* w = n->as_table()) {
        r.allow(*w, "normalform.window", {"xi_c", "eta_c", "w_xi", "w_eta"});
        r.get(*w, "normalform.window", "xi_c", s.window.xi_c);
        r.get(*w, "normalform.window", "eta_c", s.window.eta_c);
        r.get(*w, "normalform.window", "w_xi", s.window.w_xi);
        r.get(*w, "normalform.window", "w_eta", s.window.w_eta);
      } else {
        r.error("normalform.window", "expected a table");
      }
    }
  }
  if (const auto* t = r.section(root, "floquet")) {
    auto& s = c.floquet;
    r.allow(*t, "floquet", {"length", "N", "W", "omega", "T", "beta_points", "eigen_count", "random_count",
                            "panels", "refine_N", "gauge_count"});
    r.get(*t, "floquet", "length", s.length);
    r.get(*t, "floquet", "N", s.N);
    if (const toml::node* n = t->get("W")) {
      const auto terms = read_terms(r, *n, "floquet.W", 1);
      check_real(r, terms, "floquet.W", true);
      for (const auto& term : terms) s.W.emplace_back(term.k, term.c);
    }
    Vec2 om{s.omega.lo, s.omega.hi};
    r.get(*t, "floquet", "omega", om);
    s.omega = {om[0], om[1]};
    r.get(*t, "floquet", "T", s.T);
    r.get(*t, "floquet", "beta_points", s.beta_points);
    r.get(*t, "floquet", "eigen_count", s.eigen_count);
    r.get(*t, "floquet", "random_count", s.random_count);
    r.get(*t, "floquet", "panels", s.panels);
    r.get(*t, "floquet", "refine_N", s.refine_N);
    r.get(*t, "floquet", "gauge_count", s.gauge_count);
  }
  if (const auto* t = r.section(root, "measure")) {
    auto& s = c.measure;
    r.allow(*t, "measure", {"N", "h", "z0", "xi0", "symbols", "orbit_direction", "orbit_h", "census_bound"});
    r.get(*t, "measure", "N", s.N);
    r.get(*t, "measure", "h", s.h);
    r.get(*t, "measure", "z0", s.z0);
    r.get(*t, "measure", "xi0", s.xi0);
    r.get(*t, "measure", "orbit_h", s.orbit_h);
    r.get(*t, "measure", "census_bound", s.census_bound);
    if (const toml::node* n = t->get("orbit_direction")) {
      const toml::array* a = n->as_array();
      if (!a || a->size() != 2 || !r.integer(*a->get(0), "measure.orbit_direction[0]", s.orbit_n) ||
          !r.integer(*a->get(1), "measure.orbit_direction[1]", s.orbit_m))
        r.error("measure.orbit_direction", "expected an integer pair [n, m]");
    }
    if (const toml::node* n = t->get("symbols")) {
      const toml::array* a = n->as_array();
      if (!a) r.error("measure.symbols", "expected an array of tables");
      for (std::size_t i = 0; a && i < a->size(); ++i) {
        const std::string p = "measure.symbols[" + std::to_string(i) + "]";
        const toml::table* st = a->get(i)->as_table();
        if (!st) {
          r.error(p, "expected a table");
          continue;
        }
        SymbolSpec sym;
        sym.name = "symbol" + std::to_string(i);
        r.allow(*st, p, {"name", "profile", "center", "r", "rho", "w", "harmonics"});
        r.get(*st, p, "name", sym.name);
        r.get(*st, p, "profile", sym.profile);
        r.get(*st, p, "center", sym.center);
        r.get(*st, p, "r", sym.r);
        r.get(*st, p, "rho", sym.rho);
        r.get(*st, p, "w", sym.w);
        if (const toml::node* hn = st->get("harmonics")) {
          sym.harmonics.clear();
          for (const auto& term : read_terms(r, *hn, p + ".harmonics", 2))
            sym.harmonics.push_back({term.k, term.l, term.c});
        }
        if (sym.profile != "one" && sym.profile != "disc" && sym.profile != "annulus")
          r.error(p + ".profile", "unknown profile '" + sym.profile + "' (one, disc, annulus)");
        if (sym.profile == "disc" && !(sym.r > 0.0)) r.error(p + ".r", "disc radius must be positive");
        if (sym.profile == "annulus" && !(sym.w > 0.0)) r.error(p + ".w", "annulus width must be positive");
        s.symbols.push_back(std::move(sym));
      }
    }
  }

  // Range checks.
  if (!(c.A > 0.0 && std::isfinite(c.A))) r.error("torus.A", "torus side A must be positive");
  if (!(c.B > 0.0 && std::isfinite(c.B))) r.error("torus.B", "torus side B must be positive");
  if (c.N < 1 || c.N > 64) r.error("N", "truncation N must lie in [1, 64]");
  if (!(c.T > 0.0 && std::isfinite(c.T)))
    r.error("T", "observation time T must be positive (T > 0 is required)");
  check_real(r, c.potential, "potential.terms", false);
  const auto& sv = c.solver;
  if (sv.M != 0 && sv.M < 4 * c.N) r.error("solver.M", "grid M must be 0 (automatic) or at least 4N");
  if (sv.M < 0 || sv.M > 4096) r.error("solver.M", "grid M must lie in [0, 4096]");
  if (sv.nt < 1) r.error("solver.nt", "nt must be at least 1");
  try {
    (void)parse_time_rule(sv.rule);
  } catch (const InvalidArgument&) {
    r.error("solver.rule", "unknown time rule '" + sv.rule + "' (gauss_legendre, trapezoid, exact)");
  }
  if (!(sv.tol > 0.0 && sv.tol < 1.0)) r.error("solver.tol", "tolerance must lie in (0, 1)");
  if (sv.maxit < 1) r.error("solver.maxit", "maxit must be at least 1");
  if (!(sv.singular_tol > 0.0)) r.error("solver.singular_tol", "must be positive");
  if (!(sv.memory_gb > 0.0)) r.error("solver.memory_gb", "must be positive");
  const auto& in = c.initial;
  if (in.kind != "random" && in.kind != "mode" && in.kind != "coherent")
    r.error("initial.kind", "unknown initial data kind '" + in.kind + "' (random, mode, coherent)");
  if (in.band < 0) r.error("initial.band", "band must be non-negative");
  if (in.profile != "flat" && in.profile != "sobolev")
    r.error("initial.profile", "unknown profile '" + in.profile + "' (flat, sobolev)");
  if (in.kind == "mode" && (std::abs(in.k) > c.N || std::abs(in.l) > c.N))
    r.error("initial", "mode " + mode_name(in.k, in.l) + " lies outside the truncation");
  if (in.kind == "coherent" && !(in.h > 0.0)) r.error("initial.h", "h must be positive");
  if (c.eig.count < 1) r.error("eig.count", "count must be at least 1");
  if (c.evolve.times.empty() ||
      !std::all_of(c.evolve.times.begin(), c.evolve.times.end(), [](double x) { return std::isfinite(x); }))
    r.error("evolve.times", "need a non-empty list of finite times");
  if (c.observe.eigen_count < 0 || c.observe.random_count < 0 ||
      c.observe.eigen_count + c.observe.random_count == 0)
    r.error("observe", "need a positive number of eigenfunctions or random data");
  if (!positive_list(c.sweep_obs.T)) r.error("sweep_obs.T", "need a non-empty list of positive times");
  if (c.hum.min_norm_trials < 0) r.error("hum.min_norm_trials", "must be non-negative");
  const auto& nf = c.normalform;
  if (!(nf.A > 0.0 && nf.B > 0.0)) r.error("normalform.torus", "torus sides must be positive");
  check_real(r, nf.potential, "normalform.terms", false);
  if (nf.frame != "axis" && nf.frame != "direction")
    r.error("normalform.frame", "unknown frame '" + nf.frame + "' (axis, direction)");
  if (nf.frame == "direction" && ((nf.n == 0 && nf.m == 0) || std::gcd(nf.n, nf.m) != 1))
    r.error("normalform.direction", "direction (n, m) must be coprime and non-zero");
  if (nf.variant != "zero_mean" && nf.variant != "basepoint")
    r.error("normalform.variant", "unknown variant '" + nf.variant + "' (zero_mean, basepoint)");
  if (nf.variant == "basepoint" && nf.frame == "direction")
    r.error("normalform.variant", "the basepoint corrector is only available in the axis frame");
  if (!positive_list(nf.h) || nf.h.size() < 2 ||
      !std::all_of(nf.h.begin(), nf.h.end(), [](double h) { return h < 1.0; }))
    r.error("normalform.h", "need at least two h values in (0, 1)");
  if (!(nf.window.w_xi > 0.0) || !(nf.window.w_eta > 0.0))
    r.error("normalform.window", "window widths must be positive");
  else if (!(nf.window.eta_min() > 0.0))
    r.error("normalform.window", "window must stay away from eta = 0 (|eta_c| > w_eta)");
  if (!(nf.bound_ratio >= 1.0)) r.error("normalform.bound_ratio", "must be at least 1");
  const auto& fl = c.floquet;
  if (!(fl.length > 0.0)) r.error("floquet.length", "must be positive");
  if (fl.N < 1 || fl.N > 4096) r.error("floquet.N", "must lie in [1, 4096]");
  if (fl.refine_N < fl.N) r.error("floquet.refine_N", "must be at least floquet.N");
  if (!(fl.omega.hi > fl.omega.lo) || fl.omega.width() > fl.length)
    r.error("floquet.omega", "need lo < hi with hi - lo <= length");
  if (!(fl.T > 0.0))
    r.error("floquet.T", "observation time T must be positive; the observability estimates assume T > 0");
  if (fl.beta_points < 2) r.error("floquet.beta_points", "need at least 2 points");
  if (fl.eigen_count < 0 || fl.random_count < 0 || fl.eigen_count + fl.random_count == 0)
    r.error("floquet", "need a positive number of eigenfunctions or random data");
  if (fl.eigen_count > 2 * fl.N + 1) r.error("floquet.eigen_count", "exceeds the basis size 2N + 1");
  if (fl.panels < 1) r.error("floquet.panels", "must be at least 1");
  if (fl.gauge_count < 1 || fl.gauge_count > fl.N) r.error("floquet.gauge_count", "must lie in [1, N]");
  const auto& ms = c.measure;
  if (ms.N < 1 || ms.N > 128) r.error("measure.N", "must lie in [1, 128]");
  if (!positive_list(ms.h) || !strictly_decreasing(ms.h))
    r.error("measure.h", "need a strictly decreasing list of positive h");
  if (!positive_list(ms.orbit_h) || !strictly_decreasing(ms.orbit_h))
    r.error("measure.orbit_h", "need a strictly decreasing list of positive h");
  if ((ms.orbit_n == 0 && ms.orbit_m == 0) || std::gcd(ms.orbit_n, ms.orbit_m) != 1)
    r.error("measure.orbit_direction", "direction (n, m) must be coprime and non-zero");
  if (ms.census_bound < 1 || ms.census_bound > 50) r.error("measure.census_bound", "must lie in [1, 50]");

  if (d.empty()) {
    // Checks that need the assembled objects.
    try {
      const double meas = c.region_value().grid_measure(c.lattice(), c.grid());
      if (!(meas > 0.0)) r.error("region", "region is empty at grid resolution M = " + std::to_string(c.grid()));
    } catch (const std::exception& e) {
      r.error("region", e.what());
    }
  }
  if (d.empty()) res.config = std::move(c);
  return res;
}

ParseResult load_config(const std::string& path) {
  if (path.empty()) return parse_config(default_config_text(), "<default>");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult res;
    res.diagnostics.push_back({"", "cannot read config file '" + path + "'"});
    return res;
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path);
}

}  // namespace torus::cli
