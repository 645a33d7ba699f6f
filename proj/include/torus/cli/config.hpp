#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torus/circle_field.hpp"
#include "torus/field.hpp"
#include "torus/measures.hpp"
#include "torus/normalform.hpp"
#include "torus/region.hpp"

namespace torus::cli {

struct Diagnostic {
  std::string path;  // dotted key, e.g. "potential.terms[3]"
  std::string message;
};

struct PotentialTerm {
  int k;
  int l;
  cplx c;
};

struct RegionSpec {
  std::string kind = "whole";  // whole | disc | rectangle | strip | raster | union | complement
  Vec2 center{0.5, 0.5};
  double radius = 0.2;
  Vec2 corner{0.0, 0.0};
  Vec2 widths{0.5, 0.5};
  std::int64_t n = 1;
  std::int64_t m = 0;
  double lo = 0.0;
  double hi = 0.1;
  double taper = 0.0;
  Eigen::MatrixXi mask;  // raster rows (row i along x), entries 0 or 1
  std::vector<RegionSpec> parts;  // union members, or the single complemented region
};

struct InitialSpec {
  std::string kind = "random";  // random | mode | coherent
  int band = 5;
  std::string profile = "flat";  // flat | sobolev
  double s = 0.0;
  int k = 1;
  int l = 0;
  Vec2 z0{0.5, 0.5};
  Vec2 xi0{1.0, 0.0};
  double h = 0.125;
};

struct SolverSpec {
  int M = 0;  // 0 selects max(256, 4N)
  int nt = 200;
  std::string rule = "gauss_legendre";
  double tol = 1e-8;
  int maxit = 500;
  double singular_tol = 1e-14;
  double memory_gb = 4.0;
};

struct EigSpec {
  int count = 20;
};

struct EvolveSpec {
  std::vector<double> times{0.25, 0.5, 1.0};
};

struct ObserveSpec {
  int eigen_count = 50;
  int random_count = 50;
  int random_band = -1;
  bool refine = false;
};

struct SweepObsSpec {
  std::vector<double> T{0.25, 0.5, 1.0};
};

struct HumSpec {
  bool dense_check = true;
  int min_norm_trials = 3;
};

struct NormalFormSpec {
  // The averaging runs on its own torus and potential: the asymptotics need the
  // potential frequencies well below 1 / h.
  double A = 2.0 * M_PI;
  double B = 2.0 * M_PI;
  std::vector<PotentialTerm> potential{{1, 1, -0.25}, {-1, -1, -0.25}, {1, -1, 0.25}, {-1, 1, 0.25}};
  std::string frame = "axis";  // axis | direction
  std::int64_t n = 1;
  std::int64_t m = 1;
  std::string variant = "zero_mean";
  std::vector<double> h{0.125, 0.0625, 0.03125};
  FrequencyWindow window;
  double bound_ratio = 2.0;
};

struct FloquetSpec {
  double length = 1.0;
  int N = 32;
  std::vector<std::pair<int, cplx>> W;  // (k, coefficient)
  Interval omega{0.0, 0.125};
  double T = 1.0;
  int beta_points = 32;
  int eigen_count = 16;
  int random_count = 16;
  int panels = 200;
  int refine_N = 40;
  int gauge_count = 16;
};

struct SymbolSpec {
  std::string name;
  std::string profile = "one";  // one | disc | annulus
  Vec2 center{0.0, 0.0};
  double r = 0.5;
  double rho = 1.0;
  double w = 0.5;
  std::vector<Harmonic> harmonics{{0, 0, 1.0}};
};

struct MeasureSpec {
  int N = 32;
  std::vector<double> h{0.03125, 0.015625, 0.0078125};
  Vec2 z0{0.3, 0.6};
  Vec2 xi0{0.6, 0.8};
  std::vector<SymbolSpec> symbols;
  std::int64_t orbit_n = 1;
  std::int64_t orbit_m = 1;
  std::vector<double> orbit_h{0.03125, 0.015625};
  int census_bound = 2;
};

struct ExperimentConfig {
  std::string text;    // the source bytes
  std::string sha256;  // hex digest of text
  std::uint64_t seed = 1;
  double A = 1.0;
  double B = 1.0;
  int N = 12;
  double T = 1.0;
  std::vector<PotentialTerm> potential;
  RegionSpec region;
  SolverSpec solver;
  InitialSpec initial;
  EigSpec eig;
  EvolveSpec evolve;
  ObserveSpec observe;
  SweepObsSpec sweep_obs;
  HumSpec hum;
  NormalFormSpec normalform;
  FloquetSpec floquet;
  MeasureSpec measure;

  TorusLattice lattice() const { return TorusLattice(A, B); }
  FourierField potential_field() const;
  TorusLattice normalform_lattice() const { return TorusLattice(normalform.A, normalform.B); }
  FourierField normalform_potential() const;
  Region region_value() const;
  FourierField initial_field() const;
  CircleField floquet_potential() const;
  std::vector<TestSymbol> test_symbols() const;
  int grid() const;
  /// Seeds derived from the master seed, one stream per purpose.
  std::uint64_t seed_for(std::uint64_t stream) const { return seed * 1000003ULL + stream; }
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;  // every violation found, not only the first
};

/// Parses and validates.  config is empty whenever diagnostics is non-empty.
ParseResult parse_config(std::string_view text, std::string_view source = "<config>");

/// Reads the file (or the embedded default for an empty path) and parses it.
ParseResult load_config(const std::string& path);

std::string default_config_text();

std::string sha256_hex(std::string_view bytes);

Region build_region(const RegionSpec& spec);

}  // namespace torus::cli
