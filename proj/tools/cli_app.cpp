#include "cli_app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "qlat/qlat.hpp"

namespace fs = std::filesystem;

namespace qlat::cli {

std::vector<int> parse_index_list(const std::string& text, int lo, int hi) {
  std::vector<int> values;
  auto to_int = [&](const std::string& token) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse '" + token + "' as an integer");
    }
    if (used != token.size()) throw std::invalid_argument("cannot parse '" + token + "' as an integer");
    if (v < lo || v > hi) {
      throw std::invalid_argument("value " + token + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      values.push_back(to_int(item));
      continue;
    }
    const int a = to_int(item.substr(0, dots));
    const int b = to_int(item.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty range '" + item + "'");
    for (int v = a; v <= b; ++v) values.push_back(v);
  }
  return values;
}

std::vector<int> parse_extents(const std::string& text) {
  std::vector<int> ext;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) ext.push_back(parse_index_list(item, 1, 4096).at(0));
  if (ext.empty() || ext.size() > 3) throw std::invalid_argument("lattice dims must be like 4x4 or 2x2x2");
  return ext;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

fs::path manifest_path_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

namespace {

using json = qlat::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string out_path;
  std::vector<fs::path> outputs;
  json metadata = json::object();
  bool failed = false;

  bool to_file() const { return !out_path.empty(); }

  void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    outputs.push_back(path);
  }

  /// Main data product: the --out file, or stdout.
  void emit(const std::string& content) {
    if (to_file()) {
      write_file(out_path, content);
    } else {
      out << content;
    }
  }

  /// Secondary product written only alongside --out.
  void emit_companion(const std::string& suffix, const std::string& content) {
    if (to_file()) write_file(out_path + suffix, content);
  }
};

std::vector<int> index_list_or_usage(const std::string& text, int lo, int hi, const char* what) {
  try {
    return parse_index_list(text, lo, hi);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--") + what + ": " + e.what());
  }
}

void require_site_count(int L) {
  if (L < 1 || L > kMaxSites) throw UsageError("--L must lie in [1, " + std::to_string(kMaxSites) + "]");
}

void require_delta(double delta) {
  if (!(delta > 1.0) || !std::isfinite(delta)) throw UsageError("--delta must be a finite value > 1");
}

BoundarySign sign_of(char c) { return c == 'p' ? BoundarySign::Plus : BoundarySign::Minus; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  int L = 12;
  double delta = 2.125;
  std::string n = "";
  std::string boundary = "pp";
  std::string format = "csv";
  std::size_t dense_cap = kDefaultDenseCap;
};

int cmd_spectrum(Context& ctx, const SpectrumArgs& a) {
  require_site_count(a.L);
  require_delta(a.delta);
  const auto ns = index_list_or_usage(a.n.empty() ? "0.." + std::to_string(a.L) : a.n, 0, a.L, "n");
  const BoundarySign left = sign_of(a.boundary[0]);
  const BoundarySign right = sign_of(a.boundary[1]);

  std::ostringstream csv;
  write_level_csv_header(csv);
  json sectors = json::array();
  for (int n : ns) {
    try {
      const SpinBasisSector sector(a.L, n);
      const SparseOperator h = build_chain_hamiltonian(a.L, a.delta, left, right, sector);
      const SpectralResult r = full_spectrum(h, true, a.dense_cap);
      write_level_rows(csv, n, r.eigenvalues);
      json rec = spectral_record(r, a.delta);
      rec["boundary"] = a.boundary;
      sectors.push_back(rec);
    } catch (const std::exception& e) {
      ctx.err << "spectrum: sector n=" << n << ": " << e.what() << "\n";
      sectors.push_back(json{{"L", a.L}, {"n", n}, {"error", e.what()}});
      ctx.failed = true;
    }
  }
  ctx.metadata["convention"] = kBondConvention;
  if (a.format == "json") {
    json j;
    j["convention"] = kBondConvention;
    j["boundary"] = a.boundary;
    j["sectors"] = sectors;
    ctx.emit(dump(j));
  } else {
    ctx.emit(csv.str());
  }
  return ctx.failed ? kExitFailure : kExitOk;
}

// ----------------------------------------------------------- droplet-verify

struct SolverArgs {
  std::size_t dense_cap = kDefaultDenseCap;
  double tol = 1e-9;
  std::size_t max_iter = 20000;
  std::uint64_t seed = 12345;

  SolverBudget budget() const { return {dense_cap, tol, max_iter, seed}; }
};

struct DropletArgs {
  int L = 12;
  double delta = 2.125;
  std::string n = "";
  std::string format = "json";
  SolverArgs solver;
};

int cmd_droplet_verify(Context& ctx, const DropletArgs& a) {
  require_site_count(a.L);
  require_delta(a.delta);
  const auto ns = index_list_or_usage(a.n, 0, a.L, "n");

  json reports = json::array();
  std::ostringstream csv;
  write_level_csv_header(csv);
  for (int n : ns) {
    try {
      const TheoremReport rep = verify_theorem(a.L, n, a.delta, a.solver.budget());
      reports.push_back(theorem_record(rep));
      write_level_rows(csv, n, rep.eigenvalues);
      if (rep.degenerate_cut) ctx.err << "droplet-verify: n=" << n << ": degenerate cut at the multiplet edge\n";
    } catch (const std::exception& e) {
      ctx.err << "droplet-verify: n=" << n << ": " << e.what() << "\n";
      reports.push_back(json{{"L", a.L}, {"n", n}, {"delta", a.delta}, {"error", e.what()}});
      ctx.failed = true;
    }
  }
  if (a.format == "csv") {
    ctx.emit(csv.str());
  } else {
    ctx.emit(dump(reports));
    ctx.emit_companion(".levels.csv", csv.str());
  }
  return ctx.failed ? kExitFailure : kExitOk;
}

// --------------------------------------------------------------- kink-check

struct KinkArgs {
  int L = 14;
  double delta = 2.125;
  std::string n = "";
};

inline constexpr double kKinkTolerance = 1e-10;

int cmd_kink_check(Context& ctx, const KinkArgs& a) {
  if (a.L < 2 || a.L > kMaxSites) throw UsageError("--L must lie in [2, " + std::to_string(kMaxSites) + "]");
  require_delta(a.delta);
  const auto ns = index_list_or_usage(a.n.empty() ? "0.." + std::to_string(a.L) : a.n, 0, a.L, "n");
  std::ostringstream csv;
  csv << "n,kink_norm,antikink_norm\n";
  bool ok = true;
  for (int n : ns) {
    const double k = kink_annihilation_check(a.L, n, a.delta);
    const double ak = antikink_annihilation_check(a.L, n, a.delta);
    ok = ok && k <= kKinkTolerance && ak <= kKinkTolerance;
    csv << n << ',' << format_double(k) << ',' << format_double(ak) << '\n';
  }
  ctx.emit(csv.str());
  if (!ok) ctx.err << "kink-check: annihilation norm above " << kKinkTolerance << "\n";
  return ok ? kExitOk : kExitFailure;
}

// ----------------------------------------------------------------------- fk

struct LatticeArgs {
  std::string dims = "4x4";
  std::string bc = "periodic";

  LatticeSpec build() const {
    std::vector<int> ext;
    try {
      ext = parse_extents(dims);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--dims: ") + e.what());
    }
    return make_box(ext, bc == "periodic");
  }
};

struct FkGroundArgs {
  LatticeArgs lattice;
  double U = 8.0;
  std::string ions = "checkerboard";
  std::optional<int> ne;
  std::optional<double> beta;
  std::optional<double> mu;
};

int cmd_fk_ground(Context& ctx, const FkGroundArgs& a) {
  auto lat = std::make_shared<const LatticeSpec>(a.lattice.build());
  std::optional<IonConfiguration> cfg;
  if (a.ions == "checkerboard") {
    cfg = checkerboard(lat, 0);
  } else if (a.ions == "checkerboard-odd") {
    cfg = checkerboard(lat, 1);
  } else {
    if (static_cast<int>(a.ions.size()) != lat->site_count() ||
        a.ions.find_first_not_of("01") != std::string::npos) {
      throw UsageError("--ions must be checkerboard, checkerboard-odd or a 0/1 string with one entry per site");
    }
    std::vector<std::uint8_t> occ;
    for (char c : a.ions) occ.push_back(c == '1' ? 1 : 0);
    cfg = IonConfiguration(lat, std::move(occ));
  }
  const FreeFermionResult res = solve_free_fermions(*cfg, a.U);
  const int ne = a.ne.value_or(res.electron_count);
  if (ne < 0 || ne > lat->site_count()) throw UsageError("--ne outside [0, sites]");

  json j;
  j["sites"] = lat->site_count();
  j["U"] = a.U;
  j["ion_count"] = cfg->ion_count();
  j["electron_count"] = ne;
  j["levels"] = res.single_particle_levels;
  j["ground_energy"] = res.ground_energy_at(ne);
  j["staggered_field"] = cfg->staggered_field();
  if (a.beta) {
    const double mu = a.mu.value_or(a.U);
    j["beta"] = *a.beta;
    j["mu"] = mu;
    j["free_energy"] = res.free_energy(*a.beta, mu);
  }
  ctx.emit(dump(j));
  return kExitOk;
}

struct FkCheckerboardArgs {
  LatticeArgs lattice;
  double U = 8.0;
};

int cmd_fk_checkerboard(Context& ctx, const FkCheckerboardArgs& a) {
  const LatticeSpec lat = a.lattice.build();
  const CheckerboardReport rep = checkerboard_check(lat, a.U);
  ctx.emit(dump(checkerboard_record(rep, lat)));
  ctx.metadata["argmin_is_checkerboards"] = rep.argmin_is_checkerboards;
  return kExitOk;
}

struct FkCouplingArgs {
  LatticeArgs lattice{"8x8", "periodic"};
  std::vector<double> U{8.0, 16.0, 32.0};
  std::string format = "csv";
};

int cmd_fk_coupling(Context& ctx, const FkCouplingArgs& a) {
  const LatticeSpec lat = a.lattice.build();
  std::vector<CouplingEstimate> rows;
  for (double u : a.U) {
    if (!(u >= 2.0)) throw UsageError("--U values must be >= 2");
    rows.push_back(effective_coupling_estimate(lat, u));
  }
  if (a.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back(json{{"U", r.U},
                         {"J_est", r.J},
                         {"four_U_J", r.four_U_J},
                         {"delta_E", r.delta_E},
                         {"pair_bonds", r.pair_bonds},
                         {"warning", r.warning ? json(*r.warning) : json(nullptr)}});
    }
    ctx.emit(dump(arr));
  } else {
    std::ostringstream csv;
    write_coupling_csv(csv, rows);
    ctx.emit(csv.str());
  }
  return kExitOk;
}

struct FkMcArgs {
  LatticeArgs lattice{"4x4x4", "open"};
  std::string pinning = "111";
  double U = 8.0;
  double beta = 20.0;
  std::optional<double> mu;
  std::uint64_t seed = 1;
  std::uint64_t steps = 1000;
  std::optional<std::uint64_t> burn_in;
};

int cmd_fk_mc(Context& ctx, const FkMcArgs& a) {
  const LatticeSpec lat = a.lattice.build();
  MetropolisOptions opt;
  opt.U = a.U;
  opt.beta = a.beta;
  opt.mu = a.mu;
  opt.sweeps = a.steps;
  opt.burn_in = a.burn_in;
  opt.seed = a.seed;
  if (a.pinning == "111") opt.pinning = pinning_111(lat);
  if (a.beta < 0.0) throw UsageError("--beta must be >= 0");
  if (a.steps < 1) throw UsageError("--steps must be >= 1");

  const MetropolisStats st = metropolis_ions(lat, opt);
  std::ostringstream csv;
  write_sampler_csv(csv, lat, st, opt.pinning);
  ctx.emit(csv.str());

  json summary;
  summary["lattice"] = a.lattice.dims + " " + a.lattice.bc;
  summary["pinning"] = a.pinning == "111" ? "111: boundary sites off the integer plane sum(x) = k0 pinned to their side" : "none";
  if (a.pinning == "111") summary["plane_level"] = plane_111_level(lat);
  summary["U"] = a.U;
  summary["beta"] = a.beta;
  summary["mu"] = st.mu;
  summary["seed"] = a.seed;
  summary["steps"] = a.steps;
  summary["measured_sweeps"] = st.measured_sweeps;
  summary["acceptance"] = st.acceptance;
  ctx.metadata["sampler"] = summary;
  if (ctx.to_file()) {
    ctx.emit_companion(".summary.json", dump(summary));
  } else {
    ctx.err << summary.dump() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------- interface-scan

struct InterfaceArgs {
  std::vector<double> delta{2.125};
  std::string width = "1..3";
  int height = 4;
  std::string filling = "1/2";
  bool periodic_transverse = false;
  bool reverse_fields = false;
  std::string format = "csv";
  SolverArgs solver;
};

int cmd_interface_scan(Context& ctx, const InterfaceArgs& a) {
  for (double d : a.delta) require_delta(d);
  const auto widths = index_list_or_usage(a.width, 1, 1 << 20, "width");
  if (a.height < 1) throw UsageError("--height must be >= 1");
  Rational filling;
  try {
    filling = Rational::parse(a.filling);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  ScenarioOptions opts;
  opts.periodic_transverse = a.periodic_transverse;
  opts.reverse_fields = a.reverse_fields;

  std::vector<GapRow> rows;
  for (double d : a.delta) {
    for (int w : widths) {
      GapRow row;
      row.delta = d;
      row.width = w;
      row.height = a.height;
      try {
        const InterfaceScenario sc = build_scenario(w, a.height, d, filling, opts);
        row.n = sc.sector_n;
        row.result = interface_gap(sc, a.solver.budget());
      } catch (const ConvergenceError& e) {
        row.error = e.what();
        ctx.failed = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  if (a.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{"delta", r.delta}, {"width", r.width}, {"height", r.height}, {"n", r.n}};
      if (r.result) {
        j["lambda1"] = r.result->lambda1;
        j["lambda2"] = r.result->lambda2;
        j["gap"] = r.result->gap;
        j["method"] = to_string(r.result->method);
        j["residual"] = r.result->residual;
      } else {
        j["error"] = r.error;
      }
      arr.push_back(j);
    }
    ctx.emit(dump(arr));
  } else {
    std::ostringstream csv;
    write_gap_csv(csv, rows);
    ctx.emit(csv.str());
  }
  return ctx.failed ? kExitFailure : kExitOk;
}

// ------------------------------------------------------------------ replay

int cmd_replay(std::ostream& out, std::ostream& err, const std::string& manifest_file, std::string out_dir) {
  std::ifstream in(manifest_file);
  if (!in) throw UsageError("cannot read manifest " + manifest_file);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
  if (out_dir.empty()) out_dir = (fs::path(manifest_file).parent_path() / "replay").string();
  fs::create_directories(out_dir);

  std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
  const fs::path replay_out = fs::path(out_dir) / m.at("out").get<std::string>();
  args.push_back("--out");
  args.push_back(replay_out.string());
  std::ostringstream sink;
  const int status = run(args, sink, err);

  bool same = status == m.at("exit_status").get<int>();
  for (const auto& o : m.at("outputs")) {
    const fs::path p = fs::path(out_dir) / o.at("name").get<std::string>();
    const std::string got = fs::exists(p) ? sha256_file(p) : "missing";
    const bool match = got == o.at("sha256").get<std::string>();
    same = same && match;
    out << o.at("name").get<std::string>() << ' ' << (match ? "match" : "MISMATCH") << ' ' << got << '\n';
  }
  return same ? kExitOk : kExitFailure;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json parameter_map(const CLI::App* app) {
  json params = json::object();
  for (const CLI::App* a = app; a != nullptr; a = a->get_subcommands().empty() ? nullptr : a->get_subcommands().front()) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.rfind("help", 0) == 0 || name == "out") continue;
      std::string value;
      if (opt->count() > 0) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      } else {
        value = opt->get_default_str();
      }
      params[name] = value;
    }
  }
  return params;
}

std::vector<std::string> strip_out_flag(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact diagonalization of XXZ chains and Falicov-Kimball lattices"};
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.require_subcommand(1);

  std::string out_path;
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "Output file; also writes <out>.manifest.json"); };
  auto add_solver = [](CLI::App* sub, SolverArgs& s) {
    sub->add_option("--dense-cap", s.dense_cap, "Largest dimension diagonalized densely")->capture_default_str();
    sub->add_option("--tol", s.tol, "Lanczos residual tolerance")->capture_default_str();
    sub->add_option("--max-iter", s.max_iter, "Lanczos matrix-vector product budget")->capture_default_str();
    sub->add_option("--seed", s.seed, "Lanczos start-vector seed")->capture_default_str();
  };
  auto add_lattice = [](CLI::App* sub, LatticeArgs& l) {
    sub->add_option("--dims", l.dims, "Box extents, e.g. 4x4 or 2x2x2")->capture_default_str();
    sub->add_option("--bc", l.bc, "Boundary condition")
        ->check(CLI::IsMember({"periodic", "open"}))
        ->capture_default_str();
  };

  SpectrumArgs sp;
  auto* spectrum = app.add_subcommand("spectrum", "All eigenvalues of chain sectors, one row per level");
  spectrum->add_option("--L", sp.L, "Chain length")->capture_default_str();
  spectrum->add_option("--delta", sp.delta, "Anisotropy, > 1")->capture_default_str();
  spectrum->add_option("--n", sp.n, "Down-spin counts: list or range a..b (default 0..L)");
  spectrum->add_option("--boundary", sp.boundary, "Boundary field signs")
      ->check(CLI::IsMember({"pp", "pm", "mp", "mm"}))
      ->capture_default_str();
  spectrum->add_option("--format", sp.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  spectrum->add_option("--dense-cap", sp.dense_cap, "Largest sector dimension accepted")->capture_default_str();
  add_out(spectrum);

  DropletArgs dv;
  auto* droplet = app.add_subcommand("droplet-verify", "Droplet multiplet, gap and subspace distance per sector");
  droplet->add_option("--L", dv.L, "Chain length")->capture_default_str();
  droplet->add_option("--delta", dv.delta, "Anisotropy, > 1")->capture_default_str();
  droplet->add_option("--n", dv.n, "Down-spin counts: list or range a..b")->capture_default_str();
  droplet->add_option("--format", dv.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_solver(droplet, dv.solver);
  add_out(droplet);

  KinkArgs kc;
  auto* kink = app.add_subcommand("kink-check", "Norms of H^{+-} applied to kink states; exit 1 above 1e-10");
  kink->add_option("--L", kc.L, "Chain length")->capture_default_str();
  kink->add_option("--delta", kc.delta, "Anisotropy, > 1")->capture_default_str();
  kink->add_option("--n", kc.n, "Down-spin counts (default 0..L)");
  add_out(kink);

  auto* fk = app.add_subcommand("fk", "Falicov-Kimball computations");
  fk->require_subcommand(1);

  FkGroundArgs fg;
  auto* fk_ground = fk->add_subcommand("ground", "Electron levels for one ion configuration");
  add_lattice(fk_ground, fg.lattice);
  fk_ground->add_option("--U", fg.U)->capture_default_str();
  fk_ground->add_option("--ions", fg.ions, "checkerboard, checkerboard-odd or a 0/1 string")->capture_default_str();
  fk_ground->add_option("--ne", fg.ne, "Electron count (default sites/2)");
  fk_ground->add_option("--beta", fg.beta, "Also report the free energy at this inverse temperature");
  fk_ground->add_option("--mu", fg.mu, "Chemical potential (default U)");
  add_out(fk_ground);

  FkCheckerboardArgs fc;
  auto* fk_cb = fk->add_subcommand("checkerboard", "Exhaustive scan of neutral ion configurations");
  add_lattice(fk_cb, fc.lattice);
  fk_cb->add_option("--U", fc.U)->capture_default_str();
  add_out(fk_cb);

  FkCouplingArgs fj;
  auto* fk_j = fk->add_subcommand("coupling", "Leading Ising coupling of the staggered ion spins");
  add_lattice(fk_j, fj.lattice);
  fk_j->add_option("--U", fj.U, "Comma-separated U values")->delimiter(',')->capture_default_str();
  fk_j->add_option("--format", fj.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_out(fk_j);

  FkMcArgs fm;
  auto* fk_mc = fk->add_subcommand("mc", "Metropolis sampling of ion configurations");
  add_lattice(fk_mc, fm.lattice);
  fk_mc->add_option("--pinning", fm.pinning)->check(CLI::IsMember({"111", "none"}))->capture_default_str();
  fk_mc->add_option("--U", fm.U)->capture_default_str();
  fk_mc->add_option("--beta", fm.beta)->capture_default_str();
  fk_mc->add_option("--mu", fm.mu, "Chemical potential (default U)");
  fk_mc->add_option("--seed", fm.seed)->capture_default_str();
  fk_mc->add_option("--steps", fm.steps, "Sweeps")->capture_default_str();
  fk_mc->add_option("--burn-in", fm.burn_in, "Discarded sweeps (default steps/10)");
  add_out(fk_mc);

  InterfaceArgs ia;
  auto* iface = app.add_subcommand("interface-scan", "Lowest gap of diagonal-interface strips");
  iface->add_option("--delta", ia.delta, "Comma-separated anisotropies")->delimiter(',')->capture_default_str();
  iface->add_option("--width", ia.width, "Widths: list or range a..b")->capture_default_str();
  iface->add_option("--height", ia.height)->capture_default_str();
  iface->add_option("--filling", ia.filling, "Down-spin fraction p/q")->capture_default_str();
  iface->add_flag("--periodic-transverse", ia.periodic_transverse, "Wrap the width direction");
  iface->add_flag("--reverse-fields", ia.reverse_fields, "Flip every boundary field");
  iface->add_option("--format", ia.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_solver(iface, ia.solver);
  add_out(iface);

  std::string manifest_file, replay_dir;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  replay->add_option("--manifest", manifest_file)->required();
  replay->add_option("--out-dir", replay_dir, "Directory for replayed outputs (default <manifest dir>/replay)");

  std::vector<std::string> argv_store{"qlat"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{out, err, out_path, {}, json::object(), false};
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  std::string command;
  std::optional<std::uint64_t> seed;
  int status = kExitOk;
  try {
    if (*replay) return cmd_replay(out, err, manifest_file, replay_dir);
    if (*spectrum) {
      command = "spectrum";
      status = cmd_spectrum(ctx, sp);
    } else if (*droplet) {
      command = "droplet-verify";
      seed = dv.solver.seed;
      status = cmd_droplet_verify(ctx, dv);
    } else if (*kink) {
      command = "kink-check";
      status = cmd_kink_check(ctx, kc);
    } else if (*fk_ground) {
      command = "fk ground";
      status = cmd_fk_ground(ctx, fg);
    } else if (*fk_cb) {
      command = "fk checkerboard";
      status = cmd_fk_checkerboard(ctx, fc);
    } else if (*fk_j) {
      command = "fk coupling";
      status = cmd_fk_coupling(ctx, fj);
    } else if (*fk_mc) {
      command = "fk mc";
      seed = fm.seed;
      status = cmd_fk_mc(ctx, fm);
    } else if (*iface) {
      command = "interface-scan";
      seed = ia.solver.seed;
      status = cmd_interface_scan(ctx, ia);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    status = kExitFailure;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    status = kExitFailure;
  }

  if (ctx.to_file()) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json m;
    m["version"] = kArtifactVersion;
    m["command"] = command;
    m["argv"] = strip_out_flag(args);
    m["out"] = fs::path(out_path).filename().string();
    m["parameters"] = parameter_map(&app);
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["exit_status"] = status;
    json outs = json::array();
    for (const auto& p : ctx.outputs) {
      outs.push_back(json{{"name", p.filename().string()}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    }
    m["outputs"] = outs;
    m["metadata"] = ctx.metadata;
    // Timestamps live on the first line only.
    const json run_info{{"started_utc", started_utc}, {"duration_seconds", seconds}};
    std::string text = m.dump(2);
    text.insert(2, "  \"run\": " + run_info.dump() + ",\n");
    std::ofstream mf(manifest_path_for(out_path), std::ios::binary | std::ios::trunc);
    mf << text << "\n";
  }
  return status;
}

}  // namespace qlat::cli
