#include "bperc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bperc/engine.hpp"
#include "bperc/experiments.hpp"
#include "bperc/families.hpp"
#include "bperc/grid_io.hpp"
#include "bperc/lattice.hpp"
#include "bperc/spanning.hpp"

namespace bperc {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const std::string& tok : split(s, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad ") + what + " list entry '" + tok + "'");
    }
  }
  return out;
}

std::vector<Coord> parse_coord_list(const std::string& s, const char* what) {
  std::vector<Coord> out;
  for (int v : parse_int_list(s, what)) out.push_back(v);
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad ") + what + " list entry '" + tok + "'");
    }
  }
  return out;
}

std::string join_dash(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string join_dash_coord(const std::vector<Coord>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string out_dir() {
  const char* env = std::getenv("BPERC_OUT_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

std::string resolve_out(const std::string& given, const std::string& fallback_name) {
  if (!given.empty()) return given;
  return out_dir() + "/" + fallback_name;
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// key=value lines; '#' and ';' start comments. Manifests are valid input.
std::vector<std::pair<std::string, std::string>> read_config_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string l = trim(line);
    if (l.empty() || l[0] == '#' || l[0] == ';') continue;
    const std::size_t eq = l.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line without '=': " + l);
    kv.emplace_back(trim(l.substr(0, eq)), trim(l.substr(eq + 1)));
  }
  return kv;
}

// Expands --config files into --key value tokens for keys not already given
// on the command line, so explicit flags override the file.
void apply_config_files(std::vector<std::string>& tokens) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "--config" && i + 1 < tokens.size())
      paths.push_back(tokens[i + 1]);
    else if (tokens[i].rfind("--config=", 0) == 0)
      paths.push_back(tokens[i].substr(9));
  }
  const auto has_flag = [&tokens](const std::string& key) {
    const std::string flag = "--" + key;
    for (const std::string& t : tokens)
      if (t == flag || t.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (const std::string& path : paths)
    for (const auto& [key, value] : read_config_kv(path))
      if (key != "config" && !has_flag(key)) {
        tokens.push_back("--" + key);
        tokens.push_back(value);
      }
}

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, Coord value) { add(key, std::to_string(value)); }

  void write(const std::string& path, double wall_seconds) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << "# bperc manifest\n";
    out << "# command=" << command_ << "\n";
    out << "# version=" << kVersion << "\n";
    out << "# stream_rule=" << kStreamRuleId << "\n";
    out << "# wall_time_s=" << fmt_g(wall_seconds) << "\n";
    for (const auto& [key, value] : entries_) out << key << "=" << value << "\n";
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// option bags, one per subcommand

struct FamilyArgs {
  std::string a;
  int r = 0;

  NeighborhoodSpec spec() const { return NeighborhoodSpec(parse_int_list(a, "a"), r); }
};

struct ClassifyArgs {
  FamilyArgs family;
  std::string out;
};

struct ClosureArgs {
  std::string grid;
  std::string out;
};

struct LcScanArgs {
  FamilyArgs family;
  std::string p;
  std::uint64_t trials = 400;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string geometry = "cube";
  Coord max_length = 16384;
  std::string out;
  std::string probes;
};

struct ClusterArgs {
  FamilyArgs family;
  Coord n = 0;
  std::string p;
  std::string cutoff = "1";
  Coord t = 0;  // cluster graph radius; 0 = 2*a_d
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

struct GrowthArgs {
  FamilyArgs family;
  Coord length = 0;
  std::string seed_block;
  std::string p;
  std::uint64_t trials = 200;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

struct AlCheckArgs {
  std::string grid;
  std::string mode = "block";
  std::string k;  // comma list; empty = every k up to the closure diameter
  Coord l = 0;    // slab width target
  Coord t = 0;    // strong graph override; 0 = mode default
  std::string out;
};

struct DiamTailArgs {
  FamilyArgs family;
  Coord length = 0;
  std::string p;
  Coord threshold = 1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

struct FitArgs {
  std::string points;
  std::string model = "pure_power";
  int index = 0;  // lambda index i; 0 = derive from the family columns
  std::string out;
};

// ---------------------------------------------------------------------------

int cmd_classify(const ClassifyArgs& args) {
  Stopwatch timer;
  const NeighborhoodSpec spec = args.family.spec();
  const CriticalityLabel label = classify_nr(spec);
  const StableSetDescriptor desc = stable_set_descriptor(spec);
  std::ostringstream line;
  line << "family=" << spec.family_name() << " d=" << spec.d << " a=" << join_dash(spec.a)
       << " r=" << spec.r << " label=" << to_string(label)
       << " neighborhood_size=" << spec.neighborhood_size() << " descriptor=" << desc.text()
       << " covered=" << (desc.covered ? 1 : 0) << " tie=" << (desc.boundary_tie ? 1 : 0);
  std::cout << line.str() << "\n";
  const std::string out = resolve_out(args.out, "classify.txt");
  write_text_file(out, line.str() + "\n");
  Manifest manifest("classify");
  manifest.add("a", args.family.a);
  manifest.add("r", static_cast<std::uint64_t>(args.family.r));
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_closure(const ClosureArgs& args) {
  Stopwatch timer;
  GridFile grid = read_grid_file(args.grid);
  const UpdateFamily family = make_nr_family(grid.spec);
  const Configuration closed = closure(grid.config, family);
  const std::string out = resolve_out(args.out, "closure.grid");
  write_text_file(out, grid_to_string(grid.spec, closed));
  std::cout << "closure: " << grid.config.infected_count() << " -> " << closed.infected_count()
            << " infected of " << closed.volume() << "\n";
  Manifest manifest("closure");
  manifest.add("grid", args.grid);
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_lc_scan(const LcScanArgs& args) {
  Stopwatch timer;
  const NeighborhoodSpec spec = args.family.spec();
  const Geometry geometry = geometry_from_string(args.geometry);
  const std::vector<double> ps = parse_double_list(args.p, "p");
  const std::string out = resolve_out(args.out, "lc-scan.csv");

  std::ostringstream csv;
  csv << "family,d,a,r,geometry,p,lc,bracket_lo,bracket_hi,trials,resolved,monotone,seed\n";
  std::ostringstream probes_csv;
  probes_csv << "family,d,a,r,geometry,L,p,trials,estimate,ci_low,ci_high,resolved,seed\n";

  for (double p : ps) {
    const CriticalLengthResult result =
        critical_length(spec, p, args.trials, args.seed, geometry, args.max_length);
    csv << spec.family_name() << ',' << spec.d << ',' << join_dash(spec.a) << ',' << spec.r
        << ',' << to_string(geometry) << ',' << fmt_g(p) << ',' << result.lc << ','
        << result.bracket_lo << ',' << result.bracket_hi << ',' << args.trials << ','
        << (result.resolved ? 1 : 0) << ',' << (result.monotone ? 1 : 0) << ',' << args.seed
        << "\n";
    for (const ProbeRecord& probe : result.probes) {
      probes_csv << spec.family_name() << ',' << spec.d << ',' << join_dash(spec.a) << ','
                 << spec.r << ',' << to_string(geometry) << ',' << probe.length << ','
                 << fmt_g(p) << ',' << probe.estimate.trials << ','
                 << fmt_g(probe.estimate.estimate) << ',' << fmt_g(probe.estimate.ci_low) << ','
                 << fmt_g(probe.estimate.ci_high) << ',' << (probe.resolved ? 1 : 0) << ','
                 << args.seed << "\n";
    }
    std::cout << "p=" << fmt_g(p) << " lc=" << result.lc << " bracket=(" << result.bracket_lo
              << "," << result.bracket_hi << "] resolved=" << (result.resolved ? 1 : 0)
              << "\n";
  }

  write_text_file(out, csv.str());
  if (!args.probes.empty()) write_text_file(args.probes, probes_csv.str());

  Manifest manifest("lc-scan");
  manifest.add("a", args.family.a);
  manifest.add("r", static_cast<std::uint64_t>(args.family.r));
  manifest.add("p", args.p);
  manifest.add("trials", args.trials);
  manifest.add("seed", args.seed);
  manifest.add("geometry", args.geometry);
  manifest.add("max-L", args.max_length);
  if (!args.probes.empty()) manifest.add("probes", args.probes);
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_cluster_stats(const ClusterArgs& args) {
  Stopwatch timer;
  const NeighborhoodSpec spec = args.family.spec();
  const std::vector<double> ps = parse_double_list(args.p, "p");
  const double cutoff = args.cutoff == "inf" ? INFINITY : std::stod(args.cutoff);
  const std::string out = resolve_out(args.out, "cluster-stats.csv");

  const Coord radius = args.t != 0 ? args.t : 2 * spec.max_exponent();
  std::ostringstream csv;
  csv << "family,d,a,r,N,t,p,cutoff,trials,mean_size,diam_tail,seed\n";
  for (double p : ps) {
    const ClusterStats stats =
        center_cluster_stats(spec, args.n, p, cutoff, args.trials, args.seed, 0, radius);
    csv << spec.family_name() << ',' << spec.d << ',' << join_dash(spec.a) << ',' << spec.r
        << ',' << args.n << ',' << radius << ',' << fmt_g(p) << ',' << fmt_g(cutoff) << ','
        << args.trials << ',' << fmt_g(stats.mean_size) << ',' << fmt_g(stats.diam_tail) << ','
        << args.seed << "\n";
    std::cout << "p=" << fmt_g(p) << " mean_size=" << fmt_g(stats.mean_size)
              << " diam_tail=" << fmt_g(stats.diam_tail) << "\n";
  }
  write_text_file(out, csv.str());

  Manifest manifest("cluster-stats");
  manifest.add("a", args.family.a);
  manifest.add("r", static_cast<std::uint64_t>(args.family.r));
  manifest.add("n", args.n);
  manifest.add("p", args.p);
  manifest.add("cutoff", args.cutoff);
  manifest.add("t", radius);
  manifest.add("trials", args.trials);
  manifest.add("seed", args.seed);
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_growth(const GrowthArgs& args) {
  Stopwatch timer;
  const NeighborhoodSpec spec = args.family.spec();
  const std::vector<Coord> block = parse_coord_list(args.seed_block, "seed-block");
  const std::vector<double> ps = parse_double_list(args.p, "p");
  const std::string out = resolve_out(args.out, "growth.csv");

  std::ostringstream csv;
  csv << "family,d,a,r,geometry,L,seed_block,p,trials,estimate,ci_low,ci_high,seed\n";
  for (double p : ps) {
    const TrialEstimate est = seeded_growth(spec, args.length, block, p, args.trials, args.seed);
    csv << spec.family_name() << ',' << spec.d << ',' << join_dash(spec.a) << ',' << spec.r
        << ",cube," << args.length << ',' << join_dash_coord(block) << ',' << fmt_g(p) << ','
        << est.trials << ',' << fmt_g(est.estimate) << ',' << fmt_g(est.ci_low) << ','
        << fmt_g(est.ci_high) << ',' << args.seed << "\n";
    std::cout << "p=" << fmt_g(p) << " fill_fraction=" << fmt_g(est.estimate) << "\n";
  }
  write_text_file(out, csv.str());

  Manifest manifest("growth");
  manifest.add("a", args.family.a);
  manifest.add("r", static_cast<std::uint64_t>(args.family.r));
  manifest.add("L", args.length);
  manifest.add("seed-block", args.seed_block);
  manifest.add("p", args.p);
  manifest.add("trials", args.trials);
  manifest.add("seed", args.seed);
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_al_check(const AlCheckArgs& args) {
  Stopwatch timer;
  GridFile grid = read_grid_file(args.grid);
  const NeighborhoodSpec& spec = grid.spec;
  const UpdateFamily family = make_nr_family(spec);
  const bool slab = args.mode == "slab";
  if (!slab && args.mode != "block")
    throw std::invalid_argument("mode must be 'block' or 'slab'");
  if (slab && spec.d < 2) throw std::invalid_argument("slab mode needs d >= 2");
  const Coord t = args.t != 0 ? args.t : 2 * spec.max_exponent();
  const StrongGraphParam param(t);
  const ProcessTrace trace = components_process_trace(grid.config, family, param);
  const Coord diameter = trace.closure_diameter();

  std::vector<Coord> ks;
  if (args.k.empty()) {
    for (Coord k = 1; k <= diameter; ++k) ks.push_back(k);
  } else {
    ks = parse_coord_list(args.k, "k");
  }

  std::ostringstream csv;
  const int d = spec.d;
  if (!slab) {
    csv << "k";
    for (int j = 1; j <= d; ++j) csv << ",lo" << j;
    for (int j = 1; j <= d; ++j) csv << ",hi" << j;
    csv << ",diam\n";
    for (Coord k : ks) {
      const Block witness = al_witness_block(trace, k);
      csv << k;
      for (Coord c : witness.lo) csv << ',' << c;
      for (Coord c : witness.hi) csv << ',' << c;
      csv << ',' << witness.long_side() << "\n";
    }
  } else {
    if (args.l < 1) throw std::invalid_argument("slab mode needs --l >= 1");
    csv << "l,k";
    for (int j = 1; j <= d; ++j) csv << ",lo" << j;
    for (int j = 1; j <= d; ++j) csv << ",hi" << j;
    csv << ",base_diam,height\n";
    for (Coord k : ks) {
      const SlabWitness witness = al_witness_slab(trace, args.l, k);
      csv << args.l << ',' << k;
      for (Coord c : witness.block.lo) csv << ',' << c;
      for (Coord c : witness.block.hi) csv << ',' << c;
      csv << ',' << witness.base_diam << ',' << witness.height << "\n";
    }
  }

  const std::string out = resolve_out(args.out, "al-check.csv");
  write_text_file(out, csv.str());
  std::cout << "al-check: diam(closure)=" << diameter << " witnesses=" << ks.size() << "\n";

  Manifest manifest("al-check");
  manifest.add("grid", args.grid);
  manifest.add("mode", args.mode);
  if (!args.k.empty()) manifest.add("k", args.k);
  if (slab) manifest.add("l", args.l);
  manifest.add("t", t);
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_diam_tail(const DiamTailArgs& args) {
  Stopwatch timer;
  const NeighborhoodSpec spec = args.family.spec();
  const std::vector<double> ps = parse_double_list(args.p, "p");
  const std::string out = resolve_out(args.out, "diam-tail.csv");

  std::ostringstream csv;
  csv << "family,d,a,r,geometry,L,p,threshold,trials,estimate,ci_low,ci_high,seed\n";
  for (double p : ps) {
    const TrialEstimate est =
        diam_tail_probability(spec, args.length, p, args.threshold, args.trials, args.seed);
    csv << spec.family_name() << ',' << spec.d << ',' << join_dash(spec.a) << ',' << spec.r
        << ",cube," << args.length << ',' << fmt_g(p) << ',' << args.threshold << ','
        << est.trials << ',' << fmt_g(est.estimate) << ',' << fmt_g(est.ci_low) << ','
        << fmt_g(est.ci_high) << ',' << args.seed << "\n";
    std::cout << "p=" << fmt_g(p) << " tail=" << fmt_g(est.estimate) << "\n";
  }
  write_text_file(out, csv.str());

  Manifest manifest("diam-tail");
  manifest.add("a", args.family.a);
  manifest.add("r", static_cast<std::uint64_t>(args.family.r));
  manifest.add("L", args.length);
  manifest.add("p", args.p);
  manifest.add("threshold", args.threshold);
  manifest.add("trials", args.trials);
  manifest.add("seed", args.seed);
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

int cmd_fit(const FitArgs& args) {
  Stopwatch timer;
  std::ifstream in(args.points);
  if (!in) throw std::runtime_error("cannot open points file: " + args.points);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("points file is empty");
  const std::vector<std::string> columns = split(header, ',');
  const auto column = [&columns](const std::string& name) -> int {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int col_p = column("p"), col_lc = column("lc");
  const int col_a = column("a"), col_r = column("r");
  if (col_p < 0 || col_lc < 0)
    throw std::runtime_error("points file needs 'p' and 'lc' columns");

  std::vector<ScalingPoint> points;
  std::vector<int> a;
  int r = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    ScalingPoint pt;
    pt.p = std::stod(fields.at(static_cast<std::size_t>(col_p)));
    pt.lc = std::stoll(fields.at(static_cast<std::size_t>(col_lc)));
    if (col_a >= 0 && a.empty()) {
      for (const std::string& tok : split(fields.at(static_cast<std::size_t>(col_a)), '-'))
        a.push_back(std::stoi(tok));
    }
    if (col_r >= 0 && r == 0) r = std::stoi(fields.at(static_cast<std::size_t>(col_r)));
    points.push_back(pt);
  }

  int index = args.index;
  if (index == 0) {
    if (a.size() < 2 || r == 0)
      throw std::runtime_error("cannot derive lambda index; pass --i explicitly");
    int s = 0;
    for (std::size_t j = 1; j < a.size(); ++j) s += a[j];
    index = r - s;
    if (index < 1)
      throw std::runtime_error("derived lambda index is not positive; pass --i explicitly");
  }
  if (a.size() >= 2)
    for (ScalingPoint& pt : points) pt.lambda = lambda_value(pt.p, index, a[0], a[1]);
  else if (args.model == "power_log2")
    throw std::runtime_error("power_log2 needs family columns to evaluate lambda");

  FitModel model;
  if (args.model == "pure_power")
    model = FitModel::pure_power;
  else if (args.model == "power_log2")
    model = FitModel::power_log2;
  else
    throw std::invalid_argument("model must be 'pure_power' or 'power_log2'");

  const FitResult fit = scaling_fit(points, model);
  std::ostringstream report;
  report << "model=" << args.model << "\n";
  report << "n=" << fit.n << "\n";
  if (!a.empty()) report << "a=" << join_dash(a) << "\n";
  if (r != 0) report << "r=" << r << "\n";
  report << "i=" << index << "\n";
  if (model == FitModel::pure_power) {
    report << "exponent=" << fmt_g(fit.exponent) << "\n";
    report << "intercept=" << fmt_g(fit.intercept) << "\n";
  } else {
    report << "slope=" << fmt_g(fit.slope) << "\n";
    report << "ratio_min=" << fmt_g(fit.ratio_min) << "\n";
    report << "ratio_max=" << fmt_g(fit.ratio_max) << "\n";
    report << "ratio_spread=" << fmt_g(fit.ratio_spread) << "\n";
  }
  report << "rss=" << fmt_g(fit.rss) << "\n";

  const std::string out = resolve_out(args.out, "fit.txt");
  write_text_file(out, report.str());
  std::cout << report.str();

  Manifest manifest("fit");
  manifest.add("points", args.points);
  manifest.add("model", args.model);
  if (args.index != 0) manifest.add("i", static_cast<std::uint64_t>(args.index));
  manifest.add("out", out);
  manifest.write(out + ".manifest", timer.seconds());
  return 0;
}

void add_config_option(CLI::App* sub, std::string& holder) {
  sub->add_option("--config", holder, "key=value config file (explicit flags override it)");
}

void add_family_options(CLI::App* sub, FamilyArgs& family) {
  sub->add_option("--a", family.a, "neighborhood exponents a1,...,ad (comma list)")
      ->required();
  sub->add_option("--r", family.r, "infection threshold")->required();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"anisotropic bootstrap percolation toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ClassifyArgs classify_args;
  ClosureArgs closure_args;
  LcScanArgs lc_args;
  ClusterArgs cluster_args;
  GrowthArgs growth_args;
  AlCheckArgs al_args;
  DiamTailArgs tail_args;
  FitArgs fit_args;

  std::string config_path;
  int exit_code = 0;
  const auto run = [&exit_code](auto&& fn) {
    return [&exit_code, fn = std::forward<decltype(fn)>(fn)]() { exit_code = fn(); };
  };

  CLI::App* classify = app.add_subcommand("classify", "label and stable-set descriptor");
  add_family_options(classify, classify_args.family);
  classify->add_option("--out", classify_args.out, "output record path");
  add_config_option(classify, config_path);
  classify->callback(run([&] { return cmd_classify(classify_args); }));

  CLI::App* closure_cmd = app.add_subcommand("closure", "closure of a grid file");
  closure_cmd->add_option("--grid", closure_args.grid, "input grid file")->required();
  closure_cmd->add_option("--out", closure_args.out, "output grid path");
  add_config_option(closure_cmd, config_path);
  closure_cmd->callback(run([&] { return cmd_closure(closure_args); }));

  CLI::App* lc = app.add_subcommand("lc-scan", "critical length search over p values");
  add_family_options(lc, lc_args.family);
  lc->add_option("--p", lc_args.p, "densities (comma list)")->required();
  lc->add_option("--trials", lc_args.trials, "trial budget per probe");
  auto* lc_seed = lc->add_option("--seed", lc_args.seed, "RNG seed");
  lc->add_option("--geometry", lc_args.geometry, "cube or torus");
  lc->add_option("--max-L", lc_args.max_length, "search cap");
  lc->add_option("--out", lc_args.out, "summary CSV path");
  lc->add_option("--probes", lc_args.probes, "per-probe CSV path");
  add_config_option(lc, config_path);
  lc->callback(run([&] {
    lc_args.seed_given = lc_seed->count() > 0;
    if (!lc_args.seed_given) lc_args.seed = random_seed();
    return cmd_lc_scan(lc_args);
  }));

  CLI::App* cluster = app.add_subcommand("cluster-stats", "center cluster statistics");
  add_family_options(cluster, cluster_args.family);
  cluster->add_option("--n", cluster_args.n, "domain sidelength N")->required();
  cluster->add_option("--p", cluster_args.p, "densities (comma list)")->required();
  cluster->add_option("--cutoff", cluster_args.cutoff, "diameter cutoff (number or 'inf')");
  cluster->add_option("--t", cluster_args.t, "cluster graph radius (default 2*a_d)");
  cluster->add_option("--trials", cluster_args.trials, "trials per density");
  auto* cluster_seed = cluster->add_option("--seed", cluster_args.seed, "RNG seed");
  cluster->add_option("--out", cluster_args.out, "CSV path");
  add_config_option(cluster, config_path);
  cluster->callback(run([&] {
    cluster_args.seed_given = cluster_seed->count() > 0;
    if (!cluster_args.seed_given) cluster_args.seed = random_seed();
    return cmd_cluster_stats(cluster_args);
  }));

  CLI::App* growth = app.add_subcommand("growth", "seeded growth fill fraction");
  add_family_options(growth, growth_args.family);
  growth->add_option("--L", growth_args.length, "domain sidelength")->required();
  growth->add_option("--seed-block", growth_args.seed_block, "seed block sides (comma list)")
      ->required();
  growth->add_option("--p", growth_args.p, "densities (comma list)")->required();
  growth->add_option("--trials", growth_args.trials, "trials per density");
  auto* growth_seed = growth->add_option("--seed", growth_args.seed, "RNG seed");
  growth->add_option("--out", growth_args.out, "CSV path");
  add_config_option(growth, config_path);
  growth->callback(run([&] {
    growth_args.seed_given = growth_seed->count() > 0;
    if (!growth_args.seed_given) growth_args.seed = random_seed();
    return cmd_growth(growth_args);
  }));

  CLI::App* al = app.add_subcommand("al-check", "internally spanned witness blocks");
  al->add_option("--grid", al_args.grid, "input grid file")->required();
  al->add_option("--mode", al_args.mode, "block or slab");
  al->add_option("--k", al_args.k, "scales (comma list; default 1..diam)");
  al->add_option("--l", al_args.l, "slab width target");
  al->add_option("--t", al_args.t, "strong graph radius override");
  al->add_option("--out", al_args.out, "CSV path");
  add_config_option(al, config_path);
  al->callback(run([&] { return cmd_al_check(al_args); }));

  CLI::App* tail = app.add_subcommand("diam-tail", "diameter tail probability");
  add_family_options(tail, tail_args.family);
  tail->add_option("--L", tail_args.length, "domain sidelength")->required();
  tail->add_option("--p", tail_args.p, "densities (comma list)")->required();
  tail->add_option("--threshold", tail_args.threshold, "diameter threshold")->required();
  tail->add_option("--trials", tail_args.trials, "trials per density");
  auto* tail_seed = tail->add_option("--seed", tail_args.seed, "RNG seed");
  tail->add_option("--out", tail_args.out, "CSV path");
  add_config_option(tail, config_path);
  tail->callback(run([&] {
    tail_args.seed_given = tail_seed->count() > 0;
    if (!tail_args.seed_given) tail_args.seed = random_seed();
    return cmd_diam_tail(tail_args);
  }));

  CLI::App* fit = app.add_subcommand("fit", "scaling-law fit of lc measurements");
  fit->add_option("--points", fit_args.points, "CSV with p and lc columns")->required();
  fit->add_option("--model", fit_args.model, "pure_power or power_log2");
  fit->add_option("--i", fit_args.index, "lambda index");
  fit->add_option("--out", fit_args.out, "report path");
  add_config_option(fit, config_path);
  fit->callback(run([&] { return cmd_fit(fit_args); }));

  std::vector<std::string> tokens;
  for (int i = 1; i < argc; ++i) tokens.emplace_back(argv[i]);
  try {
    apply_config_files(tokens);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(tokens.begin(), tokens.end());  // CLI11 consumes back to front

  try {
    app.parse(std::move(tokens));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace bperc
