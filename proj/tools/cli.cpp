#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <fstream>
#include <functional>
#include <optional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fsl/cubic.hpp"
#include "fsl/densities.hpp"
#include "fsl/dirichlet.hpp"
#include "fsl/elliptic.hpp"
#include "fsl/family_stats.hpp"
#include "fsl/lfunctions.hpp"
#include "fsl/measures.hpp"
#include "fsl/parallel.hpp"
#include "fsl/rmt.hpp"
#include "fsl/weil_deligne.hpp"

namespace fsl::cli {

using json = nlohmann::json;

namespace {

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> v = {
      {"measures-core", "1.0.0"},       {"rmt-ensembles", "1.0.0"},    {"symmetry-densities", "1.0.0"},
      {"dirichlet-families", "1.0.0"},  {"lfunctions", "1.0.0"},       {"elliptic-families", "1.0.0"},
      {"artin-cubic-families", "1.0.0"}, {"weil-deligne", "1.0.0"},    {"family-statistics", "1.0.0"},
      {"cli", "1.0.0"},
  };
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// A CSV table: column names plus rows of preformatted cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  template <class... T>
  void add(const T&... cells) {
    rows.push_back({cell(cells)...});
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class N>
  static std::string cell(N v) {
    if constexpr (std::is_floating_point_v<N>) return fmt(static_cast<double>(v));
    else return std::to_string(v);
  }
};

struct Outcome {
  json result = json::object();
  Table table;
};

// Resolved settings for one invocation.
class Context {
 public:
  std::string command;
  std::map<std::string, std::string> values;
  std::string hash;

  const std::string& str(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ValidationError("missing setting: " + key);
    return it->second;
  }

  double num(const std::string& key) const {
    const std::string& s = str(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("--" + key + ": not a number: '" + s + "'");
    }
  }

  i64 integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ValidationError("--" + key + ": not an integer: '" + str(key) + "'");
    return static_cast<i64>(v);
  }

  bool flag(const std::string& key) const {
    const std::string& s = str(key);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off" || s.empty()) return false;
    throw ValidationError("--" + key + ": not a boolean: '" + s + "'");
  }

  std::optional<std::filesystem::path> cache_dir() const {
    const std::string& s = str("cache-dir");
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  }
};

struct Param {
  Param(std::string n, std::string def, std::string h, bool f = false)
      : name(std::move(n)), fallback(std::move(def)), help(std::move(h)), is_flag(f) {}

  std::string name, fallback, help;
  bool is_flag = false;
  std::string value;
  bool flag_value = false;
  CLI::Option* option = nullptr;
};

struct Command {
  std::string name, help;
  std::deque<Param> params;
  std::function<Outcome(const Context&)> body;
  CLI::App* app = nullptr;

  Command& opt(std::string n, std::string def, std::string h) {
    params.emplace_back(std::move(n), std::move(def), std::move(h));
    return *this;
  }
  Command& flag(std::string n, std::string h) {
    params.emplace_back(std::move(n), "false", std::move(h), true);
    return *this;
  }
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json indicator_json(const IndicatorTriple& t) {
  return {{"i1", t.i1}, {"i2", t.i2}, {"i3", t.i3}, {"se1", t.se1}, {"se2", t.se2}, {"se3", t.se3},
          {"i2_imag", t.i2_imag}};
}

json decomposition_json(const Decomposition& d) {
  return {{"U", d.mass_u}, {"O", d.mass_o}, {"Sp", d.mass_sp}, {"clamped", d.clamped}};
}

HaarFamily haar_family(const std::string& name, int n) {
  if (name == "usp") return {ClassicalFamily::USp, n};
  if (name == "so-even") return {ClassicalFamily::SOEven, n};
  if (name == "so-odd") return {ClassicalFamily::SOOdd, n};
  if (name == "unitary") return {ClassicalFamily::Unitary, n};
  throw ValidationError("unknown matrix family: " + name + " (usp, so-even, so-odd, unitary)");
}

// ------------------------------------------------------------ subcommands

Outcome cmd_indicators(const Context& c) {
  const std::string g = c.str("group");
  const int n = static_cast<int>(c.integer("n"));
  GroupPtr spec;
  if (g == "su2") spec = group({SU2Sym{static_cast<int>(c.integer("k"))}});
  else if (g == "u1") spec = group({FullCircle{}});
  else if (g == "roots") spec = group({RootsOfUnity{static_cast<int>(c.integer("m"))}});
  else if (g == "d3") spec = group({dihedral_d3()});
  else spec = group({ClassicalHaar{haar_family(g, n)}});
  Outcome o;
  IndicatorTriple est;
  if (c.flag("exact")) {
    est = indicators_exact(*spec);
  } else {
    const i64 samples = c.integer("samples");
    require(samples >= 2, "--samples must be at least 2");
    est = indicators_monte_carlo(*spec, static_cast<std::size_t>(samples), static_cast<std::uint64_t>(c.integer("seed")));
  }
  std::optional<IndicatorTriple> exact;
  try {
    exact = indicators_exact(*spec);
  } catch (const ValidationError&) {
  }
  o.result["indicators"] = indicator_json(est);
  o.result["masses"] = decomposition_json(decompose_indicators(est));
  o.result["exact"] = exact ? indicator_json(*exact) : json(nullptr);
  o.table.columns = {"indicator", "estimate", "std_error", "exact"};
  const double ex[3] = {exact ? exact->i1 : NAN, exact ? exact->i2 : NAN, exact ? exact->i3 : NAN};
  o.table.add("i1", est.i1, est.se1, ex[0]);
  o.table.add("i2", est.i2, est.se2, ex[1]);
  o.table.add("i3", est.i3, est.se3, ex[2]);
  return o;
}

// Atoms of a rank-1 elliptic-type measure as (theta, normalised trace, mass).
void elliptic_atoms(const TorusMeasure& mu, Outcome& o) {
  const auto& atoms = std::get<AtomicMeasure>(mu.data).atoms;
  o.table.columns = {"theta", "trace", "mass"};
  double mass = 0, m1 = 0, m2 = 0;
  for (const auto& [pt, w] : atoms) {
    const double th = pt.angles().back(), tr = pt.trace().real();
    o.table.add(th, tr, w);
    mass += w;
    m1 += w * tr;
    m2 += w * tr * tr;
  }
  o.result["mass"] = mass;
  o.result["singular_mass"] = 1.0 - mass;
  o.result["mean_trace"] = mass > 0 ? m1 / mass : 0.0;
  o.result["second_moment"] = mass > 0 ? m2 / mass : 0.0;
  o.result["sato_tate_cdf_distance"] = sato_tate_cdf_distance(mu);
}

TorusMeasure elliptic_vertical(const std::string& family, i64 p, const Context& c) {
  if (family == "dwork2") return dwork_vertical_measure(p);
  if (family == "fell") {
    if (const auto dir = c.cache_dir()) return vertical_measure_elliptic(cached_sweep(*dir, p));
  }
  return fiber_vertical_measure(family_preset(family), p);
}

Outcome cmd_vertical(const Context& c) {
  const std::string family = c.str("family");
  const i64 p = c.integer("p");
  Outcome o;
  o.result["family"] = family;
  o.result["p"] = p;
  if (family == "f2") {
    const double x = c.num("x");
    const auto v = vertical_measure_quadratic(p, x);
    const double pd = static_cast<double>(p);
    const double half = pd / (2 * (pd + 1)), ram = 1 / (pd + 1);
    o.result["x"] = x;
    o.result["masses"] = {{"plus", v.mass_plus}, {"minus", v.mass_minus}, {"ramified", v.mass_ram}};
    o.result["predicted"] = {{"plus", half}, {"minus", half}, {"ramified", ram}};
    o.result["t_hat_p"] = v.t_hat_p;
    o.result["t_hat_p2"] = v.t_hat_p2;
    o.result["t_hat_p2_predicted"] = pd / (pd + 1);
    if (const i64 q = c.integer("q"); q > 0) {
      const auto jt = joint_vertical_quadratic(p, q, x);
      o.result["joint"] = {{"q", q}, {"delta", jt.delta}, {"under_sampled", jt.under_sampled}};
    }
    o.table.columns = {"class", "count", "mass", "predicted"};
    o.table.add("plus", v.count_plus, v.mass_plus, half);
    o.table.add("minus", v.count_minus, v.mass_minus, half);
    o.table.add("ramified", v.count_ram, v.mass_ram, ram);
    return o;
  }
  elliptic_atoms(elliptic_vertical(family, p, c), o);
  return o;
}

// Midpoint atoms of a rank-1 density on [0, pi].
TorusMeasure discretize(const TorusMeasure& mu, int grid) {
  const auto& d = std::get<DensityMeasure>(mu.data);
  AtomicMeasure m;
  const double h = pi / grid;
  for (int j = 0; j < grid; ++j) {
    const double th = (j + 0.5) * h;
    m.atoms.emplace_back(TorusPoint({-th, th}), d.density(th) * h);
  }
  return TorusMeasure{std::move(m)};
}

Outcome cmd_st_average(const Context& c) {
  const std::string family = c.str("family");
  const double x = c.num("x");
  std::vector<std::pair<i64, TorusMeasure>> measures;
  std::vector<i64> ds;
  if (family == "f2") ds = enumerate_fundamental(c.num("window"));
  const i64 first = family == "f2" || family == "plancherel" ? 3 : 5;
  for (i64 p : primes_up_to(static_cast<i64>(std::ceil(x)) - 1)) {
    if (p < first || p >= x) continue;
    if (family == "f2") measures.emplace_back(p, vertical_measure_quadratic(p, ds).measure);
    else if (family == "plancherel") measures.emplace_back(p, discretize(plancherel_pgl2(p), 2048));
    else measures.emplace_back(p, elliptic_vertical(family, p, c));
  }
  require(!measures.empty(), "st-average: no primes below x");
  const auto avg = st_average(measures, x);
  Outcome o;
  o.result["family"] = family;
  o.result["x"] = x;
  o.result["raw_mass"] = avg.raw_mass;
  o.result["indicators"] = indicator_json(indicators_of_measure(avg.normalized));
  o.result["sato_tate_cdf_distance"] =
      family == "f2" ? json(nullptr) : json(sato_tate_cdf_distance(avg.normalized));
  o.table.columns = {"p", "mass", "mean_trace"};
  for (const auto& [p, mu] : measures)
    o.table.add(p, mu.total_mass(), mu.expect([](const TorusPoint& t) { return t.trace().real(); }));
  return o;
}

Outcome cmd_rank(const Context& c) {
  const std::string family = c.str("family");
  const auto r = nagao_rank(family_preset(family), c.integer("x"));
  Outcome o;
  o.result["family"] = family;
  o.result["x"] = c.integer("x");
  o.result["rank_estimate"] = r.value;
  o.result["primes"] = r.primes.size();
  o.table.columns = {"p", "minus_A_p", "partial"};
  for (std::size_t i = 0; i < r.primes.size(); ++i) o.table.add(r.primes[i], r.minus_a[i], r.partial[i]);
  return o;
}

Outcome cmd_root_numbers(const Context& c) {
  const TwistBase base{{c.integer("a"), c.integer("b")}, static_cast<int>(c.integer("epsilon")), c.integer("conductor")};
  require(base.epsilon == 1 || base.epsilon == -1, "--epsilon must be +1 or -1");
  require(base.conductor >= 1, "--conductor must be positive");
  const i64 guard = 2 * base.conductor;
  Outcome o;
  o.table.columns = {"members", "abs_d", "running_average"};
  double sum = 0;
  std::size_t n = 0, plus = 0;
  for (i64 d : enumerate_fundamental(c.num("x"))) {
    if (gcd(d, guard) != 1) continue;
    const int e = twist_root_number(base, d);
    sum += e;
    plus += e > 0;
    if (++n % 1000 == 0) o.table.add(n, std::abs(d), sum / static_cast<double>(n));
  }
  require(n > 0, "root-numbers: no discriminants coprime to 2N");
  o.result["members"] = n;
  o.result["average"] = sum / static_cast<double>(n);
  o.result["plus_fraction"] = static_cast<double>(plus) / static_cast<double>(n);
  return o;
}

Outcome cmd_moebius(const Context& c) {
  const auto M = parse_poly(c.str("poly"));
  std::vector<i64> xs;
  std::stringstream ss(c.str("x"));
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      xs.push_back(static_cast<i64>(std::stod(item)));
    } catch (const std::exception&) {
      throw ValidationError("--x: not a number: '" + item + "'");
    }
  }
  require(!xs.empty(), "--x: give at least one box size");
  Outcome o;
  o.table.columns = {"x", "average"};
  json avgs = json::array();
  double prev = INFINITY;
  bool decreasing = true;
  for (i64 x : xs) {
    const double a = moebius_poly_average(M, x);
    o.table.add(x, a);
    avgs.push_back({{"x", x}, {"average", a}});
    decreasing = decreasing && std::abs(a) < prev;
    prev = std::abs(a);
  }
  o.result["poly"] = c.str("poly");
  o.result["averages"] = avgs;
  o.result["abs_decreasing"] = decreasing;
  return o;
}

ZeroList zeros_for(i64 d, double T, const Context& c) {
  require(T > 0 && T <= 60, "--T must lie in (0, 60]");
  const auto dir = c.cache_dir();
  if (dir)
    if (auto z = load_zero_cache(*dir, d, T)) return *z;
  ZeroSearchOptions opt;
  opt.tolerance = c.num("tolerance");
  opt.audit_slack = c.num("audit-slack");
  auto z = find_zeros(QuadraticLSeries(d), T, opt);
  if (dir) save_zero_cache(*dir, z);
  return z;
}

Outcome cmd_zeros(const Context& c) {
  const double T = c.num("T");
  Outcome o;
  if (const i64 dmax = c.integer("d-max"); dmax > 0) {
    o.table.columns = {"d", "zeros", "main_term"};
    std::size_t checked = 0;
    for (i64 d : enumerate_fundamental(static_cast<double>(dmax))) {
      const auto z = zeros_for(d, T, c);
      o.table.add(d, 2 * z.ordinates.size(), zero_count_estimate(z.q, T));
      ++checked;
    }
    o.result["audited"] = checked;
    o.result["audit"] = "pass";
    o.result["T"] = T;
    return o;
  }
  const i64 d = c.integer("d");
  require(is_fundamental(d), "--d must be a fundamental discriminant");
  const auto z = zeros_for(d, T, c);
  o.result["d"] = d;
  o.result["T"] = T;
  o.result["positive_zeros"] = z.ordinates.size();
  o.result["signed_count"] = 2 * z.ordinates.size();
  o.result["main_term"] = zero_count_estimate(z.q, T);
  o.result["ordinates"] = z.ordinates;
  o.table.columns = {"index", "gamma"};
  for (std::size_t i = 0; i < z.ordinates.size(); ++i) o.table.add(i + 1, z.ordinates[i]);
  return o;
}

json density_json(const DensityReport& r) {
  return {{"empirical", r.empirical_mean}, {"predicted", r.predicted}, {"abs_gap", r.abs_gap},
          {"std_error", r.std_error}, {"members", r.members}};
}

Outcome cmd_density(const Context& c) {
  const std::string preset = c.str("preset");
  const TestFunction phi{c.num("a")};
  require(phi.a > 0 && phi.a <= 2, "--a must lie in (0, 2]");
  Outcome o;
  o.result["preset"] = preset;
  o.result["a"] = phi.a;
  if (preset == "f2") {
    OneLevelOptions opt;
    opt.reach = c.num("reach");
    opt.log_q_over_pi = c.flag("log-q-over-pi");
    opt.explicit_formula = c.flag("explicit");
    opt.cache_dir = c.cache_dir();
    const auto fam = quadratic_one_level(enumerate_fundamental(c.num("x")), phi, opt);
    o.result["density"] = density_json(fam.report);
    o.result["scaling"] = opt.log_q_over_pi ? "log(q/pi)" : "log q";
    o.result["skipped"] = fam.skipped;
    o.result["explicit_mean"] = opt.explicit_formula ? json(fam.explicit_mean) : json(nullptr);
    o.table.columns = {"d", "statistic", "explicit"};
    for (std::size_t i = 0; i < fam.values.size(); ++i)
      o.table.add(fam.discriminants[i], fam.values[i], opt.explicit_formula ? fam.explicit_values[i] : NAN);
    return o;
  }
  const auto fam = haar_family(preset, static_cast<int>(c.integer("n")));
  const auto r = rmt_one_level(fam, static_cast<std::size_t>(c.integer("samples")),
                               static_cast<std::uint64_t>(c.integer("seed")), phi);
  o.result["density"] = density_json(r);
  o.result["group"] = fam.name();
  o.table.columns = {"quantity", "value"};
  o.table.add("empirical", r.empirical_mean);
  o.table.add("predicted", r.predicted);
  return o;
}

Outcome cmd_rmt(const Context& c) {
  const auto fam = haar_family(c.str("family"), static_cast<int>(c.integer("n")));
  const i64 samples = c.integer("samples");
  require(samples >= 1, "--samples must be positive");
  const auto h = scaled_histogram(fam, static_cast<std::size_t>(samples), static_cast<std::uint64_t>(c.integer("seed")),
                                  static_cast<int>(c.integer("bins")), c.num("range"));
  Outcome o;
  o.result["group"] = fam.name();
  o.result["samples"] = h.samples;
  o.result["linf"] = h.linf;
  if (fam.kind == ClassicalFamily::SOOdd)
    o.result["forced_eigenvalue_fraction"] = static_cast<double>(h.forced_present) / static_cast<double>(h.samples);
  o.table.columns = {"x", "empirical", "predicted"};
  for (std::size_t i = 0; i < h.centers.size(); ++i) o.table.add(h.centers[i], h.empirical[i], h.predicted[i]);
  return o;
}

Outcome cmd_universal(const Context& c) {
  const auto prof = universal_local_profile(c.integer("p"), c.integer("x"));
  Outcome o;
  double total = 0;
  o.table.columns = {"k", "count", "mass", "model"};
  for (const auto& s : prof.strata) {
    o.table.add(s.k, s.count, s.mass, s.model);
    total += s.mass;
  }
  o.result["p"] = prof.p;
  o.result["x"] = prof.x;
  o.result["members"] = prof.total;
  o.result["a"] = prof.a;
  o.result["unramified_mass"] = prof.strata.empty() ? 0.0 : prof.strata.front().mass;
  o.result["mass_sum"] = total;
  return o;
}

Outcome cmd_cubic(const Context& c) {
  const auto s = family_class_proportions(c.num("disc-max"), c.integer("prime-min"), c.integer("prime-max"));
  const auto exact = indicators_exact(GroupSpec{dihedral_d3()});
  Outcome o;
  const double predicted[3] = {1.0 / 6, 1.0 / 3, 1.0 / 2};
  const char* names[3] = {"split", "inert", "mixed"};
  o.table.columns = {"class", "count", "proportion", "predicted"};
  for (int i = 0; i < 3; ++i) o.table.add(names[i], s.tally.counts[i], s.proportions[i], predicted[i]);
  o.result["cubics"] = s.cubics;
  o.result["primes"] = s.primes;
  o.result["ramified_pairs"] = s.tally.ramified;
  o.result["proportions"] = {{"split", s.proportions[0]}, {"inert", s.proportions[1]}, {"mixed", s.proportions[2]}};
  o.result["indicators"] = indicator_json(s.indicators);
  o.result["exact_d3"] = indicator_json(exact);
  o.result["mean_trace"] = s.mean_trace;
  o.result["under_sampled"] = s.under_sampled;
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome cmd_wd(const Context& c) {
  WeilDeligneRep rep;
  Outcome o;
  if (!c.str("curve").empty()) {
    const std::string spec = c.str("curve");
    const auto comma = spec.find(',');
    require(comma != std::string::npos, "--curve expects 'a,b'");
    ShortWeierstrassCurve E;
    try {
      E = {std::stoll(spec.substr(0, comma)), std::stoll(spec.substr(comma + 1))};
    } catch (const std::exception&) {
      throw ValidationError("--curve expects two integers 'a,b'");
    }
    const i64 p = c.integer("p");
    rep = from_elliptic_reduction(E, p);
    o.result["reduction"] = reduction_name(classify_reduction(E, p));
  } else {
    require(!c.str("input").empty(), "wd: give --curve a,b with --p, or --input rep.json");
    rep = wd_from_json(slurp(c.str("input")));
    if (!c.str("input2").empty()) rep = direct_sum(rep, wd_from_json(slurp(c.str("input2"))));
  }
  const auto f = artin_conductor(rep);
  const auto L = local_l_factor(rep);
  o.result["conductor"] = f.str();
  o.result["tame"] = tame_part(rep);
  o.result["swan"] = swan_part(rep).str();
  o.result["l_factor_integral"] = L.integral;
  json coeffs = json::array();
  o.table.columns = {"k", "re", "im"};
  for (std::size_t k = 0; k < L.coeffs.size(); ++k) {
    coeffs.push_back({L.coeffs[k].real(), L.coeffs[k].imag()});
    o.table.add(k, L.coeffs[k].real(), L.coeffs[k].imag());
  }
  o.result["l_factor"] = coeffs;
  o.result["rep"] = json::parse(to_json(rep));
  return o;
}

Outcome cmd_report(const Context& c) {
  const std::string family = c.str("family");
  const double x = c.num("x");
  const i64 cutoff = c.integer("cutoff");
  FamilySnapshot snap;
  if (family == "f2") snap = quadratic_snapshot(x, cutoff);
  else if (family == "elliptic-box") snap = elliptic_box_snapshot(x, cutoff);
  else throw ValidationError("report: family must be f2 or elliptic-box");
  const auto series = vertical_series(snap, cutoff);
  std::optional<double> plus;
  if (!c.str("plus-fraction").empty()) plus = c.num("plus-fraction");
  const auto rep = indicator_report(series, static_cast<double>(cutoff), plus, c.num("i1-tolerance"));
  const json prov = {{"preset", family}, {"seed", c.integer("seed")}, {"config_hash", c.hash}};
  Outcome o;
  o.result = json::parse(report_json(family, x, series, rep, prov.dump()));
  o.table.columns = {"p", "t1", "t2", "abs2"};
  for (std::size_t i = 0; i < series.primes.size(); ++i)
    o.table.add(series.primes[i], series.t1[i].real(), series.t2[i].real(), series.abs2[i]);
  return o;
}

std::vector<Command> build_commands() {
  std::vector<Command> cmds;
  auto add = [&](std::string name, std::string help, std::function<Outcome(const Context&)> body) -> Command& {
    cmds.push_back({std::move(name), std::move(help), {}, std::move(body)});
    return cmds.back();
  };
  add("indicators", "Indicator triple of a compact group (Monte Carlo or exact)", cmd_indicators)
      .opt("group", "su2", "su2, u1, roots, d3, usp, so-even, so-odd, unitary")
      .opt("k", "1", "symmetric power for su2")
      .opt("n", "4", "rank parameter N of a classical group")
      .opt("m", "3", "order of the roots-of-unity group")
      .opt("samples", "100000", "Monte Carlo sample count")
      .flag("exact", "exact finite-group average instead of sampling");
  add("vertical", "Vertical measure at one prime", cmd_vertical)
      .opt("family", "f2", "f2, fell, washington, generic, generic-linear, cassels-schinzel, dwork2")
      .opt("p", "101", "prime")
      .opt("x", "1000000", "discriminant bound for f2")
      .opt("q", "0", "second prime for the f2 joint table (0 = off)")
      .opt("cache-dir", env_or("FSL_CACHE_DIR", ""), "sweep cache directory");
  add("st-average", "Log-weighted average of vertical measures below x", cmd_st_average)
      .opt("family", "fell", "f2, plancherel, dwork2 or an elliptic preset")
      .opt("x", "200", "prime cutoff")
      .opt("window", "100000", "discriminant bound for f2")
      .opt("cache-dir", env_or("FSL_CACHE_DIR", ""), "sweep cache directory");
  add("rank", "Prime-sum rank estimate of a one-parameter elliptic family", cmd_rank)
      .opt("family", "washington", "elliptic preset")
      .opt("x", "5000", "prime cutoff");
  add("root-numbers", "Root numbers of quadratic twists", cmd_root_numbers)
      .opt("x", "100000", "bound on |d|")
      .opt("a", "-1", "base curve coefficient a")
      .opt("b", "0", "base curve coefficient b")
      .opt("epsilon", "1", "root number of the base curve")
      .opt("conductor", "32", "conductor of the base curve");
  add("moebius", "Averages of mu over polynomial values in boxes", cmd_moebius)
      .opt("poly", "w1^3+2*w2^3", "polynomial in w1, w2")
      .opt("x", "50,100,200", "comma-separated box sizes");
  add("zeros", "Zeros of L(s, chi_d) on the critical line with the count audit", cmd_zeros)
      .opt("d", "-4", "fundamental discriminant")
      .opt("T", "30", "height")
      .opt("tolerance", "1e-8", "root tolerance")
      .opt("audit-slack", "2", "allowed count error beyond log q before the audit fires")
      .opt("d-max", "0", "audit every fundamental |d| <= d-max instead")
      .opt("cache-dir", env_or("FSL_CACHE_DIR", ""), "zero cache directory");
  add("density", "One-level density against the symmetry-type prediction", cmd_density)
      .opt("preset", "f2", "f2, usp, so-even, so-odd, unitary")
      .opt("x", "20000", "discriminant bound for f2")
      .opt("a", "1", "Fejer support parameter")
      .opt("reach", "10", "scaled height of the zero lists")
      .flag("log-q-over-pi", "scale zeros by log(q/pi)")
      .flag("explicit", "also evaluate the explicit formula per member")
      .opt("n", "50", "rank parameter N for matrix presets")
      .opt("samples", "10000", "matrix sample count")
      .opt("cache-dir", env_or("FSL_CACHE_DIR", ""), "zero cache directory");
  add("rmt", "Scaled eigenangle histogram against W^(1)", cmd_rmt)
      .opt("family", "usp", "usp, so-even, so-odd, unitary")
      .opt("n", "50", "rank parameter N")
      .opt("samples", "10000", "sample count")
      .opt("bins", "40", "histogram bins")
      .opt("range", "4", "histogram range [0, range]");
  add("universal-gl1", "Local strata of the universal GL(1) family", cmd_universal)
      .opt("p", "2", "prime")
      .opt("x", "3000", "conductor bound");
  add("cubic", "Splitting statistics of S3 cubic polynomials", cmd_cubic)
      .opt("disc-max", "1000000", "bound on |disc|")
      .opt("prime-min", "50", "primes strictly above")
      .opt("prime-max", "500", "primes strictly below");
  add("wd", "Conductor and L-factor of a Weil-Deligne representation", cmd_wd)
      .opt("curve", "", "short Weierstrass coefficients 'a,b'")
      .opt("p", "5", "prime for --curve")
      .opt("input", "", "representation JSON (wd-v1)")
      .opt("input2", "", "second representation for a direct sum");
  add("report", "Family indicator report", cmd_report)
      .opt("family", "f2", "f2 or elliptic-box")
      .opt("x", "100000", "family window (|d| bound or box height)")
      .opt("cutoff", "10000", "prime cutoff")
      .opt("plus-fraction", "", "share of root number +1, if known")
      .opt("i1-tolerance", "0.05", "essential cuspidality tolerance");
  return cmds;
}

void write_csv(std::ostream& os, const Context& c, const Outcome& o) {
  os << "# command=" << c.command << '\n';
  os << "# config_hash=" << c.hash << '\n';
  for (const auto& [k, v] : c.values) os << "# " << k << '=' << v << '\n';
  for (const auto& [k, v] : module_versions()) os << "# module." << k << '=' << v << '\n';
  for (std::size_t i = 0; i < o.table.columns.size(); ++i) os << (i ? "," : "") << o.table.columns[i];
  os << '\n';
  for (const auto& row : o.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ValidationError("cannot read config file " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_hash(const std::string& command, const std::map<std::string, std::string>& config) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  feed(command);
  for (const auto& [k, v] : config) {
    feed(k);
    feed(v);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistics of families of L-functions at desk scale"};
  app.name("fsl");
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::deque<Param> globals;
  globals.emplace_back("config", "", "key=value file; flags override it");
  globals.emplace_back("seed", "1", "master seed");
  globals.emplace_back("workers", "0", "worker threads (0 = all cores)");
  globals.emplace_back("csv", "", "write the data table to this CSV file");
  globals.emplace_back("json", "", "also write the JSON summary to this file");
  for (auto& g : globals) g.option = app.add_option("--" + g.name, g.value, g.help);

  auto commands = build_commands();
  for (auto& cmd : commands) {
    cmd.app = app.add_subcommand(cmd.name, cmd.help);
    for (auto& p : cmd.params) {
      p.option = p.is_flag ? cmd.app->add_flag("--" + p.name, p.flag_value, p.help)
                           : cmd.app->add_option("--" + p.name, p.value, p.help + " (default: " + p.fallback + ")");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands)
    if (cmd.app->parsed()) chosen = &cmd;
  if (!chosen) {
    err << app.help();
    return 2;
  }

  try {
    std::map<std::string, std::string> file;
    if (globals[0].option->count() > 0) file = read_config_file(globals[0].value);
    // Config keys must belong to some subcommand or to the global options.
    for (const auto& [k, v] : file) {
      bool known = std::any_of(globals.begin(), globals.end(), [&](const Param& g) { return g.name == k; });
      for (const auto& cmd : commands)
        for (const auto& p : cmd.params) known = known || p.name == k;
      if (!known) throw ValidationError("unknown config key: " + k);
    }

    Context ctx;
    ctx.command = chosen->name;
    auto resolve = [&](const Param& p) {
      if (p.option->count() > 0) return p.is_flag ? std::string(p.flag_value ? "true" : "false") : p.value;
      if (const auto it = file.find(p.name); it != file.end()) return it->second;
      return p.fallback;
    };
    for (const auto& p : chosen->params) ctx.values[p.name] = resolve(p);
    for (const auto& g : globals)
      if (g.name == "seed" || g.name == "workers") ctx.values[g.name] = resolve(g);
    ctx.hash = config_hash(ctx.command, ctx.values);

    const i64 workers = ctx.integer("workers");
    require(workers >= 0 && workers <= 1024, "--workers must lie in [0, 1024]");
    set_worker_count(static_cast<unsigned>(workers));

    const Outcome outcome = chosen->body(ctx);

    json doc;
    doc["command"] = ctx.command;
    doc["config"] = ctx.values;
    doc["config_hash"] = ctx.hash;
    doc["modules"] = module_versions();
    doc["timestamp"] = timestamp();
    doc["result"] = outcome.result;
    const std::string text = doc.dump(2);
    out << text << '\n';

    const std::string csv_path = resolve(globals[3]), json_path = resolve(globals[4]);
    if (!csv_path.empty()) {
      std::ofstream os(csv_path);
      if (!os) throw Error("cannot write " + csv_path);
      write_csv(os, ctx, outcome);
    }
    if (!json_path.empty()) {
      std::ofstream os(json_path);
      if (!os) throw Error("cannot write " + json_path);
      os << text << '\n';
    }
    return 0;
  } catch (const AuditAlarm& e) {
    err << "audit alarm: " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n\n" << chosen->app->help();
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("fsl");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fsl::cli
