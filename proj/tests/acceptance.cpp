// Desk-scale acceptance run. One PASS/FAIL line per criterion; tolerances are
// fixed constants below. The exit status is 0 once every check has run, so
// that a FAIL line reports a measured gap rather than a crash; --strict turns
// any FAIL into exit status 1.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fsl/cubic.hpp"
#include "fsl/densities.hpp"
#include "fsl/dirichlet.hpp"
#include "fsl/elliptic.hpp"
#include "fsl/lfunctions.hpp"
#include "fsl/measures.hpp"
#include "fsl/parallel.hpp"
#include "fsl/rmt.hpp"
#include "fsl/weil_deligne.hpp"

using namespace fsl;

namespace {

int failures = 0;

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const std::string& name, bool ok, const std::string& detail, double secs) {
  if (!ok) ++failures;
  std::printf("%s [%d] %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
}

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// Runs one criterion; an exception becomes a FAIL line.
template <class F>
void criterion(int id, const std::string& name, F&& body) {
  Clock clk;
  try {
    body(clk);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what(), clk.seconds());
  }
}

std::optional<std::filesystem::path> cache_dir() {
  const char* v = std::getenv("FSL_CACHE_DIR");
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

// ------------------------------------------------------------------ 1

void indicators(std::uint64_t seed) {
  criterion(1, "indicators", [&](const Clock& clk) {
    auto t1 = indicators_monte_carlo(GroupSpec{SU2Sym{1}}, 1000000, seed);
    bool ok = std::abs(t1.i1 - 1) <= 0.01 && std::abs(t1.i2 - 1) <= 0.01 && std::abs(t1.i3 + 1) <= 0.01;
    std::string detail = "Sym1 (" + num(t1.i1) + ", " + num(t1.i2) + ", " + num(t1.i3) + ")";
    for (int k = 2; k <= 4; ++k) {
      auto t = indicators_monte_carlo(GroupSpec{SU2Sym{k}}, 1000000, derive_seed(seed, k));
      const double want = k % 2 ? -1.0 : 1.0;
      ok = ok && std::abs(t.i1 - 1) <= 0.02 && std::abs(t.i2 - 1) <= 0.02 && std::abs(t.i3 - want) <= 0.02;
      detail += "; Sym" + std::to_string(k) + " i3 = " + num(t.i3);
    }
    const double secs = clk.seconds();
    report(1, "indicators", ok && secs < 30, detail + "; limit 30 s", secs);
  });
}

// ------------------------------------------------------------------ 2

void decomposition(std::uint64_t seed) {
  criterion(2, "decomposition", [&](const Clock& clk) {
    bool ok = true;
    auto pure = [&](IndicatorTriple t, double u, double o, double sp) {
      auto d = decompose_indicators(t);
      ok = ok && d.mass_u == u && d.mass_o == o && d.mass_sp == sp;
    };
    pure({1, 1, -1}, 0, 0, 1);
    pure({1, 1, 1}, 0, 1, 0);
    pure({1, 0, 0}, 1, 0, 0);
    // Dyadic masses keep every identity exact in floating point.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> cut(0, 1024);
    int exact = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      int a = cut(rng), b = cut(rng);
      if (a > b) std::swap(a, b);
      const double u = a / 1024.0, o = (b - a) / 1024.0, sp = (1024 - b) / 1024.0;
      IndicatorTriple t{1, o + sp, o - sp};
      auto d = decompose_indicators(t);
      exact += d.raw_u == u && d.raw_o == o && d.raw_sp == sp && d.raw_u + d.raw_o + d.raw_sp == 1.0 &&
               d.raw_o + d.raw_sp == t.i2 && d.raw_o - d.raw_sp == t.i3;
    }
    ok = ok && exact == 1000;
    report(2, "decomposition", ok, "pure types exact; " + std::to_string(exact) + "/1000 random triples exact",
           clk.seconds());
  });
}

// ------------------------------------------------------------------ 3

void quadratic_vertical() {
  criterion(3, "quadratic vertical", [&](const Clock& clk) {
    const i64 p = 101;
    const double x = 1e6;
    const double pd = static_cast<double>(p);
    // Oracle: an independent scan with is_fundamental and a direct tally.
    std::size_t plus = 0, minus = 0, ram = 0;
    for (i64 d = -1000000; d <= 1000000; ++d) {
      if (!is_fundamental(d)) continue;
      const int c = kronecker(d, p);
      (c == 1 ? plus : c == -1 ? minus : ram) += 1;
    }
    const double n = static_cast<double>(plus + minus + ram);
    const double half = pd / (2 * (pd + 1)), r0 = 1 / (pd + 1);
    const bool oracle_ok = std::abs(plus / n - half) <= 0.01 && std::abs(minus / n - half) <= 0.01 &&
                           std::abs(ram / n - r0) <= 0.01;
    auto v = vertical_measure_quadratic(p, x);
    const bool counts_ok = v.count_plus == plus && v.count_minus == minus && v.count_ram == ram;
    const bool mass_ok = std::abs(v.mass_plus - half) <= 0.01 && std::abs(v.mass_minus - half) <= 0.01 &&
                         std::abs(v.mass_ram - r0) <= 0.01;
    const bool t_ok = std::abs(v.t_hat_p2 - pd / (pd + 1)) <= 0.01;
    auto j = joint_vertical_quadratic(101, 103, x);
    const bool joint_ok = j.delta <= 0.01;
    const double secs = clk.seconds();
    report(3, "quadratic vertical",
           oracle_ok && counts_ok && mass_ok && t_ok && joint_ok && secs < 120,
           "masses (" + num(v.mass_plus) + ", " + num(v.mass_minus) + ", " + num(v.mass_ram) + ") vs (" +
               num(half) + ", " + num(half) + ", " + num(r0) + "); oracle counts " +
               (counts_ok ? "agree" : "differ") + "; t(p^2) = " + num(v.t_hat_p2) + " vs " +
               num(pd / (pd + 1)) + "; joint defect " + num(j.delta) + "; limit 120 s",
           secs);
  });
}

// ------------------------------------------------------------------ 4

void birch() {
  criterion(4, "Birch equidistribution", [&](const Clock& clk) {
    const i64 p = 997;
    auto t = ap_sweep(p);
    auto mu = vertical_measure_elliptic(t);
    const double mass = mu.total_mass();
    const double mean = mu.expect([](const TorusPoint& x) { return x.trace().real(); }) / mass;
    const double second = mu.expect([](const TorusPoint& x) { return std::norm(x.trace()); }) / mass;
    const double dist = sato_tate_cdf_distance(mu);
    const double singular = static_cast<double>(t.singular_count) / (double(p) * double(p));
    const double secs = clk.seconds();
    const bool ok = std::abs(mean) <= 2.0 / p && std::abs(second - 1) <= 0.01 && dist <= 0.02 &&
                    singular <= 2.0 / p && secs < 60;
    report(4, "Birch equidistribution", ok,
           "p = 997: mean trace " + num(mean) + ", second moment " + num(second, 6) + ", CDF distance " +
               num(dist) + ", singular mass " + num(singular) + "; limit 60 s",
           secs);
  });
}

// ------------------------------------------------------------------ 5

void nagao() {
  criterion(5, "Nagao rank", [&](const Clock& clk) {
    const double w = nagao_rank(family_preset("washington"), 5000).value;
    const double g = nagao_rank(family_preset("generic"), 5000).value;
    auto fell = family_preset("fell");
    bool zero = true;
    for (i64 p : primes_up_to(2000))
      if (p > 3) zero = zero && nagao_character_total(fell, p) == 0;
    // The same identity summed over the sweep table itself, singular cells kept.
    for (i64 p : {101, 499, 997}) {
      auto t = ap_sweep(p);
      i64 s = 0;
      for (auto v : t.ap) s += v;
      zero = zero && s == 0;
    }
    const double secs = clk.seconds();
    const bool ok = w >= 0.75 && w <= 1.25 && g >= -0.25 && g <= 0.25 && zero && secs < 300;
    report(5, "Nagao rank", ok,
           "washington " + num(w) + " in [0.75, 1.25]; generic " + num(g) + " in [-0.25, 0.25]; sweep identity " +
               (zero ? "exactly 0" : "nonzero") + "; limit 300 s",
           secs);
  });
}

// ------------------------------------------------------------------ 6

void root_numbers() {
  criterion(6, "root-number split", [&](const Clock& clk) {
    TwistBase base{ShortWeierstrassCurve{-1, 0}, 1, 32};
    long sum = 0, count = 0;
    for (i64 d : enumerate_fundamental(1e5)) {
      if (gcd(d, 2 * base.conductor) != 1) continue;
      sum += twist_root_number(base, d);
      ++count;
    }
    const double avg = double(sum) / double(count);
    report(6, "root-number split", std::abs(avg) <= 0.02,
           "average " + num(avg) + " over " + std::to_string(count) + " twists; tolerance 0.02", clk.seconds());
  });
}

// ------------------------------------------------------------------ 7

void moebius() {
  criterion(7, "Moebius decay", [&](const Clock& clk) {
    auto M = parse_poly("w1^3+2*w2^3");
    const double a50 = moebius_poly_average(M, 50), a100 = moebius_poly_average(M, 100),
                 a200 = moebius_poly_average(M, 200);
    const double secs = clk.seconds();
    const bool ok = std::abs(a200) < std::abs(a50) && std::abs(a200) < 0.1 && secs < 120;
    report(7, "Moebius decay", ok,
           "averages " + num(a50) + ", " + num(a100) + ", " + num(a200) + " at x = 50, 100, 200; limit 120 s",
           secs);
  });
}

// ------------------------------------------------------------------ 8

void universal_gl1() {
  criterion(8, "universal GL(1)", [&](const Clock& clk) {
    auto p2 = universal_local_profile(2, 3000), p3 = universal_local_profile(3, 3000);
    auto exact_sum = [](const LocalProfile& prof) {
      std::uint64_t c = 0;
      for (const auto& s : prof.strata) c += s.count;
      return c == prof.total;
    };
    const double m2 = p2.strata.at(0).mass, m3 = p3.strata.at(0).mass;
    const bool ok = std::abs(m2 - 8.0 / 9) <= 0.02 && std::abs(m3 - 27.0 / 32) <= 0.02 && exact_sum(p2) &&
                    exact_sum(p3);
    report(8, "universal GL(1)", ok,
           "unramified mass " + num(m2) + " at p = 2 (8/9), " + num(m3) + " at p = 3 (27/32); strata counts " +
               (exact_sum(p2) && exact_sum(p3) ? "sum to the total" : "do not sum"),
           clk.seconds());
  });
}

// ------------------------------------------------------------------ 9

void lvalues() {
  criterion(9, "L-values and zeros", [&](const Clock& clk) {
    const double catalan = 0.91596559417721901505;
    const double err = std::abs(l_value(QuadraticLSeries(-4), cplx(2, 0)).value - cplx(catalan));
    double fe = 0;
    for (i64 d : {-4, 5, -7, 8, -163, 1001, -4003})
      for (cplx s : {cplx(0.25, 3.0), cplx(0.1, 14.0), cplx(0.7, -25.0)}) {
        QuadraticLSeries L(d);
        const cplx a = completed_lambda_at(L, s), b = completed_lambda_at(L, 1.0 - s);
        fe = std::max(fe, std::abs(a - b) / std::max(1.0, std::abs(a)));
      }
    std::size_t audited = 0, alarms = 0;
    for (i64 d : enumerate_fundamental(500)) {
      try {
        find_zeros(QuadraticLSeries(d), 30);
      } catch (const AuditAlarm&) {
        ++alarms;
      }
      ++audited;
    }
    const double secs = clk.seconds();
    const bool ok = err < 1e-10 && fe < 1e-10 && alarms == 0 && secs < 600;
    report(9, "L-values and zeros", ok,
           "|L(2, chi_-4) - G| = " + num(err, 2) + "; functional equation residual " + num(fe, 2) + "; audit " +
               std::to_string(audited - alarms) + "/" + std::to_string(audited) + " at T = 30; limit 600 s",
           secs);
  });
}

// ------------------------------------------------------------------ 10

void flagship(std::uint64_t seed) {
  criterion(10, "one-level density", [&](const Clock& clk) {
    TestFunction phi{1};
    OneLevelOptions opt;
    opt.reach = 10;
    opt.cache_dir = cache_dir();
    const auto ds = enumerate_fundamental(2e4);
    auto fam = quadratic_one_level(ds, phi, opt);
    // Explicit-formula values need no zeros, so both scalings are cheap.
    std::vector<double> ex_log, ex_pi;
    for (i64 d : fam.discriminants) {
      QuadraticLSeries L(d);
      ex_log.push_back(explicit_one_level(L, phi, false));
      if (L.conductor() >= 4) ex_pi.push_back(explicit_one_level(L, phi, true));
    }
    auto mean = [](const std::vector<double>& v) {
      return pairwise_sum(std::span<const double>(v)) / static_cast<double>(v.size());
    };
    auto rmt = rmt_one_level(HaarFamily{ClassicalFamily::USp, 50}, 10000, seed, phi);
    const double secs = clk.seconds();
    const bool fam_ok = fam.report.abs_gap <= 0.1;
    const bool rmt_ok = rmt.abs_gap <= 0.05;
    report(10, "one-level density", fam_ok && rmt_ok && secs <= 1800,
           "family mean " + num(fam.report.empirical_mean) + " +- " + num(fam.report.std_error, 2) + " over " +
               std::to_string(fam.report.members) + " members (" + std::to_string(fam.skipped) +
               " skipped) vs 0.5, tolerance 0.1; explicit formula mean " + num(mean(ex_log)) +
               " with log q, " + num(mean(ex_pi)) + " with log(q/pi); USp(100) surrogate " +
               num(rmt.empirical_mean) + " +- " + num(rmt.std_error, 2) + ", tolerance 0.05; limit 1800 s",
           secs);
  });
}

// ------------------------------------------------------------------ 11

void rmt_universality(std::uint64_t seed) {
  criterion(11, "RMT universality", [&](const Clock& clk) {
    auto odd = scaled_histogram(HaarFamily{ClassicalFamily::SOOdd, 50}, 10000, derive_seed(seed, 1), 40, 4);
    auto usp = scaled_histogram(HaarFamily{ClassicalFamily::USp, 50}, 10000, derive_seed(seed, 2), 40, 4);
    auto even = scaled_histogram(HaarFamily{ClassicalFamily::SOEven, 50}, 10000, derive_seed(seed, 3), 40, 4);
    const bool ok = odd.forced_present == odd.samples && usp.linf <= 0.05 && even.linf <= 0.05;
    report(11, "RMT universality", ok,
           "SO(101) forced eigenvalue in " + std::to_string(odd.forced_present) + "/" +
               std::to_string(odd.samples) + "; L-inf bin error USp(100) " + num(usp.linf) + ", SO(100) " +
               num(even.linf) + ", tolerance 0.05 (40 bins on [0, 4], 1e4 samples)",
           clk.seconds());
  });
}

// ------------------------------------------------------------------ 12

void cubic_family() {
  criterion(12, "cubic family", [&](const Clock& clk) {
    auto st = family_class_proportions(1e6, 50, 500);
    auto oracle = indicators_exact(GroupSpec{dihedral_d3()});
    const auto& pr = st.proportions;
    const bool prop_ok = std::abs(pr[0] - 1.0 / 6) <= 0.02 && std::abs(pr[1] - 1.0 / 3) <= 0.02 &&
                         std::abs(pr[2] - 0.5) <= 0.02;
    const auto& t = st.indicators;
    const bool ind_ok = std::abs(t.i1 - oracle.i1) <= 0.02 && std::abs(t.i2 - oracle.i2) <= 0.02 &&
                        std::abs(t.i3 - oracle.i3) <= 0.02;
    report(12, "cubic family", prop_ok && ind_ok,
           "proportions (" + num(pr[0]) + ", " + num(pr[1]) + ", " + num(pr[2]) + ") vs (1/6, 1/3, 1/2); indicators (" +
               num(t.i1) + ", " + num(t.i2) + ", " + num(t.i3) + ") vs D3 oracle (" + num(oracle.i1) + ", " +
               num(oracle.i2) + ", " + num(oracle.i3) + "); " + std::to_string(st.cubics) + " cubics, " +
               std::to_string(st.primes) + " primes; tolerance 0.02",
           clk.seconds());
  });
}

// ------------------------------------------------------------------ 13

WeilDeligneRep random_rep(std::mt19937_64& rng, i64 q) {
  using Mat = Eigen::MatrixXcd;
  std::uniform_int_distribution<int> shape(0, 3), dim(1, 3), coef(1, 9), den(1, 6);
  WeilDeligneRep r;
  r.q = q;
  auto diag = [&](int n) {
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = coef(rng) * (coef(rng) % 2 ? 1.0 : -1.0);
    return m;
  };
  const int s = shape(rng);
  if (s == 1) {
    r.n = 2;
    r.frobenius = Mat::Zero(2, 2);
    r.frobenius(0, 0) = 1;
    r.frobenius(1, 1) = static_cast<double>(q);
    r.N = Mat::Zero(2, 2);
    r.N(0, 1) = 1;
    r.inertia_projection = Mat::Identity(2, 2);
    r.breaks = {{Rational(0), 2}};
  } else {
    r.n = dim(rng) + (s == 3 ? 1 : 0);
    r.frobenius = diag(r.n);
    r.N = Mat::Zero(r.n, r.n);
    r.inertia_projection = s == 0 ? Mat(Mat::Identity(r.n, r.n)) : Mat(Mat::Zero(r.n, r.n));
    r.breaks = {{Rational(0), s == 0 ? r.n : 0}};
    if (s == 3) {
      Rational u(0);
      for (int d = 1; d <= r.n; ++d) {
        u = u + Rational(coef(rng), den(rng));
        r.breaks.push_back({u, d});
      }
    }
  }
  r.validate();
  return r;
}

void weil_deligne(std::uint64_t seed) {
  criterion(13, "Weil-Deligne", [&](const Clock& clk) {
    bool ok = true;
    std::string detail;
    auto check = [&](const ShortWeierstrassCurve& E, i64 p, int f, std::vector<i64> poly) {
      auto rep = from_elliptic_reduction(E, p);
      const auto got_f = artin_conductor(rep);
      const auto got = local_l_factor(rep).integers();
      ok = ok && got_f == Rational(f) && got == poly;
      std::string ps;
      for (auto c : got) ps += (ps.empty() ? "" : " ") + std::to_string(c);
      detail += std::string(reduction_name(classify_reduction(E, p))) + " f = " + got_f.str() + " P = [" + ps + "]; ";
    };
    const i64 a7 = ap_single(ShortWeierstrassCurve{-1, 0}, 7);
    check(ShortWeierstrassCurve{-1, 0}, 7, 0, {1, -a7, 7});
    check(ShortWeierstrassCurve{-7, 6}, 5, 1, {1, -1});
    check(ShortWeierstrassCurve{0, 5}, 5, 2, {1});
    std::mt19937_64 rng(seed);
    int additive = 0;
    for (int i = 0; i < 1000; ++i) {
      auto a = random_rep(rng, 5), b = random_rep(rng, 5);
      additive += artin_conductor(direct_sum(a, b)) == artin_conductor(a) + artin_conductor(b);
    }
    ok = ok && additive == 1000;
    report(13, "Weil-Deligne", ok, detail + "additivity exact on " + std::to_string(additive) + "/1000 pairs",
           clk.seconds());
  });
}

// ------------------------------------------------------------------ 14

void plancherel() {
  criterion(14, "Plancherel", [&](const Clock& clk) {
    bool ok = true;
    std::vector<double> dist;
    double worst_mass = 0, worst_odd = 0;
    for (i64 p : {11, 101, 1009}) {
      auto mu = plancherel_pgl2(p);
      worst_mass = std::max(worst_mass, std::abs(mu.total_mass() - 1));
      for (int k : {1, 3, 5})
        worst_odd = std::max(worst_odd, std::abs(mu.expect([&](const TorusPoint& t) {
          return std::pow(t.trace().real(), k);
        })));
      // Sup distance of the CDFs on a fine midpoint grid.
      const auto& f = std::get<DensityMeasure>(mu.data).density;
      const int n = 1 << 16;
      const double h = pi / n;
      double cdf = 0, sup = 0;
      for (int j = 0; j < n; ++j) {
        const double th = (j + 0.5) * h;
        cdf += f(th) * h;
        const double u = (j + 1) * h;
        sup = std::max(sup, std::abs(cdf - (u - std::sin(u) * std::cos(u)) / pi));
      }
      dist.push_back(sup);
    }
    ok = worst_mass < 1e-8 && worst_odd < 1e-8 && dist[0] > dist[1] && dist[1] > dist[2];
    report(14, "Plancherel", ok,
           "mass error " + num(worst_mass, 2) + ", odd moments " + num(worst_odd, 2) + ", CDF distance " +
               num(dist[0]) + " > " + num(dist[1]) + " > " + num(dist[2]) + " at p = 11, 101, 1009",
           clk.seconds());
  });
}

// ------------------------------------------------------------------ 15

void determinism(std::uint64_t seed) {
  criterion(15, "determinism", [&](const Clock& clk) {
    const std::vector<std::vector<std::string>> cases = {
        {"indicators", "--k", "3", "--samples", "200000"},
        {"rmt", "--family", "so-even", "--n", "20", "--samples", "1000"},
        {"density", "--preset", "usp", "--n", "20", "--samples", "1000"},
        {"vertical", "--family", "fell", "--p", "211"},
        {"rank", "--x", "2000"},
        {"moebius", "--x", "50,100"},
        {"cubic", "--disc-max", "50000", "--prime-min", "5", "--prime-max", "200"},
        {"root-numbers", "--x", "20000"},
    };
    std::size_t same = 0;
    std::string differing;
    for (const auto& args : cases) {
      std::vector<nlohmann::json> results;
      for (const char* w : {"1", "2", "4"}) {
        std::vector<std::string> a = {"--workers", w, "--seed", std::to_string(seed)};
        a.insert(a.end(), args.begin(), args.end());
        std::ostringstream out, err;
        if (cli::run(a, out, err) != 0) throw Error(args[0] + " failed: " + err.str());
        results.push_back(nlohmann::json::parse(out.str())["result"]);
      }
      if (results[0] == results[1] && results[0] == results[2]) {
        ++same;
      } else {
        differing += " " + args[0];
      }
    }
    set_worker_count(0);
    report(15, "determinism", same == cases.size(),
           std::to_string(same) + "/" + std::to_string(cases.size()) +
               " experiments identical for 1, 2 and 4 workers" + (differing.empty() ? "" : "; differ:" + differing),
           clk.seconds());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  bool heavy = false, strict = false;
  std::uint64_t seed = 1;
  app.add_flag("--heavy", heavy, "run only the flagship one-level density experiment");
  app.add_flag("--strict", strict, "exit with status 1 when any check fails");
  app.add_option("--seed", seed, "master seed");
  CLI11_PARSE(app, argc, argv);

  if (heavy) {
    flagship(seed);
  } else {
    indicators(seed);
    decomposition(seed);
    quadratic_vertical();
    birch();
    nagao();
    root_numbers();
    moebius();
    universal_gl1();
    lvalues();
    std::printf("NOTE [10] one-level density runs under --heavy\n");
    rmt_universality(seed);
    cubic_family();
    weil_deligne(seed);
    plancherel();
    determinism(seed);
  }
  std::printf("%d check(s) failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
