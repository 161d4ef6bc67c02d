#include "fsl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fsl/parallel.hpp"

namespace fsl {

double wrap_angle(double a) {
  double r = std::remainder(a, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

TorusPoint::TorusPoint(std::vector<double> angles) : angles_(std::move(angles)) {
  for (double& a : angles_) a = wrap_angle(a);
  std::sort(angles_.begin(), angles_.end());
}

TorusPoint TorusPoint::from_eigenvalues(const std::vector<cplx>& eig) {
  std::vector<double> a;
  a.reserve(eig.size());
  for (const cplx& z : eig) a.push_back(std::arg(z));
  return TorusPoint(std::move(a));
}

cplx TorusPoint::trace() const { return power_trace(1); }

cplx TorusPoint::power_trace(int k) const {
  cplx s = 0;
  for (double a : angles_) s += std::polar(1.0, k * a);
  return s;
}

TorusPoint TorusPoint::squared() const {
  std::vector<double> a = angles_;
  for (double& v : a) v *= 2;
  return TorusPoint(std::move(a));
}

double simpson_adaptive(const std::function<double(double)>& f, double lo, double hi,
                        int start_intervals, double tol) {
  auto simpson = [&](long n) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (long i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  long n = std::max(2, start_intervals);
  if (n % 2) ++n;
  double prev = simpson(n);
  for (int round = 0; round < 8; ++round) {
    n *= 2;
    const double cur = simpson(n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

namespace {

TorusPoint rank1_class(double theta) { return TorusPoint({theta, -theta}); }

template <class F>
auto visit_measure(const TorusMeasure& mu, F&& f) {
  return std::visit(std::forward<F>(f), mu.data);
}

}  // namespace

double TorusMeasure::total_mass() const {
  return expect([](const TorusPoint&) { return 1.0; });
}

double TorusMeasure::expect(const std::function<double(const TorusPoint&)>& f) const {
  struct V {
    const std::function<double(const TorusPoint&)>& f;
    double operator()(const AtomicMeasure& m) const {
      std::vector<double> terms;
      terms.reserve(m.atoms.size());
      for (const auto& [pt, w] : m.atoms) terms.push_back(w * f(pt));
      return pairwise_sum(std::span<const double>(terms));
    }
    double operator()(const EmpiricalMeasure& m) const {
      if (m.samples.empty()) return 0.0;
      std::vector<double> terms(m.samples.size(), 0.0);
      for (std::size_t i = 0; i < m.samples.size(); ++i)
        if (auto* pt = std::get_if<TorusPoint>(&m.samples[i])) terms[i] = f(*pt);
      return pairwise_sum(std::span<const double>(terms)) / static_cast<double>(m.samples.size());
    }
    double operator()(const DensityMeasure& m) const {
      return simpson_adaptive([&](double t) { return m.density(t) * f(rank1_class(t)); }, 0.0,
                              pi, m.grid);
    }
  };
  return std::visit(V{f}, data);
}

cplx TorusMeasure::expect_complex(const std::function<cplx(const TorusPoint&)>& f) const {
  const double re = expect([&](const TorusPoint& t) { return f(t).real(); });
  const double im = expect([&](const TorusPoint& t) { return f(t).imag(); });
  return {re, im};
}

// ---------------------------------------------------------------- groups

namespace {

constexpr double unit_tol = 1e-10;

std::vector<long long> matrix_key(const Eigen::MatrixXcd& m) {
  std::vector<long long> k;
  k.reserve(2 * m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    k.push_back(std::llround(m(i).real() * 1e6));
    k.push_back(std::llround(m(i).imag() * 1e6));
  }
  return k;
}

void check_unitary(const Eigen::MatrixXcd& g) {
  require(g.rows() == g.cols() && g.rows() > 0, "finite group: elements must be square");
  const Eigen::MatrixXcd e = g.adjoint() * g - Eigen::MatrixXcd::Identity(g.rows(), g.cols());
  require(e.cwiseAbs().maxCoeff() <= unit_tol, "finite group: element is not unitary");
}

std::vector<TorusPoint> classes_of(const std::vector<Eigen::MatrixXcd>& els) {
  std::vector<TorusPoint> out;
  out.reserve(els.size());
  for (const auto& g : els) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + g.rows());
    out.push_back(TorusPoint::from_eigenvalues(ev));
  }
  return out;
}

}  // namespace

FiniteGroup make_finite_group(std::vector<Eigen::MatrixXcd> elements) {
  require(!elements.empty(), "finite group: no elements");
  const auto n = elements.front().rows();
  for (const auto& g : elements) {
    require(g.rows() == n, "finite group: mixed dimensions");
    check_unitary(g);
  }
  if (elements.size() <= 1000) {
    std::set<std::vector<long long>> keys;
    for (const auto& g : elements) keys.insert(matrix_key(g));
    for (const auto& a : elements)
      for (const auto& b : elements)
        require(keys.count(matrix_key(a * b)) == 1, "finite group: not closed under product");
  }
  FiniteGroup fg;
  fg.classes = classes_of(elements);
  fg.elements = std::move(elements);
  return fg;
}

FiniteGroup generate_finite_group(const std::vector<Eigen::MatrixXcd>& generators,
                                  std::size_t max_order) {
  require(!generators.empty(), "finite group: no generators");
  for (const auto& g : generators) check_unitary(g);
  const auto n = generators.front().rows();
  std::set<std::vector<long long>> seen;
  std::vector<Eigen::MatrixXcd> els{Eigen::MatrixXcd::Identity(n, n)};
  seen.insert(matrix_key(els.front()));
  for (std::size_t head = 0; head < els.size(); ++head) {
    for (const auto& g : generators) {
      Eigen::MatrixXcd h = els[head] * g;
      if (seen.insert(matrix_key(h)).second) {
        require(els.size() < max_order, "finite group: order exceeds the enumeration limit");
        els.push_back(std::move(h));
      }
    }
  }
  FiniteGroup fg;
  fg.classes = classes_of(els);
  fg.elements = std::move(els);
  return fg;
}

FiniteGroup dihedral_d3() {
  const double c = std::cos(two_pi / 3), s = std::sin(two_pi / 3);
  Eigen::MatrixXcd r(2, 2), f(2, 2);
  r << c, -s, s, c;
  f << 1, 0, 0, -1;
  return generate_finite_group({r, f});
}

int GroupSpec::rank() const {
  struct V {
    int operator()(const FiniteGroup& g) const { return static_cast<int>(g.elements.front().rows()); }
    int operator()(const SU2Sym& s) const { return s.k + 1; }
    int operator()(const FullCircle&) const { return 1; }
    int operator()(const RootsOfUnity&) const { return 1; }
    int operator()(const ClassicalHaar& h) const { return h.family.dim(); }
    int operator()(const Tensor& t) const { return t.left->rank() * t.right->rank(); }
    int operator()(const TwistBy& t) const { return t.base->rank(); }
  };
  return std::visit(V{}, kind);
}

GroupPtr group(GroupSpec spec) { return std::make_shared<const GroupSpec>(std::move(spec)); }
GroupPtr tensor(GroupPtr a, GroupPtr b) { return group({Tensor{std::move(a), std::move(b)}}); }
GroupPtr twist_by(GroupPtr base, GroupPtr twistor) {
  require(twistor->rank() == 1, "twist: twistor must have rank 1");
  return group({TwistBy{std::move(base), std::move(twistor)}});
}

TorusPoint draw_point(const GroupSpec& spec, std::mt19937_64& rng) {
  struct V {
    std::mt19937_64& rng;
    TorusPoint operator()(const FiniteGroup& g) const {
      std::uniform_int_distribution<std::size_t> u(0, g.classes.size() - 1);
      return g.classes[u(rng)];
    }
    TorusPoint operator()(const SU2Sym& s) const {
      std::normal_distribution<double> n(0.0, 1.0);
      const double a0 = n(rng), a1 = n(rng), a2 = n(rng), a3 = n(rng);
      const double r = std::sqrt(a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3);
      const double theta = std::acos(std::clamp(a0 / r, -1.0, 1.0));
      std::vector<double> a(s.k + 1);
      for (int j = 0; j <= s.k; ++j) a[j] = (s.k - 2 * j) * theta;
      return TorusPoint(std::move(a));
    }
    TorusPoint operator()(const FullCircle&) const {
      std::uniform_real_distribution<double> u(-pi, pi);
      return TorusPoint({u(rng)});
    }
    TorusPoint operator()(const RootsOfUnity& r) const {
      std::uniform_int_distribution<int> u(0, r.m - 1);
      return TorusPoint({two_pi * u(rng) / r.m});
    }
    TorusPoint operator()(const ClassicalHaar& h) const {
      return TorusPoint(spectrum_angles(h.family, haar_matrix(h.family, rng)));
    }
    TorusPoint operator()(const Tensor& t) const {
      const TorusPoint l = draw_point(*t.left, rng);
      const TorusPoint r = draw_point(*t.right, rng);
      std::vector<double> a;
      a.reserve(l.angles().size() * r.angles().size());
      for (double x : l.angles())
        for (double y : r.angles()) a.push_back(x + y);
      return TorusPoint(std::move(a));
    }
    TorusPoint operator()(const TwistBy& t) const {
      TorusPoint b = draw_point(*t.base, rng);
      const TorusPoint c = draw_point(*t.twistor, rng);
      std::vector<double> a = b.angles();
      for (double& x : a) x += c.angles().front();
      return TorusPoint(std::move(a));
    }
  };
  return std::visit(V{rng}, spec.kind);
}

namespace {

constexpr std::size_t sample_chunk = 1024;

std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

void validate_spec(const GroupSpec& spec) {
  if (const auto* g = std::get_if<FiniteGroup>(&spec.kind)) {
    require(!g->elements.empty() && g->classes.size() == g->elements.size(),
            "finite group: build it with make_finite_group");
    for (const auto& e : g->elements) check_unitary(e);
  } else if (const auto* r = std::get_if<RootsOfUnity>(&spec.kind)) {
    require(r->m >= 1, "roots of unity: m must be positive");
  } else if (const auto* s = std::get_if<SU2Sym>(&spec.kind)) {
    require(s->k >= 0, "SU2Sym: k must be nonnegative");
  } else if (const auto* t = std::get_if<Tensor>(&spec.kind)) {
    require(t->left && t->right, "tensor: missing factor");
    validate_spec(*t->left);
    validate_spec(*t->right);
  } else if (const auto* w = std::get_if<TwistBy>(&spec.kind)) {
    require(w->base && w->twistor && w->twistor->rank() == 1, "twist: twistor must have rank 1");
    validate_spec(*w->base);
    validate_spec(*w->twistor);
  }
}

struct Moments {
  double s1 = 0, q1 = 0, s2r = 0, q2r = 0, s2i = 0, q2i = 0, s3 = 0, q3 = 0;

  void add(const TorusPoint& t) {
    const cplx tr = t.trace();
    const double a = std::norm(tr);
    const cplx b = tr * tr;
    const double c = t.power_trace(2).real();
    s1 += a;
    q1 += a * a;
    s2r += b.real();
    q2r += b.real() * b.real();
    s2i += b.imag();
    q2i += b.imag() * b.imag();
    s3 += c;
    q3 += c * c;
  }
  Moments& operator+=(const Moments& o) {
    s1 += o.s1, q1 += o.q1, s2r += o.s2r, q2r += o.q2r;
    s2i += o.s2i, q2i += o.q2i, s3 += o.s3, q3 += o.q3;
    return *this;
  }
  friend Moments operator+(Moments a, const Moments& b) { return a += b; }

  IndicatorTriple finish(double n) const {
    auto se = [n](double s, double q) {
      if (n < 2) return 0.0;
      const double m = s / n;
      const double var = std::max(0.0, (q - n * m * m) / (n - 1));
      return std::sqrt(var / n);
    };
    IndicatorTriple t;
    t.i1 = s1 / n;
    t.i2 = s2r / n;
    t.i2_imag = s2i / n;
    t.i3 = s3 / n;
    t.se1 = se(s1, q1);
    t.se2 = se(s2r, q2r);
    t.se2_imag = se(s2i, q2i);
    t.se3 = se(s3, q3);
    return t;
  }
};

}  // namespace

std::vector<TorusPoint> sample_group(const GroupSpec& spec, std::size_t count, std::uint64_t seed) {
  require(count >= 1, "sample_group: count must be positive");
  validate_spec(spec);
  std::vector<TorusPoint> out(count);
  for_each_chunk(count, sample_chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto rng = chunk_rng(seed, c);
    for (std::size_t i = b; i < e; ++i) out[i] = draw_point(spec, rng);
  });
  return out;
}

IndicatorTriple indicators_monte_carlo(const GroupSpec& spec, std::size_t count,
                                       std::uint64_t seed) {
  require(count >= 1000, "indicators_monte_carlo: at least 1000 samples required");
  validate_spec(spec);
  const Moments m = chunked_sum<Moments>(count, sample_chunk, [&](std::size_t b, std::size_t e) {
    auto rng = chunk_rng(seed, b / sample_chunk);
    Moments acc;
    for (std::size_t i = b; i < e; ++i) acc.add(draw_point(spec, rng));
    return acc;
  });
  return m.finish(static_cast<double>(count));
}

IndicatorTriple indicators_from_points(const std::vector<TorusPoint>& pts) {
  require(!pts.empty(), "indicators: no points");
  const Moments m = chunked_sum<Moments>(pts.size(), sample_chunk, [&](std::size_t b, std::size_t e) {
    Moments acc;
    for (std::size_t i = b; i < e; ++i) acc.add(pts[i]);
    return acc;
  });
  return m.finish(static_cast<double>(pts.size()));
}

IndicatorTriple indicators_exact(const GroupSpec& spec) {
  std::vector<TorusPoint> pts;
  if (const auto* g = std::get_if<FiniteGroup>(&spec.kind)) {
    validate_spec(spec);
    pts = g->classes;
  } else if (const auto* r = std::get_if<RootsOfUnity>(&spec.kind)) {
    require(r->m >= 1 && r->m <= 1000000, "indicators_exact: m out of range");
    for (int j = 0; j < r->m; ++j) pts.push_back(TorusPoint({two_pi * j / r->m}));
  } else {
    throw ValidationError("indicators_exact: only finite groups and roots of unity are exact");
  }
  IndicatorTriple t = indicators_from_points(pts);
  t.se1 = t.se2 = t.se3 = t.se2_imag = 0;
  return t;
}

IndicatorTriple indicators_of_measure(const TorusMeasure& mu) {
  if (const auto* e = std::get_if<EmpiricalMeasure>(&mu.data)) {
    // Ramified samples carry the value 0 in every indicator.
    Moments m;
    for (const auto& s : e->samples)
      if (const auto* pt = std::get_if<TorusPoint>(&s)) m.add(*pt);
    return m.finish(static_cast<double>(e->samples.size()));
  }
  IndicatorTriple t;
  t.i1 = mu.expect([](const TorusPoint& p) { return std::norm(p.trace()); });
  const cplx i2 = mu.expect_complex([](const TorusPoint& p) { return p.trace() * p.trace(); });
  t.i2 = i2.real();
  t.i2_imag = i2.imag();
  t.i3 = mu.expect([](const TorusPoint& p) { return p.power_trace(2).real(); });
  return t;
}

Decomposition decompose_indicators(const IndicatorTriple& t, double i1_tolerance) {
  if (std::abs(t.i1 - 1.0) > i1_tolerance)
    throw ValidationError("decompose_indicators: i1 differs from 1, family is not essentially cuspidal");
  Decomposition d;
  d.raw_u = 1.0 - t.i2;
  d.raw_o = (t.i2 + t.i3) / 2;
  d.raw_sp = (t.i2 - t.i3) / 2;
  const double se_u = t.se2, se_os = 0.5 * (t.se2 + t.se3);
  auto clamp = [&](double v, double se) {
    const double c = std::clamp(v, 0.0, 1.0);
    if (std::abs(c - v) > 3 * se) d.clamped = true;
    return c;
  };
  d.mass_u = clamp(d.raw_u, se_u);
  d.mass_o = clamp(d.raw_o, se_os);
  d.mass_sp = clamp(d.raw_sp, se_os);
  return d;
}

// ------------------------------------------------------------ pushforwards

namespace {

AtomicMeasure merge_atoms(std::vector<std::pair<TorusPoint, double>> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
    return a.first.angles() < b.first.angles();
  });
  AtomicMeasure out;
  for (auto& [pt, w] : atoms) {
    if (!out.atoms.empty()) {
      const auto& prev = out.atoms.back().first.angles();
      const auto& cur = pt.angles();
      bool same = prev.size() == cur.size();
      for (std::size_t i = 0; same && i < cur.size(); ++i) same = std::abs(prev[i] - cur[i]) < 1e-9;
      if (same) {
        out.atoms.back().second += w;
        continue;
      }
    }
    out.atoms.emplace_back(std::move(pt), w);
  }
  return out;
}

std::vector<std::pair<TorusPoint, double>> as_atoms(const TorusMeasure& mu, const char* who) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu.data)) return a->atoms;
  if (const auto* e = std::get_if<EmpiricalMeasure>(&mu.data)) {
    std::vector<std::pair<TorusPoint, double>> out;
    const double w = 1.0 / static_cast<double>(e->samples.size());
    for (const auto& s : e->samples)
      if (const auto* pt = std::get_if<TorusPoint>(&s)) out.emplace_back(*pt, w);
    return out;
  }
  throw Error(std::string(who) + ": density measures are not supported, sample them first");
}

int measure_rank(const TorusMeasure& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu.data)) {
    for (const auto& [pt, w] : a->atoms) return pt.n();
  } else if (const auto* e = std::get_if<EmpiricalMeasure>(&mu.data)) {
    for (const auto& s : e->samples)
      if (const auto* pt = std::get_if<TorusPoint>(&s)) return pt->n();
  } else {
    return 2;
  }
  return 0;
}

TorusPoint twisted(const TorusPoint& p, double phase) {
  std::vector<double> a = p.angles();
  for (double& x : a) x += phase;
  return TorusPoint(std::move(a));
}

}  // namespace

TorusMeasure pushforward_square(const TorusMeasure& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu.data)) {
    std::vector<std::pair<TorusPoint, double>> atoms;
    for (const auto& [pt, w] : a->atoms) atoms.emplace_back(pt.squared(), w);
    return {merge_atoms(std::move(atoms))};
  }
  if (const auto* e = std::get_if<EmpiricalMeasure>(&mu.data)) {
    EmpiricalMeasure out;
    out.samples.reserve(e->samples.size());
    for (const auto& s : e->samples) {
      if (const auto* pt = std::get_if<TorusPoint>(&s))
        out.samples.emplace_back(pt->squared());
      else
        out.samples.push_back(s);
    }
    return {std::move(out)};
  }
  throw Error("pushforward_square: density measures are not supported, sample them first");
}

TorusMeasure twist_pushforward(const TorusMeasure& mu, const TorusMeasure& twistor) {
  require(measure_rank(twistor) == 1, "twist_pushforward: twistor must have rank 1");
  const auto* em = std::get_if<EmpiricalMeasure>(&mu.data);
  const auto* et = std::get_if<EmpiricalMeasure>(&twistor.data);
  if (em && et) {
    require(!et->samples.empty(), "twist_pushforward: empty twistor");
    EmpiricalMeasure out;
    out.samples.reserve(em->samples.size());
    for (std::size_t i = 0; i < em->samples.size(); ++i) {
      const auto* pt = std::get_if<TorusPoint>(&em->samples[i]);
      const auto* tw = std::get_if<TorusPoint>(&et->samples[i % et->samples.size()]);
      if (pt && tw)
        out.samples.emplace_back(twisted(*pt, tw->angles().front()));
      else
        out.samples.emplace_back(Ramified{});
    }
    return {std::move(out)};
  }
  const auto base = as_atoms(mu, "twist_pushforward");
  const auto tw = as_atoms(twistor, "twist_pushforward");
  std::vector<std::pair<TorusPoint, double>> atoms;
  atoms.reserve(base.size() * tw.size());
  for (const auto& [p, w] : base)
    for (const auto& [t, v] : tw) atoms.emplace_back(twisted(p, t.angles().front()), w * v);
  return {merge_atoms(std::move(atoms))};
}

TorusMeasure plancherel_pgl2(std::int64_t p) {
  require(p >= 2, "plancherel_pgl2: p must be at least 2");
  const double pd = static_cast<double>(p);
  const double c0 = (1 - 1 / pd) * (1 - 1 / pd), c1 = 4 / pd;
  auto raw = [c0, c1](double t) {
    const double s2 = std::sin(t) * std::sin(t);
    return s2 / (c0 + c1 * s2);
  };
  const int grid = 1 << 14;
  const double norm = simpson_adaptive(raw, 0.0, pi, grid);
  return {DensityMeasure{[raw, norm](double t) { return raw(t) / norm; }, grid}};
}

STAverage st_average(const std::vector<std::pair<std::int64_t, TorusMeasure>>& measures, double x) {
  require(!measures.empty(), "st_average: no measures");
  std::set<std::int64_t> seen;
  std::vector<std::pair<TorusPoint, double>> atoms;
  for (const auto& [p, mu] : measures) {
    require(seen.insert(p).second, "st_average: primes must be distinct");
    require(p < x, "st_average: every prime must be below the cutoff");
    const double lw = std::log(static_cast<double>(p)) / x;
    for (auto& [pt, w] : as_atoms(mu, "st_average")) atoms.emplace_back(pt, w * lw);
  }
  STAverage out;
  out.raw = {merge_atoms(std::move(atoms))};
  out.raw_mass = out.raw.total_mass();
  AtomicMeasure norm = std::get<AtomicMeasure>(out.raw.data);
  if (out.raw_mass > 0)
    for (auto& a : norm.atoms) a.second /= out.raw_mass;
  out.normalized = {std::move(norm)};
  return out;
}

TorusMeasure haar_atomic(const GroupSpec& spec) {
  std::vector<std::pair<TorusPoint, double>> atoms;
  if (const auto* g = std::get_if<FiniteGroup>(&spec.kind)) {
    const double w = 1.0 / static_cast<double>(g->classes.size());
    for (const auto& c : g->classes) atoms.emplace_back(c, w);
  } else if (const auto* r = std::get_if<RootsOfUnity>(&spec.kind)) {
    for (int j = 0; j < r->m; ++j) atoms.emplace_back(TorusPoint({two_pi * j / r->m}), 1.0 / r->m);
  } else {
    throw ValidationError("haar_atomic: only finite groups and roots of unity are atomic");
  }
  return {merge_atoms(std::move(atoms))};
}

TorusMeasure empirical(std::vector<TorusPoint> pts) {
  EmpiricalMeasure e;
  e.samples.reserve(pts.size());
  for (auto& p : pts) e.samples.emplace_back(std::move(p));
  return {std::move(e)};
}

}  // namespace fsl
