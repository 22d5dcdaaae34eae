#include "riskmdp/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riskmdp {

namespace {

std::vector<double> map_values(const std::vector<double>& v, auto&& f) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), f);
  return out;
}

std::vector<double> plus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

class Probe {
 public:
  Probe(Axiom axiom, bool asserted) { check_.axiom = axiom, check_.asserted = asserted; }

  // Records a trial; `ok` is the outcome at tolerance.
  void record(bool ok, const CoupledPair& sample, double scalar, double lhs, double rhs,
              const char* detail) {
    ++check_.trials;
    if (ok || !check_.holds) return;
    check_.holds = false;
    check_.witness = AxiomWitness{sample, scalar, lhs, rhs, detail};
  }

  AxiomCheck take() { return std::move(check_); }

 private:
  AxiomCheck check_;
};

}  // namespace

std::string to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::LawInvariance: return "law_invariance";
    case Axiom::Normalization: return "normalization";
    case Axiom::Monotonicity: return "monotonicity";
    case Axiom::TranslationInvariance: return "translation_invariance";
    case Axiom::PositiveHomogeneity: return "positive_homogeneity";
    case Axiom::ComonotonicAdditivity: return "comonotonic_additivity";
    case Axiom::Subadditivity: return "subadditivity";
    case Axiom::TriangleInequality: return "triangle_inequality";
    case Axiom::ComplementaryInequality: return "complementary_inequality";
  }
  return "unknown";
}

std::string AxiomCheck::status() const {
  if (!asserted) return "NOT ASSERTED";
  return holds ? "PASS" : "FAIL";
}

bool AxiomReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AxiomCheck& c) { return !c.asserted || c.holds; });
}

const AxiomCheck& AxiomReport::at(Axiom axiom) const {
  for (const auto& c : checks) {
    if (c.axiom == axiom) return c;
  }
  throw std::out_of_range("axiom not present in report: " + to_string(axiom));
}

DiscreteDistribution law_of(const std::vector<double>& v, const std::vector<double>& probs) {
  return DiscreteDistribution::make(v, probs);
}

std::vector<double> RandomLaws::simplex(std::size_t n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = expo(rng_);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

double RandomLaws::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

std::size_t RandomLaws::index(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
}

DiscreteDistribution RandomLaws::law(std::size_t min_support, std::size_t max_support, double lo,
                                     double hi) {
  const std::size_t n = index(min_support, max_support);
  std::vector<double> atoms(n);
  for (auto& a : atoms) a = uniform(lo, hi);
  return DiscreteDistribution::make(atoms, simplex(n));
}

CoupledPair RandomLaws::pair(std::size_t min_support, std::size_t max_support) {
  const std::size_t n = index(min_support, max_support);
  CoupledPair p{simplex(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    p.x[i] = uniform(-10.0, 10.0);
    p.y[i] = uniform(-10.0, 10.0);
  }
  return p;
}

CoupledPair RandomLaws::comonotone_pair() {
  CoupledPair p = pair();
  // Y = h(X) with h increasing: sort sample points by X and hand out
  // increasing Y values along that order.
  std::vector<std::size_t> order(p.x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto l, auto r) { return p.x[l] < p.x[r]; });
  double level = uniform(-10.0, 0.0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && p.x[order[k]] > p.x[order[k - 1]]) level += uniform(0.0, 3.0);
    p.y[order[k]] = level;
  }
  return p;
}

CoupledPair RandomLaws::tail_indicator_pair() {
  // Three or four points: two small disjoint events carrying unit losses and
  // a bulk event with no loss.
  const double small = uniform(0.005, 0.2);
  const double other = uniform(0.005, 0.2);
  CoupledPair p;
  p.probs = {small, other, 1.0 - small - other};
  p.x = {1.0, 0.0, 0.0};
  p.y = {0.0, 1.0, 0.0};
  return p;
}

AxiomReport check_axioms(const RiskMeasure& rm, std::size_t trials, std::uint64_t seed) {
  RandomLaws gen(seed);
  const bool distortion = rm.is_distortion_type();
  const bool coherent = rm.is_coherent();
  const double tol = kAxiomTolerance;

  Probe law_inv(Axiom::LawInvariance, true);
  Probe normalization(Axiom::Normalization, true);
  Probe monotone(Axiom::Monotonicity, true);
  Probe translation(Axiom::TranslationInvariance, true);
  Probe homogeneity(Axiom::PositiveHomogeneity, distortion);
  Probe comonotone(Axiom::ComonotonicAdditivity, distortion);
  Probe subadditive(Axiom::Subadditivity, coherent);
  Probe triangle(Axiom::TriangleInequality, coherent);
  Probe complementary(Axiom::ComplementaryInequality, coherent);

  const auto rho = [&](const std::vector<double>& v, const std::vector<double>& probs) {
    return evaluate(rm, law_of(v, probs));
  };

  {
    const double zero = evaluate(rm, DiscreteDistribution::point_mass(0.0));
    normalization.record(std::abs(zero) <= tol, {}, 0.0, zero, 0.0, "rho(0) != 0");
  }

  for (std::size_t t = 0; t < trials; ++t) {
    CoupledPair p = gen.pair();
    const double rx = rho(p.x, p.probs);

    {
      // Same law, permuted sample space.
      CoupledPair q = p;
      std::vector<std::size_t> perm(q.x.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), gen.engine());
      for (std::size_t i = 0; i < perm.size(); ++i) {
        q.x[i] = p.x[perm[i]];
        q.probs[i] = p.probs[perm[i]];
      }
      const double rq = rho(q.x, q.probs);
      law_inv.record(std::abs(rq - rx) <= tol, q, 0.0, rq, rx, "rho differs on equal laws");
    }
    {
      CoupledPair q = p;
      for (auto& v : q.y) v = std::abs(v) * 0.5;
      q.y = plus(q.x, q.y);
      const double ry = rho(q.y, q.probs);
      monotone.record(rx <= ry + tol, q, 0.0, rx, ry, "X <= Y but rho(X) > rho(Y)");
    }
    {
      const double m = gen.uniform(-10.0, 10.0);
      const double lhs = rho(map_values(p.x, [m](double v) { return v + m; }), p.probs);
      translation.record(std::abs(lhs - (rx + m)) <= tol, p, m, lhs, rx + m,
                         "rho(X + m) != rho(X) + m");
    }
    {
      // Alternate random scales with the fixed scale 2.
      const double lambda = t % 2 == 0 ? 2.0 : gen.uniform(0.0, 5.0);
      const double lhs = rho(map_values(p.x, [lambda](double v) { return lambda * v; }), p.probs);
      homogeneity.record(std::abs(lhs - lambda * rx) <= tol, p, lambda, lhs, lambda * rx,
                         "rho(lambda X) != lambda rho(X)");
    }
    {
      CoupledPair c = gen.comonotone_pair();
      const double lhs = rho(plus(c.x, c.y), c.probs);
      const double rhs = rho(c.x, c.probs) + rho(c.y, c.probs);
      comonotone.record(std::abs(lhs - rhs) <= tol, c, 0.0, lhs, rhs,
                        "rho(X + Y) != rho(X) + rho(Y) for comonotone X, Y");
    }
    {
      // Alternate general couplings with tail-indicator couplings.
      const CoupledPair c = t % 2 == 0 ? p : gen.tail_indicator_pair();
      const double lhs = rho(plus(c.x, c.y), c.probs);
      const double rhs = rho(c.x, c.probs) + rho(c.y, c.probs);
      subadditive.record(lhs <= rhs + tol, c, 0.0, lhs, rhs, "rho(X + Y) > rho(X) + rho(Y)");
    }
    {
      const double ry = rho(p.y, p.probs);
      std::vector<double> gap(p.x.size());
      for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = std::abs(p.x[i] - p.y[i]);
      const double rgap = rho(gap, p.probs);
      triangle.record(std::abs(rx - ry) <= rgap + tol, p, 0.0, std::abs(rx - ry), rgap,
                      "|rho(X) - rho(Y)| > rho(|X - Y|)");
    }
    {
      const double lhs = rho(plus(p.x, p.y), p.probs);
      const double rhs = rx - rho(map_values(p.y, [](double v) { return -v; }), p.probs);
      complementary.record(lhs >= rhs - tol, p, 0.0, lhs, rhs, "rho(X + Y) < rho(X) - rho(-Y)");
    }
  }

  AxiomReport report;
  report.measure = rm.describe();
  report.trials = trials;
  report.seed = seed;
  for (Probe* probe : {&law_inv, &normalization, &monotone, &translation, &homogeneity,
                       &comonotone, &subadditive, &triangle, &complementary}) {
    report.checks.push_back(probe->take());
  }
  return report;
}

}  // namespace riskmdp
