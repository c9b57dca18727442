#include "hartreelab/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hartreelab/errors.hpp"

namespace hartreelab {

namespace {

double disc(int n) { return std::sqrt(9.0 * n * n + 8.0 * n - 16.0); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

CheckStatus strict_status(double slack) {
  if (slack > kStrictSlack) return CheckStatus::Pass;
  if (slack >= -kStrictSlack) return CheckStatus::Marginal;
  return CheckStatus::Fail;
}

RangeCheck upper(std::string label, double value, double bound) {
  const double slack = bound - value;
  return {std::move(label), value, bound, slack, strict_status(slack)};
}

RangeCheck lower(std::string label, double value, double bound) {
  const double slack = value - bound;
  return {std::move(label), value, bound, slack, strict_status(slack)};
}

double tau_upper(const ModelParams& m) {
  const double n = m.n;
  const double k = m.kappa;
  const double t = std::max({(n - 4.0) / 2.0, (n - 4.0) / n, k / (n - 2.0 - 2.0 * k) - n / 4.0});
  return m.alpha / 2.0 - t;
}

// Sequential constraint checker: records the first violated label.
class Constraints {
 public:
  bool ok() const { return failed_.empty(); }
  const std::string& failed() const { return failed_; }

  void lt(const char* label, double a, double b) {
    if (ok() && !(a < b - kStrictSlack)) failed_ = label;
  }
  void le(const char* label, double a, double b) {
    if (ok() && !(a <= b + kIdentityTol)) failed_ = label;
  }
  void eq(const char* label, double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (ok() && !(std::abs(a - b) <= kIdentityTol * scale)) failed_ = label;
  }
  void require(const char* label, bool cond) {
    if (ok() && !cond) failed_ = label;
  }

 private:
  std::string failed_;
};

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Marginal: return "marginal";
    case CheckStatus::Fail: return "fail";
  }
  return "?";
}

double kappa_of(int n, double lambda) {
  const double nm2 = n - 2.0;
  return (nm2 - std::sqrt(nm2 * nm2 + 4.0 * lambda)) / 2.0;
}

double critical_exponent(int n, double alpha, double tau) {
  return 1.0 + (2.0 - 2.0 * tau + alpha) / (n - 2.0);
}

ModelParams ModelParams::raw(int n, double lambda, double alpha, double tau, int epsilon) {
  ModelParams m;
  m.n = n;
  m.lambda = lambda;
  m.alpha = alpha;
  m.tau = tau;
  m.epsilon = epsilon;
  const double nm2 = n - 2.0;
  m.kappa = nm2 * nm2 + 4.0 * lambda >= 0.0 ? kappa_of(n, lambda) : std::nan("");
  m.p = n > 2 ? critical_exponent(n, alpha, tau) : std::nan("");
  return m;
}

ModelParams derive(int n, double lambda, double alpha, double tau, int epsilon) {
  if (n < 3) throw DomainError("n >= 3 required, got n = " + std::to_string(n));
  const double hardy = (n - 2.0) * (n - 2.0) / 4.0;
  if (!(lambda > -hardy))
    throw DomainError("lambda > -(n-2)^2/4 = " + fmt(-hardy) + " required, got " + fmt(lambda));
  if (!(alpha > 0.0 && alpha < n))
    throw DomainError("0 < alpha < n required, got alpha = " + fmt(alpha));
  if (!(tau > 0.0)) throw DomainError("tau > 0 required, got tau = " + fmt(tau));
  if (epsilon != 1 && epsilon != -1)
    throw DomainError("epsilon must be +1 or -1, got " + std::to_string(epsilon));
  return ModelParams::raw(n, lambda, alpha, tau, epsilon);
}

bool RangeReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const RangeCheck& c) { return c.status == CheckStatus::Pass; });
}

double RangeReport::min_slack() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) s = std::min(s, c.slack);
  return s;
}

const RangeCheck* RangeReport::first_failure() const {
  for (const auto& c : checks)
    if (c.status != CheckStatus::Pass) return &c;
  return nullptr;
}

double theorem_kappa_bound(int n) {
  const double nm2 = n - 2.0;
  return nm2 - 2.0 * nm2 / (3.0 * n - 2.0 + 2.0 * disc(n));
}

double lemma_kappa_bound(int n) { return (5.0 * n - 4.0 - disc(n)) / 2.0; }

RangeReport check_theorem_ranges(const ModelParams& m) {
  RangeReport r;
  const double n = m.n;
  r.checks.push_back(lower("alpha > 0", m.alpha, 0.0));
  r.checks.push_back(upper("alpha < n", m.alpha, n));
  r.checks.push_back(lower("tau > 0", m.tau, 0.0));
  r.checks.push_back(upper("wellposed: 2kappa < n-2-2(n-2)/(3n-2+2sqrt(9n^2+8n-16))", 2.0 * m.kappa,
                           theorem_kappa_bound(m.n)));
  r.checks.push_back(lower("wellposed: tau > alpha/2-(n+2+sqrt(9n^2+8n-16))/2", m.tau,
                           m.alpha / 2.0 - (n + 2.0 + disc(m.n)) / 2.0));
  r.checks.push_back(upper("wellposed: tau < alpha/2-max{(n-4)/2,(n-4)/n,kappa/(n-2-2kappa)-n/4}", m.tau,
                           tau_upper(m)));
  return r;
}

RangeReport check_lemma_ranges(const ModelParams& m) {
  RangeReport r;
  const double n = m.n;
  r.checks.push_back(lower("alpha > 0", m.alpha, 0.0));
  r.checks.push_back(upper("alpha < n", m.alpha, n));
  r.checks.push_back(lower("tau > 0", m.tau, 0.0));
  r.checks.push_back(upper("estimates: 2kappa < (5n-4-sqrt(9n^2+8n-16))/2", 2.0 * m.kappa,
                           lemma_kappa_bound(m.n)));
  r.checks.push_back(lower("estimates: tau > alpha/2-(n+2+sqrt(9n^2+8n-16))/2", m.tau,
                           m.alpha / 2.0 - (n + 2.0 + disc(m.n)) / 2.0));
  r.checks.push_back(lower("estimates (alt): tau > alpha/2-(n-4+sqrt(9n^2+8n-16))/8", m.tau,
                           m.alpha / 2.0 - (n - 4.0 + disc(m.n)) / 8.0));
  r.checks.push_back(upper("estimates: tau < alpha/2-max{(n-4)/2,(n-4)/n,kappa/(n-2-2kappa)-n/4}", m.tau,
                           tau_upper(m)));
  r.disagrees_with_theorem = r.pass() != check_theorem_ranges(m).pass();
  return r;
}

bool feasible(const ModelParams& m) {
  return check_theorem_ranges(m).pass() && check_lemma_ranges(m).pass();
}

bool AdmissiblePair::is_admissible(int n) const {
  const double inv_r = 1.0 / r;
  const double nn = n;
  return inv_q >= 0.0 && inv_q <= 0.5 + kIdentityTol && inv_r >= (nn - 2.0) / (2.0 * nn) - kIdentityTol &&
         inv_r <= 0.5 + kIdentityTol && std::abs(2.0 * inv_q + nn * inv_r - nn / 2.0) <= kIdentityTol;
}

AdmissiblePair make_pair_from_r(int n, double r) {
  AdmissiblePair pair;
  pair.r = r;
  pair.inv_q = std::max(0.0, (n / 2.0 - n / r) / 2.0);
  return pair;
}

AdmissiblePair strichartz_r(const ModelParams& m) {
  const double n = m.n;
  const double p = m.p;
  if (!(p > 0.5 + 1.0 / (n - 2.0 - 2.0 * m.kappa) + kStrictSlack))
    throw InfeasibleError("pair exists: p > 1/2+1/(n-2-2kappa)");
  AdmissiblePair pair;
  pair.inv_q = 1.0 / (2.0 * (2.0 * p - 1.0));
  const double n_over_r = n / 2.0 - 1.0 / (2.0 * p - 1.0);
  pair.r = n / n_over_r;
  if (!(pair.r >= 2.0 - kIdentityTol && pair.r <= 2.0 * n / (n - 2.0) + kIdentityTol))
    throw InfeasibleError("admissible: 2 <= r <= 2n/(n-2)");
  return pair;
}

WitnessResult find_exponent_witness(const ModelParams& m) {
  WitnessResult result;
  AdmissiblePair pair;
  try {
    pair = strichartz_r(m);
  } catch (const InfeasibleError& e) {
    result.infeasible_constraint = e.constraint();
    return result;
  }

  const double n = m.n, p = m.p, tau = m.tau, kappa = m.kappa, alpha = m.alpha;
  const double ir = 1.0 / pair.r;
  const double nr = n * ir;  // n/r
  const double hls = (n + 2.0) / (2.0 * n) + alpha / n;
  Constraints c;

  c.eq("admissible: 1/q = 1/(2(2p-1))", pair.inv_q, 1.0 / (2.0 * (2.0 * p - 1.0)));
  c.le("admissible: (n-2)/(2n) <= 1/r", (n - 2.0) / (2.0 * n), ir);
  c.le("admissible: 1/r <= 1/2", ir, 0.5);
  c.eq("admissible: 2/q+n/r = n/2", 2.0 * pair.inv_q + nr, n / 2.0);
  c.lt("admissible: 0 < alpha", 0.0, alpha);
  c.lt("admissible: alpha < n", alpha, n);

  c.lt("kappa window: max{1/n,kappa/n} < (n+2)/(2n)", std::max(1.0 / n, kappa / n), (n + 2.0) / (2.0 * n));
  c.lt("kappa window: (n+2)/(2n) < min{1,(n-kappa)/n}", (n + 2.0) / (2.0 * n), std::min(1.0, (n - kappa) / n));
  c.lt("kappa window: (1+kappa)/n < 1/r", (1.0 + kappa) / n, ir);
  c.lt("kappa window: 1/r < min{1,(n-kappa)/n}", ir, std::min(1.0, (n - kappa) / n));

  c.lt("r window: 1 < n/r", 1.0, nr);
  c.lt("r window: n/r < (p-tau-2+n)/(p-1)", nr, (p - tau - 2.0 + n) / (p - 1.0));
  c.lt("r window: n/r < (p-tau-1+n)/p", nr, (p - tau - 1.0 + n) / p);
  c.lt("r window: tau > 0", 0.0, tau);
  c.le("r window: tau <= p-2", tau, p - 2.0);

  if (!c.ok()) {
    result.infeasible_constraint = c.failed();
    return result;
  }

  ExponentWitness w;
  w.pair = pair;
  w.inv_a1 = ((p - 1.0) * nr + tau - p + 2.0) / n;
  w.inv_b1 = (p * nr + tau - p) / n;
  w.inv_a2 = ((p - 1.0) * nr + tau - p + 1.0) / n;
  w.inv_b2 = (p * nr + tau - p + 1.0) / n;
  w.inv_a3 = w.inv_a1 - ir;
  w.inv_b4 = w.inv_b2 - ir;

  c.lt("HLS split 1: 0 < 1/a1", 0.0, w.inv_a1);
  c.lt("HLS split 1: 1/a1 < 1", w.inv_a1, 1.0);
  c.lt("HLS split 1: 0 < 1/b1", 0.0, w.inv_b1);
  c.lt("HLS split 1: 1/b1 < 1", w.inv_b1, 1.0);
  c.eq("HLS split 1: 1/a1+1/b1 = (n+2)/(2n)+alpha/n", w.inv_a1 + w.inv_b1, hls);

  c.lt("Sobolev a1: 0 < 1/((p-1)a1)", 0.0, w.inv_a1 / (p - 1.0));
  c.le("Sobolev a1: 1/((p-1)a1) <= 1/r", w.inv_a1 / (p - 1.0), ir);
  c.le("Sobolev a1: 1/r <= 1", ir, 1.0);
  c.le("Sobolev a1: 0 <= (tau+1)/(p-1)", 0.0, (tau + 1.0) / (p - 1.0));
  c.lt("Sobolev a1: (tau+1)/(p-1) < n/((p-1)a1)", (tau + 1.0) / (p - 1.0), n * w.inv_a1 / (p - 1.0));
  c.eq("Sobolev a1: (tau+1)/(p-1)-1 = n/((p-1)a1)-n/r", (tau + 1.0) / (p - 1.0) - 1.0,
       n * w.inv_a1 / (p - 1.0) - nr);

  c.lt("Sobolev b1: 0 < 1/(p b1)", 0.0, w.inv_b1 / p);
  c.le("Sobolev b1: 1/(p b1) <= 1/r", w.inv_b1 / p, ir);
  c.le("Sobolev b1: 0 <= tau/p", 0.0, tau / p);
  c.lt("Sobolev b1: tau/p < n/(p b1)", tau / p, n * w.inv_b1 / p);
  c.eq("Sobolev b1: tau/p-1 = n/(p b1)-n/r", tau / p - 1.0, n * w.inv_b1 / p - nr);

  c.lt("HLS split 2: 0 < 1/a2", 0.0, w.inv_a2);
  c.lt("HLS split 2: 1/a2 < 1", w.inv_a2, 1.0);
  c.lt("HLS split 2: 0 < 1/b2", 0.0, w.inv_b2);
  c.lt("HLS split 2: 1/b2 < 1", w.inv_b2, 1.0);
  c.eq("HLS split 2: 1/a2+1/b2 = (n+2)/(2n)+alpha/n", w.inv_a2 + w.inv_b2, hls);

  c.lt("Sobolev a2: 0 < 1/((p-1)a2)", 0.0, w.inv_a2 / (p - 1.0));
  c.le("Sobolev a2: 1/((p-1)a2) <= 1/r", w.inv_a2 / (p - 1.0), ir);
  c.le("Sobolev a2: 0 <= tau/(p-1)", 0.0, tau / (p - 1.0));
  c.lt("Sobolev a2: tau/(p-1) < n/((p-1)a2)", tau / (p - 1.0), n * w.inv_a2 / (p - 1.0));
  c.eq("Sobolev a2: tau/(p-1)-1 = n/((p-1)a2)-n/r", tau / (p - 1.0) - 1.0, n * w.inv_a2 / (p - 1.0) - nr);

  c.lt("Sobolev b2: 0 < 1/(p b2)", 0.0, w.inv_b2 / p);
  c.le("Sobolev b2: 1/(p b2) <= 1/r", w.inv_b2 / p, ir);
  c.le("Sobolev b2: 0 <= (tau+1)/p", 0.0, (tau + 1.0) / p);
  c.lt("Sobolev b2: (tau+1)/p < n/(p b2)", (tau + 1.0) / p, n * w.inv_b2 / p);
  c.eq("Sobolev b2: (tau+1)/p-1 = n/(p b2)-n/r", (tau + 1.0) / p - 1.0, n * w.inv_b2 / p - nr);

  c.eq("Hölder a3: 1/a1 = 1/a3+1/r", w.inv_a1, w.inv_a3 + ir);
  c.lt("Sobolev a3: p > 2", 2.0, p);
  if (c.ok()) {
    const double k2 = p - 2.0;
    c.lt("Sobolev a3: 0 < 1/((p-2)a3)", 0.0, w.inv_a3 / k2);
    c.le("Sobolev a3: 1/((p-2)a3) <= 1/r", w.inv_a3 / k2, ir);
    c.le("Sobolev a3: 0 <= tau/(p-2)", 0.0, tau / k2);
    c.lt("Sobolev a3: tau/(p-2) < n/((p-2)a3)", tau / k2, n * w.inv_a3 / k2);
    c.eq("Sobolev a3: tau/(p-2)-1 = n/((p-2)a3)-n/r", tau / k2 - 1.0, n * w.inv_a3 / k2 - nr);
  }
  c.eq("Hölder b4: 1/b2 = 1/b4+1/r", w.inv_b2, w.inv_b4 + ir);
  c.le("weight a2: 0 <= tau/(p-1)", 0.0, tau / (p - 1.0));
  c.le("weight a2: tau/(p-1) <= n/((p-1)a2)", tau / (p - 1.0), n * w.inv_a2 / (p - 1.0));
  c.lt("Sobolev b4: 0 < 1/((p-1)b4)", 0.0, w.inv_b4 / (p - 1.0));
  c.le("Sobolev b4: 1/((p-1)b4) <= 1/r", w.inv_b4 / (p - 1.0), ir);
  c.lt("Sobolev b4: tau/(p-1) < n/((p-1)b4)", tau / (p - 1.0), n * w.inv_b4 / (p - 1.0));
  c.eq("Sobolev b4: tau/(p-1)-1 = n/((p-1)b4)-n/r", tau / (p - 1.0) - 1.0, n * w.inv_b4 / (p - 1.0) - nr);

  // Summaries in terms of n/r.
  c.lt("n/r window: (p-tau-2)/(p-1) < n/r", (p - tau - 2.0) / (p - 1.0), nr);
  c.lt("n/r window: n/r < (p-tau-2+n)/(p-1)", nr, (p - tau - 2.0 + n) / (p - 1.0));
  c.lt("n/r window: (p-tau)/p < n/r", (p - tau) / p, nr);
  c.lt("n/r window: n/r < (p-tau+n)/p", nr, (p - tau + n) / p);
  c.le("n/r window: tau <= p-2", tau - p + 2.0, 0.0);
  c.le("n/r window: n/r <= n", nr, n);
  c.lt("n/r window: 1 < n/r", 1.0, nr);
  c.le("tau window: tau <= p", tau - p, 0.0);
  c.lt("n/r window: (p-tau-1)/(p-1) < n/r", (p - tau - 1.0) / (p - 1.0), nr);
  c.lt("n/r window: n/r < (p-tau-1+n)/(p-1)", nr, (p - tau - 1.0 + n) / (p - 1.0));
  c.lt("n/r window: (p-tau-1)/p < n/r", (p - tau - 1.0) / p, nr);
  c.lt("n/r window: n/r < (p-tau-1+n)/p", nr, (p - tau - 1.0 + n) / p);
  c.le("tau window: tau <= p-1", tau - p + 1.0, 0.0);
  c.lt("n/r window: (p-tau-2)/(p-2) < n/r", (p - tau - 2.0) / (p - 2.0), nr);
  c.le("n/r window: n/r <= n", nr, n);
  c.lt("n/r window: (p-tau-1)/(p-1) < n/r", (p - tau - 1.0) / (p - 1.0), nr);

  // Conditions after eliminating r.
  c.lt("p window: p > n/(2(n-2))", n / (2.0 * (n - 2.0)), p);
  c.lt("tau window: tau < n-1+p(2p/(2p-1)-n/2)", tau, n - 1.0 + p * (2.0 * p / (2.0 * p - 1.0) - n / 2.0));
  c.lt("tau window: n/2-(n-2)p/2 < tau", n / 2.0 - (n - 2.0) * p / 2.0, tau);
  c.lt("tau window: tau < n-(n-2)p/2", tau, n - (n - 2.0) * p / 2.0);
  c.lt("kappa window: 1+kappa < n/r", 1.0 + kappa, nr);
  c.lt("kappa window: n/r < min{n,n-kappa}", nr, std::min(n, n - kappa));

  if (!c.ok()) {
    result.infeasible_constraint = c.failed();
    return result;
  }
  result.witness = w;
  return result;
}

std::optional<std::string> verify_witness(const ModelParams& m, const ExponentWitness& w) {
  // Every relation is restated on the Lebesgue exponents themselves
  // (a = 1/inv_a), independent of the n/r summaries used by the search.
  const double n = m.n, p = m.p, tau = m.tau, kappa = m.kappa, alpha = m.alpha;
  const double r = w.pair.r;
  const double a1 = 1.0 / w.inv_a1, b1 = 1.0 / w.inv_b1, a2 = 1.0 / w.inv_a2, b2 = 1.0 / w.inv_b2;
  const double a3 = 1.0 / w.inv_a3, b4 = 1.0 / w.inv_b4;
  const double target = (n + 2.0) / (2.0 * n) + alpha / n;
  Constraints c;

  c.require("pair admissible", w.pair.is_admissible(m.n));
  c.eq("admissible: q = 2(2p-1)", w.pair.q(), 2.0 * (2.0 * p - 1.0));
  c.lt("kappa window: (1+kappa)/n < 1/r", (1.0 + kappa) / n, 1.0 / r);
  c.lt("kappa window: 1/r < min{1,(n-kappa)/n}", 1.0 / r, std::min(1.0, (n - kappa) / n));

  // Hölder splits: every Lebesgue exponent must exceed 1.
  c.lt("HLS split 1: a1 > 1", 1.0, a1);
  c.lt("HLS split 1: b1 > 1", 1.0, b1);
  c.eq("HLS split 1: Hölder/HLS balance", 1.0 / a1 + 1.0 / b1, target);
  c.lt("HLS split 2: a2 > 1", 1.0, a2);
  c.lt("HLS split 2: b2 > 1", 1.0, b2);
  c.eq("HLS split 2: Hölder/HLS balance", 1.0 / a2 + 1.0 / b2, target);

  // Weighted Sobolev (CKN) steps: ||r^{-s} u||_{L^{t}} <= C ||grad u||_{L^r}
  // requires t >= r, 0 <= s < n/t and s - 1 = n/t - n/r.
  auto ckn = [&](const char* label, double s, double t) {
    c.le(label, r, t + kIdentityTol * t);
    c.le(label, 0.0, s);
    c.lt(label, s, n / t);
    c.eq(label, s - 1.0, n / t - n / r);
  };
  ckn("Sobolev a1: CKN for |x|^{-(tau+1)/(p-1)} u in L^{(p-1)a1}", (tau + 1.0) / (p - 1.0), (p - 1.0) * a1);
  ckn("Sobolev b1: CKN for |x|^{-tau/p} u in L^{p b1}", tau / p, p * b1);
  ckn("Sobolev a2: CKN for |x|^{-tau/(p-1)} u in L^{(p-1)a2}", tau / (p - 1.0), (p - 1.0) * a2);
  ckn("Sobolev b2: CKN for |x|^{-(tau+1)/p} u in L^{p b2}", (tau + 1.0) / p, p * b2);
  c.eq("Hölder a3: 1/a1 = 1/a3+1/r", 1.0 / a1, 1.0 / a3 + 1.0 / r);
  c.lt("Sobolev a3: p > 2", 2.0, p);
  if (c.ok()) ckn("Sobolev a3: CKN for |x|^{-tau/(p-2)} u in L^{(p-2)a3}", tau / (p - 2.0), (p - 2.0) * a3);
  c.eq("Hölder b4: 1/b2 = 1/b4+1/r", 1.0 / b2, 1.0 / b4 + 1.0 / r);
  ckn("Sobolev b4: CKN for |x|^{-tau/(p-1)} u in L^{(p-1)b4}", tau / (p - 1.0), (p - 1.0) * b4);

  if (c.ok()) return std::nullopt;
  return c.failed();
}

}  // namespace hartreelab
