#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hartreelab {

/// Slack used for every strict inequality of the exponent calculus. A strict
/// bound met only within this slack is reported as marginal, never as a pass.
inline constexpr double kStrictSlack = 1e-9;
/// Tolerance for the exponent identities (scaling relations, Hölder sums).
inline constexpr double kIdentityTol = 1e-12;

/// Model parameters (n, λ, α, τ, ε) together with the derived κ and the
/// energy-critical exponent p.
struct ModelParams {
  int n = 3;
  double lambda = 0.0;
  double alpha = 2.0;
  double tau = 0.5;
  int epsilon = -1;  ///< +1 defocusing, -1 focusing
  double kappa = 0.0;
  double p = 4.0;

  /// Fills κ and p without validating anything. Used for boundary reports.
  static ModelParams raw(int n, double lambda, double alpha, double tau, int epsilon);

  bool focusing() const { return epsilon < 0; }
};

double kappa_of(int n, double lambda);
double critical_exponent(int n, double alpha, double tau);

/// Validating constructor. Throws DomainError naming the violated bound.
ModelParams derive(int n, double lambda, double alpha, double tau, int epsilon);

enum class CheckStatus { Pass, Marginal, Fail };
const char* to_string(CheckStatus s);

struct RangeCheck {
  std::string label;
  double value = 0.0;  ///< the constrained quantity
  double bound = 0.0;
  double slack = 0.0;  ///< signed distance to the bound; positive means inside
  CheckStatus status = CheckStatus::Fail;
};

struct RangeReport {
  std::vector<RangeCheck> checks;
  /// Only filled by check_lemma_ranges: the pass/fail verdict differs from the
  /// one of check_theorem_ranges for the same parameters.
  bool disagrees_with_theorem = false;

  bool pass() const;
  /// Smallest slack over all checks.
  double min_slack() const;
  const RangeCheck* first_failure() const;
};

/// Well-posedness ranges: the κ bound and the τ window of the local theory.
RangeReport check_theorem_ranges(const ModelParams& params);

/// Ranges under which the nonlinear estimates are claimed. The τ window is
/// reported with both printed lower bounds; the stricter one gates.
RangeReport check_lemma_ranges(const ModelParams& params);

/// Conjunction of both range sets; the gate every downstream module uses.
bool feasible(const ModelParams& params);

/// Bounds on 2κ from both range sets, for side-by-side comparison.
double theorem_kappa_bound(int n);
double lemma_kappa_bound(int n);

/// Strichartz pair with 1/q stored explicitly so that q = ∞ is exact (1/q = 0).
struct AdmissiblePair {
  double inv_q = 0.0;
  double r = 2.0;

  double q() const {
    return inv_q == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv_q;
  }
  bool is_admissible(int n) const;
};

AdmissiblePair make_pair_from_r(int n, double r);

/// Admissible pair fixed by 1/q = 1/(2(2p-1)) and the scaling relation.
/// Throws InfeasibleError when p is too small for the pair to exist or when
/// r leaves [2, 2n/(n-2)].
AdmissiblePair strichartz_r(const ModelParams& params);

/// Auxiliary Hölder/HLS exponents, all stored as reciprocals.
struct ExponentWitness {
  AdmissiblePair pair;
  double inv_a1 = 0, inv_b1 = 0, inv_a2 = 0, inv_b2 = 0, inv_a3 = 0, inv_b4 = 0;
};

struct WitnessResult {
  std::optional<ExponentWitness> witness;
  std::string infeasible_constraint;  ///< empty when a witness exists

  bool feasible() const { return witness.has_value(); }
};

/// Builds the exponents and checks the full constraint system, stopping at
/// the first violation.
WitnessResult find_exponent_witness(const ModelParams& params);

/// Second, independent check of a witness: re-derives every relation from the
/// reciprocal exponents themselves. Returns the violated label, if any.
std::optional<std::string> verify_witness(const ModelParams& params, const ExponentWitness& w);

}  // namespace hartreelab
