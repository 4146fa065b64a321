#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/mixtures.hpp"
#include "amicus/params.hpp"

namespace amicus {

// Argument of sigma for p(vote = petitioner). Absent deltas are passed as
// nullptr and contribute nothing, bit-exactly. Term order is fixed:
//   ((a + b*dot(psi,theta)) + c_p*dot(psi,delta_p)) + c_r*dot(psi,delta_r)
// so the Amici(c=0) == Issues and Issues(D=1,theta=[1]) == Unidimensional
// reductions hold exactly, not to tolerance.
double vote_logit(const IdealPoint& psi, const std::vector<double>& theta,
                  const std::vector<double>* delta_p,
                  const std::vector<double>* delta_r, const CaseParams& kappa,
                  ModelKind kind);

double vote_prob(double logit, Side vote);
double log_vote_prob(double logit, Side vote);

// Eq. count of votes cast for `side`.
int utility(const std::map<std::string, Side>& votes, Side side);

// (xi/2) * ||delta - theta||^2
double cost(const std::vector<double>& delta, const std::vector<double>& theta,
            double xi);

// Sum over justices of the probability that the justice votes for `side`,
// seen from a single brief: only the side's own c scales delta, the other
// side's briefs are ignored. Respondent success probability is 1 - sigma.
double expected_votes(const std::vector<IdealPoint>& psi_all,
                      const std::vector<double>& theta,
                      const std::vector<double>& delta, const CaseParams& kappa,
                      Side side);

// expected_votes + xi*(1 - ||delta-theta||^2 / 2). Nonnegative on the
// simplex since the squared distance is at most 2.
double putil_factor(const std::vector<IdealPoint>& psi_all,
                    const std::vector<double>& theta,
                    const std::vector<double>& delta, const CaseParams& kappa,
                    Side side, double xi);

// Analytic gradient of putil_factor with respect to delta, one entry per
// topic. The cost part is -xi*(delta_d - theta_d); the expected-votes part
// flips sign for the respondent side.
std::vector<double> marginal_values(const std::vector<double>& delta,
                                    const std::vector<double>& theta,
                                    const std::vector<IdealPoint>& psi_all,
                                    const CaseParams& kappa, Side side,
                                    double xi);

// Marginal values minus the first interior dim's value, interior meaning
// delta_d in (1e-6, 1-1e-6). Near zero at an interior optimum.
std::vector<double> foc_residual(const std::vector<double>& delta,
                                 const std::vector<double>& theta,
                                 const std::vector<IdealPoint>& psi_all,
                                 const CaseParams& kappa, Side side, double xi);

// Case joined with its stage-one mixtures; built once, read by the
// likelihood, the sampler, and prediction.
struct CaseView {
  const Case* kase = nullptr;
  std::vector<double> theta;
  std::vector<std::vector<double>> brief_mixtures;  // aligned with briefs
  std::vector<double> delta_p, delta_r;             // empty when side absent
  std::vector<std::pair<int, Side>> votes;          // (justice index, side)

  const std::vector<double>* delta_p_ptr() const {
    return delta_p.empty() ? nullptr : &delta_p;
  }
  const std::vector<double>* delta_r_ptr() const {
    return delta_r.empty() ? nullptr : &delta_r;
  }
};

// Throws ValidationError when a case or brief lacks a mixture or a mixture
// has the wrong dimension.
std::vector<CaseView> build_case_views(const Corpus& corpus,
                                       const CorpusMixtures& mixtures,
                                       int num_topics);

// Sum over the case's briefs of eta * log(putil_factor floored at 1e-12).
// Zero unless kind is RandomUtility with eta != 0.
double case_log_utility(const CaseView& view,
                        const std::vector<IdealPoint>& psi_all,
                        const CaseParams& kappa, const Hyperparams& hyper,
                        ModelKind kind);

// Vote log-likelihood of one case plus case_log_utility.
double case_log_likelihood(const CaseView& view,
                           const std::vector<IdealPoint>& psi_all,
                           const CaseParams& kappa, const Hyperparams& hyper,
                           ModelKind kind);

// Sum of case_log_likelihood over all cases. Priors are not included here;
// they are exposed separately below. The parallel version fills a per-case
// buffer and reduces in index order, so it is bit-identical to the serial
// one at any thread count.
double log_likelihood(const std::vector<CaseView>& views,
                      const std::vector<IdealPoint>& psi_all,
                      const std::vector<CaseParams>& kappas,
                      const Hyperparams& hyper, ModelKind kind);
double log_likelihood_serial(const std::vector<CaseView>& views,
                             const std::vector<IdealPoint>& psi_all,
                             const std::vector<CaseParams>& kappas,
                             const Hyperparams& hyper, ModelKind kind);

// log N(psi_j; 0, lambda*I + rho*11^T) via the rank-one closed forms:
// inverse = (1/lambda)I - rho/(lambda(lambda+D rho)) 11^T,
// logdet = (D-1)log(lambda) + log(lambda + D rho).
double log_prior_justice(const IdealPoint& psi, double lambda, double rho);

// Sum of log_prior_justice over the roster; justices are independent under
// the prior, only the dimensions within one justice are correlated.
double log_prior_justices(const std::vector<IdealPoint>& psi_all,
                          double lambda, double rho);

// Independent N(0, sigma_kappa) over the parameters the kind samples:
// (a, b) or (a, b, c_p, c_r). sigma_kappa is a variance.
double log_prior_cases(const std::vector<CaseParams>& kappas,
                       double sigma_kappa, ModelKind kind);
double log_prior_case(const CaseParams& kappa, double sigma_kappa,
                      ModelKind kind);

}  // namespace amicus
