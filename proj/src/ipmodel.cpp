#include "amicus/ipmodel.hpp"

#include <cmath>
#include <numbers>

#include "amicus/errors.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/parallel.hpp"

namespace amicus {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Utility factors can hit 0 at simplex corners with saturated logits.
constexpr double kUtilFloor = 1e-12;

// Interior band for first-order conditions; dims floored by the brief grid
// (1e-8) fall outside it.
constexpr double kInteriorEps = 1e-6;

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ValidationError(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

double vote_logit(const IdealPoint& psi, const std::vector<double>& theta,
                  const std::vector<double>* delta_p,
                  const std::vector<double>* delta_r, const CaseParams& kappa,
                  ModelKind kind) {
  if (psi.empty()) throw ValidationError("vote_logit: empty ideal point");
  if (kind == ModelKind::Unidimensional) return kappa.a + kappa.b * psi[0];

  check_dim(theta.size(), psi.size(), "vote_logit theta");
  double logit = kappa.a + kappa.b * dot(psi, theta);
  if (kind == ModelKind::Issues) return logit;

  if (delta_p != nullptr) {
    check_dim(delta_p->size(), psi.size(), "vote_logit delta_p");
    logit += kappa.c_p * dot(psi, *delta_p);
  }
  if (delta_r != nullptr) {
    check_dim(delta_r->size(), psi.size(), "vote_logit delta_r");
    logit += kappa.c_r * dot(psi, *delta_r);
  }
  return logit;
}

double vote_prob(double logit, Side vote) {
  return vote == Side::Petitioner ? sigmoid(logit) : sigmoid(-logit);
}

double log_vote_prob(double logit, Side vote) {
  return vote == Side::Petitioner ? log_sigmoid(logit) : log_sigmoid(-logit);
}

int utility(const std::map<std::string, Side>& votes, Side side) {
  int u = 0;
  for (const auto& [justice, v] : votes) {
    if (v == side) ++u;
  }
  return u;
}

double cost(const std::vector<double>& delta, const std::vector<double>& theta,
            double xi) {
  check_dim(delta.size(), theta.size(), "cost");
  return 0.5 * xi * l2_dist_sq(delta, theta);
}

double expected_votes(const std::vector<IdealPoint>& psi_all,
                      const std::vector<double>& theta,
                      const std::vector<double>& delta, const CaseParams& kappa,
                      Side side) {
  check_dim(delta.size(), theta.size(), "expected_votes");
  const double c = side == Side::Petitioner ? kappa.c_p : kappa.c_r;
  double ev = 0.0;
  for (const IdealPoint& psi : psi_all) {
    check_dim(psi.size(), theta.size(), "expected_votes psi");
    const double logit = kappa.a + kappa.b * dot(psi, theta) + c * dot(psi, delta);
    ev += side == Side::Petitioner ? sigmoid(logit) : sigmoid(-logit);
  }
  return ev;
}

double putil_factor(const std::vector<IdealPoint>& psi_all,
                    const std::vector<double>& theta,
                    const std::vector<double>& delta, const CaseParams& kappa,
                    Side side, double xi) {
  return expected_votes(psi_all, theta, delta, kappa, side) +
         xi * (1.0 - 0.5 * l2_dist_sq(delta, theta));
}

std::vector<double> marginal_values(const std::vector<double>& delta,
                                    const std::vector<double>& theta,
                                    const std::vector<IdealPoint>& psi_all,
                                    const CaseParams& kappa, Side side,
                                    double xi) {
  check_dim(delta.size(), theta.size(), "marginal_values");
  const std::size_t dims = delta.size();
  const double c = side == Side::Petitioner ? kappa.c_p : kappa.c_r;
  // d expected_votes / d delta_d; the respondent side's success probability
  // is 1 - sigma, which flips the sign of the sigmoid slope.
  const double sign = side == Side::Petitioner ? 1.0 : -1.0;
  std::vector<double> m(dims, 0.0);
  for (const IdealPoint& psi : psi_all) {
    check_dim(psi.size(), dims, "marginal_values psi");
    const double logit =
        kappa.a + kappa.b * dot(psi, theta) + c * dot(psi, delta);
    const double g = sign * sigmoid_grad(logit) * c;
    for (std::size_t d = 0; d < dims; ++d) m[d] += g * psi[d];
  }
  for (std::size_t d = 0; d < dims; ++d) m[d] -= xi * (delta[d] - theta[d]);
  return m;
}

std::vector<double> foc_residual(const std::vector<double>& delta,
                                 const std::vector<double>& theta,
                                 const std::vector<IdealPoint>& psi_all,
                                 const CaseParams& kappa, Side side,
                                 double xi) {
  const std::vector<double> m =
      marginal_values(delta, theta, psi_all, kappa, side, xi);
  std::vector<double> residual;
  double ref = 0.0;
  bool have_ref = false;
  for (std::size_t d = 0; d < delta.size(); ++d) {
    if (delta[d] <= kInteriorEps || delta[d] >= 1.0 - kInteriorEps) continue;
    if (!have_ref) {
      ref = m[d];
      have_ref = true;
    }
    residual.push_back(m[d] - ref);
  }
  if (!have_ref) {
    throw ValidationError("foc_residual: no interior topic weights");
  }
  return residual;
}

std::vector<CaseView> build_case_views(const Corpus& corpus,
                                       const CorpusMixtures& mixtures,
                                       int num_topics) {
  const std::size_t dims = static_cast<std::size_t>(num_topics);
  std::vector<CaseView> views;
  views.reserve(corpus.cases.size());
  for (const Case& kase : corpus.cases) {
    const auto it = mixtures.find(kase.id);
    if (it == mixtures.end()) {
      throw ValidationError("no mixtures for case " + kase.id);
    }
    const CaseMixtures& mix = it->second;
    check_dim(mix.theta.size(), dims, "case theta");
    if (mix.briefs.size() != kase.briefs.size()) {
      throw ValidationError("brief mixture count mismatch for case " + kase.id);
    }

    CaseView view;
    view.kase = &kase;
    view.theta = mix.theta;
    view.brief_mixtures = mix.briefs;

    std::vector<double> acc_p(dims, 0.0), acc_r(dims, 0.0);
    int n_p = 0, n_r = 0;
    for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
      check_dim(mix.briefs[k].size(), dims, "brief mixture");
      std::vector<double>& acc =
          kase.briefs[k].side == Side::Petitioner ? acc_p : acc_r;
      for (std::size_t d = 0; d < dims; ++d) acc[d] += mix.briefs[k][d];
      (kase.briefs[k].side == Side::Petitioner ? n_p : n_r) += 1;
    }
    if (n_p > 0) {
      view.delta_p = std::move(acc_p);
      for (double& x : view.delta_p) x /= n_p;
    }
    if (n_r > 0) {
      view.delta_r = std::move(acc_r);
      for (double& x : view.delta_r) x /= n_r;
    }

    for (const auto& [justice, side] : kase.votes) {
      const int j = corpus.justice_index(justice);
      if (j < 0) throw ValidationError("vote by unknown justice " + justice);
      view.votes.emplace_back(j, side);
    }
    views.push_back(std::move(view));
  }
  return views;
}

double case_log_utility(const CaseView& view,
                        const std::vector<IdealPoint>& psi_all,
                        const CaseParams& kappa, const Hyperparams& hyper,
                        ModelKind kind) {
  if (kind != ModelKind::RandomUtility || hyper.eta == 0.0) return 0.0;
  double lu = 0.0;
  for (std::size_t k = 0; k < view.brief_mixtures.size(); ++k) {
    const double f =
        putil_factor(psi_all, view.theta, view.brief_mixtures[k], kappa,
                     view.kase->briefs[k].side, hyper.xi);
    lu += hyper.eta * std::log(std::max(f, kUtilFloor));
  }
  return lu;
}

double case_log_likelihood(const CaseView& view,
                           const std::vector<IdealPoint>& psi_all,
                           const CaseParams& kappa, const Hyperparams& hyper,
                           ModelKind kind) {
  if (!kappa.finite()) throw NumericalError("case parameters not finite");
  double ll = 0.0;
  const std::vector<double>* dp = view.delta_p_ptr();
  const std::vector<double>* dr = view.delta_r_ptr();
  for (const auto& [j, side] : view.votes) {
    const double logit = vote_logit(psi_all[j], view.theta, dp, dr, kappa, kind);
    ll += log_vote_prob(logit, side);
  }
  return ll + case_log_utility(view, psi_all, kappa, hyper, kind);
}

double log_likelihood(const std::vector<CaseView>& views,
                      const std::vector<IdealPoint>& psi_all,
                      const std::vector<CaseParams>& kappas,
                      const Hyperparams& hyper, ModelKind kind) {
  check_dim(kappas.size(), views.size(), "log_likelihood kappas");
  std::vector<double> terms(views.size(), 0.0);
  parallel_for(views.size(), [&](std::size_t i) {
    terms[i] = case_log_likelihood(views[i], psi_all, kappas[i], hyper, kind);
  });
  double total = 0.0;
  for (double t : terms) total += t;
  if (!std::isfinite(total)) {
    throw NumericalError("log_likelihood is not finite");
  }
  return total;
}

double log_likelihood_serial(const std::vector<CaseView>& views,
                             const std::vector<IdealPoint>& psi_all,
                             const std::vector<CaseParams>& kappas,
                             const Hyperparams& hyper, ModelKind kind) {
  check_dim(kappas.size(), views.size(), "log_likelihood kappas");
  double total = 0.0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    total += case_log_likelihood(views[i], psi_all, kappas[i], hyper, kind);
  }
  if (!std::isfinite(total)) {
    throw NumericalError("log_likelihood is not finite");
  }
  return total;
}

double log_prior_justice(const IdealPoint& psi, double lambda, double rho) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("rho must be in (0,1)");
  const double d = static_cast<double>(psi.size());
  // Covariance lambda*I + rho*11^T: Sherman-Morrison inverse and the
  // matching matrix-determinant-lemma log determinant.
  const double logdet = (d - 1.0) * std::log(lambda) + std::log(lambda + d * rho);
  const double coef = rho / (lambda * (lambda + d * rho));
  const double ss = dot(psi, psi);
  const double s = sum(psi);
  const double quad = ss / lambda - coef * s * s;
  return -0.5 * (d * kLog2Pi + logdet + quad);
}

double log_prior_justices(const std::vector<IdealPoint>& psi_all,
                          double lambda, double rho) {
  if (psi_all.empty()) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) {
      throw ValidationError("rho must be in (0,1)");
    }
    return 0.0;
  }
  const std::size_t dims = psi_all[0].size();
  double lp = 0.0;
  for (const IdealPoint& psi : psi_all) {
    check_dim(psi.size(), dims, "log_prior_justices psi");
    lp += log_prior_justice(psi, lambda, rho);
  }
  return lp;
}

double log_prior_case(const CaseParams& kappa, double sigma_kappa,
                      ModelKind kind) {
  if (!(sigma_kappa > 0.0)) throw ValidationError("sigma_kappa must be > 0");
  const double log_norm = std::log(2.0 * std::numbers::pi * sigma_kappa);
  double lp = -0.5 * (log_norm + kappa.a * kappa.a / sigma_kappa);
  lp += -0.5 * (log_norm + kappa.b * kappa.b / sigma_kappa);
  if (kind_uses_amici(kind)) {
    lp += -0.5 * (log_norm + kappa.c_p * kappa.c_p / sigma_kappa);
    lp += -0.5 * (log_norm + kappa.c_r * kappa.c_r / sigma_kappa);
  }
  return lp;
}

double log_prior_cases(const std::vector<CaseParams>& kappas,
                       double sigma_kappa, ModelKind kind) {
  double lp = 0.0;
  for (const CaseParams& kappa : kappas) {
    lp += log_prior_case(kappa, sigma_kappa, kind);
  }
  return lp;
}

}  // namespace amicus
