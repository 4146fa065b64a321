#include "amicus/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "amicus/errors.hpp"
#include "amicus/ipmodel.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/topics.hpp"

namespace amicus {

namespace {

int checked_case_index(const FitResult& fit, const std::string& case_id) {
  const int idx = fit.case_index(case_id);
  if (idx < 0) {
    throw ValidationError("case " + case_id + " is not part of the fit");
  }
  return idx;
}

void check_mix_alignment(const Case& kase, const CaseMixtures& mix) {
  if (mix.theta.empty()) {
    throw ValidationError("case " + kase.id + " has an empty merits mixture");
  }
  if (mix.briefs.size() != kase.briefs.size()) {
    throw ValidationError("case " + kase.id +
                          ": brief mixtures misaligned with briefs");
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

IpDecomposition decompose_ip(const FitResult& fit, const Case& kase,
                             const CaseMixtures& mix) {
  if (!kind_uses_amici(fit.kind)) {
    throw ValidationError("decompose_ip needs a model kind with amicus terms");
  }
  check_mix_alignment(kase, mix);
  const CaseParams& kappa = fit.kappa_hat[checked_case_index(fit, kase.id)];

  const auto dp = mean_side_mixture(kase, mix, Side::Petitioner);
  const auto dr = mean_side_mixture(kase, mix, Side::Respondent);
  const std::vector<double>* dp_ptr = dp ? &*dp : nullptr;
  const std::vector<double>* dr_ptr = dr ? &*dr : nullptr;

  CaseParams issues_kappa = kappa;
  issues_kappa.c_p = 0.0;
  issues_kappa.c_r = 0.0;
  CaseParams pet_kappa = kappa;
  pet_kappa.c_r = 0.0;
  CaseParams resp_kappa = kappa;
  resp_kappa.c_p = 0.0;

  IpDecomposition out;
  out.case_id = kase.id;
  out.rows.reserve(fit.justice_ids.size());
  for (std::size_t j = 0; j < fit.justice_ids.size(); ++j) {
    const IdealPoint& psi = fit.psi_hat[j];
    IpDecompositionRow row;
    row.justice = fit.justice_ids[j];
    row.issues_only =
        vote_logit(psi, mix.theta, dp_ptr, dr_ptr, issues_kappa, fit.kind);
    row.with_pet_amici =
        vote_logit(psi, mix.theta, dp_ptr, dr_ptr, pet_kappa, fit.kind);
    row.with_resp_amici =
        vote_logit(psi, mix.theta, dp_ptr, dr_ptr, resp_kappa, fit.kind);
    // Assembled from the two increments rather than recomputed, so the
    // additivity identity is exact rather than within rounding.
    row.full = row.issues_only + (row.with_pet_amici - row.issues_only) +
               (row.with_resp_amici - row.issues_only);
    out.rows.push_back(std::move(row));
  }
  return out;
}

const char* to_string(AmiciKeep keep) {
  switch (keep) {
    case AmiciKeep::None: return "none";
    case AmiciKeep::PetitionerOnly: return "pet";
    case AmiciKeep::RespondentOnly: return "resp";
    case AmiciKeep::All: return "all";
  }
  return "unknown";
}

AmiciKeep amici_keep_from_string(const std::string& s) {
  if (s == "none") return AmiciKeep::None;
  if (s == "pet") return AmiciKeep::PetitionerOnly;
  if (s == "resp") return AmiciKeep::RespondentOnly;
  if (s == "all") return AmiciKeep::All;
  throw ValidationError("unknown keep value: " + s);
}

Prediction drop_amici_predict(const FitResult& fit, const Case& kase,
                              const CaseMixtures& mix, AmiciKeep keep,
                              int num_samples, uint64_t seed) {
  check_mix_alignment(kase, mix);
  const bool keep_pet =
      keep == AmiciKeep::All || keep == AmiciKeep::PetitionerOnly;
  const bool keep_resp =
      keep == AmiciKeep::All || keep == AmiciKeep::RespondentOnly;

  std::optional<std::vector<double>> dp, dr;
  if (keep_pet) dp = mean_side_mixture(kase, mix, Side::Petitioner);
  if (keep_resp) dr = mean_side_mixture(kase, mix, Side::Respondent);

  std::vector<std::pair<Side, std::vector<double>>> briefs;
  for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
    const Side side = kase.briefs[k].side;
    if (side == Side::Petitioner ? keep_pet : keep_resp) {
      briefs.emplace_back(side, mix.briefs[k]);
    }
  }

  std::vector<std::string> who;
  who.reserve(kase.votes.size());
  for (const auto& [id, side] : kase.votes) {
    (void)side;
    who.push_back(id);
  }
  if (who.empty()) who = fit.justice_ids;

  return predict_votes(fit, who, mix.theta, dp ? &*dp : nullptr,
                       dr ? &*dr : nullptr, briefs, fit.kind, num_samples,
                       seed);
}

UtilityCurve best_brief_grid(const FitResult& fit, const std::string& case_id,
                             const std::vector<double>& theta, Side side,
                             int topic_a, int topic_b, double step,
                             double floor) {
  const int dims = static_cast<int>(theta.size());
  if (dims == 0) {
    throw ValidationError("best_brief_grid: empty merits mixture");
  }
  if (topic_a < 0 || topic_a >= dims || topic_b < 0 || topic_b >= dims) {
    throw ValidationError("topic index out of range");
  }
  if (topic_a == topic_b) {
    throw ValidationError("topic_a and topic_b must differ");
  }
  if (!(step > 0.0) || step > 1.0) {
    throw ValidationError("step must lie in (0, 1]");
  }
  const double inv = 1.0 / step;
  const int n = static_cast<int>(std::lround(inv));
  if (n < 1 || std::fabs(inv - n) > 1e-9) {
    throw ValidationError("step must divide 1 into whole grid points");
  }
  if (!(floor > 0.0) || floor >= 1.0) {
    throw ValidationError("floor must lie in (0, 1)");
  }
  const CaseParams& kappa = fit.kappa_hat[checked_case_index(fit, case_id)];

  UtilityCurve curve;
  curve.side = side;
  curve.topic_a = topic_a;
  curve.topic_b = topic_b;
  curve.grid.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double p = i * step;
    std::vector<double> delta(dims, floor);
    delta[topic_a] = std::max(p, floor);
    delta[topic_b] = std::max(1.0 - p, floor);
    const double total = sum(delta);
    for (double& d : delta) d /= total;

    UtilityPoint point;
    point.proportion_a = p;
    point.expected_votes = expected_votes(fit.psi_hat, theta, delta, kappa,
                                          side);
    point.cost = cost(delta, theta, fit.hyper.xi);
    point.net = point.expected_votes - point.cost;
    if (!curve.grid.empty() && point.net > curve.grid[curve.argmax_index].net) {
      curve.argmax_index = curve.grid.size();
    }
    curve.grid.push_back(point);
  }
  return curve;
}

InfluenceReport amici_influence(const FitResult& fit_issues,
                                const FitResult& fit_utility,
                                const Corpus& corpus,
                                const CorpusMixtures& mixtures) {
  if (fit_issues.kind != ModelKind::Issues) {
    throw ValidationError("amici_influence: first fit must be issues kind");
  }
  if (!kind_uses_amici(fit_utility.kind)) {
    throw ValidationError(
        "amici_influence: second fit must carry amicus terms");
  }
  if (fit_issues.justice_ids != fit_utility.justice_ids) {
    throw ValidationError("amici_influence: fits cover different rosters");
  }
  if (fit_issues.case_ids != fit_utility.case_ids) {
    throw ValidationError("amici_influence: fits cover different cases");
  }
  if (fit_issues.justice_ids != corpus.justices) {
    throw ValidationError("amici_influence: fit roster differs from corpus");
  }

  std::vector<double> sq_sum(corpus.justices.size(), 0.0);
  std::vector<long long> counts(corpus.justices.size(), 0);
  for (const Case& kase : corpus.cases) {
    const auto mix_it = mixtures.find(kase.id);
    if (mix_it == mixtures.end()) {
      throw ValidationError("case " + kase.id + " has no mixtures");
    }
    const CaseMixtures& mix = mix_it->second;
    check_mix_alignment(kase, mix);
    const int ci = checked_case_index(fit_issues, kase.id);
    const int cu = checked_case_index(fit_utility, kase.id);

    const auto dp = mean_side_mixture(kase, mix, Side::Petitioner);
    const auto dr = mean_side_mixture(kase, mix, Side::Respondent);
    const std::vector<double>* dp_ptr = dp ? &*dp : nullptr;
    const std::vector<double>* dr_ptr = dr ? &*dr : nullptr;

    for (const auto& [id, side] : kase.votes) {
      const int j = fit_issues.justice_index(id);
      if (j < 0) {
        throw ValidationError("vote by unknown justice " + id);
      }
      const double ll_issues = log_vote_prob(
          vote_logit(fit_issues.psi_hat[j], mix.theta, dp_ptr, dr_ptr,
                     fit_issues.kappa_hat[ci], fit_issues.kind),
          side);
      const double ll_utility = log_vote_prob(
          vote_logit(fit_utility.psi_hat[j], mix.theta, dp_ptr, dr_ptr,
                     fit_utility.kappa_hat[cu], fit_utility.kind),
          side);
      const double diff = ll_utility - ll_issues;
      sq_sum[j] += diff * diff;
      ++counts[j];
    }
  }

  InfluenceReport report;
  for (std::size_t j = 0; j < corpus.justices.size(); ++j) {
    if (counts[j] == 0) {
      report.omitted.push_back(corpus.justices[j]);
      continue;
    }
    report.rows.push_back(
        {corpus.justices[j],
         std::sqrt(sq_sum[j] / static_cast<double>(counts[j]))});
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const InfluenceRow& a, const InfluenceRow& b) {
              if (a.rms != b.rms) return a.rms > b.rms;
              return a.justice < b.justice;
            });
  return report;
}

void save_decomposition_csv(const IpDecomposition& decomp,
                            const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write decomposition file " + path);
  out << "justice,issues_only,with_pet_amici,with_resp_amici,full\n";
  for (const IpDecompositionRow& row : decomp.rows) {
    out << row.justice << ',' << fmt(row.issues_only) << ','
        << fmt(row.with_pet_amici) << ',' << fmt(row.with_resp_amici) << ','
        << fmt(row.full) << '\n';
  }
  if (!out) throw ValidationError("failed writing decomposition file " + path);
}

void save_curve_csv(const UtilityCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write curve file " + path);
  out << "proportion_a,expected_votes,cost,net\n";
  for (const UtilityPoint& point : curve.grid) {
    out << fmt(point.proportion_a) << ',' << fmt(point.expected_votes) << ','
        << fmt(point.cost) << ',' << fmt(point.net) << '\n';
  }
  if (!out) throw ValidationError("failed writing curve file " + path);
}

void save_influence_csv(const InfluenceReport& report,
                        const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write influence file " + path);
  out << "justice,rms_loglik_diff\n";
  for (const InfluenceRow& row : report.rows) {
    out << row.justice << ',' << fmt(row.rms) << '\n';
  }
  if (!out) throw ValidationError("failed writing influence file " + path);
}

}  // namespace amicus
