#include "amicus/predict.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "amicus/errors.hpp"
#include "amicus/ipmodel.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/parallel.hpp"
#include "amicus/rng.hpp"
#include "json.hpp"

namespace amicus {

namespace {

constexpr uint64_t kStreamFoldLda = 22;
constexpr uint64_t kStreamFoldInfer = 23;
constexpr uint64_t kStreamFoldFit = 24;
constexpr uint64_t kStreamFoldPredict = 25;

Corpus subcorpus(const Corpus& corpus, const std::vector<int>& indices) {
  Corpus out;
  out.justices = corpus.justices;
  out.vocabulary = corpus.vocabulary;
  for (int i : indices) out.cases.push_back(corpus.cases[i]);
  return out;
}

double finish_series(CvSeries& series) {
  series.mean = mean(series.fold_accuracy);
  series.stdev = series.fold_accuracy.size() > 1 ? stdev(series.fold_accuracy)
                                                 : 0.0;
  return series.mean;
}

// Appendix-style penalty grid; the winner on an inner validation slice of
// the training cases is refit on all of them. Ties keep the earlier entry.
double tune_lambda1(const std::vector<std::vector<double>>& features,
                    const std::vector<Side>& labels, int max_iters) {
  static constexpr double kGrid[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<std::vector<double>> train_x, val_x;
  std::vector<Side> train_y, val_y;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i % 5 == 4) {
      val_x.push_back(features[i]);
      val_y.push_back(labels[i]);
    } else {
      train_x.push_back(features[i]);
      train_y.push_back(labels[i]);
    }
  }
  if (val_x.empty() || train_x.empty()) return 1.0;
  double best_lambda = kGrid[0];
  double best_acc = -1.0;
  for (double lambda1 : kGrid) {
    const JusticeClassifier clf =
        l1_logreg(train_x, train_y, lambda1, max_iters);
    int hits = 0;
    for (std::size_t i = 0; i < val_x.size(); ++i) {
      if (classify(clf, val_x[i]) == val_y[i]) ++hits;
    }
    const double acc = static_cast<double>(hits) / val_x.size();
    if (acc > best_acc) {
      best_acc = acc;
      best_lambda = lambda1;
    }
  }
  return best_lambda;
}

}  // namespace

Prediction predict_votes(
    const FitResult& fit, const std::vector<std::string>& justices,
    const std::vector<double>& theta, const std::vector<double>* delta_p,
    const std::vector<double>* delta_r,
    const std::vector<std::pair<Side, std::vector<double>>>& briefs,
    ModelKind kind, int num_samples, uint64_t seed) {
  if (num_samples < 1) throw ValidationError("num_samples must be >= 1");
  if (justices.empty()) {
    throw ValidationError("predict_votes needs at least one justice");
  }
  if (justices.size() > 20) {
    throw ValidationError("too many justices to enumerate vote configurations");
  }
  const std::size_t dims = theta.size();
  if (dims == 0) throw ValidationError("theta is empty");
  std::vector<const IdealPoint*> psi;
  psi.reserve(justices.size());
  for (const std::string& id : justices) {
    const int idx = fit.justice_index(id);
    if (idx < 0) throw ValidationError("unknown justice id " + id);
    if (fit.psi_hat[idx].size() != dims) {
      throw ValidationError("psi dimension does not match theta");
    }
    psi.push_back(&fit.psi_hat[idx]);
  }
  if (delta_p != nullptr && delta_p->size() != dims) {
    throw ValidationError("delta_p dimension mismatch");
  }
  if (delta_r != nullptr && delta_r->size() != dims) {
    throw ValidationError("delta_r dimension mismatch");
  }
  for (const auto& [side, mixture] : briefs) {
    (void)side;
    if (mixture.size() != dims) {
      throw ValidationError("brief mixture dimension mismatch");
    }
  }

  const int num_justices = static_cast<int>(justices.size());
  const int num_configs = 1 << num_justices;
  const double sigma = std::sqrt(fit.hyper.sigma_kappa);
  const bool amici = kind_uses_amici(kind);
  const bool weighted = kind == ModelKind::RandomUtility;

  // Draw every sample before scoring so a weight fallback cannot disturb
  // the stream, then score against all configurations.
  Rng rng(seed);
  std::vector<std::vector<double>> pet_prob(
      num_samples, std::vector<double>(num_justices, 0.0));
  std::vector<double> weights(num_samples, 1.0);
  for (int s = 0; s < num_samples; ++s) {
    CaseParams kappa;
    kappa.a = rng.normal(0.0, sigma);
    kappa.b = rng.normal(0.0, sigma);
    if (amici) {
      kappa.c_p = rng.normal(0.0, sigma);
      kappa.c_r = rng.normal(0.0, sigma);
    }
    for (int j = 0; j < num_justices; ++j) {
      const double logit =
          vote_logit(*psi[j], theta, delta_p, delta_r, kappa, kind);
      pet_prob[s][j] = vote_prob(logit, Side::Petitioner);
    }
    if (weighted) {
      double w = 1.0;
      for (const auto& [side, mixture] : briefs) {
        w *= putil_factor(fit.psi_hat, theta, mixture, kappa, side,
                          fit.hyper.xi);
      }
      weights[s] = w;
    }
  }

  Prediction out;
  out.num_kappa_samples = num_samples;
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (!(weight_sum > 0.0)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    weight_sum = static_cast<double>(num_samples);
    out.used_uniform_weights = true;
  }

  std::vector<double> scores(num_configs, 0.0);
  std::vector<double> marginal(num_justices, 0.0);
  for (int s = 0; s < num_samples; ++s) {
    const double w = weights[s];
    if (w == 0.0) continue;
    for (int j = 0; j < num_justices; ++j) {
      marginal[j] += w * pet_prob[s][j];
    }
    for (int c = 0; c < num_configs; ++c) {
      double p = w;
      for (int j = 0; j < num_justices; ++j) {
        p *= (c >> j) & 1 ? 1.0 - pet_prob[s][j] : pet_prob[s][j];
      }
      scores[c] += p;
    }
  }
  int best = 0;
  for (int c = 1; c < num_configs; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  if (!std::isfinite(scores[best])) {
    throw NumericalError("non-finite configuration score");
  }

  for (int j = 0; j < num_justices; ++j) {
    out.marginals[justices[j]] = marginal[j] / weight_sum;
    out.partition[justices[j]] =
        (best >> j) & 1 ? Side::Respondent : Side::Petitioner;
  }
  return out;
}

double pairwise_partition_accuracy(const std::map<std::string, Side>& pred,
                                   const std::map<std::string, Side>& actual) {
  if (pred.size() != actual.size()) {
    throw ValidationError("partition justice sets differ");
  }
  std::vector<std::pair<Side, Side>> sides;
  sides.reserve(pred.size());
  for (const auto& [id, side] : pred) {
    const auto it = actual.find(id);
    if (it == actual.end()) {
      throw ValidationError("partition justice sets differ");
    }
    sides.push_back({side, it->second});
  }
  const std::size_t n = sides.size();
  if (n < 2) throw ValidationError("need at least two justices to compare");
  int agree = 0;
  int pairs = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const bool same_pred = sides[x].first == sides[y].first;
      const bool same_actual = sides[x].second == sides[y].second;
      agree += same_pred == same_actual ? 1 : 0;
      ++pairs;
    }
  }
  return static_cast<double>(agree) / pairs;
}

Prediction unanimous_baseline(const Case& kase) {
  Prediction out;
  for (const auto& [id, side] : kase.votes) {
    (void)side;
    out.marginals[id] = 0.5;
    out.partition[id] = Side::Petitioner;
  }
  return out;
}

double classifier_prob(const JusticeClassifier& clf,
                       const std::vector<double>& features) {
  if (clf.majority_only) {
    return clf.majority == Side::Petitioner ? 1.0 : 0.0;
  }
  if (features.size() != clf.weights.size()) {
    throw ValidationError("feature dimension mismatch");
  }
  return sigmoid(clf.intercept + dot(clf.weights, features));
}

Side classify(const JusticeClassifier& clf,
              const std::vector<double>& features) {
  return classifier_prob(clf, features) >= 0.5 ? Side::Petitioner
                                               : Side::Respondent;
}

JusticeClassifier l1_logreg(const std::vector<std::vector<double>>& features,
                            const std::vector<Side>& labels, double lambda1,
                            int max_iters) {
  if (features.size() != labels.size()) {
    throw ValidationError("features and labels differ in length");
  }
  if (!(lambda1 >= 0.0)) throw ValidationError("lambda1 must be >= 0");
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");

  JusticeClassifier clf;
  const std::size_t n = features.size();
  int positives = 0;
  for (Side side : labels) positives += side == Side::Petitioner ? 1 : 0;
  if (n == 0 || positives == 0 || positives == static_cast<int>(n)) {
    clf.majority_only = true;
    clf.majority = 2 * positives >= static_cast<int>(n) ? Side::Petitioner
                                                        : Side::Respondent;
    clf.converged = true;
    return clf;
  }

  const std::size_t dim = features[0].size();
  for (const auto& row : features) {
    if (row.size() != dim) throw ValidationError("ragged feature matrix");
    for (double x : row) {
      if (!std::isfinite(x)) throw ValidationError("non-finite feature");
    }
  }
  clf.weights.assign(dim, 0.0);

  // Proximal gradient with the conservative Lipschitz bound
  // max_i (1 + |x_i|^2) / 4 covering the intercept coordinate; the step is
  // its inverse, which makes every iteration a descent step.
  double lip = 0.0;
  for (const auto& row : features) {
    lip = std::max(lip, (1.0 + dot(row, row)) / 4.0);
  }
  const double step = 1.0 / lip;

  const auto objective = [&]() {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = labels[i] == Side::Petitioner ? 1.0 : -1.0;
      const double m = z * (clf.intercept + dot(clf.weights, features[i]));
      // log(1 + exp(-m)) without overflow for large negative margins.
      loss += m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
    double l1 = 0.0;
    for (double w : clf.weights) l1 += std::fabs(w);
    return loss / n + lambda1 * l1;
  };

  std::vector<double> grad(dim, 0.0);
  double prev = objective();
  clf.objective_trace.push_back(prev);
  for (int it = 0; it < max_iters; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = labels[i] == Side::Petitioner ? 1.0 : -1.0;
      const double m = z * (clf.intercept + dot(clf.weights, features[i]));
      const double g = -z * sigmoid(-m) / n;
      grad_b += g;
      for (std::size_t d = 0; d < dim; ++d) grad[d] += g * features[i][d];
    }
    clf.intercept -= step * grad_b;
    const double shrink = step * lambda1;
    for (std::size_t d = 0; d < dim; ++d) {
      const double w = clf.weights[d] - step * grad[d];
      clf.weights[d] = w > shrink ? w - shrink : (w < -shrink ? w + shrink : 0.0);
    }
    const double cur = objective();
    clf.objective_trace.push_back(cur);
    if (std::fabs(prev - cur) <= 1e-10 * std::max(1.0, std::fabs(cur))) {
      clf.converged = true;
      break;
    }
    prev = cur;
  }
  return clf;
}

std::vector<double> logreg_features(const CaseView& view) {
  const std::size_t dims = view.theta.size();
  std::vector<double> out;
  out.reserve(3 * dims);
  out.insert(out.end(), view.theta.begin(), view.theta.end());
  if (view.delta_p.empty()) {
    out.insert(out.end(), dims, 0.0);
  } else {
    out.insert(out.end(), view.delta_p.begin(), view.delta_p.end());
  }
  if (view.delta_r.empty()) {
    out.insert(out.end(), dims, 0.0);
  } else {
    out.insert(out.end(), view.delta_r.begin(), view.delta_r.end());
  }
  return out;
}

std::vector<int> fold_assignment(int num_cases, int folds, uint64_t seed) {
  if (folds < 2) throw ValidationError("folds must be >= 2");
  if (num_cases < folds) throw ValidationError("more folds than cases");
  std::vector<int> order(num_cases);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = num_cases - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<int> assignment(num_cases, 0);
  for (int pos = 0; pos < num_cases; ++pos) {
    assignment[order[pos]] = pos % folds;
  }
  return assignment;
}

FoldOutcome run_fold(const Corpus& corpus, const std::vector<int>& assignment,
                     int fold, ModelKind kind, const Hyperparams& hyper,
                     const SamplerConfig& sampler_cfg, const LdaConfig& lda_cfg,
                     int num_samples, uint64_t seed) {
  if (assignment.size() != corpus.cases.size()) {
    throw ValidationError("fold assignment length mismatch");
  }
  std::vector<int> train_idx, test_idx;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) {
      test_idx.push_back(static_cast<int>(i));
    } else {
      train_idx.push_back(static_cast<int>(i));
    }
  }
  if (test_idx.empty()) throw ValidationError("fold has no test cases");
  if (train_idx.empty()) throw ValidationError("fold has no training cases");

  const Corpus train_corpus = subcorpus(corpus, train_idx);
  const Corpus test_corpus = subcorpus(corpus, test_idx);
  CorpusMixtures train_mix, test_mix;
  if (kind == ModelKind::Unidimensional) {
    train_mix = single_topic_mixtures(train_corpus);
    test_mix = single_topic_mixtures(test_corpus);
  } else {
    const TopicModel model = fit_lda(
        corpus_documents(train_corpus),
        static_cast<int>(corpus.vocabulary.size()), lda_cfg,
        derive_seed(seed, kStreamFoldLda, static_cast<uint64_t>(fold)));
    train_mix = mixtures_from_model(train_corpus, model);
    test_mix = infer_corpus_mixtures(
        test_corpus, model, lda_cfg.infer_iters, lda_cfg.infer_burn_in,
        derive_seed(seed, kStreamFoldInfer, static_cast<uint64_t>(fold)));
  }

  SamplerConfig fold_cfg = sampler_cfg;
  fold_cfg.seed = derive_seed(seed, kStreamFoldFit, static_cast<uint64_t>(fold));

  FoldOutcome out;
  out.fit = fit(train_corpus, train_mix, kind, hyper, fold_cfg);
  for (int i : test_idx) out.test_ids.push_back(corpus.cases[i].id);

  const int dims = static_cast<int>(train_mix.begin()->second.theta.size());
  const auto train_views = build_case_views(train_corpus, train_mix, dims);

  // One classifier per justice, trained on that justice's training votes.
  std::vector<JusticeClassifier> classifiers(corpus.justices.size());
  {
    std::vector<std::vector<double>> case_features;
    case_features.reserve(train_views.size());
    for (const CaseView& view : train_views) {
      case_features.push_back(logreg_features(view));
    }
    for (std::size_t j = 0; j < corpus.justices.size(); ++j) {
      std::vector<std::vector<double>> x;
      std::vector<Side> y;
      for (std::size_t i = 0; i < train_views.size(); ++i) {
        for (const auto& [idx, side] : train_views[i].votes) {
          if (idx == static_cast<int>(j)) {
            x.push_back(case_features[i]);
            y.push_back(side);
          }
        }
      }
      const double lambda1 = tune_lambda1(x, y, 200);
      classifiers[j] = l1_logreg(x, y, lambda1, 200);
    }
  }

  const auto test_views = build_case_views(test_corpus, test_mix, dims);
  std::vector<double> model_acc(test_views.size(), 0.0);
  std::vector<double> unanimous_acc(test_views.size(), 0.0);
  std::vector<double> logreg_acc(test_views.size(), 0.0);
  std::vector<char> usable(test_views.size(), 0);
  parallel_for(test_views.size(), [&](std::size_t t) {
    const CaseView& view = test_views[t];
    const Case& kase = *view.kase;
    if (kase.votes.size() < 2) return;
    usable[t] = 1;

    std::vector<std::string> participants;
    for (const auto& [id, side] : kase.votes) {
      (void)side;
      participants.push_back(id);
    }
    std::vector<std::pair<Side, std::vector<double>>> briefs;
    for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
      briefs.push_back({kase.briefs[k].side, view.brief_mixtures[k]});
    }
    const uint64_t pseed =
        derive_seed(seed, kStreamFoldPredict,
                    (static_cast<uint64_t>(fold) << 16) | t);
    const Prediction pred =
        predict_votes(out.fit, participants, view.theta, view.delta_p_ptr(),
                      view.delta_r_ptr(), briefs, kind, num_samples, pseed);
    model_acc[t] = pairwise_partition_accuracy(pred.partition, kase.votes);
    unanimous_acc[t] = pairwise_partition_accuracy(
        unanimous_baseline(kase).partition, kase.votes);

    const std::vector<double> feats = logreg_features(view);
    std::map<std::string, Side> lr_partition;
    for (const std::string& id : participants) {
      lr_partition[id] = classify(classifiers[corpus.justice_index(id)], feats);
    }
    logreg_acc[t] = pairwise_partition_accuracy(lr_partition, kase.votes);
  });

  int used = 0;
  for (std::size_t t = 0; t < test_views.size(); ++t) {
    if (!usable[t]) continue;
    out.model_accuracy += model_acc[t];
    out.unanimous_accuracy += unanimous_acc[t];
    out.logreg_accuracy += logreg_acc[t];
    ++used;
  }
  if (used == 0) throw ValidationError("fold has no cases with two votes");
  out.model_accuracy /= used;
  out.unanimous_accuracy /= used;
  out.logreg_accuracy /= used;
  return out;
}

CvReport cross_validate(const Corpus& corpus, ModelKind kind,
                        const Hyperparams& hyper,
                        const SamplerConfig& sampler_cfg,
                        const LdaConfig& lda_cfg, int folds, uint64_t seed,
                        int num_samples) {
  const std::vector<int> assignment =
      fold_assignment(static_cast<int>(corpus.cases.size()), folds, seed);
  CvReport report;
  report.kind = kind;
  report.folds = folds;
  report.model.name = to_string(kind);
  report.unanimous.name = "unanimous";
  report.logreg.name = "logreg";
  for (int f = 0; f < folds; ++f) {
    const FoldOutcome outcome = run_fold(corpus, assignment, f, kind, hyper,
                                         sampler_cfg, lda_cfg, num_samples,
                                         seed);
    report.model.fold_accuracy.push_back(outcome.model_accuracy);
    report.unanimous.fold_accuracy.push_back(outcome.unanimous_accuracy);
    report.logreg.fold_accuracy.push_back(outcome.logreg_accuracy);
  }
  finish_series(report.model);
  finish_series(report.unanimous);
  finish_series(report.logreg);
  return report;
}

void save_cv_csv(const CvReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write cv file " + path);
  out << "fold,model,accuracy\n";
  char buf[64];
  const auto row = [&](int fold, const CvSeries& series) {
    std::snprintf(buf, sizeof(buf), "%.17g", series.fold_accuracy[fold]);
    out << fold << ',' << series.name << ',' << buf << '\n';
  };
  for (int f = 0; f < report.folds; ++f) {
    row(f, report.model);
    row(f, report.unanimous);
    row(f, report.logreg);
  }
  if (!out) throw ValidationError("failed writing cv file " + path);
}

void save_cv_summary(const CvReport& report, const std::string& path) {
  nlohmann::json root;
  root["folds"] = report.folds;
  root["kind"] = to_string(report.kind);
  for (const CvSeries* series :
       {&report.model, &report.unanimous, &report.logreg}) {
    root["series"][series->name] = {{"fold_accuracy", series->fold_accuracy},
                                    {"mean", series->mean},
                                    {"stdev", series->stdev}};
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write cv summary " + path);
  out << root.dump() << '\n';
  if (!out) throw ValidationError("failed writing cv summary " + path);
}

}  // namespace amicus
