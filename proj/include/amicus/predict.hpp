#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/mixtures.hpp"
#include "amicus/params.hpp"
#include "amicus/sampler.hpp"
#include "amicus/topics.hpp"

namespace amicus {

struct Prediction {
  std::map<std::string, double> marginals;  // P(justice votes petitioner)
  std::map<std::string, Side> partition;    // jointly most likely configuration
  int num_kappa_samples = 0;
  // Set when every sampled utility weight was zero and the mixture fell back
  // to uniform weights.
  bool used_uniform_weights = false;
};

// Monte Carlo over case parameters with exact enumeration of the vote
// configurations of the participating justices. kappa samples are drawn from
// N(0, diag(sigma_kappa)); for RandomUtility each sample is weighted by the
// product of its briefs' utility factors, other kinds weight uniformly.
// Configuration ties resolve to the all-petitioner end of the index order.
Prediction predict_votes(
    const FitResult& fit, const std::vector<std::string>& justices,
    const std::vector<double>& theta, const std::vector<double>* delta_p,
    const std::vector<double>* delta_r,
    const std::vector<std::pair<Side, std::vector<double>>>& briefs,
    ModelKind kind, int num_samples, uint64_t seed);

// Fraction of unordered justice pairs whose same-side indicator agrees.
// Invariant under globally flipping either argument.
double pairwise_partition_accuracy(const std::map<std::string, Side>& pred,
                                   const std::map<std::string, Side>& actual);

// Everyone on the petitioner side; marginals carry no side information.
Prediction unanimous_baseline(const Case& kase);

struct JusticeClassifier {
  std::vector<double> weights;
  double intercept = 0.0;
  bool converged = false;
  // Single-class training data: skip optimization, always answer `majority`.
  bool majority_only = false;
  Side majority = Side::Petitioner;
  std::vector<double> objective_trace;
};

// L1-penalized logistic regression by proximal gradient descent with an
// unpenalized intercept. Labels are per-case sides; petitioner is the
// positive class. The objective trace decreases monotonically.
JusticeClassifier l1_logreg(const std::vector<std::vector<double>>& features,
                            const std::vector<Side>& labels, double lambda1,
                            int max_iters);

double classifier_prob(const JusticeClassifier& clf,
                       const std::vector<double>& features);
Side classify(const JusticeClassifier& clf,
              const std::vector<double>& features);

// theta then petitioner then respondent side means, zeros for absent sides.
std::vector<double> logreg_features(const CaseView& view);

// Shuffle case indices by seed, deal them round-robin into folds.
std::vector<int> fold_assignment(int num_cases, int folds, uint64_t seed);

struct CvSeries {
  std::string name;
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double stdev = 0.0;
};

struct CvReport {
  ModelKind kind = ModelKind::Unidimensional;
  int folds = 0;
  CvSeries model;
  CvSeries unanimous;
  CvSeries logreg;
};

struct FoldOutcome {
  FitResult fit;
  std::vector<std::string> test_ids;
  double model_accuracy = 0.0;
  double unanimous_accuracy = 0.0;
  double logreg_accuracy = 0.0;
};

// One cross-validation fold: stage one (LDA) and stage two are trained on
// the training cases only; test mixtures come from fold-in against the
// frozen topics. Unidimensional runs skip LDA and use single-topic mixtures.
FoldOutcome run_fold(const Corpus& corpus, const std::vector<int>& assignment,
                     int fold, ModelKind kind, const Hyperparams& hyper,
                     const SamplerConfig& sampler_cfg, const LdaConfig& lda_cfg,
                     int num_samples, uint64_t seed);

// Per-case pairwise accuracy averaged within folds; mean and stdev taken
// across folds. Both baselines run on the identical fold split.
CvReport cross_validate(const Corpus& corpus, ModelKind kind,
                        const Hyperparams& hyper,
                        const SamplerConfig& sampler_cfg,
                        const LdaConfig& lda_cfg, int folds, uint64_t seed,
                        int num_samples = 512);

// CSV rows fold,model,accuracy; summary JSON keyed by series name.
void save_cv_csv(const CvReport& report, const std::string& path);
void save_cv_summary(const CvReport& report, const std::string& path);

}  // namespace amicus
