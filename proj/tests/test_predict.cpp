#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/errors.hpp"
#include "amicus/ipmodel.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/predict.hpp"
#include "amicus/rng.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace amicus;
namespace tu = amicus::testutil;

namespace {

std::map<std::string, Side> make_partition(const std::vector<Side>& sides) {
  std::map<std::string, Side> out;
  for (std::size_t j = 0; j < sides.size(); ++j) {
    out["j" + std::to_string(j + 1)] = sides[j];
  }
  return out;
}

std::map<std::string, Side> flip(const std::map<std::string, Side>& partition) {
  std::map<std::string, Side> out;
  for (const auto& [id, side] : partition) out[id] = opposite(side);
  return out;
}

// Contingency-table recount of agreeing pairs, written independently of the
// production pair loop.
double oracle_accuracy(const std::map<std::string, Side>& pred,
                       const std::map<std::string, Side>& actual) {
  long long n_pp = 0, n_pr = 0, n_rp = 0, n_rr = 0;
  for (const auto& [id, side] : pred) {
    const bool pet_pred = side == Side::Petitioner;
    const bool pet_act = actual.at(id) == Side::Petitioner;
    if (pet_pred && pet_act) ++n_pp;
    if (pet_pred && !pet_act) ++n_pr;
    if (!pet_pred && pet_act) ++n_rp;
    if (!pet_pred && !pet_act) ++n_rr;
  }
  const auto choose2 = [](long long n) { return n * (n - 1) / 2; };
  const long long agree = choose2(n_pp) + choose2(n_pr) + choose2(n_rp) +
                          choose2(n_rr) + n_pp * n_rr + n_pr * n_rp;
  const long long n = n_pp + n_pr + n_rp + n_rr;
  return static_cast<double>(agree) / static_cast<double>(choose2(n));
}

FitResult hand_fit(const std::vector<IdealPoint>& psi, double sigma_kappa,
                   double xi = 1.0) {
  FitResult fit;
  fit.kind = ModelKind::Amici;
  fit.hyper.sigma_kappa = sigma_kappa;
  fit.hyper.xi = xi;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    fit.justice_ids.push_back("j" + std::to_string(j + 1));
  }
  fit.psi_hat = psi;
  fit.case_ids = {"c"};
  fit.kappa_hat = {CaseParams{}};
  fit.rho_hat = 0.5;
  return fit;
}

int canonical_config(const std::map<std::string, Side>& partition) {
  int c = 0;
  int j = 0;
  for (const auto& [id, side] : partition) {
    (void)id;
    if (side == Side::Respondent) c |= 1 << j;
    ++j;
  }
  const int mask = (1 << j) - 1;
  return std::min(c, ~c & mask);
}

}  // namespace

TEST_CASE("pairwise partition accuracy fixed values") {
  const auto unanimous = make_partition(std::vector<Side>(9, Side::Petitioner));
  CHECK(pairwise_partition_accuracy(unanimous, unanimous) == 1.0);
  CHECK(pairwise_partition_accuracy(flip(unanimous), unanimous) == 1.0);

  auto eight_one = unanimous;
  eight_one["j5"] = Side::Respondent;
  CHECK(pairwise_partition_accuracy(unanimous, eight_one) ==
        doctest::Approx(28.0 / 36.0).epsilon(1e-15));

  auto five_four = unanimous;
  five_four["j1"] = five_four["j2"] = five_four["j3"] = five_four["j4"] =
      Side::Respondent;
  CHECK(pairwise_partition_accuracy(unanimous, five_four) ==
        doctest::Approx(16.0 / 36.0).epsilon(1e-15));

  auto other = unanimous;
  other.erase("j9");
  other["x"] = Side::Petitioner;
  CHECK_THROWS_AS(pairwise_partition_accuracy(unanimous, other),
                  ValidationError);
  const auto single = make_partition({Side::Petitioner});
  CHECK_THROWS_AS(pairwise_partition_accuracy(single, single), ValidationError);
}

TEST_CASE("pairwise partition accuracy matches the pair-count oracle") {
  for (int p = 0; p < 32; ++p) {
    std::vector<Side> pred(5);
    for (int j = 0; j < 5; ++j) {
      pred[j] = (p >> j) & 1 ? Side::Respondent : Side::Petitioner;
    }
    for (int a = 0; a < 32; ++a) {
      std::vector<Side> actual(5);
      for (int j = 0; j < 5; ++j) {
        actual[j] = (a >> j) & 1 ? Side::Respondent : Side::Petitioner;
      }
      const auto pm = make_partition(pred);
      const auto am = make_partition(actual);
      const double got = pairwise_partition_accuracy(pm, am);
      CHECK(got == doctest::Approx(oracle_accuracy(pm, am)).epsilon(1e-15));
      CHECK(pairwise_partition_accuracy(flip(pm), am) == got);
      CHECK(pairwise_partition_accuracy(pm, flip(am)) == got);
      CHECK(pairwise_partition_accuracy(flip(pm), flip(am)) == got);
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
  }
}

TEST_CASE("zero ideal points give exchangeable predictions") {
  const FitResult fit = hand_fit({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, 4.0);
  const std::vector<double> theta = {0.6, 0.4};
  const Prediction pred = predict_votes(fit, fit.justice_ids, theta, nullptr,
                                        nullptr, {}, ModelKind::Amici, 256, 5);
  const double first = pred.marginals.at("j1");
  for (const auto& [id, m] : pred.marginals) {
    (void)id;
    CHECK(m == first);
  }
  const Side lead = pred.partition.at("j1");
  for (const auto& [id, side] : pred.partition) {
    (void)id;
    CHECK(side == lead);
  }
}

TEST_CASE("a vanishing prior variance hits the petitioner tie rule") {
  // sd = 1e-100 keeps every logit far below the rounding threshold of
  // exp(-x) at 1.0, so each vote probability is exactly one half and all
  // configurations tie.
  const FitResult fit =
      hand_fit({{0.9, -0.2}, {-0.4, 0.8}, {0.1, 0.3}}, 1e-200);
  const std::vector<double> theta = {0.5, 0.5};
  const Prediction pred = predict_votes(fit, fit.justice_ids, theta, nullptr,
                                        nullptr, {}, ModelKind::Amici, 1, 9);
  CHECK(pred.num_kappa_samples == 1);
  for (const auto& [id, m] : pred.marginals) {
    (void)id;
    CHECK(m == 0.5);
  }
  for (const auto& [id, side] : pred.partition) {
    (void)id;
    CHECK(side == Side::Petitioner);
  }
}

TEST_CASE("monte carlo argmax agrees with dense quadrature") {
  const FitResult fit =
      hand_fit({{1.2, -0.4}, {-0.8, 0.6}, {0.3, 0.9}}, 4.0);
  const std::vector<double> theta = {0.7, 0.3};
  const std::vector<double> delta_p = {0.9, 0.1};
  const std::vector<double> delta_r = {0.2, 0.8};
  const Prediction pred =
      predict_votes(fit, fit.justice_ids, theta, &delta_p, &delta_r, {},
                    ModelKind::Amici, 512, 17);

  // Midpoint quadrature over kappa on a 50^4 grid spanning +-4 sd.
  const int n = 50;
  const double sd = 2.0;
  std::vector<double> nodes(n), pdf(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = -4.0 * sd + (k + 0.5) * (8.0 * sd / n);
    pdf[k] = std::exp(-0.5 * nodes[k] * nodes[k] / (sd * sd));
  }
  const double t1 = dot(fit.psi_hat[0], theta);
  const double t2 = dot(fit.psi_hat[1], theta);
  const double t3 = dot(fit.psi_hat[2], theta);
  const double p1 = dot(fit.psi_hat[0], delta_p);
  const double p2 = dot(fit.psi_hat[1], delta_p);
  const double p3 = dot(fit.psi_hat[2], delta_p);
  const double r1 = dot(fit.psi_hat[0], delta_r);
  const double r2 = dot(fit.psi_hat[1], delta_r);
  const double r3 = dot(fit.psi_hat[2], delta_r);
  std::vector<double> score(8, 0.0);
  std::vector<double> marg(3, 0.0);
  double mass = 0.0;
  for (int ia = 0; ia < n; ++ia) {
    for (int ib = 0; ib < n; ++ib) {
      for (int ic = 0; ic < n; ++ic) {
        for (int id = 0; id < n; ++id) {
          const double w = pdf[ia] * pdf[ib] * pdf[ic] * pdf[id];
          const double a = nodes[ia], b = nodes[ib];
          const double cp = nodes[ic], cr = nodes[id];
          const double q1 = sigmoid(a + b * t1 + cp * p1 + cr * r1);
          const double q2 = sigmoid(a + b * t2 + cp * p2 + cr * r2);
          const double q3 = sigmoid(a + b * t3 + cp * p3 + cr * r3);
          const double q[3] = {q1, q2, q3};
          for (int c = 0; c < 8; ++c) {
            double prob = w;
            for (int j = 0; j < 3; ++j) {
              prob *= (c >> j) & 1 ? 1.0 - q[j] : q[j];
            }
            score[c] += prob;
          }
          marg[0] += w * q1;
          marg[1] += w * q2;
          marg[2] += w * q3;
          mass += w;
        }
      }
    }
  }
  int best = 0;
  for (int c = 1; c < 8; ++c) {
    if (score[c] > score[best]) best = c;
  }
  const int canon_quad = std::min(best, ~best & 7);
  CHECK(canonical_config(pred.partition) == canon_quad);
  CHECK(std::fabs(pred.marginals.at("j1") - marg[0] / mass) < 0.1);
  CHECK(std::fabs(pred.marginals.at("j2") - marg[1] / mass) < 0.1);
  CHECK(std::fabs(pred.marginals.at("j3") - marg[2] / mass) < 0.1);
}

TEST_CASE("random-utility prediction without briefs equals the amici one") {
  const FitResult fit =
      hand_fit({{1.0, -0.5}, {-0.3, 0.7}, {0.2, 0.2}}, 4.0);
  const std::vector<double> theta = {0.4, 0.6};
  const std::vector<double> delta_p = {0.8, 0.2};
  const Prediction am =
      predict_votes(fit, fit.justice_ids, theta, &delta_p, nullptr, {},
                    ModelKind::Amici, 128, 23);
  const Prediction ru =
      predict_votes(fit, fit.justice_ids, theta, &delta_p, nullptr, {},
                    ModelKind::RandomUtility, 128, 23);
  CHECK(am.marginals == ru.marginals);
  CHECK(am.partition == ru.partition);
  CHECK(!ru.used_uniform_weights);
}

TEST_CASE("prediction is deterministic and marginals stay in range") {
  const FitResult fit =
      hand_fit({{1.0, -0.5}, {-0.3, 0.7}, {0.2, 0.2}}, 4.0);
  const std::vector<double> theta = {0.4, 0.6};
  const std::vector<std::pair<Side, std::vector<double>>> briefs = {
      {Side::Petitioner, {0.9, 0.1}}, {Side::Respondent, {0.3, 0.7}}};
  const std::vector<double> delta_p = {0.9, 0.1};
  const std::vector<double> delta_r = {0.3, 0.7};
  const Prediction a =
      predict_votes(fit, fit.justice_ids, theta, &delta_p, &delta_r, briefs,
                    ModelKind::RandomUtility, 64, 31);
  const Prediction b =
      predict_votes(fit, fit.justice_ids, theta, &delta_p, &delta_r, briefs,
                    ModelKind::RandomUtility, 64, 31);
  CHECK(a.marginals == b.marginals);
  CHECK(a.partition == b.partition);

  for (int samples : {1, 16, 1024}) {
    const Prediction p =
        predict_votes(fit, fit.justice_ids, theta, &delta_p, &delta_r, briefs,
                      ModelKind::RandomUtility, samples, 7);
    for (const auto& [id, m] : p.marginals) {
      (void)id;
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
    }
  }
}

TEST_CASE("all-zero utility weights fall back to uniform with a flag") {
  // Both justices share a saturating ideal point and the quadratic cost term
  // is exactly xi * (1 - 1/2 * 2) = 0, so each brief factor on the losing
  // side is about exp(-700). Two briefs per side make the losing pair's
  // product underflow to exactly zero for either sign of the sampled slope.
  const FitResult fit = hand_fit({{1e12, 0.0}, {1e12, 0.0}}, 4.0);
  const std::vector<double> theta = {1.0, 0.0};
  const std::vector<std::pair<Side, std::vector<double>>> briefs = {
      {Side::Petitioner, {0.0, 1.0}},
      {Side::Petitioner, {0.0, 1.0}},
      {Side::Respondent, {0.0, 1.0}},
      {Side::Respondent, {0.0, 1.0}}};
  const Prediction pred =
      predict_votes(fit, fit.justice_ids, theta, nullptr, nullptr, briefs,
                    ModelKind::RandomUtility, 512, 3);
  CHECK(pred.used_uniform_weights);
  for (const auto& [id, m] : pred.marginals) {
    (void)id;
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

TEST_CASE("predict_votes validates its inputs") {
  const FitResult fit = hand_fit({{0.1, 0.2}, {0.3, 0.4}}, 4.0);
  const std::vector<double> theta = {0.5, 0.5};
  CHECK_THROWS_AS(predict_votes(fit, fit.justice_ids, theta, nullptr, nullptr,
                                {}, ModelKind::Amici, 0, 1),
                  ValidationError);
  CHECK_THROWS_AS(predict_votes(fit, {"nope"}, theta, nullptr, nullptr, {},
                                ModelKind::Amici, 8, 1),
                  ValidationError);
  const std::vector<double> bad = {1.0};
  CHECK_THROWS_AS(predict_votes(fit, fit.justice_ids, bad, nullptr, nullptr,
                                {}, ModelKind::Amici, 8, 1),
                  ValidationError);
  CHECK_THROWS_AS(predict_votes(fit, fit.justice_ids, theta, &bad, nullptr, {},
                                ModelKind::Amici, 8, 1),
                  ValidationError);
  CHECK_THROWS_AS(
      predict_votes(fit, fit.justice_ids, theta, nullptr, nullptr,
                    {{Side::Petitioner, bad}}, ModelKind::RandomUtility, 8, 1),
      ValidationError);
}

TEST_CASE("unanimous baseline puts every voter on one side") {
  Case kase;
  kase.id = "c";
  kase.votes = {{"j1", Side::Respondent},
                {"j2", Side::Petitioner},
                {"j3", Side::Respondent}};
  const Prediction pred = unanimous_baseline(kase);
  REQUIRE(pred.partition.size() == 3);
  for (const auto& [id, side] : pred.partition) {
    (void)id;
    CHECK(side == Side::Petitioner);
  }
  auto unanimous_actual = kase.votes;
  for (auto& [id, side] : unanimous_actual) {
    (void)id;
    side = Side::Respondent;
  }
  CHECK(pairwise_partition_accuracy(pred.partition, unanimous_actual) == 1.0);
}

TEST_CASE("l1 logistic regression separates a separable fixture") {
  std::vector<std::vector<double>> x;
  std::vector<Side> y;
  Rng rng(7);
  for (int i = 0; i < 40; ++i) {
    const double pet = i % 2 == 0;
    const double u = rng.uniform();
    x.push_back({pet ? 1.0 + u : -1.0 - u, rng.uniform()});
    y.push_back(pet ? Side::Petitioner : Side::Respondent);
  }
  const JusticeClassifier clf = l1_logreg(x, y, 0.01, 2000);
  CHECK(!clf.majority_only);
  int hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (classify(clf, x[i]) == y[i]) ++hits;
  }
  CHECK(hits == static_cast<int>(x.size()));

  for (std::size_t t = 1; t < clf.objective_trace.size(); ++t) {
    CHECK(clf.objective_trace[t] <= clf.objective_trace[t - 1] + 1e-12);
  }
}

TEST_CASE("a huge l1 penalty collapses to the majority-class intercept") {
  std::vector<std::vector<double>> x;
  std::vector<Side> y;
  for (int i = 0; i < 30; ++i) {
    x.push_back({static_cast<double>(i % 3), 1.0 - i % 2});
    y.push_back(i < 20 ? Side::Petitioner : Side::Respondent);
  }
  const JusticeClassifier clf = l1_logreg(x, y, 1e6, 3000);
  for (double w : clf.weights) CHECK(w == 0.0);
  CHECK(clf.intercept > 0.0);
  CHECK(classify(clf, {2.0, 0.0}) == Side::Petitioner);

  std::vector<Side> all_resp(30, Side::Respondent);
  const JusticeClassifier fallback = l1_logreg(x, all_resp, 1.0, 100);
  CHECK(fallback.majority_only);
  CHECK(fallback.majority == Side::Respondent);
  CHECK(classify(fallback, {0.0, 0.0}) == Side::Respondent);
}

TEST_CASE("fold assignment deals shuffled cases round-robin") {
  const std::vector<int> assignment = fold_assignment(23, 5, 99);
  REQUIRE(assignment.size() == 23);
  std::vector<int> counts(5, 0);
  for (int f : assignment) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++counts[f];
  }
  for (int c : counts) {
    CHECK(c >= 23 / 5);
    CHECK(c <= 23 / 5 + 1);
  }
  CHECK(fold_assignment(23, 5, 99) == assignment);
  CHECK(fold_assignment(23, 5, 100) != assignment);
  CHECK_THROWS_AS(fold_assignment(10, 1, 1), ValidationError);
  CHECK_THROWS_AS(fold_assignment(3, 5, 1), ValidationError);
  // Leave-one-out is legal folding.
  const std::vector<int> loo = fold_assignment(10, 10, 4);
  std::set<int> seen(loo.begin(), loo.end());
  CHECK(seen.size() == 10);
}

TEST_CASE("training never sees the test fold") {
  SynthConfig scfg;
  scfg.num_cases = 20;
  scfg.num_topics = 2;
  scfg.vocab_size = 30;
  scfg.tokens_per_doc = 40;
  scfg.briefs_per_case_range = {0, 2};
  auto [corpus, truth] = generate_synthetic(scfg, 51);
  (void)truth;

  const std::vector<int> assignment = fold_assignment(20, 5, 13);
  Corpus poisoned = corpus;
  for (std::size_t i = 0; i < poisoned.cases.size(); ++i) {
    if (assignment[i] != 2) continue;
    for (auto& [id, side] : poisoned.cases[i].votes) {
      (void)id;
      side = opposite(side);
    }
  }

  SamplerConfig cfg;
  cfg.gibbs_iters = 8;
  cfg.mh_steps_per_block = 30;
  cfg.mh_burn_in = 15;
  cfg.mh_thin = 3;
  LdaConfig lda;
  lda.num_topics = 2;
  lda.num_iters = 40;
  lda.burn_in = 20;
  lda.infer_iters = 30;
  lda.infer_burn_in = 15;

  const FoldOutcome clean = run_fold(corpus, assignment, 2, ModelKind::Amici,
                                     Hyperparams{}, cfg, lda, 64, 77);
  const FoldOutcome dirty = run_fold(poisoned, assignment, 2, ModelKind::Amici,
                                     Hyperparams{}, cfg, lda, 64, 77);
  CHECK(clean.fit.psi_hat == dirty.fit.psi_hat);
  CHECK(clean.fit.rho_hat == dirty.fit.rho_hat);
  CHECK(clean.fit.log_post_trace == dirty.fit.log_post_trace);
  REQUIRE(clean.fit.kappa_hat.size() == dirty.fit.kappa_hat.size());
  for (std::size_t i = 0; i < clean.fit.kappa_hat.size(); ++i) {
    CHECK(clean.fit.kappa_hat[i].a == dirty.fit.kappa_hat[i].a);
    CHECK(clean.fit.kappa_hat[i].b == dirty.fit.kappa_hat[i].b);
    CHECK(clean.fit.kappa_hat[i].c_p == dirty.fit.kappa_hat[i].c_p);
    CHECK(clean.fit.kappa_hat[i].c_r == dirty.fit.kappa_hat[i].c_r);
  }
  // Flipping every test vote flips each case's partition accuracy to its
  // complement in expectation; the unanimity baseline is flip-invariant.
  CHECK(clean.unanimous_accuracy == dirty.unanimous_accuracy);
}

TEST_CASE("cross validation is deterministic and well formed") {
  SynthConfig scfg;
  scfg.num_cases = 15;
  scfg.num_topics = 2;
  scfg.vocab_size = 30;
  scfg.tokens_per_doc = 40;
  scfg.briefs_per_case_range = {0, 2};
  const auto [corpus, truth] = generate_synthetic(scfg, 61);
  (void)truth;

  SamplerConfig cfg;
  cfg.gibbs_iters = 6;
  cfg.mh_steps_per_block = 30;
  cfg.mh_burn_in = 15;
  cfg.mh_thin = 3;
  LdaConfig lda;
  lda.num_topics = 2;
  lda.num_iters = 30;
  lda.burn_in = 15;
  lda.infer_iters = 20;
  lda.infer_burn_in = 10;

  const CvReport a = cross_validate(corpus, ModelKind::Amici, Hyperparams{},
                                    cfg, lda, 5, 101, 32);
  const CvReport b = cross_validate(corpus, ModelKind::Amici, Hyperparams{},
                                    cfg, lda, 5, 101, 32);
  CHECK(a.model.fold_accuracy == b.model.fold_accuracy);
  CHECK(a.unanimous.fold_accuracy == b.unanimous.fold_accuracy);
  CHECK(a.logreg.fold_accuracy == b.logreg.fold_accuracy);

  REQUIRE(a.model.fold_accuracy.size() == 5);
  for (const CvSeries* series : {&a.model, &a.unanimous, &a.logreg}) {
    for (double acc : series->fold_accuracy) {
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
    }
    CHECK(series->mean >= 0.0);
    CHECK(series->mean <= 1.0);
    CHECK(series->stdev >= 0.0);
  }
  CHECK(a.model.name == "amici");
  CHECK(a.folds == 5);
}

TEST_CASE("leave-one-out folding runs end to end") {
  SynthConfig scfg;
  scfg.num_cases = 10;
  scfg.num_topics = 2;
  scfg.vocab_size = 20;
  scfg.tokens_per_doc = 20;
  scfg.briefs_per_case_range = {0, 1};
  const auto [corpus, truth] = generate_synthetic(scfg, 71);
  (void)truth;

  SamplerConfig cfg;
  cfg.gibbs_iters = 4;
  cfg.mh_steps_per_block = 20;
  cfg.mh_burn_in = 10;
  cfg.mh_thin = 2;
  const CvReport report =
      cross_validate(corpus, ModelKind::Unidimensional, Hyperparams{}, cfg,
                     LdaConfig{}, 10, 111, 16);
  CHECK(report.model.fold_accuracy.size() == 10);
  for (double acc : report.model.fold_accuracy) {
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
}

TEST_CASE("cv reports serialize to csv and json") {
  CvReport report;
  report.kind = ModelKind::RandomUtility;
  report.folds = 2;
  report.model = {"random_utility", {0.75, 0.5}, 0.625, 0.176776695296636893};
  report.unanimous = {"unanimous", {0.5, 0.5}, 0.5, 0.0};
  report.logreg = {"logreg", {0.25, 0.75}, 0.5, 0.353553390593273786};

  const std::string csv_path = tu::tmp_path("cv.csv");
  save_cv_csv(report, csv_path);
  const std::string csv = tu::read_file(csv_path);
  CHECK(csv ==
        "fold,model,accuracy\n"
        "0,random_utility,0.75\n"
        "0,unanimous,0.5\n"
        "0,logreg,0.25\n"
        "1,random_utility,0.5\n"
        "1,unanimous,0.5\n"
        "1,logreg,0.75\n");

  const std::string json_path = tu::tmp_path("cv.json");
  save_cv_summary(report, json_path);
  const std::string json = tu::read_file(json_path);
  CHECK(json.find("\"folds\":2") != std::string::npos);
  CHECK(json.find("\"random_utility\"") != std::string::npos);
  CHECK(json.find("\"mean\":0.625") != std::string::npos);
}
