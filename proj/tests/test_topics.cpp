#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/errors.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/parallel.hpp"
#include "amicus/topics.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace amicus;
namespace tu = amicus::testutil;

namespace {

Document make_doc(std::initializer_list<std::pair<int32_t, int64_t>> counts) {
  Document doc;
  for (const auto& [id, count] : counts) doc.add(id, count);
  doc.finalize();
  return doc;
}

// Greedy pairing of recovered rows to true rows by total variation,
// smallest distance first, ties broken toward lower indices.
std::vector<int> align_topics(const std::vector<std::vector<double>>& truth,
                              const std::vector<std::vector<double>>& fitted) {
  const int n = static_cast<int>(truth.size());
  std::vector<int> match(n, -1);
  std::set<int> used_true, used_fit;
  for (int round = 0; round < n; ++round) {
    double best = 1e300;
    int best_t = -1, best_f = -1;
    for (int t = 0; t < n; ++t) {
      if (used_true.count(t)) continue;
      for (int f = 0; f < n; ++f) {
        if (used_fit.count(f)) continue;
        const double tv = total_variation(truth[t], fitted[f]);
        if (tv < best) {
          best = tv;
          best_t = t;
          best_f = f;
        }
      }
    }
    match[best_t] = best_f;
    used_true.insert(best_t);
    used_fit.insert(best_f);
  }
  return match;
}

}  // namespace

TEST_CASE("one-topic fit degenerates to the smoothed unigram distribution") {
  const Document doc = make_doc({{0, 3}, {2, 1}});
  LdaConfig cfg;
  cfg.num_topics = 1;
  cfg.beta = 0.5;
  cfg.num_iters = 20;
  cfg.burn_in = 10;
  cfg.thin = 2;
  const TopicModel model = fit_lda({{"d", doc}}, 4, cfg, 3);

  REQUIRE(model.phi.size() == 1);
  REQUIRE(model.doc_mixtures.at("d").size() == 1);
  CHECK(model.doc_mixtures.at("d")[0] == doctest::Approx(1.0).epsilon(1e-12));
  const double denom = 4.0 + 4 * 0.5;
  const std::vector<double> want = {3.5 / denom, 0.5 / denom, 1.5 / denom,
                                    0.5 / denom};
  for (int v = 0; v < 4; ++v) {
    CHECK(model.phi[0][v] == doctest::Approx(want[v]).epsilon(1e-12));
  }
}

TEST_CASE("fit_lda validates documents and topic counts") {
  Document empty;
  empty.finalize();
  LdaConfig cfg;
  cfg.num_topics = 2;
  cfg.num_iters = 10;
  cfg.burn_in = 5;
  CHECK_THROWS_WITH_AS(fit_lda({{"d", empty}}, 4, cfg, 1),
                       doctest::Contains("zero tokens"), ValidationError);

  const Document two = make_doc({{0, 5}, {1, 5}});
  cfg.num_topics = 3;
  CHECK_THROWS_WITH_AS(fit_lda({{"d", two}}, 4, cfg, 1),
                       doctest::Contains("distinct token"), ValidationError);

  cfg.num_topics = 2;
  CHECK_THROWS_AS(fit_lda({}, 4, cfg, 1), ValidationError);
  CHECK_THROWS_AS(fit_lda({{"d", two}, {"d", two}}, 4, cfg, 1),
                  ValidationError);
}

TEST_CASE("fit_lda is deterministic under a fixed seed") {
  SynthConfig scfg;
  scfg.num_cases = 8;
  scfg.num_topics = 3;
  scfg.vocab_size = 30;
  scfg.tokens_per_doc = 50;
  scfg.beta = 0.1;
  scfg.briefs_per_case_range = {0, 2};
  const auto [corpus, truth] = generate_synthetic(scfg, 2);
  (void)truth;

  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.num_iters = 60;
  cfg.burn_in = 30;
  const auto docs = corpus_documents(corpus);
  const TopicModel a = fit_lda(docs, scfg.vocab_size, cfg, 5);
  const TopicModel b = fit_lda(docs, scfg.vocab_size, cfg, 5);
  CHECK(a.phi == b.phi);
  CHECK(a.doc_mixtures == b.doc_mixtures);
}

TEST_CASE("fit_lda recovers planted topics") {
  SynthConfig scfg;
  scfg.num_cases = 100;
  scfg.num_topics = 3;
  scfg.vocab_size = 50;
  scfg.tokens_per_doc = 300;
  scfg.briefs_per_case_range = {1, 1};
  const auto [corpus, truth] = generate_synthetic(scfg, 13);

  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.alpha = 0.1;
  cfg.beta = 0.001;
  cfg.num_iters = 400;
  cfg.burn_in = 200;
  cfg.thin = 10;
  const TopicModel model =
      fit_lda(corpus_documents(corpus), scfg.vocab_size, cfg, 17);

  const auto match = align_topics(truth.phi, model.phi);
  for (int t = 0; t < 3; ++t) {
    CHECK(total_variation(truth.phi[t], model.phi[match[t]]) <= 0.2);
  }
}

TEST_CASE("infer_mixture concentrates on the only supported topic") {
  TopicModel model;
  model.num_topics = 3;
  model.alpha = 0.1;
  model.beta = 0.001;
  model.phi = {{0.5, 0.5, 0.0, 0.0, 0.0, 0.0},
               {0.0, 0.0, 0.5, 0.5, 0.0, 0.0},
               {0.0, 0.0, 0.0, 0.0, 0.5, 0.5}};
  const Document doc = make_doc({{2, 100}, {3, 100}});
  const auto mix = infer_mixture(model, doc, 200, 100, 7);
  REQUIRE(mix.size() == 3);
  CHECK(mix[1] >= 0.95);
  CHECK(is_simplex(mix, 1e-9));
}

TEST_CASE("infer_mixture stays near uniform for an uninformative token") {
  TopicModel model;
  model.num_topics = 2;
  model.alpha = 0.1;
  model.beta = 0.001;
  model.phi = {{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}};
  const Document doc = make_doc({{0, 1}});
  double mean_first = 0.0;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const auto mix = infer_mixture(model, doc, 200, 100, seed);
    mean_first += mix[0];
  }
  mean_first /= 50.0;
  CHECK(std::fabs(mean_first - 0.5) <= 0.05);
}

TEST_CASE("infer_mixture rejects out-of-vocabulary tokens") {
  TopicModel model;
  model.num_topics = 2;
  model.alpha = 0.1;
  model.beta = 0.001;
  model.phi = {{0.5, 0.5}, {0.5, 0.5}};
  const Document doc = make_doc({{5, 1}});
  CHECK_THROWS_WITH_AS(infer_mixture(model, doc, 10, 5, 1),
                       doctest::Contains("outside vocabulary"),
                       ValidationError);
}

TEST_CASE("infer_mixture is deterministic under a fixed seed") {
  TopicModel model;
  model.num_topics = 2;
  model.alpha = 0.1;
  model.beta = 0.001;
  model.phi = {{0.7, 0.1, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.7}};
  const Document doc = make_doc({{0, 10}, {3, 5}});
  CHECK(infer_mixture(model, doc, 100, 50, 9) ==
        infer_mixture(model, doc, 100, 50, 9));
}

TEST_CASE("gibbs counts stay consistent with assignments") {
  SynthConfig scfg;
  scfg.num_cases = 5;
  scfg.num_topics = 3;
  scfg.vocab_size = 20;
  scfg.tokens_per_doc = 40;
  scfg.briefs_per_case_range = {1, 2};
  const auto [corpus, truth] = generate_synthetic(scfg, 3);
  (void)truth;

  detail::LdaGibbs gibbs(corpus_documents(corpus), scfg.vocab_size, 3, 0.1,
                         0.01, 11);
  CHECK(gibbs.counts_consistent());
  for (int s = 0; s < 5; ++s) {
    gibbs.sweep();
    CHECK(gibbs.counts_consistent());
  }
}

TEST_CASE("the collapsed log joint trends upward across sweeps") {
  SynthConfig scfg;
  scfg.num_cases = 20;
  scfg.num_topics = 3;
  scfg.vocab_size = 30;
  scfg.tokens_per_doc = 80;
  scfg.briefs_per_case_range = {0, 1};
  const auto [corpus, truth] = generate_synthetic(scfg, 23);
  (void)truth;

  detail::LdaGibbs gibbs(corpus_documents(corpus), scfg.vocab_size, 3, 0.1,
                         0.01, 29);
  std::vector<double> trace;
  for (int s = 0; s < 50; ++s) {
    gibbs.sweep();
    trace.push_back(gibbs.log_joint());
  }
  const int tenth = static_cast<int>(trace.size()) / 10;
  double first = 0.0, last = 0.0;
  for (int i = 0; i < tenth; ++i) {
    first += trace[i];
    last += trace[trace.size() - 1 - i];
  }
  CHECK(last / tenth >= first / tenth);
}

TEST_CASE("mean_side_mixture averages the side's briefs") {
  Case kase;
  kase.id = "c";
  kase.merits = make_doc({{0, 1}});
  kase.briefs.push_back({make_doc({{0, 1}}), Side::Petitioner});
  kase.briefs.push_back({make_doc({{0, 1}}), Side::Petitioner});
  kase.briefs.push_back({make_doc({{0, 1}}), Side::Respondent});

  CaseMixtures mix;
  mix.theta = {0.5, 0.5};
  mix.briefs = {{1.0, 0.0}, {0.0, 1.0}, {0.3, 0.7}};

  const auto pet = mean_side_mixture(kase, mix, Side::Petitioner);
  REQUIRE(pet.has_value());
  CHECK((*pet)[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK((*pet)[1] == doctest::Approx(0.5).epsilon(1e-15));

  const auto resp = mean_side_mixture(kase, mix, Side::Respondent);
  REQUIRE(resp.has_value());
  CHECK((*resp)[0] == doctest::Approx(0.3).epsilon(1e-15));

  kase.briefs.pop_back();
  mix.briefs.pop_back();
  CHECK(!mean_side_mixture(kase, mix, Side::Respondent).has_value());
}

TEST_CASE("topic model files round trip bit-exactly") {
  SynthConfig scfg;
  scfg.num_cases = 6;
  scfg.num_topics = 3;
  scfg.vocab_size = 25;
  scfg.tokens_per_doc = 40;
  scfg.beta = 0.1;
  const auto [corpus, truth] = generate_synthetic(scfg, 19);
  (void)truth;
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.num_iters = 40;
  cfg.burn_in = 20;
  const TopicModel model =
      fit_lda(corpus_documents(corpus), scfg.vocab_size, cfg, 31);

  const std::string path = tu::tmp_path("model.json");
  save_topic_model(model, path);
  const TopicModel loaded = load_topic_model(path);
  CHECK(loaded.num_topics == model.num_topics);
  CHECK(loaded.alpha == model.alpha);
  CHECK(loaded.beta == model.beta);
  CHECK(loaded.phi == model.phi);
  CHECK(loaded.doc_mixtures == model.doc_mixtures);
}

TEST_CASE("corpus fold-in is thread-count independent") {
  SynthConfig scfg;
  scfg.num_cases = 6;
  scfg.num_topics = 3;
  scfg.vocab_size = 25;
  scfg.tokens_per_doc = 40;
  scfg.beta = 0.1;
  scfg.briefs_per_case_range = {1, 2};
  const auto [corpus, truth] = generate_synthetic(scfg, 37);
  (void)truth;
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.num_iters = 40;
  cfg.burn_in = 20;
  const TopicModel model =
      fit_lda(corpus_documents(corpus), scfg.vocab_size, cfg, 41);

  set_max_threads(1);
  const CorpusMixtures serial = infer_corpus_mixtures(corpus, model, 50, 25, 7);
  set_max_threads(4);
  const CorpusMixtures parallel =
      infer_corpus_mixtures(corpus, model, 50, 25, 7);
  set_max_threads(0);

  REQUIRE(serial.size() == parallel.size());
  for (const auto& [id, mix] : serial) {
    CHECK(mix.theta == parallel.at(id).theta);
    CHECK(mix.briefs == parallel.at(id).briefs);
  }
}
