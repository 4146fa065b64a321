// Times the OpenMP likelihood and fold-in kernels against their serial
// reference paths and checks that both give bit-identical results.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/ipmodel.hpp"
#include "amicus/parallel.hpp"
#include "amicus/rng.hpp"
#include "amicus/topics.hpp"

using namespace amicus;

namespace {

double seconds_per_call(int reps, const std::function<void()>& f) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count() / reps;
}

}  // namespace

int main() {
  SynthConfig scfg;
  scfg.num_cases = 400;
  scfg.num_topics = 10;
  scfg.vocab_size = 200;
  scfg.tokens_per_doc = 200;
  scfg.briefs_per_case_range = {0, 4};
  const auto [corpus, truth] = generate_synthetic(scfg, 2024);

  CorpusMixtures mixtures;
  for (std::size_t i = 0; i < corpus.cases.size(); ++i) {
    mixtures[corpus.cases[i].id] = {truth.theta[i], truth.delta[i]};
  }
  const std::vector<CaseView> views =
      build_case_views(corpus, mixtures, scfg.num_topics);
  std::vector<IdealPoint> psi;
  for (const auto& row : truth.psi) psi.push_back(row);
  const Hyperparams hyper;
  const ModelKind kind = ModelKind::RandomUtility;

  std::printf("corpus: %d cases, %d justices, %d topics, threads=%d\n",
              scfg.num_cases, scfg.num_justices, scfg.num_topics,
              max_threads());

  const int reps = 20;
  double serial_value = 0.0;
  const double t_serial = seconds_per_call(reps, [&] {
    serial_value =
        log_likelihood_serial(views, psi, truth.kappa, hyper, kind);
  });
  double parallel_value = 0.0;
  const double t_parallel = seconds_per_call(reps, [&] {
    parallel_value = log_likelihood(views, psi, truth.kappa, hyper, kind);
  });
  const bool ll_match = serial_value == parallel_value;
  std::printf("log_likelihood   serial %8.3f ms   parallel %8.3f ms   "
              "speedup %5.2fx   bitwise %s\n",
              1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel,
              ll_match ? "equal" : "DIFFER");

  LdaConfig lda;
  lda.num_topics = scfg.num_topics;
  lda.num_iters = 60;
  lda.burn_in = 30;
  const TopicModel model =
      fit_lda(corpus_documents(corpus), corpus.vocabulary.size(), lda, 7);

  const int saved_threads = max_threads();
  set_max_threads(1);
  CorpusMixtures serial_mix;
  const double t_infer_serial = seconds_per_call(3, [&] {
    serial_mix = infer_corpus_mixtures(corpus, model, 40, 20, 11);
  });
  set_max_threads(saved_threads);
  CorpusMixtures parallel_mix;
  const double t_infer_parallel = seconds_per_call(3, [&] {
    parallel_mix = infer_corpus_mixtures(corpus, model, 40, 20, 11);
  });
  bool infer_match = serial_mix.size() == parallel_mix.size();
  if (infer_match) {
    for (const auto& [id, mix] : serial_mix) {
      const auto it = parallel_mix.find(id);
      if (it == parallel_mix.end() || it->second.theta != mix.theta ||
          it->second.briefs != mix.briefs) {
        infer_match = false;
        break;
      }
    }
  }
  std::printf("lda fold-in      serial %8.3f ms   parallel %8.3f ms   "
              "speedup %5.2fx   bitwise %s\n",
              1e3 * t_infer_serial, 1e3 * t_infer_parallel,
              t_infer_serial / t_infer_parallel,
              infer_match ? "equal" : "DIFFER");

  return ll_match && infer_match ? 0 : 1;
}
