#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/mixtures.hpp"
#include "amicus/rng.hpp"

namespace amicus {

struct LdaConfig {
  int num_topics = 30;
  double alpha = 0.1;
  double beta = 0.001;
  int num_iters = 1000;
  int burn_in = 500;
  int thin = 10;
  // Fold-in sweep counts for held-out documents, which are short relative to
  // the training mass.
  int infer_iters = 200;
  int infer_burn_in = 100;

  void validate() const;
};

struct TopicModel {
  int num_topics = 0;
  double alpha = 0.1;
  double beta = 0.001;
  std::vector<std::vector<double>> phi;  // num_topics rows over the vocabulary
  std::map<std::string, std::vector<double>> doc_mixtures;

  int vocab_size() const {
    return phi.empty() ? 0 : static_cast<int>(phi[0].size());
  }
};

// Document keys: merits and briefs pool into one fit, keys tell them apart.
std::string merits_key(const std::string& case_id);
std::string brief_doc_key(const std::string& case_id, int brief_index);

// All corpus documents in deterministic order (per case: merits, then briefs).
std::vector<std::pair<std::string, Document>> corpus_documents(
    const Corpus& corpus);

// Collapsed Gibbs over token-topic assignments; phi and the training
// mixtures are thinned post-burn-in means. vocab_size bounds token ids.
TopicModel fit_lda(const std::vector<std::pair<std::string, Document>>& docs,
                   int vocab_size, const LdaConfig& cfg, uint64_t seed);

// Gibbs fold-in with phi frozen; returns the post-burn-in mean mixture.
std::vector<double> infer_mixture(const TopicModel& model, const Document& doc,
                                  int num_iters, int burn_in, uint64_t seed);

// Arithmetic mean of the side's brief mixtures; absent when the case has no
// briefs on that side.
std::optional<std::vector<double>> mean_side_mixture(const Case& kase,
                                                     const CaseMixtures& mix,
                                                     Side side);

// Collect the fitted training mixtures into per-case form.
CorpusMixtures mixtures_from_model(const Corpus& corpus,
                                   const TopicModel& model);

// Degenerate single-topic mixtures for runs without a topic stage; the
// unidimensional vote model ignores them beyond their length.
CorpusMixtures single_topic_mixtures(const Corpus& corpus);

// Fold-in for every document of a held-out corpus. Documents are independent
// given phi, so they run in parallel; per-document seeds keep the result
// identical at any thread count.
CorpusMixtures infer_corpus_mixtures(const Corpus& corpus,
                                     const TopicModel& model, int num_iters,
                                     int burn_in, uint64_t seed);

// Bit-exact round trip.
void save_topic_model(const TopicModel& model, const std::string& path);
TopicModel load_topic_model(const std::string& path);

namespace detail {

// The raw sampler state, exposed so tests can audit count consistency and
// the log-joint trend sweep by sweep.
class LdaGibbs {
 public:
  LdaGibbs(const std::vector<std::pair<std::string, Document>>& docs,
           int vocab_size, int num_topics, double alpha, double beta,
           uint64_t seed);

  void sweep();
  void accumulate();
  bool counts_consistent() const;
  double log_joint() const;

  // Thinned means; valid once accumulate() ran at least once.
  std::vector<std::vector<double>> phi_mean() const;
  std::vector<std::vector<double>> mixture_means() const;

  int num_docs() const { return static_cast<int>(doc_tokens_.size()); }

 private:
  int num_topics_;
  int vocab_size_;
  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<std::vector<int32_t>> doc_tokens_;
  std::vector<std::vector<int32_t>> assignments_;
  std::vector<std::vector<int64_t>> doc_topic_;    // docs x topics
  std::vector<std::vector<int64_t>> topic_word_;   // topics x vocab
  std::vector<int64_t> topic_total_;               // topics
  std::vector<std::vector<double>> phi_acc_;
  std::vector<std::vector<double>> mix_acc_;
  int samples_ = 0;
  std::vector<double> scratch_;

  void resample(int d, std::size_t t);
};

}  // namespace detail

}  // namespace amicus
