#include "amicus/topics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "amicus/errors.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/parallel.hpp"
#include "json.hpp"

namespace amicus {

namespace {

using nlohmann::json;

constexpr uint64_t kStreamFoldIn = 101;

std::vector<int32_t> expand_tokens(const Document& doc, int vocab_size,
                                   const std::string& key) {
  if (doc.total <= 0) {
    throw ValidationError("document " + key + " has zero tokens");
  }
  std::vector<int32_t> tokens;
  tokens.reserve(static_cast<std::size_t>(doc.total));
  for (const auto& [id, count] : doc.counts) {
    if (id < 0 || id >= vocab_size) {
      throw ValidationError("document " + key + " has token id outside vocabulary");
    }
    for (int64_t c = 0; c < count; ++c) tokens.push_back(id);
  }
  return tokens;
}

}  // namespace

void LdaConfig::validate() const {
  if (num_topics < 1) throw ValidationError("num_topics must be >= 1");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
  if (burn_in < 0 || num_iters <= burn_in) {
    throw ValidationError("need num_iters > burn_in >= 0");
  }
  if (thin < 1) throw ValidationError("thin must be >= 1");
  if (infer_burn_in < 0 || infer_iters <= infer_burn_in) {
    throw ValidationError("need infer_iters > infer_burn_in >= 0");
  }
}

std::string merits_key(const std::string& case_id) { return "merits:" + case_id; }

std::string brief_doc_key(const std::string& case_id, int brief_index) {
  return "brief:" + case_id + ":" + std::to_string(brief_index);
}

std::vector<std::pair<std::string, Document>> corpus_documents(
    const Corpus& corpus) {
  std::vector<std::pair<std::string, Document>> docs;
  for (const Case& kase : corpus.cases) {
    docs.emplace_back(merits_key(kase.id), kase.merits);
    for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
      docs.emplace_back(brief_doc_key(kase.id, static_cast<int>(k)),
                        kase.briefs[k].doc);
    }
  }
  return docs;
}

namespace detail {

LdaGibbs::LdaGibbs(const std::vector<std::pair<std::string, Document>>& docs,
                   int vocab_size, int num_topics, double alpha, double beta,
                   uint64_t seed)
    : num_topics_(num_topics),
      vocab_size_(vocab_size),
      alpha_(alpha),
      beta_(beta),
      rng_(seed),
      scratch_(static_cast<std::size_t>(num_topics), 0.0) {
  doc_tokens_.reserve(docs.size());
  for (const auto& [key, doc] : docs) {
    doc_tokens_.push_back(expand_tokens(doc, vocab_size, key));
  }

  doc_topic_.assign(doc_tokens_.size(),
                    std::vector<int64_t>(num_topics_, 0));
  topic_word_.assign(num_topics_, std::vector<int64_t>(vocab_size_, 0));
  topic_total_.assign(num_topics_, 0);
  assignments_.resize(doc_tokens_.size());
  phi_acc_.assign(num_topics_, std::vector<double>(vocab_size_, 0.0));
  mix_acc_.assign(doc_tokens_.size(),
                  std::vector<double>(num_topics_, 0.0));

  for (std::size_t d = 0; d < doc_tokens_.size(); ++d) {
    assignments_[d].resize(doc_tokens_[d].size());
    for (std::size_t t = 0; t < doc_tokens_[d].size(); ++t) {
      const int k = static_cast<int>(rng_.uniform_int(num_topics_));
      assignments_[d][t] = k;
      doc_topic_[d][k] += 1;
      topic_word_[k][doc_tokens_[d][t]] += 1;
      topic_total_[k] += 1;
    }
  }
}

void LdaGibbs::resample(int d, std::size_t t) {
  const int32_t v = doc_tokens_[d][t];
  const int32_t old_k = assignments_[d][t];
  doc_topic_[d][old_k] -= 1;
  topic_word_[old_k][v] -= 1;
  topic_total_[old_k] -= 1;

  const double v_beta = vocab_size_ * beta_;
  double cum = 0.0;
  for (int k = 0; k < num_topics_; ++k) {
    cum += (doc_topic_[d][k] + alpha_) * (topic_word_[k][v] + beta_) /
           (topic_total_[k] + v_beta);
    scratch_[k] = cum;
  }
  const double u = rng_.uniform() * cum;
  int new_k = num_topics_ - 1;
  for (int k = 0; k < num_topics_; ++k) {
    if (u < scratch_[k]) {
      new_k = k;
      break;
    }
  }

  assignments_[d][t] = new_k;
  doc_topic_[d][new_k] += 1;
  topic_word_[new_k][v] += 1;
  topic_total_[new_k] += 1;
}

void LdaGibbs::sweep() {
  for (std::size_t d = 0; d < doc_tokens_.size(); ++d) {
    for (std::size_t t = 0; t < doc_tokens_[d].size(); ++t) {
      resample(static_cast<int>(d), t);
    }
  }
}

void LdaGibbs::accumulate() {
  const double v_beta = vocab_size_ * beta_;
  for (int k = 0; k < num_topics_; ++k) {
    for (int v = 0; v < vocab_size_; ++v) {
      phi_acc_[k][v] += (topic_word_[k][v] + beta_) / (topic_total_[k] + v_beta);
    }
  }
  const double k_alpha = num_topics_ * alpha_;
  for (std::size_t d = 0; d < doc_tokens_.size(); ++d) {
    const double denom = static_cast<double>(doc_tokens_[d].size()) + k_alpha;
    for (int k = 0; k < num_topics_; ++k) {
      mix_acc_[d][k] += (doc_topic_[d][k] + alpha_) / denom;
    }
  }
  samples_ += 1;
}

bool LdaGibbs::counts_consistent() const {
  std::vector<std::vector<int64_t>> doc_topic(doc_tokens_.size(),
                                              std::vector<int64_t>(num_topics_, 0));
  std::vector<std::vector<int64_t>> topic_word(
      num_topics_, std::vector<int64_t>(vocab_size_, 0));
  std::vector<int64_t> topic_total(num_topics_, 0);
  for (std::size_t d = 0; d < doc_tokens_.size(); ++d) {
    for (std::size_t t = 0; t < doc_tokens_[d].size(); ++t) {
      const int k = assignments_[d][t];
      if (k < 0 || k >= num_topics_) return false;
      doc_topic[d][k] += 1;
      topic_word[k][doc_tokens_[d][t]] += 1;
      topic_total[k] += 1;
    }
  }
  return doc_topic == doc_topic_ && topic_word == topic_word_ &&
         topic_total == topic_total_;
}

double LdaGibbs::log_joint() const {
  double lj = 0.0;
  const double k_alpha = num_topics_ * alpha_;
  for (std::size_t d = 0; d < doc_tokens_.size(); ++d) {
    lj += std::lgamma(k_alpha) -
          std::lgamma(static_cast<double>(doc_tokens_[d].size()) + k_alpha);
    for (int k = 0; k < num_topics_; ++k) {
      lj += std::lgamma(doc_topic_[d][k] + alpha_) - std::lgamma(alpha_);
    }
  }
  const double v_beta = vocab_size_ * beta_;
  for (int k = 0; k < num_topics_; ++k) {
    lj += std::lgamma(v_beta) - std::lgamma(topic_total_[k] + v_beta);
    for (int v = 0; v < vocab_size_; ++v) {
      lj += std::lgamma(topic_word_[k][v] + beta_) - std::lgamma(beta_);
    }
  }
  return lj;
}

std::vector<std::vector<double>> LdaGibbs::phi_mean() const {
  if (samples_ == 0) throw NumericalError("no accumulated sweeps");
  auto phi = phi_acc_;
  for (auto& row : phi) {
    for (double& x : row) x /= samples_;
    normalize_in_place(row);
  }
  return phi;
}

std::vector<std::vector<double>> LdaGibbs::mixture_means() const {
  if (samples_ == 0) throw NumericalError("no accumulated sweeps");
  auto mix = mix_acc_;
  for (auto& row : mix) {
    for (double& x : row) x /= samples_;
    normalize_in_place(row);
  }
  return mix;
}

}  // namespace detail

TopicModel fit_lda(const std::vector<std::pair<std::string, Document>>& docs,
                   int vocab_size, const LdaConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (docs.empty()) throw ValidationError("fit_lda needs at least one document");
  if (vocab_size < 1) throw ValidationError("vocab_size must be >= 1");
  {
    std::set<std::string> keys;
    std::set<int32_t> distinct;
    for (const auto& [key, doc] : docs) {
      if (!keys.insert(key).second) {
        throw ValidationError("duplicate document key " + key);
      }
      if (doc.empty()) {
        throw ValidationError("document " + key + " has zero tokens");
      }
      for (const auto& [id, count] : doc.counts) {
        (void)count;
        distinct.insert(id);
      }
    }
    if (cfg.num_topics > static_cast<int>(distinct.size())) {
      throw ValidationError("num_topics exceeds the distinct token count");
    }
  }

  detail::LdaGibbs gibbs(docs, vocab_size, cfg.num_topics, cfg.alpha, cfg.beta,
                         seed);
  for (int s = 1; s <= cfg.num_iters; ++s) {
    gibbs.sweep();
    if (s > cfg.burn_in && (s - cfg.burn_in) % cfg.thin == 0) {
      gibbs.accumulate();
    }
  }

  TopicModel model;
  model.num_topics = cfg.num_topics;
  model.alpha = cfg.alpha;
  model.beta = cfg.beta;
  model.phi = gibbs.phi_mean();
  const auto mixtures = gibbs.mixture_means();
  for (std::size_t d = 0; d < docs.size(); ++d) {
    model.doc_mixtures[docs[d].first] = mixtures[d];
  }
  return model;
}

std::vector<double> infer_mixture(const TopicModel& model, const Document& doc,
                                  int num_iters, int burn_in, uint64_t seed) {
  if (model.num_topics < 1 || model.phi.empty()) {
    throw ValidationError("infer_mixture needs a fitted model");
  }
  if (burn_in < 0 || num_iters <= burn_in) {
    throw ValidationError("need num_iters > burn_in >= 0");
  }
  const int num_topics = model.num_topics;
  const auto tokens = expand_tokens(doc, model.vocab_size(), "held-out");

  Rng rng(seed);
  std::vector<int32_t> assignment(tokens.size());
  std::vector<int64_t> counts(num_topics, 0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const int k = static_cast<int>(rng.uniform_int(num_topics));
    assignment[t] = k;
    counts[k] += 1;
  }

  std::vector<double> cum(num_topics, 0.0);
  std::vector<double> acc(num_topics, 0.0);
  int samples = 0;
  const double k_alpha = num_topics * model.alpha;
  for (int s = 1; s <= num_iters; ++s) {
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const int32_t v = tokens[t];
      counts[assignment[t]] -= 1;
      double run = 0.0;
      for (int k = 0; k < num_topics; ++k) {
        run += (counts[k] + model.alpha) * model.phi[k][v];
        cum[k] = run;
      }
      const double u = rng.uniform() * run;
      int new_k = num_topics - 1;
      for (int k = 0; k < num_topics; ++k) {
        if (u < cum[k]) {
          new_k = k;
          break;
        }
      }
      assignment[t] = new_k;
      counts[new_k] += 1;
    }
    if (s > burn_in) {
      const double denom = static_cast<double>(tokens.size()) + k_alpha;
      for (int k = 0; k < num_topics; ++k) {
        acc[k] += (counts[k] + model.alpha) / denom;
      }
      samples += 1;
    }
  }
  for (double& x : acc) x /= samples;
  normalize_in_place(acc);
  return acc;
}

std::optional<std::vector<double>> mean_side_mixture(const Case& kase,
                                                     const CaseMixtures& mix,
                                                     Side side) {
  if (mix.briefs.size() != kase.briefs.size()) {
    throw ValidationError("case " + kase.id + ": brief mixture count mismatch");
  }
  std::vector<double> acc;
  int n = 0;
  for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
    if (kase.briefs[k].side != side) continue;
    if (acc.empty()) acc.assign(mix.briefs[k].size(), 0.0);
    for (std::size_t d = 0; d < mix.briefs[k].size(); ++d) {
      acc[d] += mix.briefs[k][d];
    }
    n += 1;
  }
  if (n == 0) return std::nullopt;
  for (double& x : acc) x /= n;
  return acc;
}

CorpusMixtures mixtures_from_model(const Corpus& corpus,
                                   const TopicModel& model) {
  CorpusMixtures out;
  for (const Case& kase : corpus.cases) {
    CaseMixtures mix;
    const auto it = model.doc_mixtures.find(merits_key(kase.id));
    if (it == model.doc_mixtures.end()) {
      throw ValidationError("model lacks a mixture for case " + kase.id);
    }
    mix.theta = it->second;
    for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
      const auto bit =
          model.doc_mixtures.find(brief_doc_key(kase.id, static_cast<int>(k)));
      if (bit == model.doc_mixtures.end()) {
        throw ValidationError("model lacks a mixture for a brief of case " +
                              kase.id);
      }
      mix.briefs.push_back(bit->second);
    }
    out[kase.id] = std::move(mix);
  }
  return out;
}

CorpusMixtures single_topic_mixtures(const Corpus& corpus) {
  CorpusMixtures out;
  for (const Case& kase : corpus.cases) {
    CaseMixtures mix;
    mix.theta = {1.0};
    mix.briefs.assign(kase.briefs.size(), {1.0});
    out[kase.id] = mix;
  }
  return out;
}

CorpusMixtures infer_corpus_mixtures(const Corpus& corpus,
                                     const TopicModel& model, int num_iters,
                                     int burn_in, uint64_t seed) {
  const auto docs = corpus_documents(corpus);
  std::vector<std::vector<double>> inferred(docs.size());
  parallel_for(docs.size(), [&](std::size_t i) {
    inferred[i] = infer_mixture(model, docs[i].second, num_iters, burn_in,
                                derive_seed(seed, kStreamFoldIn, i));
  });

  CorpusMixtures out;
  std::size_t pos = 0;
  for (const Case& kase : corpus.cases) {
    CaseMixtures mix;
    mix.theta = std::move(inferred[pos++]);
    for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
      mix.briefs.push_back(std::move(inferred[pos++]));
    }
    out[kase.id] = std::move(mix);
  }
  return out;
}

void save_topic_model(const TopicModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write model file " + path);
  json rec;
  rec["num_topics"] = model.num_topics;
  rec["alpha"] = model.alpha;
  rec["beta"] = model.beta;
  rec["phi"] = model.phi;
  rec["doc_mixtures"] = model.doc_mixtures;
  out << rec.dump() << '\n';
  if (!out) throw ValidationError("failed writing model file " + path);
}

TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path);
  json rec;
  try {
    in >> rec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  TopicModel model;
  try {
    model.num_topics = rec.at("num_topics").get<int>();
    model.alpha = rec.at("alpha").get<double>();
    model.beta = rec.at("beta").get<double>();
    model.phi = rec.at("phi").get<std::vector<std::vector<double>>>();
    model.doc_mixtures =
        rec.at("doc_mixtures")
            .get<std::map<std::string, std::vector<double>>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  return model;
}

}  // namespace amicus
