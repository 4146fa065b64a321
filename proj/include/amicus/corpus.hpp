#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amicus/params.hpp"

namespace amicus {

enum class Side { Petitioner, Respondent };

inline const char* to_string(Side s) {
  return s == Side::Petitioner ? "petitioner" : "respondent";
}

inline Side side_from_string(const std::string& s) {
  if (s == "petitioner") return Side::Petitioner;
  if (s == "respondent") return Side::Respondent;
  throw ValidationError("unknown side: " + s);
}

inline Side opposite(Side s) {
  return s == Side::Petitioner ? Side::Respondent : Side::Petitioner;
}

struct Vocabulary {
  std::vector<std::string> terms;

  int size() const { return static_cast<int>(terms.size()); }
  const std::string& term(int id) const { return terms.at(id); }
  // Linear scan; only used by validation and tests, never in hot paths.
  int lookup(const std::string& term) const;
};

// Bag of phrases. Entries sorted by token id, counts >= 1.
struct Document {
  std::vector<std::pair<int32_t, int64_t>> counts;
  int64_t total = 0;

  void add(int32_t token_id, int64_t count);
  void finalize();  // sort, merge duplicates, recompute total
  bool empty() const { return counts.empty(); }
};

struct AmicusBrief {
  Document doc;
  Side side = Side::Petitioner;
};

struct Case {
  std::string id;
  Document merits;
  std::vector<AmicusBrief> briefs;
  // justice id -> observed vote. Ordered for reproducible iteration.
  std::map<std::string, Side> votes;

  bool has_briefs(Side s) const;
};

struct Corpus {
  std::vector<std::string> justices;
  Vocabulary vocabulary;
  std::vector<Case> cases;

  // Throws ValidationError on any invariant violation.
  void validate() const;
  int justice_index(const std::string& id) const;
  const Case* find_case(const std::string& id) const;
};

// Latent values behind a synthetic corpus, for recovery tests.
struct GroundTruth {
  std::vector<std::vector<double>> phi;    // D rows over V
  std::vector<std::vector<double>> theta;  // per case
  // delta[i][k] is the mixture of cases[i].briefs[k].
  std::vector<std::vector<std::vector<double>>> delta;
  std::vector<std::vector<double>> psi;  // per justice
  std::vector<CaseParams> kappa;         // per case
  double rho = 0.0;
};

struct SynthConfig {
  int num_cases = 200;
  int num_justices = 9;
  int num_topics = 5;
  int vocab_size = 100;
  int tokens_per_doc = 300;
  std::pair<int, int> briefs_per_case_range = {0, 4};
  double alpha = 0.1;
  double beta = 0.001;
  double lambda = 1.0;
  double rho_fixed = 0.5;
  double sigma_kappa = 4.0;
  double xi = 1.0;
  bool utility_briefs = false;
  // Candidate pool size for the importance-resampled brief mixtures.
  int brief_candidates = 64;

  void validate() const;
};

Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

void save_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

// Samples every latent from the generative story and emits a corpus plus the
// latents. rho is fixed (not sampled) so recovery tests have a known target.
std::pair<Corpus, GroundTruth> generate_synthetic(const SynthConfig& cfg,
                                                  uint64_t seed);

// One brief mixture from the utility prior: draws num_candidates Dirichlet
// candidates and picks one by self-normalized importance resampling with
// weights proportional to the utility factor.
std::vector<double> sample_brief_mixture(
    const std::vector<double>& theta,
    const std::vector<std::vector<double>>& psi_all, const CaseParams& kappa,
    Side side, double xi, double alpha, int num_candidates, uint64_t seed);

class Rng;

// One Bernoulli vote per justice from the vote-model logits. The generator
// draws votes through this; tests resample through it to compare empirical
// rates against the model probabilities.
std::map<std::string, Side> sample_votes(
    const std::vector<std::string>& justices,
    const std::vector<IdealPoint>& psi_all, const std::vector<double>& theta,
    const std::vector<double>* delta_p, const std::vector<double>* delta_r,
    const CaseParams& kappa, Rng& rng);

}  // namespace amicus
