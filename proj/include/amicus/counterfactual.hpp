#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/mixtures.hpp"
#include "amicus/predict.hpp"
#include "amicus/sampler.hpp"

namespace amicus {

// Vote logits for one case under selective zeroing of the amicus polarity
// parameters: both zeroed, c_r zeroed, c_p zeroed, neither. `full` is
// assembled as issues_only plus the two increments so the additivity
// identity holds exactly in floating point.
struct IpDecompositionRow {
  std::string justice;
  double issues_only = 0.0;
  double with_pet_amici = 0.0;
  double with_resp_amici = 0.0;
  double full = 0.0;
};

struct IpDecomposition {
  std::string case_id;
  std::vector<IpDecompositionRow> rows;  // fit roster order
};

IpDecomposition decompose_ip(const FitResult& fit, const Case& kase,
                             const CaseMixtures& mix);

// Which side's briefs survive a what-if removal.
enum class AmiciKeep { None, PetitionerOnly, RespondentOnly, All };

const char* to_string(AmiciKeep keep);
AmiciKeep amici_keep_from_string(const std::string& s);

// predict_votes with the dropped side's mean mixture treated as absent and
// its briefs' utility factors removed. keep=All reproduces predict_votes
// bit for bit under the same seed. Prediction covers the case's voters, or
// the whole roster when the case records no votes.
Prediction drop_amici_predict(const FitResult& fit, const Case& kase,
                              const CaseMixtures& mix, AmiciKeep keep,
                              int num_samples, uint64_t seed);

struct UtilityPoint {
  double proportion_a = 0.0;
  double expected_votes = 0.0;
  double cost = 0.0;
  double net = 0.0;  // expected_votes - cost
};

// Filer's utility sweep between two topics at the case's fitted point
// parameters: proportion p goes to topic_a, 1-p to topic_b, inactive
// topics sit at `floor`, and the mixture is renormalized onto the simplex.
struct UtilityCurve {
  Side side = Side::Petitioner;
  int topic_a = 0;
  int topic_b = 0;
  std::vector<UtilityPoint> grid;
  std::size_t argmax_index = 0;  // ties resolve to the smaller proportion

  const UtilityPoint& argmax_point() const { return grid.at(argmax_index); }
};

UtilityCurve best_brief_grid(const FitResult& fit, const std::string& case_id,
                             const std::vector<double>& theta, Side side,
                             int topic_a, int topic_b, double step = 0.1,
                             double floor = 1e-8);

struct InfluenceRow {
  std::string justice;
  double rms = 0.0;
};

// Root-mean-square gap in per-vote log likelihood between a brief-aware fit
// and an issues-only fit, one value per justice, largest first. Justices
// without any votes are listed separately rather than scored.
struct InfluenceReport {
  std::vector<InfluenceRow> rows;
  std::vector<std::string> omitted;
};

InfluenceReport amici_influence(const FitResult& fit_issues,
                                const FitResult& fit_utility,
                                const Corpus& corpus,
                                const CorpusMixtures& mixtures);

void save_decomposition_csv(const IpDecomposition& decomp,
                            const std::string& path);
void save_curve_csv(const UtilityCurve& curve, const std::string& path);
void save_influence_csv(const InfluenceReport& report,
                        const std::string& path);

}  // namespace amicus
