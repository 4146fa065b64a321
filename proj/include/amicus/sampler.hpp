#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "amicus/corpus.hpp"
#include "amicus/ipmodel.hpp"
#include "amicus/mixtures.hpp"
#include "amicus/params.hpp"

namespace amicus {

// Metropolis-within-Gibbs settings. Proposal scales adapt toward the target
// acceptance band during the first half of the Gibbs iterations and are
// frozen afterwards, so the late chain runs a fixed kernel.
struct SamplerConfig {
  int gibbs_iters = 2000;
  int mh_steps_per_block = 500;
  int mh_burn_in = 250;
  int mh_thin = 10;
  double target_accept_low = 0.15;
  double target_accept_high = 0.45;
  double init_proposal_scale = 0.5;
  double adapt_factor = 1.1;
  uint64_t seed = 1;

  void validate() const;
};

struct MhResult {
  std::vector<double> estimate;
  double accept_rate = 0.0;
};

// Random-walk Metropolis with independent Gaussian per-dimension proposals.
// Returns the mean of every thin-th post-burn-in state and the overall
// acceptance rate; `kept`, when non-null, receives those states. Throws
// NumericalError if log_target is not finite at `current` or returns NaN.
MhResult mh_block(
    const std::vector<double>& current,
    const std::function<double(const std::vector<double>&)>& log_target,
    const std::vector<double>& proposal_scales, int steps, int burn_in,
    int thin, uint64_t seed, std::vector<std::vector<double>>* kept = nullptr);

// Multiply the scale when acceptance runs hot, divide when it runs cold,
// leave it alone inside the band.
double adapt_scale(double scale, double accept_rate, const SamplerConfig& cfg);

struct BlockDiagnostics {
  std::string name;
  std::vector<double> accept_trace;  // one entry per Gibbs iteration
  double final_scale = 0.0;
  double post_freeze_accept = 0.0;   // mean rate after adaptation stops
};

struct FitResult {
  ModelKind kind = ModelKind::Unidimensional;
  Hyperparams hyper;
  std::vector<std::string> justice_ids;  // order matches psi_hat
  std::vector<std::string> case_ids;     // order matches kappa_hat
  std::vector<IdealPoint> psi_hat;
  std::vector<CaseParams> kappa_hat;
  double rho_hat = 0.5;
  std::vector<double> log_post_trace;  // one entry per Gibbs iteration
  int best_iter = -1;                  // iteration with the highest trace value
  double best_log_post = 0.0;
  std::vector<BlockDiagnostics> blocks;

  int justice_index(const std::string& id) const;
  int case_index(const std::string& id) const;
};

// Stage-two estimation with the stage-one mixtures held fixed. Sweeps kappa
// blocks, then psi blocks, then rho; each block is one mh_block run against
// its conditional posterior and the block mean becomes the Gibbs update.
// Estimates are the state after the final iteration.
FitResult fit(const Corpus& corpus, const CorpusMixtures& mixtures,
              ModelKind kind, const Hyperparams& hyper,
              const SamplerConfig& cfg);

// JSON artifact with estimates plus a diagnostics summary; per-iteration
// acceptance traces are dropped, everything else round-trips exactly.
void save_fit(const FitResult& fit, const std::string& path);
FitResult load_fit(const std::string& path);

}  // namespace amicus
