#include "amicus/sampler.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "amicus/errors.hpp"
#include "amicus/rng.hpp"
#include "json.hpp"

namespace amicus {

namespace {

constexpr uint64_t kStreamInit = 11;
constexpr uint64_t kStreamKappa = 12;
constexpr uint64_t kStreamPsi = 13;
constexpr uint64_t kStreamRho = 14;

// One seed per (iteration, block) pair so block order can never alias.
uint64_t block_seed(uint64_t base, uint64_t stream, int iter, int block) {
  const uint64_t index =
      (static_cast<uint64_t>(static_cast<uint32_t>(iter)) << 32) |
      static_cast<uint32_t>(block);
  return derive_seed(base, stream, index);
}

std::vector<double> pack_kappa(const CaseParams& kappa, int dims) {
  std::vector<double> x = {kappa.a, kappa.b};
  if (dims == 4) {
    x.push_back(kappa.c_p);
    x.push_back(kappa.c_r);
  }
  return x;
}

CaseParams unpack_kappa(const std::vector<double>& x) {
  CaseParams kappa;
  kappa.a = x[0];
  kappa.b = x[1];
  if (x.size() == 4) {
    kappa.c_p = x[2];
    kappa.c_r = x[3];
  }
  return kappa;
}

}  // namespace

void SamplerConfig::validate() const {
  if (gibbs_iters < 1) throw ValidationError("gibbs_iters must be >= 1");
  if (mh_steps_per_block < 1) {
    throw ValidationError("mh_steps_per_block must be >= 1");
  }
  if (mh_burn_in < 0 || mh_burn_in >= mh_steps_per_block) {
    throw ValidationError("mh_burn_in must be in [0, mh_steps_per_block)");
  }
  if (mh_thin < 1) throw ValidationError("mh_thin must be >= 1");
  if (mh_burn_in + mh_thin > mh_steps_per_block) {
    throw ValidationError("no post-burn-in states would be kept");
  }
  if (!(target_accept_low > 0.0 && target_accept_low < target_accept_high &&
        target_accept_high < 1.0)) {
    throw ValidationError("acceptance band must satisfy 0 < low < high < 1");
  }
  if (!(init_proposal_scale > 0.0)) {
    throw ValidationError("init_proposal_scale must be > 0");
  }
  if (!(adapt_factor > 1.0)) throw ValidationError("adapt_factor must be > 1");
}

MhResult mh_block(
    const std::vector<double>& current,
    const std::function<double(const std::vector<double>&)>& log_target,
    const std::vector<double>& proposal_scales, int steps, int burn_in,
    int thin, uint64_t seed, std::vector<std::vector<double>>* kept) {
  const std::size_t dim = current.size();
  if (dim == 0) throw ValidationError("mh_block needs a nonempty state");
  if (proposal_scales.size() != dim) {
    throw ValidationError("proposal_scales size mismatch");
  }
  for (double s : proposal_scales) {
    if (!(s > 0.0)) throw ValidationError("proposal scales must be > 0");
  }
  if (steps < 1 || burn_in < 0 || burn_in >= steps || thin < 1) {
    throw ValidationError("bad mh_block schedule");
  }

  Rng rng(seed);
  std::vector<double> state = current;
  double state_lp = log_target(state);
  if (!std::isfinite(state_lp)) {
    throw NumericalError("log target is not finite at the initial state");
  }

  std::vector<double> proposal(dim);
  std::vector<double> mean(dim, 0.0);
  int accepted = 0;
  int num_kept = 0;
  for (int s = 1; s <= steps; ++s) {
    for (std::size_t d = 0; d < dim; ++d) {
      proposal[d] = state[d] + proposal_scales[d] * rng.normal();
    }
    const double lp = log_target(proposal);
    if (std::isnan(lp)) throw NumericalError("log target returned NaN");
    // The uniform is drawn unconditionally to keep the stream aligned
    // across runs whose targets differ only by an additive constant.
    if (std::log(rng.uniform_pos()) < lp - state_lp) {
      state = proposal;
      state_lp = lp;
      ++accepted;
    }
    if (s > burn_in && (s - burn_in) % thin == 0) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] += state[d];
      ++num_kept;
      if (kept != nullptr) kept->push_back(state);
    }
  }
  if (num_kept == 0) throw ValidationError("no post-burn-in states kept");

  for (double& m : mean) m /= num_kept;
  return {std::move(mean), static_cast<double>(accepted) / steps};
}

double adapt_scale(double scale, double accept_rate, const SamplerConfig& cfg) {
  if (!(scale > 0.0)) throw ValidationError("scale must be > 0");
  if (accept_rate > cfg.target_accept_high) return scale * cfg.adapt_factor;
  if (accept_rate < cfg.target_accept_low) return scale / cfg.adapt_factor;
  return scale;
}

int FitResult::justice_index(const std::string& id) const {
  for (std::size_t j = 0; j < justice_ids.size(); ++j) {
    if (justice_ids[j] == id) return static_cast<int>(j);
  }
  return -1;
}

int FitResult::case_index(const std::string& id) const {
  for (std::size_t i = 0; i < case_ids.size(); ++i) {
    if (case_ids[i] == id) return static_cast<int>(i);
  }
  return -1;
}

FitResult fit(const Corpus& corpus, const CorpusMixtures& mixtures,
              ModelKind kind, const Hyperparams& hyper,
              const SamplerConfig& cfg) {
  cfg.validate();
  hyper.validate();
  if (corpus.cases.empty()) throw ValidationError("fit needs at least one case");
  std::size_t total_votes = 0;
  for (const Case& kase : corpus.cases) total_votes += kase.votes.size();
  if (total_votes == 0) throw ValidationError("fit needs at least one vote");
  if (mixtures.empty()) throw ValidationError("fit needs stage-one mixtures");

  const int num_topics =
      static_cast<int>(mixtures.begin()->second.theta.size());
  const auto views = build_case_views(corpus, mixtures, num_topics);
  const int num_justices = static_cast<int>(corpus.justices.size());
  const int num_cases = static_cast<int>(corpus.cases.size());
  const int kdim = kappa_active_dims(kind);

  // Votes regrouped by justice; the psi_j conditional touches only these plus
  // (RandomUtility) every brief's utility factor.
  std::vector<std::vector<std::pair<int, Side>>> votes_by_justice(num_justices);
  for (int i = 0; i < num_cases; ++i) {
    for (const auto& [j, side] : views[i].votes) {
      votes_by_justice[j].push_back({i, side});
    }
  }
  const bool utility_terms =
      kind == ModelKind::RandomUtility && hyper.eta != 0.0;

  std::vector<IdealPoint> psi(num_justices, IdealPoint(num_topics, 0.0));
  std::vector<CaseParams> kappas(num_cases);
  {
    Rng rng(derive_seed(cfg.seed, kStreamInit));
    for (IdealPoint& row : psi) {
      for (double& x : row) x = rng.normal(0.0, 0.1);
    }
    for (CaseParams& kappa : kappas) {
      kappa.a = rng.normal(0.0, 0.1);
      kappa.b = rng.normal(0.0, 0.1);
      if (kdim == 4) {
        kappa.c_p = rng.normal(0.0, 0.1);
        kappa.c_r = rng.normal(0.0, 0.1);
      }
    }
  }
  double rho = 0.5;

  const auto log_posterior = [&]() {
    return log_likelihood(views, psi, kappas, hyper, kind) +
           log_prior_justices(psi, hyper.lambda, rho) +
           log_prior_cases(kappas, hyper.sigma_kappa, kind);
  };
  if (!std::isfinite(log_posterior())) {
    throw NumericalError("log posterior is not finite at initialization");
  }

  FitResult out;
  out.kind = kind;
  out.hyper = hyper;
  out.justice_ids = corpus.justices;
  out.case_ids.reserve(num_cases);
  for (const Case& kase : corpus.cases) out.case_ids.push_back(kase.id);

  const int num_blocks = num_cases + num_justices + 1;
  out.blocks.resize(num_blocks);
  for (int i = 0; i < num_cases; ++i) {
    out.blocks[i].name = "kappa:" + corpus.cases[i].id;
  }
  for (int j = 0; j < num_justices; ++j) {
    out.blocks[num_cases + j].name = "psi:" + corpus.justices[j];
  }
  out.blocks[num_blocks - 1].name = "rho";

  std::vector<double> scales(num_blocks, cfg.init_proposal_scale);
  std::vector<double> freeze_rate_sum(num_blocks, 0.0);
  const int freeze_after = cfg.gibbs_iters / 2;
  const int post_freeze_iters = cfg.gibbs_iters - freeze_after;

  const auto record = [&](int block, double rate, bool adapting) {
    out.blocks[block].accept_trace.push_back(rate);
    if (adapting) {
      scales[block] = adapt_scale(scales[block], rate, cfg);
    } else {
      freeze_rate_sum[block] += rate;
    }
  };

  for (int iter = 1; iter <= cfg.gibbs_iters; ++iter) {
    const bool adapting = iter <= freeze_after;

    for (int i = 0; i < num_cases; ++i) {
      const auto target = [&](const std::vector<double>& x) {
        const CaseParams cand = unpack_kappa(x);
        return case_log_likelihood(views[i], psi, cand, hyper, kind) +
               log_prior_case(cand, hyper.sigma_kappa, kind);
      };
      const MhResult res =
          mh_block(pack_kappa(kappas[i], kdim), target,
                   std::vector<double>(kdim, scales[i]),
                   cfg.mh_steps_per_block, cfg.mh_burn_in, cfg.mh_thin,
                   block_seed(cfg.seed, kStreamKappa, iter, i));
      kappas[i] = unpack_kappa(res.estimate);
      record(i, res.accept_rate, adapting);
    }

    for (int j = 0; j < num_justices; ++j) {
      // The proposal is written into psi[j] in place; mh_block evaluates the
      // target sequentially and the estimate is written back afterwards.
      const auto target = [&](const std::vector<double>& x) {
        psi[j] = x;
        double lp = log_prior_justice(psi[j], hyper.lambda, rho);
        for (const auto& [i, side] : votes_by_justice[j]) {
          const CaseView& view = views[i];
          const double logit =
              vote_logit(psi[j], view.theta, view.delta_p_ptr(),
                         view.delta_r_ptr(), kappas[i], kind);
          lp += log_vote_prob(logit, side);
        }
        if (utility_terms) {
          for (int i = 0; i < num_cases; ++i) {
            lp += case_log_utility(views[i], psi, kappas[i], hyper, kind);
          }
        }
        return lp;
      };
      const MhResult res =
          mh_block(psi[j], target,
                   std::vector<double>(num_topics, scales[num_cases + j]),
                   cfg.mh_steps_per_block, cfg.mh_burn_in, cfg.mh_thin,
                   block_seed(cfg.seed, kStreamPsi, iter, j));
      psi[j] = res.estimate;
      record(num_cases + j, res.accept_rate, adapting);
    }

    {
      const auto target = [&](const std::vector<double>& x) {
        if (!(x[0] > 0.0 && x[0] < 1.0)) {
          return -std::numeric_limits<double>::infinity();
        }
        return log_prior_justices(psi, hyper.lambda, x[0]);
      };
      const MhResult res = mh_block(
          {rho}, target, {scales[num_blocks - 1]}, cfg.mh_steps_per_block,
          cfg.mh_burn_in, cfg.mh_thin, block_seed(cfg.seed, kStreamRho, iter, 0));
      rho = res.estimate[0];
      record(num_blocks - 1, res.accept_rate, adapting);
    }

    const double lp = log_posterior();
    out.log_post_trace.push_back(lp);
    if (out.best_iter < 0 || lp > out.best_log_post) {
      out.best_iter = iter - 1;
      out.best_log_post = lp;
    }
  }

  for (int b = 0; b < num_blocks; ++b) {
    out.blocks[b].final_scale = scales[b];
    out.blocks[b].post_freeze_accept = freeze_rate_sum[b] / post_freeze_iters;
  }
  out.psi_hat = std::move(psi);
  out.kappa_hat = std::move(kappas);
  out.rho_hat = rho;
  return out;
}

void save_fit(const FitResult& fit, const std::string& path) {
  nlohmann::json root;
  root["kind"] = to_string(fit.kind);
  root["hyper"] = {{"lambda", fit.hyper.lambda},
                   {"rho", fit.hyper.rho},
                   {"sigma_kappa", fit.hyper.sigma_kappa},
                   {"eta", fit.hyper.eta},
                   {"xi", fit.hyper.xi}};
  root["rho_hat"] = fit.rho_hat;

  nlohmann::json justices = nlohmann::json::array();
  for (std::size_t j = 0; j < fit.justice_ids.size(); ++j) {
    justices.push_back(
        {{"id", fit.justice_ids[j]}, {"psi", fit.psi_hat[j]}});
  }
  root["justices"] = std::move(justices);

  nlohmann::json cases = nlohmann::json::array();
  for (std::size_t i = 0; i < fit.case_ids.size(); ++i) {
    const CaseParams& kappa = fit.kappa_hat[i];
    cases.push_back({{"id", fit.case_ids[i]},
                     {"a", kappa.a},
                     {"b", kappa.b},
                     {"c_p", kappa.c_p},
                     {"c_r", kappa.c_r}});
  }
  root["cases"] = std::move(cases);

  nlohmann::json blocks = nlohmann::json::array();
  for (const BlockDiagnostics& block : fit.blocks) {
    blocks.push_back({{"name", block.name},
                      {"final_scale", block.final_scale},
                      {"post_freeze_accept", block.post_freeze_accept}});
  }
  root["diagnostics"] = {{"log_post_trace", fit.log_post_trace},
                         {"best_iter", fit.best_iter},
                         {"best_log_post", fit.best_log_post},
                         {"blocks", std::move(blocks)}};

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write fit file " + path);
  out << root.dump() << '\n';
  if (!out) throw ValidationError("failed writing fit file " + path);
}

FitResult load_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fit file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    const nlohmann::json root = nlohmann::json::parse(buf.str());
    FitResult fit;
    fit.kind = model_kind_from_string(root.at("kind").get<std::string>());
    const nlohmann::json& hyper = root.at("hyper");
    fit.hyper.lambda = hyper.at("lambda").get<double>();
    fit.hyper.rho = hyper.at("rho").get<double>();
    fit.hyper.sigma_kappa = hyper.at("sigma_kappa").get<double>();
    fit.hyper.eta = hyper.at("eta").get<double>();
    fit.hyper.xi = hyper.at("xi").get<double>();
    fit.hyper.validate();
    fit.rho_hat = root.at("rho_hat").get<double>();
    if (!(fit.rho_hat > 0.0 && fit.rho_hat < 1.0)) {
      throw ValidationError("rho_hat outside (0,1)");
    }
    for (const nlohmann::json& entry : root.at("justices")) {
      fit.justice_ids.push_back(entry.at("id").get<std::string>());
      fit.psi_hat.push_back(entry.at("psi").get<std::vector<double>>());
      if (fit.psi_hat.back().size() != fit.psi_hat.front().size()) {
        throw ValidationError("psi dimension mismatch");
      }
    }
    for (const nlohmann::json& entry : root.at("cases")) {
      fit.case_ids.push_back(entry.at("id").get<std::string>());
      CaseParams kappa;
      kappa.a = entry.at("a").get<double>();
      kappa.b = entry.at("b").get<double>();
      kappa.c_p = entry.at("c_p").get<double>();
      kappa.c_r = entry.at("c_r").get<double>();
      if (!kappa.finite()) throw ValidationError("kappa not finite");
      fit.kappa_hat.push_back(kappa);
    }
    if (fit.justice_ids.empty() || fit.case_ids.empty()) {
      throw ValidationError("fit file lacks justices or cases");
    }
    const nlohmann::json& diag = root.at("diagnostics");
    fit.log_post_trace = diag.at("log_post_trace").get<std::vector<double>>();
    fit.best_iter = diag.at("best_iter").get<int>();
    fit.best_log_post = diag.at("best_log_post").get<double>();
    for (const nlohmann::json& entry : diag.at("blocks")) {
      BlockDiagnostics block;
      block.name = entry.at("name").get<std::string>();
      block.final_scale = entry.at("final_scale").get<double>();
      block.post_freeze_accept = entry.at("post_freeze_accept").get<double>();
      fit.blocks.push_back(std::move(block));
    }
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad fit file " + path + ": " + e.what());
  }
}

}  // namespace amicus
