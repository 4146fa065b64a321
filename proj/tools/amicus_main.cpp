#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amicus/corpus.hpp"
#include "amicus/counterfactual.hpp"
#include "amicus/errors.hpp"
#include "amicus/mixtures.hpp"
#include "amicus/parallel.hpp"
#include "amicus/predict.hpp"
#include "amicus/sampler.hpp"
#include "amicus/topics.hpp"
#include "json.hpp"

namespace {

using namespace amicus;

// Everything numeric a run needs, read from a key=value file. Paths travel
// as command-line flags so one config serves a whole pipeline.
struct RunConfig {
  std::string kind = "amici";
  int num_topics = 30;
  double alpha = 0.1;
  double beta = 0.001;
  double lambda = 1.0;
  double sigma_kappa = 4.0;
  double eta = 1.0;
  double xi = 1.0;

  int num_cases = 200;
  int num_justices = 9;
  int vocab_size = 100;
  int tokens_per_doc = 300;
  int briefs_min = 0;
  int briefs_max = 4;
  double rho_fixed = 0.5;
  bool utility_briefs = false;
  int brief_candidates = 64;

  int lda_iters = 1000;
  int lda_burn_in = 500;
  int lda_thin = 10;
  int infer_iters = 200;
  int infer_burn_in = 100;

  int gibbs_iters = 2000;
  int mh_steps_per_block = 500;
  int mh_burn_in = 250;
  int mh_thin = 10;
  double init_proposal_scale = 0.5;
  double adapt_factor = 1.1;
  double target_accept_low = 0.15;
  double target_accept_high = 0.45;

  int folds = 5;
  int num_samples = 512;
  uint64_t seed = 1;

  ModelKind model_kind() const { return model_kind_from_string(kind); }

  Hyperparams hyper() const {
    Hyperparams h;
    h.lambda = lambda;
    h.sigma_kappa = sigma_kappa;
    h.eta = eta;
    h.xi = xi;
    return h;
  }

  SynthConfig synth() const {
    SynthConfig c;
    c.num_cases = num_cases;
    c.num_justices = num_justices;
    c.num_topics = num_topics;
    c.vocab_size = vocab_size;
    c.tokens_per_doc = tokens_per_doc;
    c.briefs_per_case_range = {briefs_min, briefs_max};
    c.alpha = alpha;
    c.beta = beta;
    c.lambda = lambda;
    c.rho_fixed = rho_fixed;
    c.sigma_kappa = sigma_kappa;
    c.xi = xi;
    c.utility_briefs = utility_briefs;
    c.brief_candidates = brief_candidates;
    return c;
  }

  LdaConfig lda() const {
    LdaConfig c;
    c.num_topics = num_topics;
    c.alpha = alpha;
    c.beta = beta;
    c.num_iters = lda_iters;
    c.burn_in = lda_burn_in;
    c.thin = lda_thin;
    c.infer_iters = infer_iters;
    c.infer_burn_in = infer_burn_in;
    return c;
  }

  SamplerConfig sampler() const {
    SamplerConfig c;
    c.gibbs_iters = gibbs_iters;
    c.mh_steps_per_block = mh_steps_per_block;
    c.mh_burn_in = mh_burn_in;
    c.mh_thin = mh_thin;
    c.init_proposal_scale = init_proposal_scale;
    c.adapt_factor = adapt_factor;
    c.target_accept_low = target_accept_low;
    c.target_accept_high = target_accept_high;
    c.seed = seed;
    return c;
  }
};

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": bad integer '" + value +
                          "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<uint64_t>(v);
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": bad integer '" + value +
                          "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": bad number '" + value +
                          "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key " + key + ": bad boolean '" + value + "'");
}

RunConfig load_run_config(const std::string& path) {
  RunConfig rc;
  if (path.empty()) return rc;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": empty key or value");
    }

    if (key == "kind") rc.kind = value;
    else if (key == "num_topics") rc.num_topics = parse_int(key, value);
    else if (key == "alpha") rc.alpha = parse_real(key, value);
    else if (key == "beta") rc.beta = parse_real(key, value);
    else if (key == "lambda") rc.lambda = parse_real(key, value);
    else if (key == "sigma_kappa") rc.sigma_kappa = parse_real(key, value);
    else if (key == "eta") rc.eta = parse_real(key, value);
    else if (key == "xi") rc.xi = parse_real(key, value);
    else if (key == "num_cases") rc.num_cases = parse_int(key, value);
    else if (key == "num_justices") rc.num_justices = parse_int(key, value);
    else if (key == "vocab_size") rc.vocab_size = parse_int(key, value);
    else if (key == "tokens_per_doc") rc.tokens_per_doc = parse_int(key, value);
    else if (key == "briefs_min") rc.briefs_min = parse_int(key, value);
    else if (key == "briefs_max") rc.briefs_max = parse_int(key, value);
    else if (key == "rho_fixed") rc.rho_fixed = parse_real(key, value);
    else if (key == "utility_briefs") rc.utility_briefs = parse_bool(key, value);
    else if (key == "brief_candidates") rc.brief_candidates = parse_int(key, value);
    else if (key == "lda_iters") rc.lda_iters = parse_int(key, value);
    else if (key == "lda_burn_in") rc.lda_burn_in = parse_int(key, value);
    else if (key == "lda_thin") rc.lda_thin = parse_int(key, value);
    else if (key == "infer_iters") rc.infer_iters = parse_int(key, value);
    else if (key == "infer_burn_in") rc.infer_burn_in = parse_int(key, value);
    else if (key == "gibbs_iters") rc.gibbs_iters = parse_int(key, value);
    else if (key == "mh_steps_per_block") rc.mh_steps_per_block = parse_int(key, value);
    else if (key == "mh_burn_in") rc.mh_burn_in = parse_int(key, value);
    else if (key == "mh_thin") rc.mh_thin = parse_int(key, value);
    else if (key == "init_proposal_scale") rc.init_proposal_scale = parse_real(key, value);
    else if (key == "adapt_factor") rc.adapt_factor = parse_real(key, value);
    else if (key == "target_accept_low") rc.target_accept_low = parse_real(key, value);
    else if (key == "target_accept_high") rc.target_accept_high = parse_real(key, value);
    else if (key == "folds") rc.folds = parse_int(key, value);
    else if (key == "num_samples") rc.num_samples = parse_int(key, value);
    else if (key == "seed") rc.seed = parse_u64(key, value);
    else throw ValidationError("unknown config key '" + key + "'");
  }
  return rc;
}

// Common --config/--seed/--threads plumbing for one subcommand.
struct CommonFlags {
  std::string config_path;
  uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  int threads = 0;

  void attach(CLI::App* cmd, bool with_config = true) {
    if (with_config) {
      cmd->add_option("--config", config_path,
                      "key=value run configuration file");
    }
    seed_opt = cmd->add_option("--seed", seed,
                               "override the config seed (default 1)");
    cmd->add_option("--threads", threads,
                    "worker threads, 0 = all cores")
        ->capture_default_str();
  }

  RunConfig resolve() const {
    set_max_threads(threads);
    RunConfig rc = load_run_config(config_path);
    if (seed_opt != nullptr && seed_opt->count() > 0) rc.seed = seed;
    return rc;
  }
};

const CaseMixtures& case_mixtures(const CorpusMixtures& mixtures,
                                  const std::string& case_id) {
  const auto it = mixtures.find(case_id);
  if (it == mixtures.end()) {
    throw ValidationError("mixtures file has no entry for case " + case_id);
  }
  return it->second;
}

const Case& corpus_case(const Corpus& corpus, const std::string& case_id) {
  const Case* kase = corpus.find_case(case_id);
  if (kase == nullptr) {
    throw ValidationError("corpus has no case " + case_id);
  }
  return *kase;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ideal-point vote models with amicus-brief evidence"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic corpus with its ground truth");
  CommonFlags synth_flags;
  synth_flags.attach(synth);
  std::string synth_out, synth_truth;
  synth->add_option("--out", synth_out, "corpus output path")->required();
  synth->add_option("--out-truth", synth_truth, "ground truth output path")
      ->required();
  synth->callback([&] {
    const RunConfig rc = synth_flags.resolve();
    const auto [corpus, truth] = generate_synthetic(rc.synth(), rc.seed);
    save_corpus(corpus, synth_out);
    save_ground_truth(truth, synth_truth);
  });

  // lda-fit
  auto* lda_fit_cmd = app.add_subcommand(
      "lda-fit", "fit topics on every document of a corpus");
  CommonFlags lda_fit_flags;
  lda_fit_flags.attach(lda_fit_cmd);
  std::string lda_fit_corpus, lda_fit_model, lda_fit_mixtures;
  lda_fit_cmd->add_option("--corpus", lda_fit_corpus, "corpus path")
      ->required();
  lda_fit_cmd->add_option("--out-model", lda_fit_model, "topic model output")
      ->required();
  lda_fit_cmd->add_option("--out-mixtures", lda_fit_mixtures,
                          "also write the training mixtures");
  lda_fit_cmd->callback([&] {
    const RunConfig rc = lda_fit_flags.resolve();
    const Corpus corpus = load_corpus(lda_fit_corpus);
    const TopicModel model =
        fit_lda(corpus_documents(corpus), corpus.vocabulary.size(), rc.lda(),
                rc.seed);
    save_topic_model(model, lda_fit_model);
    if (!lda_fit_mixtures.empty()) {
      save_mixtures(mixtures_from_model(corpus, model), lda_fit_mixtures);
    }
  });

  // lda-infer
  auto* lda_infer_cmd = app.add_subcommand(
      "lda-infer", "fold corpus documents into a fitted topic model");
  CommonFlags lda_infer_flags;
  lda_infer_flags.attach(lda_infer_cmd);
  std::string lda_infer_model, lda_infer_corpus, lda_infer_out;
  lda_infer_cmd->add_option("--model", lda_infer_model, "topic model path")
      ->required();
  lda_infer_cmd->add_option("--corpus", lda_infer_corpus, "corpus path")
      ->required();
  lda_infer_cmd
      ->add_option("--out-mixtures", lda_infer_out, "mixtures output path")
      ->required();
  lda_infer_cmd->callback([&] {
    const RunConfig rc = lda_infer_flags.resolve();
    const TopicModel model = load_topic_model(lda_infer_model);
    const Corpus corpus = load_corpus(lda_infer_corpus);
    save_mixtures(infer_corpus_mixtures(corpus, model, rc.infer_iters,
                                        rc.infer_burn_in, rc.seed),
                  lda_infer_out);
  });

  // fit
  auto* fit_cmd = app.add_subcommand(
      "fit", "estimate justice and case parameters for one model kind");
  CommonFlags fit_flags;
  fit_flags.attach(fit_cmd);
  std::string fit_corpus, fit_mixtures, fit_out;
  fit_cmd->add_option("--corpus", fit_corpus, "corpus path")->required();
  fit_cmd->add_option("--mixtures", fit_mixtures,
                      "stage-one mixtures (optional for kind=unidimensional)");
  fit_cmd->add_option("--out", fit_out, "fit output path")->required();
  fit_cmd->callback([&] {
    const RunConfig rc = fit_flags.resolve();
    const Corpus corpus = load_corpus(fit_corpus);
    const ModelKind kind = rc.model_kind();
    CorpusMixtures mixtures;
    if (!fit_mixtures.empty()) {
      mixtures = load_mixtures(fit_mixtures);
    } else if (kind == ModelKind::Unidimensional) {
      mixtures = single_topic_mixtures(corpus);
    } else {
      throw ValidationError("--mixtures is required for kind " + rc.kind);
    }
    const FitResult result =
        fit(corpus, mixtures, kind, rc.hyper(), rc.sampler());
    save_fit(result, fit_out);
  });

  // eval-cv
  auto* cv_cmd = app.add_subcommand(
      "eval-cv", "cross-validated vote prediction with both baselines");
  CommonFlags cv_flags;
  cv_flags.attach(cv_cmd);
  std::string cv_corpus, cv_out, cv_summary;
  cv_cmd->add_option("--corpus", cv_corpus, "corpus path")->required();
  cv_cmd->add_option("--out", cv_out, "per-fold accuracy csv")->required();
  cv_cmd->add_option("--out-summary", cv_summary, "also write a json summary");
  cv_cmd->callback([&] {
    const RunConfig rc = cv_flags.resolve();
    const Corpus corpus = load_corpus(cv_corpus);
    const CvReport report =
        cross_validate(corpus, rc.model_kind(), rc.hyper(), rc.sampler(),
                       rc.lda(), rc.folds, rc.seed, rc.num_samples);
    save_cv_csv(report, cv_out);
    if (!cv_summary.empty()) save_cv_summary(report, cv_summary);
  });

  // predict
  auto* predict_cmd = app.add_subcommand(
      "predict", "posterior vote prediction for one case");
  CommonFlags predict_flags;
  predict_flags.attach(predict_cmd, /*with_config=*/false);
  std::string predict_fit, predict_corpus, predict_mixtures, predict_case;
  std::string predict_keep = "all";
  int predict_samples = 512;
  predict_cmd->add_option("--fit", predict_fit, "fit path")->required();
  predict_cmd->add_option("--corpus", predict_corpus, "corpus path")
      ->required();
  predict_cmd->add_option("--mixtures", predict_mixtures, "mixtures path")
      ->required();
  predict_cmd->add_option("--case", predict_case, "case id")->required();
  predict_cmd
      ->add_option("--keep", predict_keep,
                   "which side's briefs stay on file")
      ->check(CLI::IsMember({"all", "none", "pet", "resp"}))
      ->capture_default_str();
  predict_cmd
      ->add_option("--samples", predict_samples, "kappa samples")
      ->capture_default_str();
  predict_cmd->callback([&] {
    const RunConfig rc = predict_flags.resolve();
    const FitResult result = load_fit(predict_fit);
    const Corpus corpus = load_corpus(predict_corpus);
    const CorpusMixtures mixtures = load_mixtures(predict_mixtures);
    const Case& kase = corpus_case(corpus, predict_case);
    const Prediction pred = drop_amici_predict(
        result, kase, case_mixtures(mixtures, predict_case),
        amici_keep_from_string(predict_keep), predict_samples, rc.seed);
    nlohmann::json out;
    out["case"] = predict_case;
    out["keep"] = predict_keep;
    out["kappa_samples"] = pred.num_kappa_samples;
    out["used_uniform_weights"] = pred.used_uniform_weights;
    for (const auto& [id, m] : pred.marginals) out["marginals"][id] = m;
    for (const auto& [id, s] : pred.partition) {
      out["partition"][id] = to_string(s);
    }
    std::cout << out.dump(2) << "\n";
  });

  // decompose
  auto* decompose_cmd = app.add_subcommand(
      "decompose", "per-justice vote logits with amicus terms zeroed");
  std::string dec_fit, dec_corpus, dec_mixtures, dec_case, dec_out;
  decompose_cmd->add_option("--fit", dec_fit, "fit path")->required();
  decompose_cmd->add_option("--corpus", dec_corpus, "corpus path")->required();
  decompose_cmd->add_option("--mixtures", dec_mixtures, "mixtures path")
      ->required();
  decompose_cmd->add_option("--case", dec_case, "case id")->required();
  decompose_cmd->add_option("--out", dec_out, "csv output path")->required();
  decompose_cmd->callback([&] {
    const FitResult result = load_fit(dec_fit);
    const Corpus corpus = load_corpus(dec_corpus);
    const CorpusMixtures mixtures = load_mixtures(dec_mixtures);
    save_decomposition_csv(
        decompose_ip(result, corpus_case(corpus, dec_case),
                     case_mixtures(mixtures, dec_case)),
        dec_out);
  });

  // best-brief
  auto* brief_cmd = app.add_subcommand(
      "best-brief", "filer utility sweep between two topics");
  std::string brief_fit, brief_mixtures, brief_case_id, brief_out;
  std::string brief_side = "petitioner";
  int topic_a = 0, topic_b = 0;
  double brief_step = 0.1;
  brief_cmd->add_option("--fit", brief_fit, "fit path")->required();
  brief_cmd->add_option("--mixtures", brief_mixtures, "mixtures path")
      ->required();
  brief_cmd->add_option("--case", brief_case_id, "case id")->required();
  brief_cmd->add_option("--side", brief_side, "filing side")
      ->check(CLI::IsMember({"petitioner", "respondent"}))
      ->capture_default_str();
  brief_cmd->add_option("--topic-a", topic_a, "first topic index")->required();
  brief_cmd->add_option("--topic-b", topic_b, "second topic index")
      ->required();
  brief_cmd->add_option("--step", brief_step, "grid step over proportions")
      ->capture_default_str();
  brief_cmd->add_option("--out", brief_out, "csv output path")->required();
  brief_cmd->callback([&] {
    const FitResult result = load_fit(brief_fit);
    const CorpusMixtures mixtures = load_mixtures(brief_mixtures);
    const UtilityCurve curve = best_brief_grid(
        result, brief_case_id, case_mixtures(mixtures, brief_case_id).theta,
        side_from_string(brief_side), topic_a, topic_b, brief_step);
    save_curve_csv(curve, brief_out);
    const UtilityPoint& best = curve.argmax_point();
    std::cout << "best: proportion_a=" << fmt(best.proportion_a)
              << " expected_votes=" << fmt(best.expected_votes)
              << " cost=" << fmt(best.cost) << " net=" << fmt(best.net)
              << "\n";
  });

  // influence
  auto* infl_cmd = app.add_subcommand(
      "influence", "per-justice rms vote log-likelihood gap between fits");
  std::string infl_issues, infl_utility, infl_corpus, infl_mixtures, infl_out;
  infl_cmd->add_option("--fit-issues", infl_issues, "issues-kind fit path")
      ->required();
  infl_cmd->add_option("--fit-utility", infl_utility, "amici or random_utility fit path")
      ->required();
  infl_cmd->add_option("--corpus", infl_corpus, "corpus path")->required();
  infl_cmd->add_option("--mixtures", infl_mixtures, "mixtures path")
      ->required();
  infl_cmd->add_option("--out", infl_out, "csv output path")->required();
  infl_cmd->callback([&] {
    const InfluenceReport report = amici_influence(
        load_fit(infl_issues), load_fit(infl_utility),
        load_corpus(infl_corpus), load_mixtures(infl_mixtures));
    save_influence_csv(report, infl_out);
    for (const std::string& id : report.omitted) {
      std::cerr << "note: justice " << id << " has no votes, omitted\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
