#include "amicus/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "amicus/errors.hpp"
#include "amicus/ipmodel.hpp"
#include "amicus/mathutil.hpp"
#include "amicus/rng.hpp"
#include "json.hpp"

namespace amicus {

namespace {

using nlohmann::json;

// Sub-stream tags for generate_synthetic. Each latent family gets its own
// stream so adding draws to one family never shifts another.
constexpr uint64_t kStreamPhi = 1;
constexpr uint64_t kStreamPsi = 2;
constexpr uint64_t kStreamKappa = 3;
constexpr uint64_t kStreamTheta = 4;
constexpr uint64_t kStreamBriefs = 5;
constexpr uint64_t kStreamBriefMix = 6;
constexpr uint64_t kStreamMeritsTokens = 7;
constexpr uint64_t kStreamBriefTokens = 8;
constexpr uint64_t kStreamVotes = 9;

uint64_t brief_key(int case_index, int brief_index) {
  return (static_cast<uint64_t>(case_index) << 20) |
         static_cast<uint64_t>(brief_index);
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
  throw ValidationError("line " + std::to_string(line_no) + ": " + what);
}

json parse_line(const std::string& line, int line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    fail_line(line_no, std::string("malformed record: ") + e.what());
  }
}

int32_t parse_token_id(const std::string& key, int line_no) {
  int32_t id = -1;
  const char* first = key.data();
  const char* last = key.data() + key.size();
  const auto [ptr, ec] = std::from_chars(first, last, id);
  if (ec != std::errc() || ptr != last || id < 0) {
    fail_line(line_no, "bad token id '" + key + "'");
  }
  return id;
}

Document document_from_json(const json& obj, int line_no, int vocab_size,
                            const std::string& what) {
  if (!obj.is_object()) fail_line(line_no, what + " must be an object");
  Document doc;
  for (const auto& [key, value] : obj.items()) {
    const int32_t id = parse_token_id(key, line_no);
    if (id >= vocab_size) {
      fail_line(line_no, what + " token id " + key + " outside vocabulary");
    }
    if (!value.is_number_integer() || value.get<int64_t>() < 1) {
      fail_line(line_no, what + " count for token " + key + " must be >= 1");
    }
    doc.add(id, value.get<int64_t>());
  }
  doc.finalize();
  return doc;
}

json document_to_json(const Document& doc) {
  json obj = json::object();
  for (const auto& [id, count] : doc.counts) {
    obj[std::to_string(id)] = count;
  }
  return obj;
}

void validate_document(const Document& doc, int vocab_size,
                       const std::string& what) {
  int64_t total = 0;
  int32_t prev = -1;
  for (const auto& [id, count] : doc.counts) {
    if (id <= prev) throw ValidationError(what + ": token ids not sorted");
    if (id >= vocab_size) throw ValidationError(what + ": token id out of range");
    if (count < 1) throw ValidationError(what + ": count must be >= 1");
    prev = id;
    total += count;
  }
  if (total != doc.total) throw ValidationError(what + ": total mismatch");
}

// Cumulative word distribution sum_d mix[d] * phi[d][v].
std::vector<double> mixture_word_cdf(const std::vector<std::vector<double>>& phi,
                                     const std::vector<double>& mix) {
  const std::size_t v_size = phi.at(0).size();
  std::vector<double> cdf(v_size, 0.0);
  for (std::size_t d = 0; d < phi.size(); ++d) {
    for (std::size_t v = 0; v < v_size; ++v) cdf[v] += mix[d] * phi[d][v];
  }
  double run = 0.0;
  for (double& x : cdf) {
    run += x;
    x = run;
  }
  return cdf;
}

int32_t draw_from_cdf(Rng& rng, const std::vector<double>& cdf) {
  const double u = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const std::size_t idx = it == cdf.end() ? cdf.size() - 1
                                          : static_cast<std::size_t>(it - cdf.begin());
  return static_cast<int32_t>(idx);
}

Document draw_document(Rng& rng, const std::vector<double>& cdf,
                       int num_tokens) {
  std::vector<int64_t> counts(cdf.size(), 0);
  for (int t = 0; t < num_tokens; ++t) counts[draw_from_cdf(rng, cdf)] += 1;
  Document doc;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] > 0) doc.add(static_cast<int32_t>(v), counts[v]);
  }
  doc.finalize();
  return doc;
}

std::optional<std::vector<double>> side_mean(
    const std::vector<AmicusBrief>& briefs,
    const std::vector<std::vector<double>>& mixtures, Side side, int dims) {
  std::vector<double> acc(static_cast<std::size_t>(dims), 0.0);
  int n = 0;
  for (std::size_t k = 0; k < briefs.size(); ++k) {
    if (briefs[k].side != side) continue;
    for (int d = 0; d < dims; ++d) acc[d] += mixtures[k][d];
    n += 1;
  }
  if (n == 0) return std::nullopt;
  for (double& x : acc) x /= n;
  return acc;
}

}  // namespace

int Vocabulary::lookup(const std::string& term) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == term) return static_cast<int>(i);
  }
  return -1;
}

void Document::add(int32_t token_id, int64_t count) {
  counts.emplace_back(token_id, count);
}

void Document::finalize() {
  std::sort(counts.begin(), counts.end());
  std::vector<std::pair<int32_t, int64_t>> merged;
  merged.reserve(counts.size());
  for (const auto& [id, count] : counts) {
    if (!merged.empty() && merged.back().first == id) {
      merged.back().second += count;
    } else {
      merged.emplace_back(id, count);
    }
  }
  counts = std::move(merged);
  total = 0;
  for (const auto& [id, count] : counts) total += count;
}

bool Case::has_briefs(Side s) const {
  return std::any_of(briefs.begin(), briefs.end(),
                     [s](const AmicusBrief& b) { return b.side == s; });
}

void Corpus::validate() const {
  if (justices.size() < 2) throw ValidationError("roster must have >= 2 justices");
  if (std::set<std::string>(justices.begin(), justices.end()).size() !=
      justices.size()) {
    throw ValidationError("duplicate justice id in roster");
  }
  if (std::set<std::string>(vocabulary.terms.begin(), vocabulary.terms.end())
          .size() != vocabulary.terms.size()) {
    throw ValidationError("duplicate vocabulary term");
  }
  std::set<std::string> ids;
  for (const Case& kase : cases) {
    if (!ids.insert(kase.id).second) {
      throw ValidationError("duplicate case id " + kase.id);
    }
    validate_document(kase.merits, vocabulary.size(), "case " + kase.id + " merits");
    if (kase.merits.total <= 0) {
      throw ValidationError("case " + kase.id + ": merits document is empty");
    }
    for (std::size_t k = 0; k < kase.briefs.size(); ++k) {
      validate_document(kase.briefs[k].doc, vocabulary.size(),
                        "case " + kase.id + " brief " + std::to_string(k));
    }
    for (const auto& [justice, side] : kase.votes) {
      if (justice_index(justice) < 0) {
        throw ValidationError("case " + kase.id + ": vote by unknown justice " +
                              justice);
      }
      (void)side;
    }
  }
}

int Corpus::justice_index(const std::string& id) const {
  for (std::size_t j = 0; j < justices.size(); ++j) {
    if (justices[j] == id) return static_cast<int>(j);
  }
  return -1;
}

const Case* Corpus::find_case(const std::string& id) const {
  for (const Case& kase : cases) {
    if (kase.id == id) return &kase;
  }
  return nullptr;
}

void SynthConfig::validate() const {
  if (num_cases < 1) throw ValidationError("num_cases must be >= 1");
  if (num_justices < 2) throw ValidationError("num_justices must be >= 2");
  if (num_topics < 2) throw ValidationError("num_topics must be >= 2");
  if (vocab_size < num_topics) {
    throw ValidationError("vocab_size must be >= num_topics");
  }
  if (tokens_per_doc < 1) throw ValidationError("tokens_per_doc must be >= 1");
  if (briefs_per_case_range.first < 0 ||
      briefs_per_case_range.second < briefs_per_case_range.first) {
    throw ValidationError("briefs_per_case_range must satisfy 0 <= min <= max");
  }
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
  if (!(rho_fixed > 0.0 && rho_fixed < 1.0)) {
    throw ValidationError("rho_fixed must be in (0,1)");
  }
  if (!(sigma_kappa > 0.0)) throw ValidationError("sigma_kappa must be > 0");
  if (!(xi > 0.0)) throw ValidationError("xi must be > 0");
  if (brief_candidates < 1) throw ValidationError("brief_candidates must be >= 1");
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file " + path);

  Corpus corpus;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::set<std::string> seen_ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json rec = parse_line(line, line_no);

    if (!have_header) {
      if (!rec.contains("schema_version") || rec["schema_version"] != 1) {
        fail_line(line_no, "header must carry schema_version 1");
      }
      if (!rec.contains("vocabulary") || !rec["vocabulary"].is_array() ||
          !rec.contains("justices") || !rec["justices"].is_array()) {
        fail_line(line_no, "header must carry vocabulary and justices arrays");
      }
      for (const auto& term : rec["vocabulary"]) {
        if (!term.is_string()) fail_line(line_no, "vocabulary term must be a string");
        corpus.vocabulary.terms.push_back(term.get<std::string>());
      }
      for (const auto& justice : rec["justices"]) {
        if (!justice.is_string()) fail_line(line_no, "justice id must be a string");
        corpus.justices.push_back(justice.get<std::string>());
      }
      have_header = true;
      continue;
    }

    Case kase;
    if (!rec.contains("id") || !rec["id"].is_string()) {
      fail_line(line_no, "case must carry a string id");
    }
    kase.id = rec["id"].get<std::string>();
    if (!seen_ids.insert(kase.id).second) {
      fail_line(line_no, "duplicate case id " + kase.id);
    }
    if (!rec.contains("merits")) fail_line(line_no, "case must carry merits");
    kase.merits =
        document_from_json(rec["merits"], line_no, corpus.vocabulary.size(), "merits");
    if (kase.merits.total <= 0) fail_line(line_no, "merits document is empty");

    if (rec.contains("briefs")) {
      if (!rec["briefs"].is_array()) fail_line(line_no, "briefs must be an array");
      for (const auto& brief : rec["briefs"]) {
        if (!brief.contains("side") || !brief["side"].is_string()) {
          fail_line(line_no, "brief must carry a side");
        }
        AmicusBrief b;
        try {
          b.side = side_from_string(brief["side"].get<std::string>());
        } catch (const ValidationError& e) {
          fail_line(line_no, e.what());
        }
        if (!brief.contains("tokens")) fail_line(line_no, "brief must carry tokens");
        b.doc = document_from_json(brief["tokens"], line_no,
                                   corpus.vocabulary.size(), "brief tokens");
        kase.briefs.push_back(std::move(b));
      }
    }

    if (rec.contains("votes")) {
      if (!rec["votes"].is_object()) fail_line(line_no, "votes must be an object");
      for (const auto& [justice, side] : rec["votes"].items()) {
        if (std::find(corpus.justices.begin(), corpus.justices.end(), justice) ==
            corpus.justices.end()) {
          fail_line(line_no, "unknown justice id " + justice);
        }
        if (!side.is_string()) fail_line(line_no, "vote value must be a string");
        try {
          kase.votes[justice] = side_from_string(side.get<std::string>());
        } catch (const ValidationError& e) {
          fail_line(line_no, e.what());
        }
      }
    }
    corpus.cases.push_back(std::move(kase));
  }
  if (!have_header) throw ValidationError("corpus file has no header line");
  corpus.validate();
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write corpus file " + path);

  json header;
  header["schema_version"] = 1;
  header["vocabulary"] = corpus.vocabulary.terms;
  header["justices"] = corpus.justices;
  out << header.dump() << '\n';

  for (const Case& kase : corpus.cases) {
    json rec;
    rec["id"] = kase.id;
    rec["merits"] = document_to_json(kase.merits);
    json briefs = json::array();
    for (const AmicusBrief& b : kase.briefs) {
      briefs.push_back(
          {{"side", to_string(b.side)}, {"tokens", document_to_json(b.doc)}});
    }
    rec["briefs"] = std::move(briefs);
    json votes = json::object();
    for (const auto& [justice, side] : kase.votes) votes[justice] = to_string(side);
    rec["votes"] = std::move(votes);
    out << rec.dump() << '\n';
  }
  if (!out) throw ValidationError("failed writing corpus file " + path);
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write ground truth file " + path);
  json rec;
  rec["rho"] = truth.rho;
  rec["phi"] = truth.phi;
  rec["theta"] = truth.theta;
  rec["delta"] = truth.delta;
  rec["psi"] = truth.psi;
  json kappas = json::array();
  for (const CaseParams& k : truth.kappa) {
    kappas.push_back({{"a", k.a}, {"b", k.b}, {"c_p", k.c_p}, {"c_r", k.c_r}});
  }
  rec["kappa"] = std::move(kappas);
  out << rec.dump() << '\n';
  if (!out) throw ValidationError("failed writing ground truth file " + path);
}

GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open ground truth file " + path);
  json rec;
  try {
    in >> rec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ground truth file: ") + e.what());
  }
  GroundTruth truth;
  try {
    truth.rho = rec.at("rho").get<double>();
    truth.phi = rec.at("phi").get<std::vector<std::vector<double>>>();
    truth.theta = rec.at("theta").get<std::vector<std::vector<double>>>();
    truth.delta =
        rec.at("delta").get<std::vector<std::vector<std::vector<double>>>>();
    truth.psi = rec.at("psi").get<std::vector<std::vector<double>>>();
    for (const auto& k : rec.at("kappa")) {
      CaseParams kappa;
      kappa.a = k.at("a").get<double>();
      kappa.b = k.at("b").get<double>();
      kappa.c_p = k.at("c_p").get<double>();
      kappa.c_r = k.at("c_r").get<double>();
      truth.kappa.push_back(kappa);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ground truth file: ") + e.what());
  }
  return truth;
}

std::vector<double> sample_brief_mixture(
    const std::vector<double>& theta,
    const std::vector<std::vector<double>>& psi_all, const CaseParams& kappa,
    Side side, double xi, double alpha, int num_candidates, uint64_t seed) {
  if (!is_simplex(theta, 1e-6)) {
    throw ValidationError("sample_brief_mixture: theta is not on the simplex");
  }
  if (num_candidates < 1) {
    throw ValidationError("sample_brief_mixture: num_candidates must be >= 1");
  }
  const int dims = static_cast<int>(theta.size());
  Rng rng(seed);
  std::vector<std::vector<double>> candidates;
  std::vector<double> weights;
  candidates.reserve(num_candidates);
  weights.reserve(num_candidates);
  double weight_sum = 0.0;
  for (int c = 0; c < num_candidates; ++c) {
    candidates.push_back(rng.dirichlet(alpha, dims));
    const double w =
        putil_factor(psi_all, theta, candidates.back(), kappa, side, xi);
    weights.push_back(w);
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) {
    throw NumericalError(
        "sample_brief_mixture: all candidate weights are zero");
  }
  const double u = rng.uniform() * weight_sum;
  double run = 0.0;
  for (int c = 0; c < num_candidates; ++c) {
    run += weights[c];
    if (u < run) return candidates[c];
  }
  return candidates.back();
}

std::map<std::string, Side> sample_votes(
    const std::vector<std::string>& justices,
    const std::vector<IdealPoint>& psi_all, const std::vector<double>& theta,
    const std::vector<double>* delta_p, const std::vector<double>* delta_r,
    const CaseParams& kappa, Rng& rng) {
  std::map<std::string, Side> votes;
  for (std::size_t j = 0; j < justices.size(); ++j) {
    const double logit =
        vote_logit(psi_all[j], theta, delta_p, delta_r, kappa, ModelKind::Amici);
    votes[justices[j]] =
        rng.bernoulli(sigmoid(logit)) ? Side::Petitioner : Side::Respondent;
  }
  return votes;
}

std::pair<Corpus, GroundTruth> generate_synthetic(const SynthConfig& cfg,
                                                  uint64_t seed) {
  cfg.validate();
  const int dims = cfg.num_topics;
  const int v_size = cfg.vocab_size;

  Corpus corpus;
  GroundTruth truth;
  truth.rho = cfg.rho_fixed;

  corpus.vocabulary.terms.reserve(v_size);
  for (int v = 0; v < v_size; ++v) {
    corpus.vocabulary.terms.push_back("t" + std::to_string(v));
  }
  for (int j = 0; j < cfg.num_justices; ++j) {
    corpus.justices.push_back("j" + std::to_string(j + 1));
  }

  truth.phi.reserve(dims);
  for (int d = 0; d < dims; ++d) {
    Rng rng(derive_seed(seed, kStreamPhi, d));
    truth.phi.push_back(rng.dirichlet(cfg.beta, v_size));
  }

  const double sd_component = std::sqrt(cfg.lambda);
  const double sd_shared = std::sqrt(cfg.rho_fixed);
  for (int j = 0; j < cfg.num_justices; ++j) {
    Rng rng(derive_seed(seed, kStreamPsi, j));
    // psi = sqrt(lambda) z + sqrt(rho) g 1 has covariance lambda I + rho 11^T.
    const double g = rng.normal();
    IdealPoint psi(dims);
    for (int d = 0; d < dims; ++d) {
      psi[d] = sd_component * rng.normal() + sd_shared * g;
    }
    truth.psi.push_back(std::move(psi));
  }

  const double sd_kappa = std::sqrt(cfg.sigma_kappa);
  const int brief_span =
      cfg.briefs_per_case_range.second - cfg.briefs_per_case_range.first + 1;

  for (int i = 0; i < cfg.num_cases; ++i) {
    Rng rng_kappa(derive_seed(seed, kStreamKappa, i));
    CaseParams kappa;
    kappa.a = rng_kappa.normal(0.0, sd_kappa);
    kappa.b = rng_kappa.normal(0.0, sd_kappa);
    kappa.c_p = rng_kappa.normal(0.0, sd_kappa);
    kappa.c_r = rng_kappa.normal(0.0, sd_kappa);

    Rng rng_theta(derive_seed(seed, kStreamTheta, i));
    std::vector<double> theta = rng_theta.dirichlet(cfg.alpha, dims);

    Rng rng_briefs(derive_seed(seed, kStreamBriefs, i));
    const int num_briefs =
        cfg.briefs_per_case_range.first +
        static_cast<int>(rng_briefs.uniform_int(brief_span));
    std::vector<Side> sides(num_briefs);
    for (int k = 0; k < num_briefs; ++k) {
      sides[k] = rng_briefs.bernoulli(0.5) ? Side::Petitioner : Side::Respondent;
    }

    std::vector<std::vector<double>> brief_mixtures;
    brief_mixtures.reserve(num_briefs);
    for (int k = 0; k < num_briefs; ++k) {
      const uint64_t sub = derive_seed(seed, kStreamBriefMix, brief_key(i, k));
      if (cfg.utility_briefs) {
        brief_mixtures.push_back(sample_brief_mixture(
            theta, truth.psi, kappa, sides[k], cfg.xi, cfg.alpha,
            cfg.brief_candidates, sub));
      } else {
        Rng rng_mix(sub);
        brief_mixtures.push_back(rng_mix.dirichlet(cfg.alpha, dims));
      }
    }

    Case kase;
    kase.id = "case_" + std::to_string(i + 1);
    {
      Rng rng_tokens(derive_seed(seed, kStreamMeritsTokens, i));
      kase.merits = draw_document(rng_tokens, mixture_word_cdf(truth.phi, theta),
                                  cfg.tokens_per_doc);
    }
    for (int k = 0; k < num_briefs; ++k) {
      Rng rng_tokens(derive_seed(seed, kStreamBriefTokens, brief_key(i, k)));
      AmicusBrief brief;
      brief.side = sides[k];
      brief.doc = draw_document(
          rng_tokens, mixture_word_cdf(truth.phi, brief_mixtures[k]),
          cfg.tokens_per_doc);
      kase.briefs.push_back(std::move(brief));
    }

    const auto delta_p = side_mean(kase.briefs, brief_mixtures,
                                   Side::Petitioner, dims);
    const auto delta_r = side_mean(kase.briefs, brief_mixtures,
                                   Side::Respondent, dims);
    Rng rng_votes(derive_seed(seed, kStreamVotes, i));
    kase.votes = sample_votes(corpus.justices, truth.psi, theta,
                              delta_p ? &*delta_p : nullptr,
                              delta_r ? &*delta_r : nullptr, kappa, rng_votes);

    corpus.cases.push_back(std::move(kase));
    truth.theta.push_back(std::move(theta));
    truth.delta.push_back(std::move(brief_mixtures));
    truth.kappa.push_back(kappa);
  }

  corpus.validate();
  return {std::move(corpus), std::move(truth)};
}

}  // namespace amicus
