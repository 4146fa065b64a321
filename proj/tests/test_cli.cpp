#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "doctest.h"
#include "testutil.hpp"

namespace tu = amicus::testutil;

namespace {

#ifndef AMICUS_BIN
#error "AMICUS_BIN must point at the cli binary"
#endif

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = tu::tmp_path("cli_stdout.txt");
  const std::string cmd = std::string(AMICUS_BIN) + " " + args + " > " +
                          out_path + " 2> " + tu::tmp_path("cli_stderr.txt");
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.stdout_text = tu::read_file(out_path);
  return result;
}

// One tiny corpus shared by the whole binary; built on first use.
struct Fixture {
  std::string config = tu::tmp_path("cli_cfg.txt");
  std::string corpus = tu::tmp_path("cli_corpus.jsonl");
  std::string truth = tu::tmp_path("cli_truth.json");
  std::string model = tu::tmp_path("cli_model.json");
  std::string mixtures = tu::tmp_path("cli_mixtures.json");
  std::string fit = tu::tmp_path("cli_fit.json");

  Fixture() {
    tu::write_file(config,
                   "# cli test configuration\n"
                   "kind = amici\n"
                   "num_topics = 3\n"
                   "beta = 0.05\n"
                   "num_cases = 20\n"
                   "num_justices = 9\n"
                   "vocab_size = 40\n"
                   "tokens_per_doc = 60\n"
                   "briefs_max = 2\n"
                   "lda_iters = 40\n"
                   "lda_burn_in = 20\n"
                   "infer_iters = 20\n"
                   "infer_burn_in = 10\n"
                   "gibbs_iters = 8\n"
                   "mh_steps_per_block = 30\n"
                   "mh_burn_in = 15\n"
                   "mh_thin = 3\n"
                   "folds = 5\n"
                   "num_samples = 32\n"
                   "seed = 5\n");
    REQUIRE(run_cli("synth --config " + config + " --out " + corpus +
                    " --out-truth " + truth)
                .exit_code == 0);
    REQUIRE(run_cli("lda-fit --config " + config + " --corpus " + corpus +
                    " --out-model " + model + " --out-mixtures " + mixtures)
                .exit_code == 0);
    REQUIRE(run_cli("fit --config " + config + " --corpus " + corpus +
                    " --mixtures " + mixtures + " --out " + fit)
                .exit_code == 0);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

std::string first_case_id(const std::string& corpus_path) {
  const std::string text = tu::read_file(corpus_path);
  const auto id_pos = text.find("\"id\":\"");
  REQUIRE(id_pos != std::string::npos);
  const auto start = id_pos + 6;
  const auto end = text.find('"', start);
  return text.substr(start, end - start);
}

}  // namespace

TEST_CASE("synth is a pure function of config and seed") {
  const Fixture& f = fixture();
  const std::string corpus2 = tu::tmp_path("cli_corpus2.jsonl");
  const std::string truth2 = tu::tmp_path("cli_truth2.json");
  REQUIRE(run_cli("synth --config " + f.config + " --out " + corpus2 +
                  " --out-truth " + truth2)
              .exit_code == 0);
  CHECK(tu::read_file(corpus2) == tu::read_file(f.corpus));
  CHECK(tu::read_file(truth2) == tu::read_file(f.truth));

  const std::string corpus3 = tu::tmp_path("cli_corpus3.jsonl");
  REQUIRE(run_cli("synth --config " + f.config + " --seed 6 --out " + corpus3 +
                  " --out-truth " + truth2)
              .exit_code == 0);
  CHECK(tu::read_file(corpus3) != tu::read_file(f.corpus));
}

TEST_CASE("predict defaults to keeping every brief") {
  const Fixture& f = fixture();
  const std::string case_id = first_case_id(f.corpus);
  const std::string base = " --fit " + f.fit + " --corpus " + f.corpus +
                           " --mixtures " + f.mixtures + " --case " + case_id +
                           " --samples 32 --seed 9";
  const RunResult plain = run_cli("predict" + base);
  const RunResult keep_all = run_cli("predict --keep all" + base);
  REQUIRE(plain.exit_code == 0);
  REQUIRE(keep_all.exit_code == 0);
  CHECK(plain.stdout_text == keep_all.stdout_text);
  CHECK(plain.stdout_text.find("\"marginals\"") != std::string::npos);
  CHECK(plain.stdout_text.find("\"partition\"") != std::string::npos);

  const RunResult none = run_cli("predict --keep none" + base);
  REQUIRE(none.exit_code == 0);
  CHECK(none.stdout_text.find("\"keep\": \"none\"") != std::string::npos);
}

TEST_CASE("eval-cv writes one row per fold and model") {
  const Fixture& f = fixture();
  const std::string report = tu::tmp_path("cli_cv.csv");
  const std::string summary = tu::tmp_path("cli_cv.json");
  REQUIRE(run_cli("eval-cv --config " + f.config + " --corpus " + f.corpus +
                  " --out " + report + " --out-summary " + summary)
              .exit_code == 0);
  const std::string text = tu::read_file(report);
  CHECK(text.rfind("fold,model,accuracy\n", 0) == 0);
  std::size_t rows = 0;
  for (char ch : text) {
    if (ch == '\n') ++rows;
  }
  CHECK(rows == 16);  // header + 5 folds x 3 models
  const std::string json = tu::read_file(summary);
  CHECK(json.find("\"unanimous\"") != std::string::npos);
  CHECK(json.find("\"logreg\"") != std::string::npos);
}

TEST_CASE("counterfactual subcommands emit csv artifacts") {
  const Fixture& f = fixture();
  const std::string case_id = first_case_id(f.corpus);
  const std::string dec = tu::tmp_path("cli_dec.csv");
  REQUIRE(run_cli("decompose --fit " + f.fit + " --corpus " + f.corpus +
                  " --mixtures " + f.mixtures + " --case " + case_id +
                  " --out " + dec)
              .exit_code == 0);
  CHECK(tu::read_file(dec).rfind(
            "justice,issues_only,with_pet_amici,with_resp_amici,full\n", 0) ==
        0);

  const std::string curve = tu::tmp_path("cli_curve.csv");
  const RunResult brief =
      run_cli("best-brief --fit " + f.fit + " --mixtures " + f.mixtures +
              " --case " + case_id +
              " --side petitioner --topic-a 0 --topic-b 2 --out " + curve);
  REQUIRE(brief.exit_code == 0);
  CHECK(brief.stdout_text.rfind("best: proportion_a=", 0) == 0);
  CHECK(brief.stdout_text.find("expected_votes=") != std::string::npos);
  CHECK(brief.stdout_text.find("cost=") != std::string::npos);
  CHECK(tu::read_file(curve).rfind("proportion_a,expected_votes,cost,net\n",
                                   0) == 0);
}

TEST_CASE("bad inputs exit with the validation code") {
  const Fixture& f = fixture();
  CHECK(run_cli("predict --fit " + f.fit + " --corpus " + f.corpus +
                " --mixtures " + f.mixtures + " --case no_such_case")
            .exit_code == 2);

  const std::string bad_cfg = tu::tmp_path("cli_bad_cfg.txt");
  tu::write_file(bad_cfg, "num_topcs = 3\n");
  CHECK(run_cli("synth --config " + bad_cfg + " --out " +
                tu::tmp_path("x.jsonl") + " --out-truth " +
                tu::tmp_path("y.json"))
            .exit_code == 2);

  CHECK(run_cli("fit --corpus " + f.corpus + " --out " +
                tu::tmp_path("z.json"))
            .exit_code == 2);  // amici kind needs --mixtures

  CHECK(run_cli("synth").exit_code == 2);  // missing required flags
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("predict --help").exit_code == 0);
}
