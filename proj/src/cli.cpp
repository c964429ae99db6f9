#include "hintbits/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "hintbits/embedding_store.hpp"
#include "hintbits/errors.hpp"
#include "hintbits/experiments.hpp"
#include "hintbits/report.hpp"
#include "hintbits/testsets.hpp"

namespace hintbits {

namespace {

struct EvalArgs {
  std::string embeddings;
  std::string testset;
  std::string format = "gats";
  double bias = kDefaultBiasBits;
  std::optional<std::size_t> i0_m;
  std::optional<std::size_t> vocab_limit;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string out = "csv";
  std::string output;
  std::optional<std::size_t> bats_sample;
  bool case_sensitive = false;
  bool record_timing = false;
};

struct GameArgs {
  std::size_t n = 10;
  std::size_t g = 100000;
  std::uint64_t seed = 0;
  std::string output;
};

struct ModelArgs {
  std::size_t m = 2000;
  std::size_t dim = 50;
  double noise = 0.01;
  double phi_norm = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string output;
  bool record_timing = false;
};

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(output, std::ios::binary);
  if (!file) throw InputError("cannot write " + output);
  file << text;
  if (!file) throw InputError("failed writing " + output);
}

std::string opt_str(const std::optional<std::size_t>& v, const char* unset) {
  return v ? std::to_string(*v) : std::string(unset);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  GameConfig cfg;
  cfg.bias_bits = a.bias;
  cfg.i0_m = a.i0_m;
  cfg.seed = a.seed;
  cfg.parallelism = a.threads;
  cfg.validate();

  ReportFormat fmt = ReportFormat::kCsv;
  if (a.out == "json") fmt = ReportFormat::kJson;
  if (a.out == "md") fmt = ReportFormat::kMarkdown;

  LoadOptions opts;
  opts.vocab_limit = a.vocab_limit;
  opts.lowercase = !a.case_sensitive;
  auto loaded = load_embeddings_file(a.embeddings, opts);
  const auto& store = loaded.store;

  TestSet raw;
  PairingPolicy pairing;
  if (a.format == "bats") {
    pairing.sample_per_file = a.bats_sample;
    pairing.seed = a.seed;
    raw = load_bats(a.testset, pairing);
  } else {
    raw = parse_gats_file(a.testset);
  }
  const auto bound = bind(raw, store);
  const auto result = evaluate_test_set(store, bound, cfg);

  std::size_t evaluated = 0;
  for (const auto& r : result.rows) evaluated += r.g;
  if (evaluated == 0) {
    err << "error: no question could be evaluated in any subset\n";
    return kExitNothingBound;
  }

  std::vector<SubsetReport> rows = result.rows;
  rows.push_back(average_row(result.rows, Weighting::kByCount, "weighted-average"));
  rows.push_back(average_row(result.rows, Weighting::kUniform, "unweighted-average"));

  RunManifest manifest;
  manifest.command = "eval";
  manifest.set("format", a.format);
  manifest.set("bias_bits", format_number(cfg.bias_bits));
  manifest.set("i0_m", std::to_string(result.i0_m));
  manifest.set("vocab_limit", opt_str(a.vocab_limit, "none"));
  manifest.set("lowercase", opts.lowercase ? "true" : "false");
  manifest.set("seed", std::to_string(a.seed));
  if (a.format == "bats") {
    manifest.set("bats_pairing", a.bats_sample
                                     ? "sample " + std::to_string(*a.bats_sample) + " per file"
                                     : std::string("all ordered pairs"));
  }
  manifest.set("tie_rule", "equal scores: lower vocabulary index ranks first");
  manifest.set("multi_target_rank", "best rank over acceptable targets");
  manifest.set("average_rows",
               "weighted-average: weights = evaluated questions per subset; "
               "unweighted-average: equal weights; soft accuracies combined "
               "geometrically");
  manifest.set("vocabulary_size", std::to_string(store.size()));
  manifest.set("dimension", std::to_string(store.dim()));
  manifest.set("zero_vectors_dropped",
               std::to_string(loaded.stats.zero_vectors_dropped));
  manifest.set("duplicates_dropped", std::to_string(loaded.stats.duplicates_dropped));
  manifest.set("questions_with_excluded_targets",
               std::to_string(result.excluded_target_questions));
  manifest.add_input(a.embeddings, sha256_path(a.embeddings));
  manifest.add_input(a.testset, sha256_path(a.testset));
  if (a.record_timing) manifest.wall_clock_seconds = seconds_since(t0);

  emit(render_eval_report(manifest, rows, fmt), a.output, out);
  err << "eval: " << evaluated << " questions in " << result.rows.size()
      << " subsets, " << seconds_since(t0) << " s\n";
  return kExitOk;
}

int cmd_simulate_game(const GameArgs& a, std::ostream& out) {
  const auto checkpoints = log_checkpoints(a.g);
  const auto curve = simulate_random_hint_game(a.n, a.g, a.seed, checkpoints);
  RunManifest manifest;
  manifest.command = "simulate-game";
  manifest.set("n", std::to_string(a.n));
  manifest.set("g", std::to_string(a.g));
  manifest.set("seed", std::to_string(a.seed));
  manifest.set("bias_bits", format_number(bias(a.n)));
  emit(render_curve_csv(manifest, curve), a.output, out);
  return kExitOk;
}

int cmd_simulate_model(const ModelArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(a.noise >= 0.0)) throw PreconditionError("--noise must be >= 0");
  CoarseModelParams params;
  params.m = a.m;
  params.d = a.dim;
  params.phi_norm = a.phi_norm;
  params.noise_sigma = a.noise * a.phi_norm;
  params.seed = a.seed;
  const auto model = generate_coarse_model(params);
  const auto result = run_offset_only(model, a.threads);

  RunManifest manifest;
  manifest.command = "simulate-model";
  manifest.set("m", std::to_string(a.m));
  manifest.set("dim", std::to_string(a.dim));
  manifest.set("noise_relative_to_phi", format_number(a.noise));
  manifest.set("phi_norm", format_number(a.phi_norm));
  manifest.set("seed", std::to_string(a.seed));
  if (a.record_timing) manifest.wall_clock_seconds = seconds_since(t0);
  emit(render_model_summary(manifest, {params, result}), a.output, out);
  err << "simulate-model: info gain " << result.info_gain_bits << " bits\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Information content of hints in word analogy tests"};
  app.name("hintbits");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Run single-hint and two-hints games over a test set");
  eval_cmd->add_option("--embeddings", eval.embeddings, "Plain-text embedding file")
      ->required();
  eval_cmd->add_option("--testset", eval.testset,
                       "GATS question file or BATS root directory")
      ->required();
  eval_cmd->add_option("--format", eval.format, "Test set format")
      ->check(CLI::IsMember({"gats", "bats"}));
  eval_cmd->add_option("--bias", eval.bias, "Bias compensation in bits (<= 0)");
  eval_cmd->add_option("--i0-m", eval.i0_m,
                       "Vocabulary size used for I0 (default: loaded size)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--vocab-limit", eval.vocab_limit,
                       "Keep only the first K embedding lines")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--threads", eval.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval.seed, "Seed for BATS pair sampling");
  eval_cmd->add_option("--out", eval.out, "Report format")
      ->check(CLI::IsMember({"csv", "json", "md"}));
  eval_cmd->add_option("--output,-o", eval.output, "Report path (default stdout)");
  eval_cmd->add_option("--bats-sample", eval.bats_sample,
                       "Sample K ordered line pairs per BATS file")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--case-sensitive", eval.case_sensitive,
                     "Do not lowercase tokens");
  eval_cmd->add_flag("--record-timing", eval.record_timing,
                     "Embed wall-clock duration in the manifest");

  GameArgs game;
  auto* game_cmd = app.add_subcommand(
      "simulate-game", "Hard vs soft accuracy under random hints");
  game_cmd->add_option("--n", game.n, "Number of equally likely symbols");
  game_cmd->add_option("--g", game.g, "Number of guesses");
  game_cmd->add_option("--seed", game.seed, "Random seed");
  game_cmd->add_option("--output,-o", game.output, "Curve CSV path (default stdout)");

  ModelArgs model;
  auto* model_cmd = app.add_subcommand(
      "simulate-model", "Offset-only game on a synthetic paired embedding");
  model_cmd->add_option("--m", model.m, "Number of words (even)");
  model_cmd->add_option("--dim", model.dim, "Dimensionality");
  model_cmd->add_option("--noise", model.noise,
                        "Per-coordinate noise sigma, as a fraction of |phi|");
  model_cmd->add_option("--phi-norm", model.phi_norm, "Length of the shared offset");
  model_cmd->add_option("--seed", model.seed, "Random seed");
  model_cmd->add_option("--threads", model.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  model_cmd->add_option("--output,-o", model.output, "Summary path (default stdout)");
  model_cmd->add_flag("--record-timing", model.record_timing,
                      "Embed wall-clock duration in the manifest");

  auto* dice_cmd =
      app.add_subcommand("dice-demo", "Loaded-dice walkthrough of the estimators");

  std::vector<const char*> argv;
  argv.push_back("hintbits");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitBadInput;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval, out, err);
    if (game_cmd->parsed()) return cmd_simulate_game(game, out);
    if (model_cmd->parsed()) return cmd_simulate_model(model, out, err);
    if (dice_cmd->parsed()) {
      out << render_dice_walkthrough(compute_dice_walkthrough());
      return kExitOk;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitDefect;
  }
  return kExitDefect;
}

}  // namespace hintbits
