// Command-line front end: train | tag | eval | inspect-offsets | synth.
// A key=value config file seeds the settings, explicit flags override it.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsner/commands.hpp"
#include "dsner/synthetic.hpp"

namespace {

struct FlagSet {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Registers the shared flags on a subcommand; every provided flag lands in
// `flags.overrides` so config-file values and CLI values share one code path.
void add_common_options(CLI::App* cmd, FlagSet& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");
  auto capture = [&flags](const std::string& key) {
    return [&flags, key](const std::string& value) {
      flags.overrides.emplace_back(key, value);
    };
  };
  cmd->add_option_function<std::string>("--train", capture("train"), "training corpus (CoNLL columns)");
  cmd->add_option_function<std::string>("--dev", capture("dev"), "development corpus");
  cmd->add_option_function<std::string>("--test", capture("test"), "test/input corpus");
  cmd->add_option_function<std::string>("--pred", capture("pred"), "predictions file (eval)");
  cmd->add_option_function<std::string>("--embeddings", capture("embeddings"), "GloVe-style text embeddings");
  cmd->add_option_function<std::string>("--model", capture("model"), "model archive path");
  cmd->add_option_function<std::string>("--out", capture("out"), "output path");
  cmd->add_option_function<std::string>("--structure", capture("structure"),
                                        "deformable structure 1|2|3")
      ->check(CLI::IsMember({"1", "2", "3"}));
  cmd->add_option_function<std::string>("--offsets", capture("offsets"), "offset count k");
  cmd->add_option_function<std::string>("--window", capture("window"), "offset CNN window w");
  cmd->add_option_function<std::string>("--seed", capture("seed"), "random seed");
  cmd->add_option_function<std::string>("--epochs", capture("epochs"), "training epochs");
  cmd->add_option_function<std::string>("--lr", capture("lr"), "learning rate");
  cmd->add_option_function<std::string>("--batch", capture("batch"), "batch size");
  cmd->add_option_function<std::string>("--layers", capture("layers"), "BiLSTM layers");
  cmd->add_option_function<std::string>("--lstm-size", capture("lstm_size"), "LSTM state size per direction");
  cmd->add_option_function<std::string>("--dropout", capture("dropout"), "dropout rate");
  cmd->add_flag_callback("--no-char",
                         [&flags] { flags.overrides.emplace_back("use_char", "0"); },
                         "disable character features");
  cmd->add_flag_callback("--bioes-decode",
                         [&flags] { flags.overrides.emplace_back("bioes_decode", "1"); },
                         "constrain decoding to valid BIOES transitions");
}

dsner::RunConfig resolve(const FlagSet& flags, const std::string& command) {
  dsner::RunConfig config;
  config.command = command;
  if (!flags.config_path.empty()) dsner::apply_config_file(config, flags.config_path);
  for (const auto& [key, value] : flags.overrides) dsner::apply_setting(config, key, value);
  return config;
}

int run_synth(const std::string& out_path, std::size_t count, std::uint64_t seed) {
  const std::vector<dsner::RawSentence> corpus = dsner::synthetic_corpus(count, seed);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("synth: cannot write " + out_path);
  dsner::write_conll(out, corpus);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deformable stacked BiLSTM-CRF sequence labeler"};
  app.require_subcommand(1);

  FlagSet train_flags, tag_flags, eval_flags, inspect_flags;
  CLI::App* train = app.add_subcommand("train", "train a model and save the archive");
  add_common_options(train, train_flags);
  CLI::App* tag = app.add_subcommand("tag", "tag a corpus with a saved model");
  add_common_options(tag, tag_flags);
  CLI::App* eval = app.add_subcommand("eval", "entity P/R/F1 of predictions against gold");
  add_common_options(eval, eval_flags);
  CLI::App* inspect = app.add_subcommand("inspect-offsets", "dump offsets and their densities");
  add_common_options(inspect, inspect_flags);

  std::string synth_out = "synthetic.conll";
  std::size_t synth_count = 50;
  std::uint64_t synth_seed = 7;
  CLI::App* synth = app.add_subcommand("synth", "write the bundled synthetic corpus");
  synth->add_option("--out", synth_out, "output corpus path");
  synth->add_option("--sentences", synth_count, "sentence count");
  synth->add_option("--seed", synth_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return dsner::cmd_train(resolve(train_flags, "train"));
    if (tag->parsed()) return dsner::cmd_tag(resolve(tag_flags, "tag"));
    if (eval->parsed()) return dsner::cmd_eval(resolve(eval_flags, "eval"));
    if (inspect->parsed())
      return dsner::cmd_inspect_offsets(resolve(inspect_flags, "inspect-offsets"));
    if (synth->parsed()) return run_synth(synth_out, synth_count, synth_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
