#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "dsner/model.hpp"
#include "dsner/train.hpp"

namespace dsner {

/// Everything one CLI invocation needs: the command, its paths, the model
/// architecture and the training knobs. Values come from a key=value config
/// file, then explicit command-line flags override them.
struct RunConfig {
  std::string command;
  std::string train_path, dev_path, test_path, pred_path;
  std::string embeddings_path, model_path, out_path;
  ModelConfig model;
  TrainConfig train;
  bool bioes_decode = false;  // constrain decoding to valid BIOES bigrams
  std::string tag_scheme = "bio";  // input corpus scheme: bio | bioes
};

/// key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Applies one setting by key; throws on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

void apply_config_file(RunConfig& config, const std::string& path);

}  // namespace dsner
