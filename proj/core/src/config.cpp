#include "dsner/config.hpp"

#include <fstream>
#include <stdexcept>

namespace dsner {

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not key=value: '" + line + "'");
    }
    auto trim = [](std::string s) {
      const std::size_t a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      const std::size_t b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto flag = [&](const char* name) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw std::runtime_error("config: bad boolean for " + std::string(name) + ": '" + value + "'");
  };
  if (key == "train") c.train_path = value;
  else if (key == "dev") c.dev_path = value;
  else if (key == "test") c.test_path = value;
  else if (key == "pred") c.pred_path = value;
  else if (key == "embeddings") c.embeddings_path = value;
  else if (key == "model") c.model_path = value;
  else if (key == "out") c.out_path = value;
  else if (key == "structure") c.model.structure = std::stoi(value);
  else if (key == "layers") c.model.layers = std::stoul(value);
  else if (key == "lstm_size") c.model.lstm_size = std::stoul(value);
  else if (key == "word_dim") c.model.word_dim = std::stoul(value);
  else if (key == "use_char") c.model.use_char = flag("use_char");
  else if (key == "char_dim") c.model.char_dim = std::stoul(value);
  else if (key == "char_filters") c.model.char_filters = std::stoul(value);
  else if (key == "char_window") c.model.char_window = std::stoul(value);
  else if (key == "char_emb_stddev") c.model.char_emb_stddev = std::stod(value);
  else if (key == "offsets") c.model.offsets = std::stoul(value);
  else if (key == "window") c.model.offset_window = std::stoul(value);
  else if (key == "offset_mode") c.model.offset_mode = offset_mode_from_name(value);
  else if (key == "epochs") c.train.epochs = std::stoul(value);
  else if (key == "batch") c.train.batch_size = std::stoul(value);
  else if (key == "seed") c.train.seed = std::stoull(value);
  else if (key == "dropout") c.train.dropout = std::stod(value);
  else if (key == "lr") c.train.sgd.lr = std::stod(value);
  else if (key == "lr_decay") c.train.sgd.lr_decay = std::stod(value);
  else if (key == "momentum") c.train.sgd.momentum = std::stod(value);
  else if (key == "l2") c.train.sgd.l2 = std::stod(value);
  else if (key == "clip_norm") c.train.sgd.clip_norm = std::stod(value);
  else if (key == "clip") c.train.sgd.clip = flag("clip");
  else if (key == "bioes_decode") c.bioes_decode = flag("bioes_decode");
  else if (key == "tag_scheme") {
    if (value != "bio" && value != "bioes")
      throw std::runtime_error("config: tag_scheme must be bio or bioes, got '" + value + "'");
    c.tag_scheme = value;
  } else {
    throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  for (const auto& [k, v] : parse_key_values(in)) apply_setting(config, k, v);
}

}  // namespace dsner
