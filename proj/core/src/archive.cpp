#include "dsner/archive.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dsner {

namespace {

constexpr const char* kMagic = "dsner-archive 1";

std::string fmt_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::map<std::string, std::string> config_to_kv(const ModelConfig& c) {
  return {
      {"char_dim", std::to_string(c.char_dim)},
      {"char_emb_stddev", fmt_double(c.char_emb_stddev)},
      {"char_filters", std::to_string(c.char_filters)},
      {"char_window", std::to_string(c.char_window)},
      {"layers", std::to_string(c.layers)},
      {"lstm_size", std::to_string(c.lstm_size)},
      {"offset_mode", offset_mode_name(c.offset_mode)},
      {"offset_window", std::to_string(c.offset_window)},
      {"offsets", std::to_string(c.offsets)},
      {"structure", std::to_string(c.structure)},
      {"use_char", c.use_char ? "1" : "0"},
      {"word_dim", std::to_string(c.word_dim)},
  };
}

ModelConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  ModelConfig c;
  const auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(std::string("archive: missing config key ") + key);
    return it->second;
  };
  c.char_dim = std::stoul(get("char_dim"));
  c.char_emb_stddev = std::stod(get("char_emb_stddev"));
  c.char_filters = std::stoul(get("char_filters"));
  c.char_window = std::stoul(get("char_window"));
  c.layers = std::stoul(get("layers"));
  c.lstm_size = std::stoul(get("lstm_size"));
  c.offset_mode = offset_mode_from_name(get("offset_mode"));
  c.offset_window = std::stoul(get("offset_window"));
  c.offsets = std::stoul(get("offsets"));
  c.structure = std::stoi(get("structure"));
  c.use_char = get("use_char") == "1";
  c.word_dim = std::stoul(get("word_dim"));
  return c;
}

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string("archive: truncated at ") + what);
  return line;
}

}  // namespace

void save_model(std::ostream& out, NerModel& model) {
  out << kMagic << "\n";
  const auto kv = config_to_kv(model.config());
  out << "meta " << kv.size() << "\n";
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";

  const auto& types = model.scheme().types();
  out << "types " << types.size() << "\n";
  for (const std::string& t : types) out << t << "\n";

  out << "vocab\n";
  model.vocab().save(out);

  const std::vector<NamedParam> params = model.parameters();
  out << "tensors " << params.size() << "\n";
  std::size_t total = 0;
  for (const NamedParam& p : params) {
    out << p.name << " " << p.tensor->ndim();
    for (std::size_t d : p.tensor->shape()) out << " " << d;
    out << " f64\n";
    total += p.tensor->numel();
  }
  out << "payload " << total * sizeof(double) << "\n";
  for (const NamedParam& p : params) {
    const std::vector<double>& v = p.tensor->values();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("archive: write failed");
}

void save_model(const std::string& path, NerModel& model) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("archive: cannot open " + tmp + " for writing");
    save_model(out, model);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("archive: cannot move " + tmp + " to " + path);
  }
}

NerModel load_model(std::istream& in) {
  if (expect_line(in, "magic") != kMagic) {
    throw std::runtime_error("archive: version mismatch, expected '" + std::string(kMagic) + "'");
  }

  std::string line = expect_line(in, "meta header");
  if (line.rfind("meta ", 0) != 0) throw std::runtime_error("archive: bad meta header");
  const std::size_t meta_count = std::stoul(line.substr(5));
  std::map<std::string, std::string> kv;
  for (std::size_t i = 0; i < meta_count; ++i) {
    line = expect_line(in, "meta entry");
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("archive: bad meta line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const ModelConfig config = config_from_kv(kv);

  line = expect_line(in, "types header");
  if (line.rfind("types ", 0) != 0) throw std::runtime_error("archive: bad types header");
  const std::size_t type_count = std::stoul(line.substr(6));
  std::vector<std::string> types;
  for (std::size_t i = 0; i < type_count; ++i) types.push_back(expect_line(in, "type"));

  if (expect_line(in, "vocab header") != "vocab") throw std::runtime_error("archive: bad vocab header");
  Vocab vocab = Vocab::load(in);

  NerModel model(config, std::move(vocab), LabelScheme::from_types(std::move(types)), /*seed=*/0);

  line = expect_line(in, "tensors header");
  if (line.rfind("tensors ", 0) != 0) throw std::runtime_error("archive: bad tensors header");
  const std::size_t tensor_count = std::stoul(line.substr(8));
  const std::vector<NamedParam> params = model.parameters();
  if (tensor_count != params.size()) {
    throw std::runtime_error("archive: holds " + std::to_string(tensor_count) +
                             " tensors, model wants " + std::to_string(params.size()));
  }
  for (const NamedParam& p : params) {
    line = expect_line(in, "tensor manifest");
    std::istringstream cols(line);
    std::string name, dtype;
    std::size_t ndim = 0;
    cols >> name >> ndim;
    Shape shape(ndim);
    for (std::size_t d = 0; d < ndim; ++d) cols >> shape[d];
    cols >> dtype;
    if (!cols || name != p.name || dtype != "f64" || shape != p.tensor->shape()) {
      throw std::runtime_error("archive: manifest entry '" + line + "' does not match parameter " +
                               p.name + " " + shape_str(p.tensor->shape()));
    }
  }
  line = expect_line(in, "payload header");
  if (line.rfind("payload ", 0) != 0) throw std::runtime_error("archive: bad payload header");
  const std::size_t payload = std::stoul(line.substr(8));
  std::size_t total = 0;
  for (const NamedParam& p : params) total += p.tensor->numel();
  if (payload != total * sizeof(double)) {
    throw std::runtime_error("archive: payload size " + std::to_string(payload) +
                             " does not match manifest total " +
                             std::to_string(total * sizeof(double)));
  }
  for (const NamedParam& p : params) {
    std::vector<double>& v = p.tensor->values();
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw std::runtime_error("archive: truncated payload at " + p.name);
  }
  return model;
}

NerModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("archive: cannot open " + path);
  return load_model(in);
}

}  // namespace dsner
