#include "dsner/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dsner/archive.hpp"
#include "dsner/eval.hpp"
#include "dsner/log.hpp"

namespace dsner {

namespace {

std::vector<RawSentence> read_corpus(const std::string& path, const std::string& tag_scheme,
                                     const char* what) {
  if (path.empty()) throw std::runtime_error(std::string(what) + ": no corpus path given");
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open " + path);
  std::vector<RawSentence> raw = parse_conll(in);
  for (RawSentence& s : raw) {
    for (std::string& tok : s.tokens) tok = normalize_digits(tok);
    if (tag_scheme == "bio") s.labels = to_bioes(s.labels);
  }
  return raw;
}

Sentence inference_sentence(const RawSentence& raw, const Vocab& vocab,
                            const LabelScheme& scheme) {
  Sentence s;
  s.tokens = raw.tokens;
  s.chars.reserve(raw.tokens.size());
  for (const std::string& tok : raw.tokens) s.chars.push_back(vocab.encode_chars(tok));
  s.gold.assign(raw.tokens.size(), scheme.o_index());
  return s;
}

std::vector<std::vector<Span>> corpus_spans(const std::vector<RawSentence>& corpus) {
  std::vector<std::vector<Span>> spans;
  spans.reserve(corpus.size());
  for (const RawSentence& s : corpus) spans.push_back(extract_spans(s.labels));
  return spans;
}

double dev_f1(NerModel& model, const std::vector<RawSentence>& dev) {
  std::vector<std::vector<Span>> gold, pred;
  gold.reserve(dev.size());
  pred.reserve(dev.size());
  for (const RawSentence& raw : dev) {
    gold.push_back(extract_spans(raw.labels));
    pred.push_back(extract_spans(model.tag(inference_sentence(raw, model.vocab(), model.scheme()))));
  }
  return prf1(gold, pred).f1;
}

}  // namespace

int cmd_train(const RunConfig& config) {
  if (config.model_path.empty()) throw std::runtime_error("train: --model output path required");
  std::vector<RawSentence> raw_train = read_corpus(config.train_path, config.tag_scheme, "train");
  if (raw_train.empty()) throw std::runtime_error("train: corpus " + config.train_path + " is empty");

  std::vector<RawSentence> raw_dev;
  if (!config.dev_path.empty()) raw_dev = read_corpus(config.dev_path, config.tag_scheme, "dev");

  LabelScheme scheme = LabelScheme::from_types(collect_types(raw_train));

  // Pretrained tokens seen in dev/test join the vocabulary so their vectors
  // are usable at evaluation time.
  std::set<std::string> include;
  if (!config.embeddings_path.empty()) {
    const std::set<std::string> available = pretrained_token_set(config.embeddings_path);
    auto consider = [&](const std::vector<RawSentence>& corpus) {
      for (const RawSentence& s : corpus)
        for (const std::string& tok : s.tokens)
          if (available.count(tok)) include.insert(tok);
    };
    consider(raw_dev);
    if (!config.test_path.empty()) {
      consider(read_corpus(config.test_path, config.tag_scheme, "test"));
    }
  }
  Vocab vocab = Vocab::build(raw_train, include);

  NerModel model(config.model, std::move(vocab), std::move(scheme), config.train.seed);
  model.train_dropout = config.train.dropout;
  if (!config.embeddings_path.empty()) {
    const std::size_t covered = load_pretrained(config.embeddings_path, model.vocab(),
                                                config.model.word_dim, model.word_embedding());
    log_info("pretrained coverage: " + std::to_string(covered) + "/" +
             std::to_string(model.vocab().size()) + " rows");
  }

  const std::vector<Sentence> sentences = index_corpus(raw_train, model.vocab(), model.scheme());
  SgdMomentum optimizer(model.parameters(), config.train.sgd);

  std::ostringstream log_lines;
  std::string best_archive;
  double best_f1 = -1.0;
  for (std::size_t epoch = 0; epoch < config.train.epochs; ++epoch) {
    const EpochMetrics m = train_epoch(model, sentences, config.train, optimizer, epoch);
    std::ostringstream line;
    line << epoch << "\t" << std::setprecision(17) << m.mean_loss << "\t"
         << std::setprecision(6) << m.seconds;
    if (!raw_dev.empty()) {
      const double f1 = dev_f1(model, raw_dev);
      line << "\t" << f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        std::ostringstream snapshot(std::ios::binary);
        save_model(snapshot, model);
        best_archive = snapshot.str();
      }
    }
    std::cout << line.str() << "\n";
    log_lines << line.str() << "\n";
  }

  if (!raw_dev.empty() && !best_archive.empty()) {
    std::ofstream out(config.model_path, std::ios::binary);
    if (!out) throw std::runtime_error("train: cannot write " + config.model_path);
    out << best_archive;
  } else {
    save_model(config.model_path, model);
  }
  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) throw std::runtime_error("train: cannot write " + config.out_path);
    out << log_lines.str();
  }
  return 0;
}

namespace {

// Sentences of (original line, token) pairs; the original lines are echoed
// back with the prediction appended.
using TaggableCorpus = std::vector<std::vector<std::pair<std::string, std::string>>>;

TaggableCorpus read_taggable(const std::string& path, std::size_t token_col) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tag: cannot open " + path);
  TaggableCorpus corpus;
  std::vector<std::pair<std::string, std::string>> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (!current.empty()) corpus.push_back(std::move(current));
      current.clear();
      continue;
    }
    std::istringstream cols(line);
    std::vector<std::string> fields;
    std::string field;
    while (cols >> field) fields.push_back(field);
    if (token_col >= fields.size()) {
      throw std::runtime_error("tag: line " + std::to_string(line_no) + " lacks token column " +
                               std::to_string(token_col));
    }
    current.emplace_back(line, fields[token_col]);
  }
  if (!current.empty()) corpus.push_back(std::move(current));
  return corpus;
}

}  // namespace

int cmd_tag(const RunConfig& config) {
  if (config.model_path.empty()) throw std::runtime_error("tag: --model path required");
  if (config.test_path.empty()) throw std::runtime_error("tag: --test input path required");
  if (config.out_path.empty()) throw std::runtime_error("tag: --out output path required");
  NerModel model = load_model(config.model_path);
  const TaggableCorpus corpus = read_taggable(config.test_path, 0);

  std::ofstream out(config.out_path);
  if (!out) throw std::runtime_error("tag: cannot write " + config.out_path);
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (s) out << "\n";
    RawSentence raw;
    for (const auto& [line, token] : corpus[s]) {
      raw.tokens.push_back(normalize_digits(token));
      raw.labels.push_back("O");
    }
    const std::vector<std::string> tags =
        model.tag(inference_sentence(raw, model.vocab(), model.scheme()));
    for (std::size_t i = 0; i < corpus[s].size(); ++i) {
      out << corpus[s][i].first << "\t" << tags[i] << "\n";
    }
  }
  return 0;
}

int cmd_eval(const RunConfig& config) {
  std::vector<RawSentence> gold = read_corpus(config.test_path, config.tag_scheme, "eval gold");

  std::vector<std::vector<Span>> pred_spans;
  if (!config.pred_path.empty()) {
    std::ifstream in(config.pred_path);
    if (!in) throw std::runtime_error("eval: cannot open " + config.pred_path);
    const std::vector<RawSentence> pred = parse_conll(in);
    if (pred.size() != gold.size()) {
      throw std::runtime_error("eval: gold has " + std::to_string(gold.size()) +
                               " sentences, predictions have " + std::to_string(pred.size()));
    }
    for (std::size_t s = 0; s < pred.size(); ++s) {
      if (pred[s].tokens.size() != gold[s].tokens.size()) {
        throw std::runtime_error("eval: sentence " + std::to_string(s) + " has " +
                                 std::to_string(gold[s].tokens.size()) + " gold tokens but " +
                                 std::to_string(pred[s].tokens.size()) + " predicted");
      }
      pred_spans.push_back(extract_spans(pred[s].labels));
    }
  } else if (!config.model_path.empty()) {
    NerModel model = load_model(config.model_path);
    pred_spans.reserve(gold.size());
    for (const RawSentence& raw : gold) {
      pred_spans.push_back(
          extract_spans(model.tag(inference_sentence(raw, model.vocab(), model.scheme()))));
    }
  } else {
    throw std::runtime_error("eval: need --pred predictions or --model to tag with");
  }

  const Metrics m = prf1(corpus_spans(gold), pred_spans);
  const std::string report = metrics_report(m);
  std::cout << report;
  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) throw std::runtime_error("eval: cannot write " + config.out_path);
    out << report;
  }
  return 0;
}

int cmd_inspect_offsets(const RunConfig& config) {
  if (config.model_path.empty()) throw std::runtime_error("inspect-offsets: --model path required");
  NerModel model = load_model(config.model_path);
  if (model.connection_count() == 0) {
    throw std::runtime_error("inspect-offsets: archive has no deformable connections");
  }
  const std::vector<RawSentence> corpus =
      read_corpus(config.test_path, config.tag_scheme, "inspect-offsets");
  const std::string out_path = config.out_path.empty() ? "offsets.csv" : config.out_path;

  // Raw dump plus per-(connection, slot) sample sets for the densities.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> series;
  {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("inspect-offsets: cannot write " + out_path);
    out << "sentence,connection,position,slot,offset\n" << std::setprecision(17);
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      Graph g;
      const NerModel::Forward f = model.forward(
          g, inference_sentence(corpus[s], model.vocab(), model.scheme()),
          /*training=*/false, 0.0, nullptr);
      for (std::size_t c = 0; c < f.offsets.size(); ++c) {
        const OffsetField& field = f.offsets[c];
        for (std::size_t i = 0; i < field.rows(); ++i) {
          for (std::size_t k = 0; k < field.cols(); ++k) {
            out << s << "," << c << "," << i << "," << k << "," << field(i, k) << "\n";
            series[{c, k}].push_back(field(i, k));
          }
        }
      }
    }
  }

  const std::string stem = out_path.size() > 4 && out_path.ends_with(".csv")
                               ? out_path.substr(0, out_path.size() - 4)
                               : out_path;
  for (const auto& [key, samples] : series) {
    const auto [conn, slot] = key;
    const std::string density_path =
        stem + "_density_c" + std::to_string(conn) + "_s" + std::to_string(slot) + ".csv";
    try {
      const DensityCurve curve = offset_kde(samples);
      std::ofstream out(density_path);
      if (!out) throw std::runtime_error("inspect-offsets: cannot write " + density_path);
      out << "offset,density\n" << std::setprecision(17);
      for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        out << curve.grid[i] << "," << curve.density[i] << "\n";
      }
    } catch (const std::invalid_argument& e) {
      log_info("skipping density for connection " + std::to_string(conn) + " slot " +
               std::to_string(slot) + ": " + e.what());
    }
  }
  return 0;
}

}  // namespace dsner
