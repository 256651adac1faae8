#include "dsner/data.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dsner {

// ---------------------------------------------------------------- UTF-8

std::vector<char32_t> utf8_decode(const std::string& s) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      out.push_back(b0);  // stray continuation byte, keep as Latin-1
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(b0);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char bk = static_cast<unsigned char>(s[i + k]);
      if ((bk & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!ok) {
      out.push_back(b0);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

namespace {

// First code point of the principal Unicode Nd (decimal digit) runs; each run
// covers ten digits.
constexpr char32_t kDigitRunStarts[] = {
    0x0030, 0x0660, 0x06F0, 0x07C0, 0x0966, 0x09E6, 0x0A66, 0x0AE6, 0x0B66, 0x0BE6,
    0x0C66, 0x0CE6, 0x0D66, 0x0DE6, 0x0E50, 0x0ED0, 0x0F20, 0x1040, 0x1090, 0x17E0,
    0x1810, 0x1946, 0x19D0, 0x1A80, 0x1A90, 0x1B50, 0x1BB0, 0x1C40, 0x1C50, 0xA620,
    0xA8D0, 0xA900, 0xA9D0, 0xA9F0, 0xAA50, 0xABF0, 0xFF10,
};

bool is_decimal_digit(char32_t cp) {
  for (char32_t start : kDigitRunStarts) {
    if (cp >= start && cp < start + 10) return true;
  }
  return false;
}

std::string lowercase_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

std::string normalize_digits(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  for (char32_t cp : utf8_decode(token)) {
    if (is_decimal_digit(cp)) {
      out += '0';
    } else {
      out += utf8_encode(cp);
    }
  }
  return out;
}

// ---------------------------------------------------------------- CoNLL

std::vector<RawSentence> parse_conll(std::istream& in, std::size_t token_col, int label_col) {
  std::vector<RawSentence> sentences;
  RawSentence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) {
      sentences.push_back(std::move(current));
      current = RawSentence{};
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream cols(line);
    std::vector<std::string> fields;
    std::string field;
    while (cols >> field) fields.push_back(field);
    const std::size_t want_label =
        label_col < 0 ? fields.size() - 1 : static_cast<std::size_t>(label_col);
    if (token_col >= fields.size() || want_label >= fields.size()) {
      throw std::runtime_error("parse_conll: line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " column(s), need token column " +
                               std::to_string(token_col) + " and label column " +
                               (label_col < 0 ? std::string("last") : std::to_string(label_col)));
    }
    current.tokens.push_back(fields[token_col]);
    current.labels.push_back(fields[want_label]);
  }
  flush();
  return sentences;
}

void write_conll(std::ostream& out, const std::vector<RawSentence>& sentences) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s) out << "\n";
    const RawSentence& sent = sentences[s];
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      out << sent.tokens[i] << "\t" << sent.labels[i] << "\n";
    }
  }
}

// ---------------------------------------------------------------- tags

namespace {

// Splits "B-PER" into ('B', "PER"); returns false for "O", padding, and
// anything that does not look like prefix-type.
bool split_tag(const std::string& tag, char* kind, std::string* type) {
  if (tag.size() < 3 || tag[1] != '-') return false;
  const char k = tag[0];
  if (k != 'B' && k != 'I' && k != 'E' && k != 'S') return false;
  *kind = k;
  *type = tag.substr(2);
  return true;
}

}  // namespace

std::vector<std::string> to_bioes(const std::vector<std::string>& bio) {
  const std::size_t n = bio.size();
  // Repair pass: a dangling I-X becomes B-X so every entity is a clean run.
  std::vector<char> kind(n, 'O');
  std::vector<std::string> type(n);
  for (std::size_t i = 0; i < n; ++i) {
    char k;
    std::string t;
    if (!split_tag(bio[i], &k, &t)) continue;
    if (k == 'I') {
      const bool continues =
          i > 0 && (kind[i - 1] == 'B' || kind[i - 1] == 'I') && type[i - 1] == t;
      k = continues ? 'I' : 'B';
    }
    kind[i] = k;
    type[i] = t;
  }
  std::vector<std::string> out(n, "O");
  std::size_t i = 0;
  while (i < n) {
    if (kind[i] != 'B') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && kind[j] == 'I' && type[j] == type[i]) ++j;
    if (j - i == 1) {
      out[i] = "S-" + type[i];
    } else {
      out[i] = "B-" + type[i];
      for (std::size_t t = i + 1; t + 1 < j; ++t) out[t] = "I-" + type[i];
      out[j - 1] = "E-" + type[i];
    }
    i = j;
  }
  return out;
}

std::vector<std::string> collect_types(const std::vector<RawSentence>& sentences) {
  std::set<std::string> types;
  for (const RawSentence& s : sentences) {
    for (const std::string& tag : s.labels) {
      char k;
      std::string t;
      if (split_tag(tag, &k, &t)) types.insert(t);
    }
  }
  return {types.begin(), types.end()};
}

// ---------------------------------------------------------------- LabelScheme

LabelScheme LabelScheme::from_types(std::vector<std::string> types) {
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  LabelScheme scheme;
  scheme.types_ = std::move(types);
  scheme.tags_.push_back("O");
  for (const std::string& t : scheme.types_) {
    scheme.tags_.push_back("B-" + t);
    scheme.tags_.push_back("I-" + t);
    scheme.tags_.push_back("E-" + t);
    scheme.tags_.push_back("S-" + t);
  }
  scheme.tags_.push_back("<pad>");
  for (std::size_t i = 0; i < scheme.tags_.size(); ++i)
    scheme.index_[scheme.tags_[i]] = static_cast<int>(i);
  return scheme;
}

int LabelScheme::index(const std::string& tag) const {
  auto it = index_.find(tag);
  return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------- Vocab

Vocab Vocab::build(const std::vector<RawSentence>& sentences,
                   const std::set<std::string>& pretrained) {
  std::set<std::string> tokens(pretrained.begin(), pretrained.end());
  std::set<char32_t> chars;
  for (const RawSentence& s : sentences) {
    for (const std::string& tok : s.tokens) {
      tokens.insert(tok);
      for (char32_t cp : utf8_decode(tok)) chars.insert(cp);
    }
  }
  Vocab v;
  v.tokens_.push_back("<pad>");
  v.tokens_.push_back("<unk>");
  v.tokens_.insert(v.tokens_.end(), tokens.begin(), tokens.end());
  v.chars_.push_back(0);  // unk character
  v.chars_.insert(v.chars_.end(), chars.begin(), chars.end());
  v.reindex();
  return v;
}

void Vocab::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = i;
  char_index_.clear();
  for (std::size_t i = 0; i < chars_.size(); ++i) char_index_[chars_[i]] = i;
}

std::size_t Vocab::lookup(const std::string& token) const {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  it = index_.find(lowercase_ascii(token));
  if (it != index_.end()) return it->second;
  return kUnk;
}

std::size_t Vocab::char_lookup(char32_t cp) const {
  auto it = char_index_.find(cp);
  return it == char_index_.end() ? char_unk() : it->second;
}

std::vector<std::size_t> Vocab::encode_chars(const std::string& token) const {
  std::vector<std::size_t> out;
  for (char32_t cp : utf8_decode(token)) out.push_back(char_lookup(cp));
  if (out.empty()) out.push_back(char_unk());
  return out;
}

void Vocab::save(std::ostream& out) const {
  out << "<pad> <unk>\n";
  for (std::size_t i = 2; i < tokens_.size(); ++i) out << tokens_[i] << "\n";
  out << "#chars " << (chars_.size() - 1) << "\n";
  for (std::size_t i = 1; i < chars_.size(); ++i) out << utf8_encode(chars_[i]) << "\n";
}

Vocab Vocab::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "<pad> <unk>") {
    throw std::runtime_error("vocab: missing specials header");
  }
  Vocab v;
  v.tokens_.push_back("<pad>");
  v.tokens_.push_back("<unk>");
  bool in_chars = false;
  std::size_t want_chars = 0;
  while (std::getline(in, line)) {
    if (!in_chars && line.rfind("#chars ", 0) == 0) {
      in_chars = true;
      want_chars = std::stoul(line.substr(7));
      v.chars_.push_back(0);
      if (want_chars == 0) break;
      continue;
    }
    if (!in_chars) {
      v.tokens_.push_back(line);
    } else {
      const std::vector<char32_t> cps = utf8_decode(line);
      if (cps.size() != 1) throw std::runtime_error("vocab: bad character entry '" + line + "'");
      v.chars_.push_back(cps[0]);
      if (v.chars_.size() == want_chars + 1) break;
    }
  }
  if (v.chars_.empty()) v.chars_.push_back(0);
  v.reindex();
  return v;
}

// ---------------------------------------------------------------- indexing

Sentence index_sentence(const RawSentence& raw, const Vocab& vocab, const LabelScheme& scheme) {
  Sentence s;
  s.tokens = raw.tokens;
  s.chars.reserve(raw.tokens.size());
  s.gold.reserve(raw.labels.size());
  for (const std::string& tok : raw.tokens) s.chars.push_back(vocab.encode_chars(tok));
  for (const std::string& tag : raw.labels) {
    const int idx = scheme.index(tag);
    if (idx < 0) throw std::runtime_error("index_sentence: tag '" + tag + "' not in scheme");
    s.gold.push_back(idx);
  }
  return s;
}

std::vector<Sentence> index_corpus(const std::vector<RawSentence>& raw, const Vocab& vocab,
                                   const LabelScheme& scheme) {
  std::vector<Sentence> out;
  out.reserve(raw.size());
  for (const RawSentence& r : raw) out.push_back(index_sentence(r, vocab, scheme));
  return out;
}

}  // namespace dsner
