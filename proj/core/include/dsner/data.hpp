#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace dsner {

/// One sentence as read from a column corpus: surface tokens plus the label
/// strings taken verbatim from the file.
struct RawSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
};

/// A sentence indexed for the model: surface tokens (embedding lookup applies
/// its fallback chain at use), per-token character index sequences, and gold
/// label indices.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::vector<std::size_t>> chars;
  std::vector<int> gold;
  std::size_t size() const { return tokens.size(); }
};

/// The BIOES tag inventory over an entity-type list. Tags are laid out as
/// O, then B-/I-/E-/S- per type in sorted order, then the padding tag, so
/// the count is 4 * |types| + 2.
class LabelScheme {
 public:
  static LabelScheme from_types(std::vector<std::string> types);

  std::size_t size() const { return tags_.size(); }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::vector<std::string>& types() const { return types_; }
  const std::string& tag(std::size_t index) const { return tags_[index]; }
  /// -1 when the tag is not in the inventory.
  int index(const std::string& tag) const;
  int o_index() const { return 0; }
  int pad_index() const { return static_cast<int>(tags_.size()) - 1; }

 private:
  std::vector<std::string> types_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> index_;
};

/// Token and character vocabularies with <pad> at 0 and <unk> at 1 (tokens)
/// and <unk> at 0 (characters). Token entries are kept in lexicographic
/// order so serialization order equals index order.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  static Vocab build(const std::vector<RawSentence>& sentences,
                     const std::set<std::string>& pretrained);

  std::size_t size() const { return tokens_.size(); }
  /// Fallback chain: exact token, then lowercased token, then <unk>.
  std::size_t lookup(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) > 0; }
  const std::string& token(std::size_t index) const { return tokens_[index]; }

  std::size_t char_count() const { return chars_.size(); }
  std::size_t char_unk() const { return 0; }
  std::size_t char_lookup(char32_t cp) const;
  /// Token split into vocabulary character indices (one per code point).
  std::vector<std::size_t> encode_chars(const std::string& token) const;
  char32_t char_at(std::size_t index) const { return chars_[index]; }

  void save(std::ostream& out) const;
  static Vocab load(std::istream& in);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, std::size_t> char_index_;
  void reindex();
};

/// Reads a whitespace-column corpus; a blank line ends a sentence. `label_col`
/// of -1 selects the last column. Throws with the offending line number when a
/// line is too short.
std::vector<RawSentence> parse_conll(std::istream& in, std::size_t token_col = 0,
                                     int label_col = -1);
void write_conll(std::ostream& out, const std::vector<RawSentence>& sentences);

/// Every Unicode decimal digit becomes "0"; everything else is unchanged.
std::string normalize_digits(const std::string& token);

/// BIO -> BIOES. A dangling I-X (no live run of the same type) is repaired to
/// B-X first, so the conversion is total.
std::vector<std::string> to_bioes(const std::vector<std::string>& bio);

/// Decodes one UTF-8 token into code points; invalid bytes fall back to their
/// Latin-1 value.
std::vector<char32_t> utf8_decode(const std::string& s);
std::string utf8_encode(char32_t cp);

Sentence index_sentence(const RawSentence& raw, const Vocab& vocab, const LabelScheme& scheme);
std::vector<Sentence> index_corpus(const std::vector<RawSentence>& raw, const Vocab& vocab,
                                   const LabelScheme& scheme);

/// Entity types observed in the label column (B-/I-/E-/S- prefixes stripped),
/// sorted and deduplicated.
std::vector<std::string> collect_types(const std::vector<RawSentence>& sentences);

}  // namespace dsner
