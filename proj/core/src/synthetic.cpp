#include "dsner/synthetic.hpp"

#include "dsner/train.hpp"

namespace dsner {

namespace {

struct Slot {
  std::vector<std::string> words;
  const char* type;  // nullptr for plain context words
};

const std::vector<std::vector<std::string>> kPersonNames = {
    {"Alice"}, {"Bob"}, {"Carol", "Smith"}, {"David", "Jones"}, {"Erin"},
    {"Frank", "Miller"}, {"Grace"}, {"Henry", "Davis"}};
const std::vector<std::vector<std::string>> kPlaces = {
    {"Paris"}, {"London"}, {"Berlin"}, {"New", "York"}, {"Tokyo"}, {"Oslo", "City"}};
const std::vector<std::vector<std::string>> kCompanies = {
    {"Acme", "Corp"}, {"Globex"}, {"Initech", "Labs"}, {"Umbrella"}, {"Hooli", "Inc"}};
const std::vector<std::string> kYears = {"1999", "2006", "2014", "2021"};

void emit_entity(RawSentence* s, const std::vector<std::string>& words, const char* type) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    s->tokens.push_back(words[i]);
    s->labels.push_back((i == 0 ? "B-" : "I-") + std::string(type));
  }
}

void emit_plain(RawSentence* s, std::initializer_list<const char*> words) {
  for (const char* w : words) {
    s->tokens.push_back(w);
    s->labels.push_back("O");
  }
}

}  // namespace

std::vector<RawSentence> synthetic_corpus(std::size_t sentences, std::uint64_t seed) {
  Rng rng(seed);
  auto person = [&] { return kPersonNames[rng.integer(kPersonNames.size())]; };
  auto place = [&] { return kPlaces[rng.integer(kPlaces.size())]; };
  auto company = [&] { return kCompanies[rng.integer(kCompanies.size())]; };
  auto year = [&] { return kYears[rng.integer(kYears.size())]; };

  std::vector<RawSentence> corpus;
  corpus.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) {
    RawSentence s;
    switch (rng.integer(6)) {
      case 0:
        emit_entity(&s, person(), "PER");
        emit_plain(&s, {"visited"});
        emit_entity(&s, place(), "LOC");
        emit_plain(&s, {"in"});
        s.tokens.push_back(year());
        s.labels.push_back("O");
        emit_plain(&s, {"."});
        break;
      case 1:
        emit_entity(&s, person(), "PER");
        emit_plain(&s, {"works", "for"});
        emit_entity(&s, company(), "ORG");
        emit_plain(&s, {"."});
        break;
      case 2:
        emit_entity(&s, company(), "ORG");
        emit_plain(&s, {"opened", "offices", "in"});
        emit_entity(&s, place(), "LOC");
        emit_plain(&s, {"."});
        break;
      case 3:
        emit_entity(&s, person(), "PER");
        emit_plain(&s, {"met"});
        emit_entity(&s, person(), "PER");
        emit_plain(&s, {"at"});
        emit_entity(&s, company(), "ORG");
        emit_plain(&s, {"."});
        break;
      case 4:
        emit_plain(&s, {"yesterday"});
        emit_entity(&s, person(), "PER");
        emit_plain(&s, {"moved", "from"});
        emit_entity(&s, place(), "LOC");
        emit_plain(&s, {"to"});
        emit_entity(&s, place(), "LOC");
        emit_plain(&s, {"."});
        break;
      default:
        emit_plain(&s, {"the", "press", "said", "that"});
        emit_entity(&s, company(), "ORG");
        emit_plain(&s, {"grew", "during"});
        s.tokens.push_back(year());
        s.labels.push_back("O");
        emit_plain(&s, {"."});
        break;
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

}  // namespace dsner
