#include "evcoref/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace evcoref {

using nlohmann::json;

const Mention* Document::find_mention(const std::string& id) const {
  for (const auto& m : gold_mentions)
    if (m.mention_id == id) return &m;
  return nullptr;
}

const Token& Document::head_token(const Mention& m) const {
  return sentences.at(m.sentence_index).at(m.head_index);
}

void validate_document(const Document& doc) {
  auto fail = [&](const std::string& what) {
    throw CorpusError("document '" + doc.doc_id + "': " + what);
  };
  if (doc.doc_id.empty()) throw CorpusError("document with empty doc_id");
  if (doc.topic_id <= 0) fail("topic must be a positive int");
  for (const auto& sent : doc.sentences)
    for (const auto& tok : sent)
      if (tok.surface.empty() || tok.pos.empty() || tok.lemma.empty())
        fail("token with empty surface/pos/lemma");

  std::unordered_map<std::string, const Mention*> by_id;
  for (const auto& m : doc.gold_mentions) {
    if (m.mention_id.empty()) fail("mention with empty id");
    if (!by_id.emplace(m.mention_id, &m).second)
      fail("duplicate mention id '" + m.mention_id + "'");
    if (m.start > m.end)
      fail("mention '" + m.mention_id + "': span start > end");
    if (m.sentence_index < 0 ||
        m.sentence_index >= static_cast<int>(doc.sentences.size()))
      fail("mention '" + m.mention_id + "': sentence index out of range");
    const auto& sent = doc.sentences[m.sentence_index];
    if (m.start < 0 || m.end >= static_cast<int>(sent.size()))
      fail("mention '" + m.mention_id + "': span outside sentence bounds");
    if (m.head_index != m.start)
      fail("mention '" + m.mention_id + "': head_index must equal span start");
  }

  std::unordered_set<std::string> in_chain;
  for (const auto& chain : doc.gold_chains) {
    if (chain.mention_ids.empty())
      fail("chain '" + chain.chain_id + "' is empty");
    for (const auto& id : chain.mention_ids) {
      if (!by_id.count(id))
        fail("chain '" + chain.chain_id + "' references unknown mention '" +
             id + "'");
      if (!in_chain.insert(id).second)
        fail("mention '" + id + "' appears in more than one chain");
    }
  }
}

namespace {

Document parse_document(const json& obj, int line_no) {
  auto fail = [&](const std::string& what) {
    throw CorpusError("line " + std::to_string(line_no) + ": " + what);
  };
  if (!obj.is_object()) fail("expected a JSON object");
  static const std::set<std::string> doc_keys = {"doc_id", "topic", "sentences",
                                                "mentions", "chains"};
  for (const auto& [k, v] : obj.items())
    if (!doc_keys.count(k)) fail("unknown field '" + k + "'");
  for (const auto& k : doc_keys)
    if (!obj.contains(k)) fail("missing field '" + k + "'");

  Document doc;
  try {
    doc.doc_id = obj.at("doc_id").get<std::string>();
    doc.topic_id = obj.at("topic").get<int>();
    int si = 0;
    for (const auto& jsent : obj.at("sentences")) {
      std::vector<Token> sent;
      int ti = 0;
      for (const auto& jtok : jsent) {
        for (const auto& [k, v] : jtok.items())
          if (k != "w" && k != "p" && k != "l")
            fail("unknown token field '" + k + "'");
        Token tok;
        tok.surface = jtok.at("w").get<std::string>();
        tok.pos = jtok.at("p").get<std::string>();
        tok.lemma = jtok.at("l").get<std::string>();
        tok.sentence_index = si;
        tok.token_index = ti++;
        sent.push_back(std::move(tok));
      }
      doc.sentences.push_back(std::move(sent));
      ++si;
    }
    for (const auto& jm : obj.at("mentions")) {
      for (const auto& [k, v] : jm.items())
        if (k != "id" && k != "sent" && k != "start" && k != "end")
          fail("unknown mention field '" + k + "'");
      Mention m;
      m.mention_id = jm.at("id").get<std::string>();
      m.sentence_index = jm.at("sent").get<int>();
      m.start = jm.at("start").get<int>();
      m.end = jm.at("end").get<int>();
      m.head_index = m.start;
      doc.gold_mentions.push_back(std::move(m));
    }
    int ci = 0;
    for (const auto& jc : obj.at("chains")) {
      Chain chain;
      chain.chain_id = "c" + std::to_string(ci++);
      for (const auto& id : jc)
        chain.mention_ids.push_back(id.get<std::string>());
      std::sort(chain.mention_ids.begin(), chain.mention_ids.end());
      doc.gold_chains.push_back(std::move(chain));
    }
  } catch (const json::exception& e) {
    fail(e.what());
  }
  return doc;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file: " + path);
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError("line " + std::to_string(line_no) +
                        ": malformed JSON: " + e.what());
    }
    Document doc = parse_document(obj, line_no);
    try {
      validate_document(doc);
    } catch (const CorpusError& e) {
      throw CorpusError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_ids.insert(doc.doc_id).second)
      throw CorpusError("line " + std::to_string(line_no) +
                        ": duplicate doc_id '" + doc.doc_id + "'");
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot open output file: " + path);
  for (const auto& doc : corpus.documents) {
    json obj;
    obj["doc_id"] = doc.doc_id;
    obj["topic"] = doc.topic_id;
    json jsents = json::array();
    for (const auto& sent : doc.sentences) {
      json jsent = json::array();
      for (const auto& tok : sent)
        jsent.push_back({{"w", tok.surface}, {"p", tok.pos}, {"l", tok.lemma}});
      jsents.push_back(std::move(jsent));
    }
    obj["sentences"] = std::move(jsents);
    json jmentions = json::array();
    for (const auto& m : doc.gold_mentions)
      jmentions.push_back({{"id", m.mention_id},
                           {"sent", m.sentence_index},
                           {"start", m.start},
                           {"end", m.end}});
    obj["mentions"] = std::move(jmentions);
    json jchains = json::array();
    for (const auto& c : doc.gold_chains) jchains.push_back(c.mention_ids);
    obj["chains"] = std::move(jchains);
    out << obj.dump() << '\n';
  }
}

SplitResult split_topics(const Corpus& corpus,
                         const std::vector<int>& train_topics,
                         const std::vector<int>& dev_topics,
                         const std::vector<int>& test_topics) {
  std::set<int> train(train_topics.begin(), train_topics.end());
  std::set<int> dev(dev_topics.begin(), dev_topics.end());
  std::set<int> test(test_topics.begin(), test_topics.end());
  for (int t : train)
    if (dev.count(t) || test.count(t))
      throw CorpusError("overlapping topic sets at topic " + std::to_string(t));
  for (int t : dev)
    if (test.count(t))
      throw CorpusError("overlapping topic sets at topic " + std::to_string(t));

  SplitResult result;
  for (const auto& doc : corpus.documents) {
    if (train.count(doc.topic_id))
      result.train.documents.push_back(doc);
    else if (dev.count(doc.topic_id))
      result.dev.documents.push_back(doc);
    else if (test.count(doc.topic_id))
      result.test.documents.push_back(doc);
    else
      ++result.dropped;
  }
  return result;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  std::int64_t chained_mentions = 0;
  for (const auto& doc : corpus.documents) {
    ++s.documents;
    s.sentences += static_cast<std::int64_t>(doc.sentences.size());
    s.mentions += static_cast<std::int64_t>(doc.gold_mentions.size());
    s.chains += static_cast<std::int64_t>(doc.gold_chains.size());
    for (const auto& c : doc.gold_chains)
      chained_mentions += static_cast<std::int64_t>(c.mention_ids.size());
  }
  s.mean_chain_length =
      s.chains == 0 ? 0.0
                    : static_cast<double>(chained_mentions) /
                          static_cast<double>(s.chains);
  return s;
}

namespace {

const char* kFillerWords[] = {"the",  "a",     "of",   "in",    "on",
                              "news", "city",  "day",  "group", "report",
                              "and",  "after", "near", "local", "people"};
const char* kFillerPos[] = {"DT", "NN", "IN", "JJ"};

// Event lemma families and their context vocabularies are global, so models
// trained on one topic split generalize to held-out topics.
constexpr int kFamilies = 8;

std::string family_lemma(int f) { return "ev_f" + std::to_string(f); }

std::string context_word(int family, int k) {
  return "ctx_f" + std::to_string(family) + "_" + std::to_string(k);
}

}  // namespace

Corpus generate_synthetic_corpus(std::uint64_t seed, int n_topics,
                                 int docs_per_topic, double noise) {
  if (n_topics <= 0 || docs_per_topic <= 0)
    throw CorpusError("n_topics and docs_per_topic must be positive");
  if (noise < 0.0 || noise > 1.0)
    throw CorpusError("noise must be in [0,1]");

  std::mt19937_64 rng(seed);
  auto coin = [&](double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  };
  auto pick = [&](int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
  };

  Corpus corpus;
  for (int topic = 1; topic <= n_topics; ++topic) {
    for (int d = 0; d < docs_per_topic; ++d) {
      Document doc;
      doc.topic_id = topic;
      doc.doc_id =
          "synth_t" + std::to_string(topic) + "_d" + std::to_string(d);

      int n_chains = 2 + pick(3);  // 2..4 chains
      // Chains draw distinct families within a document, so head lemmas
      // recover the gold clustering exactly when noise is 0.
      std::vector<int> families(kFamilies);
      for (int f = 0; f < kFamilies; ++f) families[f] = f;
      std::shuffle(families.begin(), families.end(), rng);
      std::vector<int> chain_family(families.begin(),
                                    families.begin() + n_chains);

      int mention_counter = 0;
      for (int c = 0; c < n_chains; ++c) {
        Chain chain;
        chain.chain_id = "c" + std::to_string(c);
        int chain_size = 1 + pick(3);  // 1..3 mentions, singletons included
        for (int k = 0; k < chain_size; ++k) {
          // One sentence per mention: two context tokens either side of the
          // event token, drawn from the chain's private vocabulary.
          std::vector<Token> sent;
          auto add = [&](std::string w, std::string p, std::string l) {
            Token tok;
            tok.surface = std::move(w);
            tok.pos = std::move(p);
            tok.lemma = std::move(l);
            tok.sentence_index = static_cast<int>(doc.sentences.size());
            tok.token_index = static_cast<int>(sent.size());
            sent.push_back(std::move(tok));
          };
          auto add_context = [&] {
            int src = (noise > 0.0 && coin(noise)) ? chain_family[pick(n_chains)]
                                                   : chain_family[c];
            std::string w = context_word(src, pick(6));
            add(w, "NN", w);
          };
          auto add_filler = [&] {
            const char* w = kFillerWords[pick(15)];
            add(w, kFillerPos[pick(4)], w);
          };
          add_filler();
          add_context();
          add_context();
          std::string lemma = family_lemma(chain_family[c]);
          if (noise > 0.0 && coin(noise))
            lemma = family_lemma(chain_family[pick(n_chains)]);
          int head = static_cast<int>(sent.size());
          add(lemma + "s", coin(0.5) ? "VB" : "NNEV", lemma);
          add_context();
          add_context();
          add_filler();

          Mention m;
          m.mention_id = "m" + std::to_string(mention_counter++);
          m.sentence_index = static_cast<int>(doc.sentences.size());
          m.start = m.end = m.head_index = head;
          doc.gold_mentions.push_back(m);
          chain.mention_ids.push_back(m.mention_id);
          doc.sentences.push_back(std::move(sent));
        }
        doc.gold_chains.push_back(std::move(chain));
      }
      validate_document(doc);
      corpus.documents.push_back(std::move(doc));
    }
  }
  return corpus;
}

}  // namespace evcoref
