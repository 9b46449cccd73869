#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dvkit/metadata.hpp"

namespace dvkit::metadata {

namespace {

const std::unordered_set<std::string> kDeterminers{
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "each", "every",
    "all", "both", "my", "your", "his", "her", "its", "our", "their", "one", "two",
    "three", "four", "another", "other"};

const std::unordered_set<std::string> kPronouns{
    "it", "them", "they", "him", "itself", "something", "everything", "anything"};

const std::unordered_set<std::string> kPrepositions{
    "in", "into", "on", "onto", "to", "inside", "from", "under", "over", "above",
    "below", "beneath", "beside", "behind", "near", "next", "with", "at", "toward",
    "towards", "across", "through", "out", "off", "of", "between", "around",
    "against", "along", "by", "for", "within", "underneath", "atop"};

const std::unordered_set<std::string> kStops{
    "and", "or", "then", "but", "while", "so", "until", "before", "after", "when",
    "where", "which", "please", "again"};

// Words that may directly follow a verb as part of the verb ("pick up").
const std::unordered_set<std::string> kParticles{
    "up", "down", "off", "away", "back", "over", "on", "out"};

constexpr std::string_view kBoundary = "|";

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  bool possessive = false;  // inside the "s" of "robot's"
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-') {
      if (!possessive) cur.push_back(static_cast<char>(std::tolower(u)));
      continue;
    }
    possessive = c == '\'';
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?')
      out.emplace_back(kBoundary);
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_adverb(const std::string& w) { return w.size() > 4 && w.ends_with("ly"); }

class MentionParser {
 public:
  MentionParser(std::vector<std::string> tokens, const VerbLexicon& lexicon,
                const EmbeddingProvider& vocab)
      : t_(std::move(tokens)), lexicon_(lexicon), vocab_(vocab) {}

  std::vector<ObjectMention> run() {
    while (i_ < t_.size()) {
      if (is_verb_at(i_)) {
        verb_found_ = true;
        ++i_;
        verb_phrase();
      } else {
        ++i_;
      }
    }
    if (!verb_found_) throw NoVerbFound();
    return std::move(mentions_);
  }

 private:
  bool at_end() const { return i_ >= t_.size(); }
  const std::string& cur() const { return t_[i_]; }

  bool is_verb_at(std::size_t k) const {
    if (!lexicon_.contains(t_[k])) return false;
    return k == 0 || !kDeterminers.count(t_[k - 1]);
  }

  bool ends_phrase(std::size_t k) const {
    const std::string& w = t_[k];
    return w == kBoundary || kStops.count(w) || kPrepositions.count(w) || kPronouns.count(w);
  }

  void verb_phrase() {
    // "pull open", "pick up", "carefully"
    while (!at_end() && (lexicon_.contains(cur()) || kParticles.count(cur()) || is_adverb(cur())))
      ++i_;
    if (at_end()) return;
    if (kPronouns.count(cur())) {
      ++i_;
    } else if (!kPrepositions.count(cur())) {
      noun_phrase(true);
    }
    prepositional_phrases();
  }

  void prepositional_phrases() {
    while (!at_end() && kPrepositions.count(cur())) {
      while (!at_end() && kPrepositions.count(cur())) ++i_;
      if (at_end()) return;
      if (kPronouns.count(cur())) {
        ++i_;
        continue;
      }
      noun_phrase(false);
    }
  }

  void noun_phrase(bool direct) {
    bool after_determiner = false;
    while (!at_end() && kDeterminers.count(cur())) {
      after_determiner = true;
      ++i_;
    }
    std::vector<std::string> words;
    while (!at_end() && !ends_phrase(i_)) {
      const bool verb_like = lexicon_.contains(cur());
      if (verb_like && !(words.empty() && after_determiner)) break;
      if (!is_adverb(cur())) words.push_back(cur());
      ++i_;
    }
    if (words.empty()) return;
    std::string head = words.back();
    if (words.size() >= 2) {
      const std::string compound = words[words.size() - 2] + " " + words.back();
      if (vocab_.embed(compound)) head = compound;
    }
    mentions_.push_back({std::move(head), direct, mentions_.size()});
  }

  std::vector<std::string> t_;
  const VerbLexicon& lexicon_;
  const EmbeddingProvider& vocab_;
  std::size_t i_ = 0;
  bool verb_found_ = false;
  std::vector<ObjectMention> mentions_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0 || nb == 0) return 1.0;
  return 1.0 - dot(a, b) / (na * nb);
}

std::vector<double> unit(std::vector<double> v) {
  const double n = std::sqrt(dot(v, v));
  if (n > 0)
    for (auto& x : v) x /= n;
  return v;
}

void add_inflections(std::unordered_set<std::string>& forms, const std::string& v) {
  forms.insert(v);
  const bool sibilant = v.ends_with("s") || v.ends_with("sh") || v.ends_with("ch") ||
                        v.ends_with("x") || v.ends_with("o");
  forms.insert(v + (sibilant ? "es" : "s"));
  if (v.ends_with("e")) {
    forms.insert(v + "d");
    forms.insert(v.substr(0, v.size() - 1) + "ing");
  } else if (v.ends_with("y") && v.size() > 2 &&
             std::string_view("aeiou").find(v[v.size() - 2]) == std::string_view::npos) {
    forms.insert(v.substr(0, v.size() - 1) + "ies");
    forms.insert(v.substr(0, v.size() - 1) + "ied");
    forms.insert(v + "ing");
  } else {
    forms.insert(v + "ed");
    forms.insert(v + "ing");
    // Consonant doubling (grab -> grabbed) for short verbs; the undoubled forms
    // above stay as well.
    const std::string_view vowels = "aeiou";
    if (v.size() >= 3 && vowels.find(v.back()) == std::string_view::npos &&
        std::string_view("wxy").find(v.back()) == std::string_view::npos &&
        vowels.find(v[v.size() - 2]) != std::string_view::npos &&
        vowels.find(v[v.size() - 3]) == std::string_view::npos) {
      forms.insert(v + v.back() + "ed");
      forms.insert(v + v.back() + "ing");
    }
  }
}

}  // namespace

const VerbLexicon& VerbLexicon::defaults() {
  static const VerbLexicon lexicon = [] {
    VerbLexicon lx;
    for (const char* v :
         {"pick", "place", "put", "move", "push", "pull", "open", "close", "shut", "take",
          "grab", "lift", "wipe", "pour", "stack", "unstack", "insert", "remove", "drop",
          "turn", "flip", "fold", "unfold", "hang", "slide", "set", "transfer", "serve",
          "get", "bring", "fetch", "clean", "press", "rotate", "throw", "toss", "carry",
          "empty", "fill", "cover", "uncover", "stir", "scoop", "sweep", "knock", "hand",
          "give", "store", "load", "unload", "plug", "unplug", "pack", "unpack", "arrange",
          "relocate", "bin", "wash", "dump", "squeeze", "sort", "stow", "return", "swap",
          "straighten", "hold", "drag", "tidy", "shift", "deposit", "retrieve", "collect",
          "gather", "grasp", "raise", "lower", "tilt", "twist", "unscrew", "screw",
          "stash", "lay", "drape", "clear"}) {
      lx.add_base(v);
    }
    for (const char* irregular :
         {"took", "taken", "hung", "threw", "thrown", "brought", "got", "gotten", "laid",
          "held", "swept", "put", "set", "shut"}) {
      lx.forms_.insert(irregular);
    }
    return lx;
  }();
  return lexicon;
}

void VerbLexicon::add_base(std::string_view verb) {
  add_inflections(forms_, lowercase(verb));
}

VerbLexicon VerbLexicon::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  VerbLexicon lx;
  std::string line;
  while (std::getline(in, line)) {
    const std::string w = collapse_spaces(line);
    if (w.empty() || w.front() == '#') continue;
    lx.add_base(w);
  }
  return lx;
}

TableEmbeddings TableEmbeddings::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  TableEmbeddings table;
  std::string line;
  std::size_t dims = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (v.empty() || (dims != 0 && v.size() != dims))
      throw SchemaError(line_no, word, "inconsistent vector dimension");
    dims = v.size();
    std::replace(word.begin(), word.end(), '_', ' ');
    table.add(std::move(word), std::move(v));
  }
  return table;
}

void TableEmbeddings::add(std::string word, std::vector<double> vec) {
  table_[lowercase(word)] = std::move(vec);
}

std::optional<std::vector<double>> TableEmbeddings::embed(std::string_view word) const {
  auto it = table_.find(std::string(word));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::string merge_instructions(std::span<const std::string> instructions) {
  std::vector<std::string> clauses;
  for (const auto& instr : instructions) {
    std::string cur;
    auto flush = [&] {
      std::string c = collapse_spaces(lowercase(cur));
      while (!c.empty() && (c.back() == ',' || c.back() == ' ')) c.pop_back();
      if (!c.empty() && std::find(clauses.begin(), clauses.end(), c) == clauses.end())
        clauses.push_back(c);
      cur.clear();
    };
    for (char c : instr) {
      if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n') {
        flush();
      } else {
        cur.push_back(c);
      }
    }
    flush();
  }
  std::string out;
  for (const auto& c : clauses) {
    if (!out.empty()) out += ". ";
    out += c;
  }
  return out;
}

std::vector<ObjectMention> parse_object_mentions(std::string_view merged,
                                                 const VerbLexicon& lexicon,
                                                 const EmbeddingProvider& vocab) {
  return MentionParser(tokenize(merged), lexicon, vocab).run();
}

std::vector<std::size_t> agglomerate(std::span<const std::vector<double>> vectors, double cut) {
  const std::size_t n = vectors.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = cosine_distance(vectors[i], vectors[j]);

  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};

  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double s = 0;
    for (auto i : a)
      for (auto j : b) s += dist[i][j];
    return s / static_cast<double>(a.size() * b.size());
  };

  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = linkage(clusters[i], clusters[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    if (best > cut) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
  });
  std::vector<std::size_t> ids(n);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto i : clusters[c]) ids[i] = c;
  return ids;
}

std::string extract_target_object(std::span<const std::string> instructions,
                                  const VerbLexicon& lexicon,
                                  const EmbeddingProvider& embeddings, double cut) {
  const std::string merged = merge_instructions(instructions);
  const std::vector<ObjectMention> mentions = parse_object_mentions(merged, lexicon, embeddings);
  if (mentions.empty()) throw NoObjectFound();

  // Out-of-vocabulary words get their own one-hot axis so they only cluster
  // with repeats of themselves.
  std::size_t dims = 0;
  std::vector<std::optional<std::vector<double>>> known;
  std::map<std::string, std::size_t> oov_axis;
  for (const auto& m : mentions) {
    known.push_back(embeddings.embed(m.word));
    if (known.back()) {
      dims = std::max(dims, known.back()->size());
    } else {
      oov_axis.emplace(m.word, oov_axis.size());
    }
  }
  std::vector<std::vector<double>> vecs;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    std::vector<double> v(dims + oov_axis.size(), 0.0);
    if (known[i]) {
      std::copy(known[i]->begin(), known[i]->end(), v.begin());
    } else {
      v[dims + oov_axis.at(mentions[i].word)] = 1.0;
    }
    vecs.push_back(unit(std::move(v)));
  }

  const auto ids = agglomerate(vecs, cut);
  const std::size_t n_clusters = *std::max_element(ids.begin(), ids.end()) + 1;
  const bool any_direct = std::any_of(mentions.begin(), mentions.end(),
                                      [](const ObjectMention& m) { return m.direct; });

  struct Rank {
    std::size_t count = 0;
    std::size_t first = std::numeric_limits<std::size_t>::max();
  };
  std::vector<Rank> ranks(n_clusters);
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    if (any_direct && !mentions[i].direct) continue;
    Rank& r = ranks[ids[i]];
    ++r.count;
    r.first = std::min(r.first, mentions[i].order);
  }
  std::size_t primary = 0;
  for (std::size_t c = 1; c < n_clusters; ++c) {
    const Rank& a = ranks[c];
    const Rank& b = ranks[primary];
    if (a.count > b.count || (a.count == b.count && a.first < b.first)) primary = c;
  }

  std::vector<double> centroid(vecs.front().size(), 0.0);
  for (std::size_t i = 0; i < mentions.size(); ++i)
    if (ids[i] == primary)
      for (std::size_t k = 0; k < centroid.size(); ++k) centroid[k] += vecs[i][k];

  std::size_t best = mentions.size();
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    if (ids[i] != primary || (any_direct && !mentions[i].direct)) continue;
    const double sim = 1.0 - cosine_distance(vecs[i], centroid);
    if (sim > best_sim + 1e-12) {
      best_sim = sim;
      best = i;
    }
  }
  return mentions[best].word;
}

}  // namespace dvkit::metadata
