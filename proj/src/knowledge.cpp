#include "xapagy/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xapagy/error.hpp"

namespace xapagy {

// --- SymbolTable -----------------------------------------------------------

SymbolId SymbolTable::add(std::string name, double area) {
  auto id = static_cast<SymbolId>(names_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  areas_.push_back(area);
  return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double SymbolTable::overlap(SymbolId a, SymbolId b) const {
  if (a == b) return areas_.at(a);
  auto it = overlaps_.find(std::minmax(a, b));
  return it == overlaps_.end() ? 0.0 : it->second;
}

double SymbolTable::impact(SymbolId from, SymbolId to) const {
  auto it = impacts_.find({from, to});
  return it == impacts_.end() ? 0.0 : it->second;
}

bool SymbolTable::set_overlap(SymbolId a, SymbolId b, double value) {
  return overlaps_.emplace(std::minmax(a, b), value).second;
}

bool SymbolTable::set_impact(SymbolId from, SymbolId to, double value) {
  return impacts_.emplace(std::make_pair(from, to), value).second;
}

// --- overlay arithmetic ----------------------------------------------------

namespace {

template <class Tag>
void check_members(const SymbolTable& table, const Overlay<Tag>& overlay) {
  for (const auto& [id, e] : overlay) {
    if (!table.contains(id)) throw Error("unknown overlay member id " + std::to_string(id));
  }
}

// Multiplier applied to a pre-existing member by the impacts of `addition`.
template <class Tag>
double impact_factor(const SymbolTable& table, SymbolId member, const Overlay<Tag>& addition,
                     double scale) {
  double sum = 0.0;
  for (const auto& [added, e] : addition) sum += table.impact(added, member) * e * scale;
  return 1.0 + sum;
}

}  // namespace

template <class Tag>
Overlay<Tag> overlay_add(const SymbolTable& table, const Overlay<Tag>& target,
                         const Overlay<Tag>& addition, double scale) {
  check_members(table, target);
  check_members(table, addition);
  Overlay<Tag> result = target;
  for (const auto& [id, e] : addition) {
    result.set(id, std::clamp(result.energy(id) + scale * e, kEnergyFloor, 1.0));
  }
  for (const auto& [id, e] : target) {
    double scaled = result.energy(id) * impact_factor(table, id, addition, scale);
    result.set(id, std::clamp(scaled, kEnergyFloor, 1.0));
  }
  return result;
}

template <class Tag>
std::vector<SymbolId> overlay_add_floored(const SymbolTable& table, const Overlay<Tag>& target,
                                          const Overlay<Tag>& addition, double scale) {
  check_members(table, target);
  check_members(table, addition);
  std::vector<SymbolId> floored;
  for (const auto& [id, e] : target) {
    double after_add = addition.contains(id) ? std::min(1.0, e + scale * addition.energy(id)) : e;
    if (after_add * impact_factor(table, id, addition, scale) <= kEnergyFloor && e > kEnergyFloor) {
      floored.push_back(id);
    }
  }
  return floored;
}

template <class Tag>
double overlay_match(const SymbolTable& table, const Overlay<Tag>& a, const Overlay<Tag>& b) {
  if (a.empty() || b.empty()) return 0.0;
  // Canonical argument order makes the floating-point sum bit-identical
  // for match(a, b) and match(b, a).
  const Overlay<Tag>& lhs = (b < a) ? b : a;
  const Overlay<Tag>& rhs = (b < a) ? a : b;
  double sum = 0.0;
  for (const auto& [x, ex] : lhs) {
    for (const auto& [y, ey] : rhs) {
      double o = table.overlap(x, y);
      if (o == 0.0) continue;
      sum += ex * ey * o / std::sqrt(table.area(x) * table.area(y));
    }
  }
  double norm = std::sqrt(lhs.mass() * rhs.mass());
  if (norm <= 0.0) return 0.0;
  return std::min(1.0, sum / norm);
}

template ConceptOverlay overlay_add(const SymbolTable&, const ConceptOverlay&, const ConceptOverlay&,
                                   double);
template VerbOverlay overlay_add(const SymbolTable&, const VerbOverlay&, const VerbOverlay&, double);
template std::vector<SymbolId> overlay_add_floored(const SymbolTable&, const ConceptOverlay&,
                                                   const ConceptOverlay&, double);
template std::vector<SymbolId> overlay_add_floored(const SymbolTable&, const VerbOverlay&,
                                                   const VerbOverlay&, double);
template double overlay_match(const SymbolTable&, const ConceptOverlay&, const ConceptOverlay&);
template double overlay_match(const SymbolTable&, const VerbOverlay&, const VerbOverlay&);

// --- side effects ----------------------------------------------------------

std::string_view to_string(SideEffect effect) {
  switch (effect) {
    case SideEffect::None: return "none";
    case SideEffect::Action: return "action";
    case SideEffect::IsA: return "is_a";
    case SideEffect::Changes: return "changes";
    case SideEffect::Relation: return "relation";
    case SideEffect::SceneRelation: return "scene_relation";
    case SideEffect::Quote: return "quote";
    case SideEffect::InSummary: return "in_summary";
  }
  return "none";
}

namespace {

// Lower value wins when several verbs of one overlay carry side effects.
int effect_priority(SideEffect e) {
  switch (e) {
    case SideEffect::Quote: return 0;
    case SideEffect::IsA: return 1;
    case SideEffect::Changes: return 2;
    case SideEffect::InSummary: return 3;
    case SideEffect::Relation: return 4;
    case SideEffect::SceneRelation: return 5;
    case SideEffect::Action: return 6;
    case SideEffect::None: return 7;
  }
  return 7;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_real(std::size_t line, std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError(line, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw DomainError(line, "expected a number, got '" + s + "'");
  }
  return v;
}

std::optional<std::string_view> key_value(std::string_view token, std::string_view key) {
  if (token.size() > key.size() && token.substr(0, key.size()) == key &&
      token[key.size()] == '=') {
    return token.substr(key.size() + 1);
  }
  return std::nullopt;
}

VerbInfo parse_side_effect(std::size_t line, std::string_view name) {
  if (name == "none") return {SideEffect::None, {}};
  if (name == "action") return {SideEffect::Action, {}};
  if (name == "is_a") return {SideEffect::IsA, {}};
  if (name == "changes") return {SideEffect::Changes, {}};
  if (name == "scene_relation") return {SideEffect::SceneRelation, {}};
  if (name == "quote") return {SideEffect::Quote, {}};
  if (name == "in_summary") return {SideEffect::InSummary, {}};
  if (name.substr(0, 9) == "relation:" && name.size() > 9) {
    return {SideEffect::Relation, std::string(name.substr(9))};
  }
  throw DomainError(line, "unknown side effect '" + std::string(name) + "'");
}

}  // namespace

// --- Domain ----------------------------------------------------------------

Domain::Domain() { *this = parse(""); }

bool Domain::is_quoted(std::string_view word) {
  return word.size() >= 3 && word.front() == '"' && word.back() == '"';
}

SideEffect Domain::primary_effect(const VerbOverlay& verbs) const {
  SideEffect best = SideEffect::None;
  for (const auto& [id, e] : verbs) {
    SideEffect candidate = verb_info_.at(id).effect;
    if (effect_priority(candidate) < effect_priority(best)) best = candidate;
  }
  return best;
}

std::string Domain::relation_kind(const VerbOverlay& verbs) const {
  for (const auto& [id, e] : verbs) {
    if (verb_info_.at(id).effect == SideEffect::Relation) return verb_info_.at(id).relation_kind;
  }
  return {};
}

std::optional<SymbolId> Domain::relation_verb(std::string_view kind) const {
  for (SymbolId id = 0; id < verb_info_.size(); ++id) {
    if (verb_info_[id].effect == SideEffect::Relation && verb_info_[id].relation_kind == kind) {
      return id;
    }
  }
  return std::nullopt;
}

bool Domain::conflicting(SymbolId verb_a, SymbolId verb_b) const {
  return conflicts_.count(std::minmax(verb_a, verb_b)) != 0;
}

bool Domain::has_word(std::string_view word) const {
  return is_quoted(word) || words_.find(word) != words_.end();
}

const Word* Domain::find_word(std::string_view word) const {
  auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second;
}

SymbolId Domain::proper_name(std::string_view name) {
  std::string id = "name_" + std::string(name);
  if (auto existing = concepts_.find(id)) {
    proper_names_.emplace(*existing, std::string(name));
    return *existing;
  }
  SymbolId minted = concepts_.add(id, 1.0);
  proper_names_.emplace(minted, std::string(name));
  return minted;
}

std::optional<std::string> Domain::proper_name_of(SymbolId id) const {
  auto it = proper_names_.find(id);
  if (it == proper_names_.end()) return std::nullopt;
  return it->second;
}

ConceptOverlay Domain::lookup_concept(std::string_view word) {
  if (is_quoted(word)) {
    return ConceptOverlay{{proper_name(word.substr(1, word.size() - 2)), 1.0}};
  }
  const Word* w = find_word(word);
  if (w == nullptr || w->kind != WordKind::Concept) throw UnknownWordError(std::string(word), 0);
  ConceptOverlay result;
  for (const auto& [id, e] : w->members) result.set(id, e);
  return result;
}

VerbOverlay Domain::lookup_verb(std::string_view word) const {
  const Word* w = find_word(word);
  if (w == nullptr || w->kind != WordKind::Verb) throw UnknownWordError(std::string(word), 0);
  VerbOverlay result;
  for (const auto& [id, e] : w->members) result.set(id, e);
  return result;
}

std::optional<ConceptOverlay> Domain::known_concept_overlay(const std::vector<std::string>& words) const {
  ConceptOverlay result;
  for (const auto& w : words) {
    ConceptOverlay add;
    if (is_quoted(w)) {
      auto id = concepts_.find("name_" + w.substr(1, w.size() - 2));
      if (!id) return std::nullopt;
      add.set(*id, 1.0);
    } else {
      const Word* word = find_word(w);
      if (word == nullptr || word->kind != WordKind::Concept) throw UnknownWordError(w, 0);
      for (const auto& [id, e] : word->members) add.set(id, e);
    }
    result = overlay_add(concepts_, result, add);
  }
  return result;
}

ConceptOverlay Domain::concept_overlay(const std::vector<std::string>& words) {
  ConceptOverlay result;
  for (const auto& w : words) result = overlay_add(concepts_, result, lookup_concept(w));
  return result;
}

VerbOverlay Domain::verb_overlay(const std::vector<std::string>& words) const {
  VerbOverlay result;
  for (const auto& w : words) result = overlay_add(verbs_, result, lookup_verb(w));
  return result;
}

// Builds a Domain line by line, rejecting duplicates.
class DomainBuilder {
 public:
  void line(std::size_t no, std::string_view raw) {
    auto hash = raw.find('#');
    auto text = raw.substr(0, hash);
    auto tokens = split_ws(text);
    if (tokens.empty()) return;
    const std::string& head = tokens[0];
    if (head == "concept") {
      concept_line(no, tokens);
    } else if (head == "verb") {
      verb_line(no, tokens);
    } else if (head == "overlap") {
      pair_line(no, tokens, /*impact=*/false);
    } else if (head == "impact") {
      pair_line(no, tokens, /*impact=*/true);
    } else if (head == "word") {
      word_line(no, tokens);
    } else if (head == "conflict") {
      conflict_line(no, tokens);
    } else {
      throw DomainError(no, "unknown directive '" + head + "'");
    }
  }

  Domain finish() {
    for (const char* builtin : {"scene", "group"}) {
      if (!d_.concepts_.find(builtin) && !d_.verbs_.find(builtin)) d_.concepts_.add(builtin, 1.0);
    }
    d_.scene_concept_ = *d_.concepts_.find("scene");
    d_.group_concept_ = *d_.concepts_.find("group");
    // Every concept and verb is also a word of its own, unless a word
    // declaration claimed that text.
    for (SymbolId id = 0; id < d_.concepts_.size(); ++id) {
      const auto& name = d_.concepts_.name(id);
      if (!d_.words_.count(name)) d_.words_.emplace(name, Word{WordKind::Concept, {{id, 1.0}}});
    }
    for (SymbolId id = 0; id < d_.verbs_.size(); ++id) {
      const auto& name = d_.verbs_.name(id);
      if (!d_.words_.count(name)) d_.words_.emplace(name, Word{WordKind::Verb, {{id, 1.0}}});
    }
    return std::move(d_);
  }

 private:
  void check_fresh(std::size_t no, const std::string& id) {
    if (d_.concepts_.find(id) || d_.verbs_.find(id)) {
      throw DomainError(no, "duplicate symbol '" + id + "'");
    }
    if (id.empty() || Domain::is_quoted(id)) throw DomainError(no, "invalid symbol '" + id + "'");
  }

  double area_of(std::size_t no, const std::vector<std::string>& tokens, std::size_t from) {
    double area = 1.0;
    for (std::size_t i = from; i < tokens.size(); ++i) {
      if (auto v = key_value(tokens[i], "area")) {
        area = parse_real(no, *v);
        if (area <= 0.0) throw DomainError(no, "area must be positive");
      }
    }
    return area;
  }

  void concept_line(std::size_t no, const std::vector<std::string>& t) {
    if (t.size() < 2) throw DomainError(no, "concept needs an id");
    for (std::size_t i = 2; i < t.size(); ++i) {
      if (!key_value(t[i], "area")) throw DomainError(no, "unexpected '" + t[i] + "'");
    }
    check_fresh(no, t[1]);
    d_.concepts_.add(t[1], area_of(no, t, 2));
  }

  void verb_line(std::size_t no, const std::vector<std::string>& t) {
    if (t.size() < 2) throw DomainError(no, "verb needs an id");
    check_fresh(no, t[1]);
    VerbInfo info;
    for (std::size_t i = 2; i < t.size(); ++i) {
      if (auto v = key_value(t[i], "side_effect")) {
        info = parse_side_effect(no, *v);
      } else if (!key_value(t[i], "area")) {
        throw DomainError(no, "unexpected '" + t[i] + "'");
      }
    }
    d_.verbs_.add(t[1], area_of(no, t, 2));
    d_.verb_info_.push_back(info);
  }

  void pair_line(std::size_t no, const std::vector<std::string>& t, bool impact) {
    const char* what = impact ? "impact" : "overlap";
    if (t.size() != 4) throw DomainError(no, std::string(what) + " needs <id> <id> <value>");
    double value = parse_real(no, t[3]);
    SymbolTable* table = nullptr;
    std::optional<SymbolId> a, b;
    if ((a = d_.concepts_.find(t[1])) && (b = d_.concepts_.find(t[2]))) {
      table = &d_.concepts_;
    } else if ((a = d_.verbs_.find(t[1])) && (b = d_.verbs_.find(t[2]))) {
      table = &d_.verbs_;
    } else {
      throw DomainError(no, std::string(what) + " between unknown or mixed symbols");
    }
    if (impact) {
      if (value < -1.0 || value > 1.0) throw DomainError(no, "impact must be in [-1, 1]");
      if (*a == *b) throw DomainError(no, "a symbol cannot impact itself");
      if (!table->set_impact(*a, *b, value)) throw DomainError(no, "duplicate impact");
    } else {
      double limit = std::min(table->area(*a), table->area(*b));
      if (value < 0.0 || value > limit) throw DomainError(no, "overlap must be in [0, min(area)]");
      if (*a == *b) throw DomainError(no, "self overlap is the area");
      if (!table->set_overlap(*a, *b, value)) throw DomainError(no, "duplicate overlap");
    }
  }

  void word_line(std::size_t no, const std::vector<std::string>& t) {
    if (t.size() < 4 || t[2] != "=") throw DomainError(no, "word needs <text> = <id>[:<f>] ...");
    if (d_.words_.count(t[1])) throw DomainError(no, "duplicate word '" + t[1] + "'");
    Word word;
    bool first = true;
    for (std::size_t i = 3; i < t.size(); ++i) {
      std::string id = t[i];
      double energy = 1.0;
      if (auto colon = id.find(':'); colon != std::string::npos) {
        energy = parse_real(no, std::string_view(id).substr(colon + 1));
        id = id.substr(0, colon);
      }
      if (energy <= 0.0 || energy > 1.0) throw DomainError(no, "word energy must be in (0, 1]");
      WordKind kind;
      std::optional<SymbolId> sym;
      if ((sym = d_.concepts_.find(id))) {
        kind = WordKind::Concept;
      } else if ((sym = d_.verbs_.find(id))) {
        kind = WordKind::Verb;
      } else {
        throw DomainError(no, "word refers to unknown symbol '" + id + "'");
      }
      if (!first && kind != word.kind) throw DomainError(no, "word mixes concepts and verbs");
      word.kind = kind;
      first = false;
      if (!word.members.emplace(*sym, energy).second) {
        throw DomainError(no, "symbol '" + id + "' repeated in word");
      }
    }
    d_.words_.emplace(t[1], std::move(word));
  }

  void conflict_line(std::size_t no, const std::vector<std::string>& t) {
    if (t.size() != 3) throw DomainError(no, "conflict needs <verb> <verb>");
    auto a = d_.verbs_.find(t[1]);
    auto b = d_.verbs_.find(t[2]);
    if (!a || !b) throw DomainError(no, "conflict between unknown verbs");
    if (!d_.conflicts_.insert(std::minmax(*a, *b)).second) {
      throw DomainError(no, "duplicate conflict");
    }
  }

  Domain d_{Domain::Empty{}};
};

Domain Domain::parse(std::string_view text) {
  DomainBuilder builder;
  std::size_t no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    builder.line(++no, text.substr(pos, end - pos));
    pos = end + 1;
  }
  Domain domain = builder.finish();
  domain.source_ = std::string(text);
  return domain;
}

Domain Domain::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read domain file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

}  // namespace xapagy
