// Xapi rendering of recorded VIs and HLS templates, and the text dumps.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "xapagy/agent.hpp"

namespace xapagy {

namespace {

constexpr double kVisible = 0.1;  // attributes dimmed below this are not named

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Left-justified column; an overlong cell still keeps one space before the next.
std::string pad(std::string s, std::size_t width) {
  s.append(s.size() < width ? width - s.size() : 1, ' ');
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::string Agent::verb_text(const VerbOverlay& verbs) const {
  std::vector<std::pair<SymbolId, double>> members(verbs.begin(), verbs.end());
  std::stable_sort(members.begin(), members.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  // In-summary markers lead, as in `in-summary are-fighting`.
  std::stable_partition(members.begin(), members.end(), [&](const auto& m) {
    return domain_.verb_info(m.first).effect == SideEffect::InSummary;
  });
  std::vector<std::string> out;
  for (const auto& [v, e] : members) {
    std::string chosen;
    for (const auto& [text, word] : domain_.words()) {
      if (word.kind == WordKind::Verb && word.members.size() == 1 && word.members.count(v)) {
        chosen = text;
        break;
      }
    }
    if (chosen.empty()) {
      for (const auto& [text, word] : domain_.words()) {
        if (word.kind == WordKind::Verb && word.members.count(v)) {
          chosen = text;
          break;
        }
      }
    }
    if (chosen.empty()) chosen = domain_.verbs().name(v);
    if (std::find(out.begin(), out.end(), chosen) == out.end()) out.push_back(chosen);
  }
  std::string s;
  for (const auto& w : out) s += (s.empty() ? "" : " ") + w;
  return s;
}

std::string Agent::concept_text(const ConceptOverlay& attrs) const {
  std::set<SymbolId> uncovered;
  for (const auto& [c, e] : attrs) {
    if (e >= kVisible && c != domain_.scene_concept() && c != domain_.group_concept()) uncovered.insert(c);
  }
  std::vector<std::string> words;
  for (SymbolId c : std::set<SymbolId>(uncovered)) {
    if (auto name = domain_.proper_name_of(c)) {
      words.push_back("\"" + *name + "\"");
      uncovered.erase(c);
    }
  }
  std::vector<std::string> common;
  while (!uncovered.empty()) {
    const std::string* best = nullptr;
    std::size_t best_cover = 0;
    for (const auto& [text, word] : domain_.words()) {
      if (word.kind != WordKind::Concept) continue;
      bool inside = std::all_of(word.members.begin(), word.members.end(),
                                [&](const auto& m) { return attrs.energy(m.first) >= kVisible; });
      if (!inside) continue;
      std::size_t cover = 0;
      for (const auto& [m, e] : word.members) cover += uncovered.count(m);
      if (cover > best_cover) {
        best_cover = cover;
        best = &text;
      }
    }
    if (best == nullptr) break;
    for (const auto& [m, e] : domain_.words().find(*best)->second.members) uncovered.erase(m);
    common.push_back(*best);
  }
  std::string s;
  for (const auto& w : common) s += (s.empty() ? "" : " ") + w;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

std::string Agent::instance_phrase(InstanceId id, bool indefinite, InstanceId scene) const {
  const Instance& inst = memory_.instance(id);
  if (inst.is_group()) {
    std::string s;
    for (InstanceId m : inst.members) s += (s.empty() ? "" : " + ") + instance_phrase(m, false, scene);
    return s;
  }
  if (indefinite) return "a " + concept_text(inst.attributes);
  return reference_in(id, scene);
}

std::string Agent::reference_text(InstanceId id) const {
  return reference_in(id, memory_.instance(id).scene);
}

std::string Agent::reference_in(InstanceId id, InstanceId scene) const {
  const Instance& inst = memory_.instance(id);
  std::vector<std::string> names;
  std::vector<std::string> candidates;
  for (const auto& [c, e] : inst.attributes) {
    if (e < kVisible) continue;
    if (auto name = domain_.proper_name_of(c)) names.push_back("\"" + *name + "\"");
  }
  if (inst.is_scene) candidates.push_back("scene");
  for (const auto& [text, word] : domain_.words()) {
    if (word.kind != WordKind::Concept || text == "scene") continue;
    bool inside = std::all_of(word.members.begin(), word.members.end(),
                              [&](const auto& m) { return inst.attributes.energy(m.first) >= kVisible; });
    if (inside) candidates.push_back(text);
  }
  // Most specific words first: those with the most concept members.
  std::stable_sort(candidates.begin(), candidates.end(), [&](const std::string& a, const std::string& b) {
    auto size = [&](const std::string& w) {
      const Word* word = domain_.find_word(w);
      return word ? word->members.size() : 0;
    };
    return size(a) > size(b);
  });
  std::vector<InstanceId> pool = candidates_in(inst.is_scene ? scene : inst.scene);
  auto resolves = [&](const std::vector<std::string>& words) {
    Term term{Article::The, words, 0, std::nullopt};
    return resolve_term(term, pool, false) == std::optional<InstanceId>(id);
  };
  auto phrase = [](const std::vector<std::string>& words, bool article) {
    std::string s = article ? "the" : "";
    for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
    return s;
  };
  if (focus_.contains(id)) {
    if (!names.empty()) {
      if (resolves(names)) return inst.is_scene ? phrase({names}, false) : phrase(names, false);
    }
    std::size_t n = std::min<std::size_t>(candidates.size(), 8);
    for (std::size_t i = 0; i < n; ++i) {
      if (resolves({candidates[i]})) return phrase({candidates[i]}, true);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (resolves({candidates[i], candidates[j]})) return phrase({candidates[i], candidates[j]}, true);
      }
    }
  }
  if (!names.empty()) return phrase(names, false);
  std::string text = concept_text(inst.attributes);
  if (inst.is_scene) text = text.empty() ? "scene" : "scene " + text;
  return phrase({text}, true);
}

std::string Agent::render(ViId id) const {
  const VerbInstance& v = memory_.vi(id);
  // Instances created together with this VI are introduced with `a`.
  auto introduced_here = [&](InstanceId p) {
    const Instance& inst = memory_.instance(p);
    if (inst.created_at != v.created_at || inst.is_scene || inst.is_group()) return false;
    for (std::size_t i = id.value; i-- > 0;) {
      const VerbInstance& earlier = memory_.vis()[i];
      if (earlier.created_at != v.created_at) break;
      if (earlier.subject == p || earlier.object_instance() == std::optional<InstanceId>(p)) return false;
    }
    return true;
  };
  InstanceId subject = v.subject;
  SideEffect effect = domain_.primary_effect(v.verbs);
  if (effect == SideEffect::Changes) {
    // The VI records the new identity; the sentence names the old one.
    for (InstanceId old : memory_.identity_neighbors(subject)) {
      if (old < subject) subject = old;
    }
  }
  std::string s = instance_phrase(subject, effect != SideEffect::Changes && introduced_here(subject), v.scene);
  s += " / " + verb_text(v.verbs);
  if (auto inquit = v.inquit()) {
    s += " in " + reference_in(v.quote_scene, v.scene) + " // " + render(*inquit);
    return capitalize(s);
  }
  if (auto o = v.object_instance()) s += " / " + instance_phrase(*o, introduced_here(*o), v.scene);
  if (const auto* adj = std::get_if<ConceptOverlay>(&v.object)) s += " / " + concept_text(*adj);
  s += v.is_question ? "?" : ".";
  return capitalize(s);
}

std::string Agent::part_text(const TemplatePart& part) const {
  switch (part.kind) {
    case TemplatePart::Kind::Focus: return reference_text(part.instance);
    case TemplatePart::Kind::New: return "a " + concept_text(part.attributes);
    case TemplatePart::Kind::Group: {
      std::string s;
      for (const auto& m : part.members) s += (s.empty() ? "" : " + ") + part_text(m);
      return s;
    }
  }
  return {};
}

std::string Agent::render(const ViTemplate& t) const {
  std::string s = part_text(t.subject) + " / " + verb_text(t.verbs);
  if (t.object) s += " / " + part_text(*t.object);
  if (t.form == ViForm::SVAdj) s += " / " + concept_text(t.adjective);
  return capitalize(s + ".");
}

// --- dumps ---------------------------------------------------------------------

std::string Agent::dump_focus() const {
  std::ostringstream out;
  out << "tick " << focus_.tick() << ", current scene " << to_string(focus_.current_scene()) << "\n";
  out << pad("id", 7) << pad("label", 40) << pad("scene", 7) << "strength\n";
  for (const auto& [id, s] : focus_.instances()) {
    const Instance& inst = memory_.instance(id);
    out << pad(to_string(id), 7) << pad(reference_text(id), 40) << pad(to_string(inst.scene), 7) << fmt(s) << "\n";
  }
  for (const auto& [id, s] : focus_.vis()) {
    out << pad(to_string(id), 7) << pad(render(id), 40) << pad(to_string(memory_.vi(id).scene), 7) << fmt(s)
        << (focus_.is_relation(id) ? "  (relation)" : "") << "\n";
  }
  return out.str();
}

std::string Agent::dump_shadows(std::optional<std::string> head) const {
  std::ostringstream out;
  auto section = [&](const std::string& head_id, const std::string& label, auto body, auto item_label) {
    if (head && *head != head_id) return;
    std::vector<std::pair<std::string, std::pair<std::string, double>>> rows;
    for (const auto& [id, e] : body) rows.push_back({to_string(id), {item_label(id), e}});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second.second > b.second.second; });
    out << head_id << "  " << label << "\n";
    for (const auto& [id, row] : rows) out << "    " << pad(id, 7) << pad(row.first, 44) << fmt(row.second) << "\n";
  };
  for (const auto& [h, body] : shadows_.instance_shadows()) {
    section(to_string(h), reference_text(h), body,
            [&](InstanceId id) { return concept_text(memory_.instance(id).attributes) + " @" + to_string(memory_.instance(id).scene); });
  }
  for (const auto& [h, body] : shadows_.vi_shadows()) {
    section(to_string(h), render(h), body, [&](ViId id) { return render(id); });
  }
  return out.str();
}

std::string Agent::dump_hls(Purpose purpose) const {
  std::ostringstream out;
  out << "purpose " << to_string(purpose) << "\n";
  out << pad("support", 10) << pad("template", 48) << "evidence\n";
  for (const auto& [h, s] : ranked(purpose)) {
    std::string evidence;
    for (const auto& [type, e] : h->evidence) {
      evidence += (evidence.empty() ? "" : " ") + std::string(to_string(type)) + "=" + fmt(e);
    }
    out << pad(fmt(s), 10) << pad(render(h->tmpl), 48) << evidence << "\n";
  }
  return out.str();
}

std::string Agent::dump_memory() const {
  std::ostringstream out;
  out << "instances " << memory_.instance_count() << ", VIs " << memory_.vi_count() << ", links "
      << memory_.links().size() << "\n";
  for (const Instance& inst : memory_.instances()) {
    out << pad(to_string(inst.id), 7) << pad(concept_text(inst.attributes), 40) << pad(to_string(inst.scene), 7)
        << "t=" << inst.created_at << " salience=" << fmt(memory_.salience(inst.id)) << "\n";
  }
  for (const VerbInstance& v : memory_.vis()) {
    out << pad(to_string(v.id), 7) << pad(render(v.id), 48) << pad(to_string(v.scene), 7) << "t=" << v.created_at
        << " salience=" << fmt(memory_.salience(v.id)) << "\n";
  }
  for (const Link& l : memory_.links()) {
    bool identity = l.kind == LinkKind::Identity;
    out << to_string(l.kind) << " " << (identity ? to_string(InstanceId(l.from)) : to_string(ViId(l.from))) << " -> "
        << (identity ? to_string(InstanceId(l.to)) : to_string(ViId(l.to))) << " " << fmt(l.weight) << "\n";
  }
  return out.str();
}

}  // namespace xapagy
