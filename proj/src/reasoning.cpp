// Mood-gated behaviors on top of the HLS pipeline: expectation and surprise,
// missing actions and relations, summarization, recall.

#include <algorithm>
#include <cmath>

#include "xapagy/agent.hpp"
#include "xapagy/error.hpp"

namespace xapagy {

namespace {

std::size_t index_of(Purpose p) { return static_cast<std::size_t>(p); }

}  // namespace

Mood Mood::preset_named(std::string_view name) {
  Mood m;
  m.preset = std::string(name);
  m.threshold.fill(0.01);
  if (name == "story_following") return m;
  if (name == "recall" || name == "confabulation") {
    m.budget[index_of(Purpose::Continuation)] = 10.0;
    m.budget[index_of(Purpose::MissingAction)] = 0.15;
    m.threshold[index_of(Purpose::Continuation)] = 0.001;
    m.threshold[index_of(Purpose::MissingAction)] = 0.05;
    if (name == "confabulation") {
      m.relaxation = 1.5;
      m.adherence = 0.3;
    }
    return m;
  }
  throw ConfigError("unknown mood preset '" + std::string(name) + "'");
}

Mood Mood::from_config(const Config& config) {
  Mood m = preset_named(config.text("mood"));
  for (Purpose p : kPurposes) {
    std::string budget = "mood.budget." + std::string(to_string(p));
    std::string threshold = "mood.threshold." + std::string(to_string(p));
    if (config.is_explicit(budget)) m.budget[index_of(p)] = config.number(budget);
    if (config.is_explicit(threshold)) m.threshold[index_of(p)] = config.number(threshold);
  }
  if (config.is_explicit("mood.relaxation")) m.relaxation = config.number("mood.relaxation");
  if (config.is_explicit("mood.adherence")) m.adherence = config.number("mood.adherence");
  if (config.is_explicit("mood.top_k")) m.top_k = static_cast<int>(config.number("mood.top_k"));
  if (m.relaxation < 1.0) throw ConfigError("mood.relaxation must be at least 1");
  if (m.adherence < 0.0 || m.adherence > 1.0) throw ConfigError("mood.adherence must lie in [0, 1]");
  if (m.top_k < 1) throw ConfigError("mood.top_k must be at least 1");
  for (double b : m.budget) {
    if (b < 0.0) throw ConfigError("mood budgets must be non-negative");
  }
  return m;
}

void Agent::set_mood(std::string_view preset) {
  mood_ = Mood::preset_named(preset);
  config_.set("mood", preset);
}

void Agent::set_mood_value(std::string_view key, std::string_view value) {
  if (key.substr(0, 5) != "mood.") throw ConfigError("'" + std::string(key) + "' is not a mood key");
  Config probe = config_;
  probe.set("mood", mood_.preset);
  probe.set(key, value);
  Mood updated = mood_;
  double v = probe.number(key);
  bool known = false;
  for (Purpose p : kPurposes) {
    if (key == "mood.budget." + std::string(to_string(p))) {
      updated.budget[index_of(p)] = v;
      known = true;
    }
    if (key == "mood.threshold." + std::string(to_string(p))) {
      updated.threshold[index_of(p)] = v;
      known = true;
    }
  }
  if (key == "mood.relaxation") updated.relaxation = v, known = true;
  if (key == "mood.adherence") updated.adherence = v, known = true;
  if (key == "mood.top_k") updated.top_k = static_cast<int>(v), known = true;
  if (!known) throw ConfigError("unknown config key '" + std::string(key) + "'");
  if (updated.relaxation < 1.0) throw ConfigError("mood.relaxation must be at least 1");
  if (updated.adherence < 0.0 || updated.adherence > 1.0) throw ConfigError("mood.adherence must lie in [0, 1]");
  if (updated.top_k < 1) throw ConfigError("mood.top_k must be at least 1");
  if (v < 0.0) throw ConfigError("'" + std::string(key) + "' must be non-negative");
  mood_ = updated;
  config_ = probe;
}

// --- scoring -------------------------------------------------------------------

double Agent::support_of(const Hls& hls, Purpose purpose) const {
  double s = support(hls, purpose, support_);
  if (purpose != Purpose::MissingRelation) return s;
  // Inhibition by similar or conflicting relations already in the focus.
  const ViTemplate& t = hls.tmpl;
  // A missing relation joins characters already in the story.
  if (!t.object || t.subject.kind != TemplatePart::Kind::Focus || t.object->kind != TemplatePart::Kind::Focus) {
    return std::min(s, 0.0);
  }
  InstanceId a = t.subject.instance;
  InstanceId b = t.object->instance;
  double theta = hls_context().params.theta_compat;
  for (const auto& [id, unused] : focus_.vis()) {
    if (!focus_.is_relation(id)) continue;
    const VerbInstance& r = memory_.vi(id);
    auto o = r.object_instance();
    if (!o) continue;
    bool same_pair = (r.subject == a && *o == b) || (r.subject == b && *o == a);
    if (!same_pair) continue;
    bool similar = overlay_match(domain_.verbs(), r.verbs, t.verbs) >= theta;
    bool conflicting = false;
    for (const auto& [x, ex] : r.verbs) {
      for (const auto& [y, ey] : t.verbs) conflicting = conflicting || domain_.conflicting(x, y);
    }
    if (similar || conflicting) return std::min(s, 0.0);
  }
  return s;
}

std::vector<std::pair<const Hls*, double>> Agent::ranked(Purpose purpose) const {
  std::vector<std::pair<const Hls*, double>> out;
  // The story goes on in the current scene, or inside the quote just narrated.
  std::set<InstanceId> active{focus_.current_scene()};
  if (memory_.vi_count() > 0) {
    if (auto inquit = memory_.vis().back().inquit()) active.insert(memory_.vi(*inquit).scene);
  }
  for (const Hls& h : hls_) {
    if (h.in_focus || !active.count(h.tmpl.scene) || !serves(h.tmpl, purpose, domain_)) continue;
    double s = support_of(h, purpose);
    if (s > 0.0) out.push_back({&h, s});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

// --- expectation and surprise ----------------------------------------------------

bool Agent::expected(const ViTemplate& tmpl, const VerbInstance& vi) const {
  if (tmpl.form != vi.form) return false;
  double theta = hls_context().params.theta_compat;
  std::function<bool(const TemplatePart&, InstanceId)> part_ok = [&](const TemplatePart& p, InstanceId id) {
    switch (p.kind) {
      case TemplatePart::Kind::Focus: return p.instance == id;
      case TemplatePart::Kind::New:
        return tick_instances_.count(id) != 0 &&
               overlay_match(domain_.concepts(), p.attributes, memory_.instance(id).attributes) > 0.0;
      case TemplatePart::Kind::Group: {
        const auto& members = memory_.instance(id).members;
        if (members.size() != p.members.size()) return false;
        for (const auto& m : p.members) {
          bool found = std::any_of(members.begin(), members.end(), [&](InstanceId x) { return part_ok(m, x); });
          if (!found) return false;
        }
        return true;
      }
    }
    return false;
  };
  if (!part_ok(tmpl.subject, vi.subject)) return false;
  if (tmpl.object) {
    auto o = vi.object_instance();
    if (!o || !part_ok(*tmpl.object, *o)) return false;
  }
  if (tmpl.form == ViForm::SVAdj) {
    const auto* adj = std::get_if<ConceptOverlay>(&vi.object);
    if (!adj || overlay_match(domain_.concepts(), tmpl.adjective, *adj) < theta) return false;
  }
  return overlay_match(domain_.verbs(), tmpl.verbs, vi.verbs) >= theta;
}

namespace {

template <class Id>
double l1(const Body<Id>& a, const Body<Id>& b) {
  double d = 0.0;
  for (const auto& [id, e] : a) {
    auto it = b.find(id);
    d += std::abs(e - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [id, e] : b) {
    if (!a.count(id)) d += e;
  }
  return d;
}

}  // namespace

double Agent::surprise_since(const std::map<InstanceId, Body<InstanceId>>& pre_instance,
                             const std::map<ViId, Body<ViId>>& pre_vi,
                             const std::vector<std::pair<ViTemplate, double>>& pre_continuations,
                             const ViTemplate* matched) const {
  double total = 0.0;
  for (const auto& [head, body] : pre_instance) {
    if (shadows_.has(head)) total += l1(body, shadows_.body(head));
  }
  for (const auto& [head, body] : pre_vi) {
    if (shadows_.has(head)) total += l1(body, shadows_.body(head));
  }
  auto post = ranked(Purpose::Continuation);
  double theta = hls_context().params.theta_compat;
  for (const auto& [tmpl, s] : pre_continuations) {
    if (matched && tmpl == *matched) continue;
    double now = 0.0;
    for (const auto& [h, ps] : post) {
      if (templates_compatible(tmpl, h->tmpl, domain_, theta)) {
        now = ps;
        break;
      }
    }
    total += std::max(0.0, s - now);
  }
  return total;
}

// --- internal instantiation ----------------------------------------------------

void Agent::seed_shadow(ViId id, const Hls& hls, Purpose purpose) {
  Body<ViId> seed;
  for (const Supporter& s : hls.supporters) {
    if (support_.weight(purpose, s.type) > 0.0 && focus_.expired(s.source)) seed[s.source] += s.weight;
  }
  shadows_.reseed(id, seed, shadow_params_.cap_vi);
}

ViId Agent::instantiate_hls(const Hls& hls, Purpose purpose, Origin origin) {
  const ViTemplate& t = hls.tmpl;
  std::function<void(const TemplatePart&)> check = [&](const TemplatePart& p) {
    if (p.kind == TemplatePart::Kind::Focus && !focus_.contains(p.instance)) {
      throw StaleHlsError("template refers to " + to_string(p.instance) + ", which left the focus");
    }
    for (const auto& m : p.members) check(m);
  };
  check(t.subject);
  if (t.object) check(*t.object);
  InstanceId scene = focus_.contains(t.scene) ? t.scene : focus_.current_scene();
  std::function<InstanceId(const TemplatePart&)> realize = [&](const TemplatePart& p) -> InstanceId {
    switch (p.kind) {
      case TemplatePart::Kind::Focus: return p.instance;
      case TemplatePart::Kind::New: return create_instance(p.attributes, scene, false);
      case TemplatePart::Kind::Group: {
        std::vector<InstanceId> members;
        for (const auto& m : p.members) members.push_back(realize(m));
        return find_or_create_group(std::move(members), scene);
      }
    }
    return p.instance;
  };
  ResolvedVi r;
  r.form = t.form;
  r.verbs = t.verbs;
  r.scene = scene;
  r.subject = realize(t.subject);
  if (t.object) r.object = realize(*t.object);
  if (t.form == ViForm::SVAdj) r.object = t.adjective;
  ViId id = record_vi(std::move(r), origin);
  seed_shadow(id, hls, purpose);
  return id;
}

std::vector<ViId> Agent::summarize_builtin(double& budget) {
  std::vector<ViId> out;
  if (budget < 1.0) return out;
  std::optional<SymbolId> marker;
  for (SymbolId v = 0; v < domain_.verbs().size(); ++v) {
    if (domain_.verb_info(v).effect == SideEffect::InSummary) {
      marker = v;
      break;
    }
  }
  if (!marker) return out;
  InstanceId scene = focus_.current_scene();
  std::vector<ViId> actions;
  for (const auto& [id, s] : focus_.vis()) {
    const VerbInstance& v = memory_.vi(id);
    if (v.scene == scene && !focus_.is_relation(id) && domain_.primary_effect(v.verbs) == SideEffect::Action) {
      actions.push_back(id);
    }
  }
  auto window = static_cast<std::size_t>(summary_window_);
  if (actions.size() < window) return out;
  std::vector<ViId> last(actions.end() - static_cast<std::ptrdiff_t>(window), actions.end());
  for (ViId id : last) {
    for (std::size_t l : memory_.in_links(id)) {
      if (memory_.links()[l].kind == LinkKind::Summarization) return out;
    }
  }
  double theta = hls_context().params.theta_compat;
  bool repetition = true;
  bool alternation = true;
  for (std::size_t i = 0; i + 1 < last.size(); ++i) {
    const VerbInstance& a = memory_.vi(last[i]);
    const VerbInstance& b = memory_.vi(last[i + 1]);
    if (overlay_match(domain_.verbs(), memory_.vi(last.front()).verbs, b.verbs) < theta) repetition = false;
    auto ao = a.object_instance();
    auto bo = b.object_instance();
    if (!ao || !bo || *ao != b.subject || *bo != a.subject) alternation = false;
  }
  if (!repetition && !alternation) return out;

  std::vector<InstanceId> parts;
  VerbOverlay verbs{{*marker, 1.0}};
  for (ViId id : last) {
    const VerbInstance& v = memory_.vi(id);
    parts.push_back(v.subject);
    if (auto o = v.object_instance()) parts.push_back(*o);
    if (alternation || id == last.back()) verbs = overlay_add(domain_.verbs(), verbs, v.verbs);
  }
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  for (InstanceId p : parts) {
    if (!focus_.contains(p)) return out;
  }
  ResolvedVi r;
  r.form = ViForm::SV;
  r.verbs = verbs;
  r.scene = scene;
  r.subject = parts.size() == 1 ? parts.front() : find_or_create_group(parts, scene);
  out.push_back(record_vi(std::move(r), Origin::Inferred));
  budget -= 1.0;
  return out;
}

std::vector<ViId> Agent::infer() {
  std::vector<ViId> out;
  const Purpose purposes[] = {Purpose::MissingAction, Purpose::MissingRelation, Purpose::Summarization};
  bool any = std::any_of(std::begin(purposes), std::end(purposes), [&](Purpose p) { return mood_.budget_of(p) > 0.0; });
  if (!any) return out;
  Focus::SpikeScope spike(focus_);
  for (Purpose purpose : purposes) {
    double budget = mood_.budget_of(purpose);
    if (budget <= 0.0) continue;
    if (purpose == Purpose::Summarization) {
      auto made = summarize_builtin(budget);
      out.insert(out.end(), made.begin(), made.end());
    }
    std::vector<ViTemplate> done;
    double theta = hls_context().params.theta_compat;
    for (const auto& [h, s] : ranked(purpose)) {
      if (s <= mood_.threshold_of(purpose)) break;
      if (s > budget) continue;
      bool duplicate = std::any_of(done.begin(), done.end(), [&](const ViTemplate& t) {
        return templates_compatible(t, h->tmpl, domain_, theta);
      });
      if (duplicate) continue;
      try {
        out.push_back(instantiate_hls(*h, purpose, Origin::Inferred));
        budget -= s;
        done.push_back(h->tmpl);
      } catch (const Error& e) {
        warn(std::string("HLS discarded: ") + e.what());
      }
    }
  }
  if (!out.empty()) hls_ = compute_hls(hls_context());
  return out;
}

// --- recall --------------------------------------------------------------------

std::optional<ViId> Agent::recall_step() {
  double budget = mood_.budget_of(Purpose::Continuation);
  if (budget <= 0.0) return std::nullopt;
  std::vector<std::pair<const Hls*, double>> candidates;
  for (const auto& c : ranked(Purpose::Continuation)) {
    if (c.second > mood_.threshold_of(Purpose::Continuation) && c.second <= budget) candidates.push_back(c);
  }
  double u = uniform01(rng_);
  double pick = uniform01(rng_);
  std::optional<ViId> made;
  {
    Focus::SpikeScope spike(focus_);
    while (!candidates.empty() && !made) {
      std::size_t chosen = 0;
      if (u >= mood_.adherence) {
        std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(mood_.top_k), candidates.size());
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) total += candidates[i].second;
        double r = pick * total;
        for (chosen = 0; chosen + 1 < k; ++chosen) {
          r -= candidates[chosen].second;
          if (r < 0.0) break;
        }
      }
      try {
        made = instantiate_hls(*candidates[chosen].first, Purpose::Continuation, Origin::Recalled);
      } catch (const Error& e) {
        warn(std::string("HLS discarded: ") + e.what());
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(chosen));
      }
    }
  }
  if (!made) {
    flush_warnings();
    return std::nullopt;
  }
  flush_warnings();
  advance_dynamics();
  finish_tick();
  return made;
}

std::vector<ViId> Agent::recall(int steps) {
  std::vector<ViId> out;
  for (int i = 0; i < steps; ++i) {
    auto id = recall_step();
    if (!id) break;
    out.push_back(*id);
  }
  return out;
}

}  // namespace xapagy
