#include "xapagy/hls.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>

namespace xapagy {

SvrType opposite(SvrType type) {
  switch (type) {
    case SvrType::InShadow: return SvrType::InShadow;
    case SvrType::Predecessor: return SvrType::Successor;
    case SvrType::Successor: return SvrType::Predecessor;
    case SvrType::Summary: return SvrType::Elaboration;
    case SvrType::Elaboration: return SvrType::Summary;
    case SvrType::Answer: return SvrType::Question;
    case SvrType::Question: return SvrType::Answer;
    case SvrType::Context: return SvrType::ContextImplication;
    case SvrType::ContextImplication: return SvrType::Context;
  }
  return type;
}

std::string_view to_string(SvrType type) {
  switch (type) {
    case SvrType::InShadow: return "in_shadow";
    case SvrType::Predecessor: return "predecessor";
    case SvrType::Successor: return "successor";
    case SvrType::Summary: return "summary";
    case SvrType::Elaboration: return "elaboration";
    case SvrType::Answer: return "answer";
    case SvrType::Question: return "question";
    case SvrType::Context: return "context";
    case SvrType::ContextImplication: return "context_implication";
  }
  return "in_shadow";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::optional<SvrType> parse_svr_type(std::string_view text) {
  std::string t = lower(text);
  for (SvrType type : kSvrTypes) {
    if (to_string(type) == t) return type;
  }
  return std::nullopt;
}

std::string_view to_string(Purpose purpose) {
  switch (purpose) {
    case Purpose::Continuation: return "continuation";
    case Purpose::MissingAction: return "missing_action";
    case Purpose::MissingRelation: return "missing_relation";
    case Purpose::Summarization: return "summarization";
  }
  return "continuation";
}

std::optional<Purpose> parse_purpose(std::string_view text) {
  std::string t = lower(text);
  std::replace(t.begin(), t.end(), '-', '_');
  for (Purpose p : kPurposes) {
    if (to_string(p) == t) return p;
  }
  return std::nullopt;
}

std::optional<SvrType> svr_type_of(LinkKind kind, bool outgoing) {
  switch (kind) {
    case LinkKind::Succession: return outgoing ? SvrType::Successor : SvrType::Predecessor;
    case LinkKind::Summarization: return outgoing ? SvrType::Elaboration : SvrType::Summary;
    case LinkKind::QuestionAnswer: return outgoing ? SvrType::Answer : SvrType::Question;
    case LinkKind::Context: return outgoing ? SvrType::ContextImplication : SvrType::Context;
    case LinkKind::Coincidence:
    case LinkKind::Identity: return std::nullopt;
  }
  return std::nullopt;
}

// --- support -------------------------------------------------------------------

SupportMatrix::SupportMatrix() { *this = from_config(Config()); }

SupportMatrix SupportMatrix::from_config(const Config& config) {
  SupportMatrix m{Zero{}};
  for (Purpose p : kPurposes) {
    for (SvrType t : kSvrTypes) {
      m.set(p, t, config.number("support." + std::string(to_string(p)) + "." + std::string(to_string(t))));
    }
  }
  return m;
}

double support(const Hls& hls, Purpose purpose, const SupportMatrix& matrix) {
  double s = 0.0;
  for (const auto& [type, e] : hls.evidence) s += matrix.weight(purpose, type) * e;
  return s;
}

// --- collection ----------------------------------------------------------------

std::vector<Svr> collect_svrs(const HlsContext& ctx) {
  std::vector<Svr> out;
  const Memory& memory = ctx.memory;
  for (const auto& [focus_vi, strength] : ctx.focus.vis()) {
    if (!ctx.shadows.has(focus_vi)) continue;
    for (const auto& [root, e] : ctx.shadows.body(focus_vi)) {
      double base = strength * e;
      if (base >= ctx.params.epsilon_svr) out.push_back({focus_vi, root, root, SvrType::InShadow, base});
      for (bool outgoing : {true, false}) {
        const auto& links = outgoing ? memory.out_links(root) : memory.in_links(root);
        for (std::size_t index : links) {
          const Link& link = memory.links()[index];
          auto type = svr_type_of(link.kind, outgoing);
          if (!type) continue;
          double energy = base * link.weight;
          if (energy < ctx.params.epsilon_svr) continue;
          out.push_back({focus_vi, root, ViId(outgoing ? link.to : link.from), *type, energy});
        }
      }
    }
  }
  return out;
}

// --- interpretation ------------------------------------------------------------

namespace {

using Candidates = std::vector<std::pair<TemplatePart, double>>;

Candidates reverse_candidates(InstanceId part, InstanceId scene, const HlsContext& ctx) {
  Candidates out;
  auto reverse = ctx.shadows.reverse_shadow(part, ctx.params.new_floor);
  const ConceptOverlay& attributes = ctx.memory.instance(part).attributes;
  // A leading head in the template's scene that looks like the part is its
  // resident counterpart; the part is then not read as a newcomer.
  const ReverseCandidate* lead = nullptr;
  for (const auto& c : reverse) {
    if (c.head && (!lead || c.share > lead->share)) lead = &c;
  }
  bool counterpart = lead && ctx.memory.instance(*lead->head).scene == scene &&
                     overlay_match(ctx.domain.concepts(), attributes, ctx.memory.instance(*lead->head).attributes) >=
                         ctx.params.theta_compat;
  for (const auto& c : reverse) {
    if (c.head) {
      out.push_back({TemplatePart::focus(*c.head), c.share});
    } else {
      double share = counterpart ? std::min(c.share, ctx.params.new_floor) : c.share;
      out.push_back({TemplatePart::fresh(part, attributes), share});
    }
  }
  return out;
}

Candidates part_candidates(InstanceId part, const Svr& svr, const HlsContext& ctx) {
  const VerbInstance& root = ctx.memory.vi(svr.vi_root);
  const VerbInstance& fvi = ctx.memory.vi(svr.focus_vi);
  // (i) the part also plays a role in the root: take the matching focus part
  if (part == root.subject && ctx.focus.contains(fvi.subject)) {
    return {{TemplatePart::focus(fvi.subject), 1.0}};
  }
  auto root_object = root.object_instance();
  auto focus_object = fvi.object_instance();
  if (root_object && part == *root_object && focus_object && ctx.focus.contains(*focus_object)) {
    return {{TemplatePart::focus(*focus_object), 1.0}};
  }
  // still-resident instances of the same scene stand for themselves
  if (ctx.focus.contains(part) && ctx.memory.instance(part).scene == fvi.scene) {
    return {{TemplatePart::focus(part), 1.0}};
  }
  const Instance& inst = ctx.memory.instance(part);
  if (inst.is_group()) {
    // Members mapped to their best interpretation each.
    TemplatePart group;
    group.kind = TemplatePart::Kind::Group;
    group.instance = part;
    double share = 1.0;
    for (InstanceId m : inst.members) {
      Candidates cs = part_candidates(m, svr, ctx);
      if (cs.empty()) return {};
      auto best = cs.begin();
      for (auto it = cs.begin(); it != cs.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      group.members.push_back(best->first);
      share *= best->second;
    }
    // A group whose members collapse onto one focus instance is no group.
    std::set<InstanceId> distinct;
    for (const auto& m : group.members) {
      if (m.kind == TemplatePart::Kind::Focus && !distinct.insert(m.instance).second) return {};
    }
    return {{std::move(group), share}};
  }
  // (ii) reverse shadowing
  return reverse_candidates(part, fvi.scene, ctx);
}

}  // namespace

std::vector<Svri> interpret(const Svr& svr, const HlsContext& ctx) {
  const VerbInstance& source = ctx.memory.vi(svr.vi_source);
  if (source.form == ViForm::Quote) return {};
  const VerbInstance& fvi = ctx.memory.vi(svr.focus_vi);

  ViTemplate base;
  base.form = source.form;
  base.verbs = source.verbs;
  base.scene = fvi.scene;
  if (const auto* adj = std::get_if<ConceptOverlay>(&source.object)) base.adjective = *adj;

  std::vector<Svri> out;
  Candidates subjects = part_candidates(source.subject, svr, ctx);
  auto source_object = source.object_instance();
  if (!source_object) {
    for (auto& [part, share] : subjects) {
      double w = svr.energy * share;
      if (w < ctx.params.epsilon_svr) continue;
      ViTemplate t = base;
      t.subject = part;
      out.push_back({svr, std::move(t), w});
    }
    return out;
  }
  Candidates objects = part_candidates(*source_object, svr, ctx);
  for (const auto& [s, s_share] : subjects) {
    for (const auto& [o, o_share] : objects) {
      // Two distinct source parts never collapse onto one focus instance.
      if (source.subject != *source_object && s.kind == TemplatePart::Kind::Focus &&
          o.kind == TemplatePart::Kind::Focus && s.instance == o.instance) {
        continue;
      }
      double w = svr.energy * s_share * o_share;
      if (w < ctx.params.epsilon_svr) continue;
      ViTemplate t = base;
      t.subject = s;
      t.object = o;
      out.push_back({svr, std::move(t), w});
    }
  }
  return out;
}

// --- aggregation ---------------------------------------------------------------

bool parts_compatible(const TemplatePart& a, const TemplatePart& b, const SymbolTable& concepts,
                      double theta) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TemplatePart::Kind::Focus: return a.instance == b.instance;
    case TemplatePart::Kind::New: return overlay_match(concepts, a.attributes, b.attributes) >= theta;
    case TemplatePart::Kind::Group:
      if (a.members.size() != b.members.size()) return false;
      for (std::size_t i = 0; i < a.members.size(); ++i) {
        if (!parts_compatible(a.members[i], b.members[i], concepts, theta)) return false;
      }
      return true;
  }
  return false;
}

bool templates_compatible(const ViTemplate& a, const ViTemplate& b, const Domain& domain,
                          double theta) {
  if (a.form != b.form || a.scene != b.scene) return false;
  if (!parts_compatible(a.subject, b.subject, domain.concepts(), theta)) return false;
  if (a.object.has_value() != b.object.has_value()) return false;
  if (a.object && !parts_compatible(*a.object, *b.object, domain.concepts(), theta)) return false;
  if (a.form == ViForm::SVAdj && overlay_match(domain.concepts(), a.adjective, b.adjective) < theta) {
    return false;
  }
  return overlay_match(domain.verbs(), a.verbs, b.verbs) >= theta;
}

namespace {

bool part_is(const TemplatePart& part, InstanceId id, const Memory& memory) {
  switch (part.kind) {
    case TemplatePart::Kind::Focus: return part.instance == id;
    case TemplatePart::Kind::New: return false;
    case TemplatePart::Kind::Group: {
      std::set<InstanceId> want;
      for (const auto& m : part.members) {
        if (m.kind != TemplatePart::Kind::Focus) return false;
        want.insert(m.instance);
      }
      const auto& members = memory.instance(id).members;
      return want == std::set<InstanceId>(members.begin(), members.end());
    }
  }
  return false;
}

}  // namespace

bool template_matches_vi(const ViTemplate& tmpl, const VerbInstance& vi, const Memory& memory,
                         const Domain& domain, double theta) {
  if (tmpl.form != vi.form) return false;
  if (!part_is(tmpl.subject, vi.subject, memory)) return false;
  if (tmpl.object) {
    auto o = vi.object_instance();
    if (!o || !part_is(*tmpl.object, *o, memory)) return false;
  }
  if (tmpl.form == ViForm::SVAdj) {
    const auto* adj = std::get_if<ConceptOverlay>(&vi.object);
    if (!adj || overlay_match(domain.concepts(), tmpl.adjective, *adj) < theta) return false;
  }
  return overlay_match(domain.verbs(), tmpl.verbs, vi.verbs) >= theta;
}

std::vector<Hls> aggregate(std::vector<Svri> svris, const HlsContext& ctx) {
  std::stable_sort(svris.begin(), svris.end(),
                   [](const Svri& a, const Svri& b) { return a.weight > b.weight; });
  std::vector<Hls> out;
  // Bucket by form and part shape so that only plausible clusters are scanned;
  // order inside a bucket is creation order, so "first compatible" is kept.
  auto key_of = [](const ViTemplate& t) {
    auto part_key = [](const std::optional<TemplatePart>& p) -> std::int64_t {
      if (!p) return -1;
      if (p->kind == TemplatePart::Kind::Focus) return static_cast<std::int64_t>(p->instance.value);
      return p->kind == TemplatePart::Kind::New ? -2 : -3;
    };
    return std::tuple(static_cast<int>(t.form), t.scene.value, part_key(t.subject), part_key(t.object));
  };
  std::map<decltype(key_of(ViTemplate{})), std::vector<std::size_t>> buckets;
  for (Svri& svri : svris) {
    auto& bucket = buckets[key_of(svri.tmpl)];
    Hls* target = nullptr;
    for (std::size_t index : bucket) {
      if (templates_compatible(out[index].tmpl, svri.tmpl, ctx.domain, ctx.params.theta_compat)) {
        target = &out[index];
        break;
      }
    }
    if (target == nullptr) {
      bucket.push_back(out.size());
      out.push_back(Hls{svri.tmpl, {}, {}, false});
      target = &out.back();
    }
    target->evidence[svri.svr.type] += svri.weight;
    target->supporters.push_back({svri.svr.vi_source, svri.svr.type, svri.weight});
  }
  // Already happened: told in the focus, or earlier in the same scene.
  std::map<InstanceId, std::vector<ViId>> told;
  for (const Hls& hls : out) told.emplace(hls.tmpl.scene, std::vector<ViId>{});
  for (const VerbInstance& v : ctx.memory.vis()) {
    auto it = told.find(v.scene);
    if (it != told.end() && !ctx.focus.contains(v.id)) it->second.push_back(v.id);
  }
  for (Hls& hls : out) {
    auto matches = [&](ViId id) {
      return template_matches_vi(hls.tmpl, ctx.memory.vi(id), ctx.memory, ctx.domain, ctx.params.theta_compat);
    };
    for (const auto& [id, s] : ctx.focus.vis()) {
      if (matches(id)) {
        hls.in_focus = true;
        break;
      }
    }
    if (hls.in_focus) continue;
    const auto& earlier = told.at(hls.tmpl.scene);
    hls.in_focus = std::any_of(earlier.begin(), earlier.end(), matches);
  }
  return out;
}

std::vector<Hls> compute_hls(const HlsContext& ctx) {
  std::vector<Svri> svris;
  for (const Svr& svr : collect_svrs(ctx)) {
    auto part = interpret(svr, ctx);
    std::move(part.begin(), part.end(), std::back_inserter(svris));
  }
  return aggregate(std::move(svris), ctx);
}

bool serves(const ViTemplate& tmpl, Purpose purpose, const Domain& domain) {
  SideEffect effect = domain.primary_effect(tmpl.verbs);
  switch (purpose) {
    case Purpose::Continuation: return effect != SideEffect::InSummary;
    case Purpose::MissingAction: return effect == SideEffect::Action;
    case Purpose::MissingRelation: return effect == SideEffect::Relation;
    case Purpose::Summarization: return effect == SideEffect::InSummary;
  }
  return false;
}

}  // namespace xapagy
