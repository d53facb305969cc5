#include "xapagy/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xapagy/error.hpp"

namespace xapagy {

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::Narrated: return "narrated";
    case Origin::Inferred: return "internal-inferred";
    case Origin::Recalled: return "internal-recalled";
  }
  return "narrated";
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

std::string term_text(const Term& term) {
  std::string out = term.article == Article::The ? "the" : term.article == Article::A ? "a" : "";
  for (const auto& w : term.words) out += (out.empty() ? "" : " ") + w;
  return out;
}

bool intersects(const std::set<InstanceId>& a, const std::set<InstanceId>& b) {
  for (InstanceId x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

}  // namespace

class Agent::Expansion : public ExpansionContext {
 public:
  explicit Expansion(Agent& agent) : agent_(agent) {}
  InstanceId current_scene() const override { return agent_.focus_.current_scene(); }
  InstanceId resolve_now(const ReferenceExpr& ref) override {
    bool creates = false;
    InstanceId scene = current_scene();
    for (const auto& chain : ref.members) agent_.lookup_chain(chain, scene, creates);
    auto id = agent_.probe(ref, scene);
    if (!id) throw ResolutionError("macro target does not name an existing instance");
    return *id;
  }
  const ViRequest* last_quote() const override {
    return agent_.last_quote_ ? &*agent_.last_quote_ : nullptr;
  }
  const Domain& domain() const override { return agent_.domain_; }

 private:
  Agent& agent_;
};

Agent::Agent(Domain domain, Config config) : domain_(std::move(domain)), config_(std::move(config)) {
  configure();
  rng_.seed(static_cast<std::uint64_t>(config_.number("seed")));
  Focus::SpikeScope spike(focus_);
  InstanceId scene = create_instance(ConceptOverlay{{domain_.scene_concept(), 1.0}}, InstanceId{}, true);
  focus_.set_current_scene(scene);
  tick_instances_.clear();
}

Agent::Agent(Agent&&) noexcept = default;
Agent& Agent::operator=(Agent&&) noexcept = default;
Agent::~Agent() = default;

void Agent::configure() {
  const Config& c = config_;
  focus_params_ = FocusParams{c.number("focus.lambda"), c.number("focus.lambda_vi"),
                              c.number("focus.expiry"), c.number("focus.push_out")};
  shadow_params_.mu = c.number("shadow.mu");
  shadow_params_.rate_head = c.number("shadow.rate_head");
  shadow_params_.rate_body = c.number("shadow.rate_body");
  shadow_params_.beta = c.number("shadow.beta");
  shadow_params_.rate_verb = c.number("shadow.rate_verb");
  shadow_params_.gamma = c.number("shadow.gamma");
  shadow_params_.rate_identity = c.number("shadow.rate_identity");
  shadow_params_.rate_link = c.number("shadow.rate_link");
  shadow_params_.rate_sharpen_instance = c.number("shadow.rate_sharpen_instance");
  shadow_params_.rate_sharpen_vi = c.number("shadow.rate_sharpen_vi");
  shadow_params_.cap_instance = c.number("shadow.cap_instance");
  shadow_params_.cap_vi = c.number("shadow.cap_vi");
  shadow_params_.epsilon = c.number("shadow.epsilon");
  shadow_params_.salience_floor = c.number("shadow.salience_floor");
  hls_params_ = HlsParams{c.number("hls.epsilon_svr"), c.number("hls.theta_compat"), c.number("hls.new_floor")};
  support_ = SupportMatrix::from_config(c);
  answer_window_ = static_cast<int>(c.number("focus.answer_window"));
  summary_window_ = static_cast<int>(c.number("summarization.window"));
  if (focus_params_.expiry <= 0.0 || focus_params_.expiry >= 1.0) {
    throw ConfigError("focus.expiry must lie in (0, 1)");
  }
  if (focus_params_.lambda_instance < 0.0 || focus_params_.lambda_vi < 0.0) {
    throw ConfigError("decay rates must be non-negative");
  }
  if (summary_window_ < 2) throw ConfigError("summarization.window must be at least 2");
  mood_ = Mood::from_config(c);
}

ShadowParams Agent::effective_shadow_params() const {
  ShadowParams p = shadow_params_;
  double r = mood_.relaxation;
  p.rate_head *= r;
  p.rate_body *= r;
  p.rate_verb *= r;
  p.rate_identity *= r;
  p.rate_link *= r;
  p.rate_sharpen_instance *= r;
  p.rate_sharpen_vi *= r;
  return p;
}

HlsContext Agent::hls_context() const {
  HlsParams p = hls_params_;
  p.theta_compat /= mood_.relaxation;
  return HlsContext{domain_, memory_, focus_, shadows_, p};
}

// --- resolution ----------------------------------------------------------------

std::vector<InstanceId> Agent::candidates_in(InstanceId scene) const {
  std::vector<InstanceId> out;
  for (const auto& [id, s] : focus_.instances()) {
    const Instance& inst = memory_.instance(id);
    if (inst.scene == scene || inst.is_scene) out.push_back(id);
  }
  return out;
}

std::optional<InstanceId> Agent::resolve_term(const Term& term, const std::vector<InstanceId>& candidates,
                                              bool warn) const {
  if (term.bound) return term.bound;
  auto overlay = domain_.known_concept_overlay(term.words);
  if (!overlay) return std::nullopt;
  std::vector<std::pair<InstanceId, double>> scored;
  double best = 0.0;
  for (InstanceId id : candidates) {
    double score = overlay_match(domain_.concepts(), *overlay, memory_.instance(id).attributes) *
                   focus_.strength(id);
    if (score <= 0.0) continue;
    scored.push_back({id, score});
    best = std::max(best, score);
  }
  if (scored.empty()) return std::nullopt;
  std::vector<InstanceId> tied;
  for (const auto& [id, score] : scored) {
    if (best - score <= 1e-12 * best) tied.push_back(id);
  }
  auto better = [&](InstanceId a, InstanceId b) {
    double sa = focus_.strength(a);
    double sb = focus_.strength(b);
    if (sa != sb) return sa > sb;
    Tick ta = memory_.instance(a).created_at;
    Tick tb = memory_.instance(b).created_at;
    if (ta != tb) return ta > tb;
    return a > b;
  };
  std::sort(tied.begin(), tied.end(), better);
  if (tied.size() > 1 && warn) {
    pending_warnings_.push_back("ambiguous reference '" + term_text(term) + "': " + std::to_string(tied.size()) +
                                " equal candidates, chose " + to_string(tied.front()));
  }
  return tied.front();
}

std::vector<InstanceId> Agent::related(InstanceId base, const std::string& relation) const {
  std::vector<InstanceId> out;
  if (relation == "in") {
    for (const auto& [id, s] : focus_.instances()) {
      if (id != base && memory_.instance(id).scene == base) out.push_back(id);
    }
    return out;
  }
  std::string kind = relation == "of" ? std::string(kOwnershipRelation)
                                      : domain_.relation_kind(domain_.lookup_verb(relation));
  for (const auto& [vi, s] : focus_.vis()) {
    if (!focus_.is_relation(vi)) continue;
    const VerbInstance& v = memory_.vi(vi);
    auto object = v.object_instance();
    if (!object || domain_.relation_kind(v.verbs) != kind) continue;
    InstanceId other;
    if (v.subject == base) {
      other = *object;
    } else if (*object == base) {
      other = v.subject;
    } else {
      continue;
    }
    if (focus_.contains(other) && std::find(out.begin(), out.end(), other) == out.end()) out.push_back(other);
  }
  return out;
}

std::optional<InstanceId> Agent::lookup_chain(const ChainRef& chain, InstanceId scene, bool& creates) const {
  const Term& base = chain.terms.back();
  if (base.article == Article::A && !base.bound) {
    creates = true;
    return std::nullopt;
  }
  auto current = resolve_term(base, candidates_in(scene), false);
  if (!current) throw ResolutionError("no instance matches '" + term_text(base) + "'");
  for (std::size_t i = chain.terms.size() - 1; i-- > 0;) {
    const Term& term = chain.terms[i];
    auto next = resolve_term(term, related(*current, chain.relations[i]), false);
    if (!next) {
      throw ResolutionError("no instance matches '" + term_text(term) + "' --" + chain.relations[i] + "-- " +
                            to_string(*current));
    }
    current = next;
  }
  return current;
}

InstanceId Agent::resolve_chain(const ChainRef& chain, InstanceId scene) {
  for (const Term& term : chain.terms) domain_.concept_overlay(term.words);  // mint names
  const Term& base = chain.terms.back();
  std::optional<InstanceId> current;
  if (base.article == Article::A && !base.bound) {
    current = create_instance(domain_.concept_overlay(base.words), scene, false);
  } else {
    current = resolve_term(base, candidates_in(scene), true);
    if (!current) throw ResolutionError("no instance matches '" + term_text(base) + "'");
  }
  for (std::size_t i = chain.terms.size() - 1; i-- > 0;) {
    const Term& term = chain.terms[i];
    auto next = resolve_term(term, related(*current, chain.relations[i]), true);
    if (!next) {
      throw ResolutionError("no instance matches '" + term_text(term) + "' --" + chain.relations[i] + "-- " +
                            to_string(*current));
    }
    current = next;
  }
  return *current;
}

std::optional<InstanceId> Agent::find_group(std::vector<InstanceId> members, InstanceId scene) const {
  std::sort(members.begin(), members.end());
  for (const auto& [id, s] : focus_.instances()) {
    const Instance& inst = memory_.instance(id);
    if (!inst.is_group() || inst.scene != scene) continue;
    std::vector<InstanceId> m = inst.members;
    std::sort(m.begin(), m.end());
    if (m == members) return id;
  }
  return std::nullopt;
}

InstanceId Agent::find_or_create_group(std::vector<InstanceId> members, InstanceId scene) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) throw ResolutionError("a group needs two distinct members");
  if (auto existing = find_group(members, scene)) return *existing;
  ConceptOverlay attrs{{domain_.group_concept(), 1.0}};
  double scale = 1.0 / static_cast<double>(members.size());
  for (InstanceId m : members) attrs = overlay_add(domain_.concepts(), attrs, memory_.instance(m).attributes, scale);
  return create_instance(std::move(attrs), scene, false, members);
}

InstanceId Agent::resolve(const ReferenceExpr& ref, InstanceId scene) {
  std::vector<InstanceId> members;
  for (const auto& chain : ref.members) members.push_back(resolve_chain(chain, scene));
  if (!ref.is_group()) return members.front();
  return find_or_create_group(std::move(members), scene);
}

std::optional<InstanceId> Agent::probe(const ReferenceExpr& ref, InstanceId scene) const {
  std::vector<InstanceId> members;
  try {
    for (const auto& chain : ref.members) {
      bool creates = false;
      auto id = lookup_chain(chain, scene, creates);
      if (!id) return std::nullopt;
      members.push_back(*id);
    }
  } catch (const ResolutionError&) {
    return std::nullopt;
  }
  if (!ref.is_group()) return members.front();
  return find_group(members, scene);
}

std::optional<InstanceId> Agent::find_scene(const ReferenceExpr& ref) const {
  std::vector<InstanceId> scenes;
  for (const auto& [id, s] : focus_.instances()) {
    if (memory_.instance(id).is_scene) scenes.push_back(id);
  }
  if (ref.is_group() || ref.members.front().terms.size() != 1) {
    throw ResolutionError("a quote scene must be a simple reference");
  }
  return resolve_term(ref.head(), scenes, false);
}

void Agent::validate(const ViRequest& req, InstanceId scene) const {
  bool creates = false;
  InstanceId subject;
  bool known = false;
  for (const auto& chain : req.subject.members) {
    auto found = lookup_chain(chain, scene, creates);
    known = found.has_value();
    if (found) subject = *found;
  }
  if (req.subject.is_group()) known = false;
  if (req.object) {
    for (const auto& chain : req.object->members) lookup_chain(chain, scene, creates);
  }
  if (req.form == ViForm::Quote) {
    if (auto quoted = find_scene(*req.scene)) validate(*req.inquit, *quoted);
    return;
  }
  SideEffect effect = domain_.primary_effect(req.verbs);
  if (!known) return;
  if (effect == SideEffect::Changes && memory_.instance(subject).is_scene) {
    throw Error("scenes do not change");
  }
  if (effect == SideEffect::IsA && req.form == ViForm::SVAdj) {
    if (auto adj = domain_.known_concept_overlay(req.adjective)) {
      if (!overlay_add_floored(domain_.concepts(), memory_.instance(subject).attributes, *adj).empty()) {
        throw IncompatibleAttributeError("'is-a' would wipe out an attribute of " + to_string(subject) +
                                         "; use 'changes' instead");
      }
    }
  }
}

// --- spike activities ----------------------------------------------------------

InstanceId Agent::create_instance(ConceptOverlay attributes, InstanceId scene, bool is_scene,
                                  std::vector<InstanceId> members) {
  if (is_scene && !attributes.contains(domain_.scene_concept())) {
    attributes = overlay_add(domain_.concepts(), attributes, ConceptOverlay{{domain_.scene_concept(), 1.0}});
  }
  Instance inst;
  inst.attributes = std::move(attributes);
  inst.scene = scene;
  inst.created_at = focus_.tick();
  inst.is_scene = is_scene;
  inst.members = std::move(members);
  InstanceId id = memory_.add_instance(std::move(inst));
  focus_.insert(id);
  shadows_.create(id);
  tick_instances_.insert(id);
  trace_instance(id);
  return id;
}

InstanceId Agent::change_instance(InstanceId old, const ConceptOverlay& new_attributes) {
  const Instance& o = memory_.instance(old);
  if (o.is_scene) throw Error("scenes do not change");
  ConceptOverlay attrs = overlay_add(domain_.concepts(), o.attributes, new_attributes);
  InstanceId scene = o.scene;
  std::vector<InstanceId> members = o.members;
  InstanceId fresh = create_instance(std::move(attrs), scene, false, std::move(members));
  memory_.add_link({LinkKind::Identity, old.value, fresh.value, 1.0});
  focus_.set_strength(old, focus_params_.expiry);
  return fresh;
}

ViId Agent::instantiate(const ViRequest& req, InstanceId scene, Origin origin) {
  ResolvedVi r;
  r.form = req.form;
  r.verbs = req.verbs;
  r.scene = scene;
  r.is_question = req.is_question;
  if (req.form == ViForm::Quote) {
    r.subject = resolve(req.subject, scene);
    auto quoted = find_scene(*req.scene);
    if (!quoted) {
      quoted = create_instance(domain_.concept_overlay(req.scene->head().words), InstanceId{}, true);
    }
    ViId inquit = instantiate(*req.inquit, *quoted, origin);
    r.object = inquit;
    r.quote_scene = *quoted;
    return record_vi(std::move(r), origin);
  }
  r.subject = resolve(req.subject, scene);
  if (req.form == ViForm::SVO) r.object = resolve(*req.object, scene);
  if (req.form == ViForm::SVAdj) r.object = domain_.concept_overlay(req.adjective);
  return record_vi(std::move(r), origin);
}

ViId Agent::record_vi(ResolvedVi r, Origin origin) {
  SideEffect effect = domain_.primary_effect(r.verbs);
  const ConceptOverlay* adjective = std::get_if<ConceptOverlay>(&r.object);
  if (effect == SideEffect::IsA && adjective) {
    const auto& attrs = memory_.instance(r.subject).attributes;
    if (!overlay_add_floored(domain_.concepts(), attrs, *adjective).empty()) {
      throw IncompatibleAttributeError("'is-a' would wipe out an attribute of " + to_string(r.subject) +
                                       "; use 'changes' instead");
    }
  }
  if (effect == SideEffect::Changes) {
    if (memory_.instance(r.subject).is_scene) throw Error("scenes do not change");
    r.subject = change_instance(r.subject, adjective ? *adjective : ConceptOverlay{});
  } else if (effect == SideEffect::IsA && adjective) {
    memory_.set_attributes(r.subject,
                           overlay_add(domain_.concepts(), memory_.instance(r.subject).attributes, *adjective));
  }

  VerbInstance vi;
  vi.form = r.form;
  vi.verbs = std::move(r.verbs);
  vi.subject = r.subject;
  vi.object = std::move(r.object);
  vi.scene = r.scene;
  vi.quote_scene = r.quote_scene;
  vi.created_at = focus_.tick();
  vi.is_question = r.is_question;
  ViId id = memory_.add_vi(std::move(vi));

  if (effect == SideEffect::Action) {
    auto closure = memory_.participant_closure(id);
    std::vector<std::pair<ViId, double>> predecessors;
    for (const auto& [v, s] : focus_.vis()) {
      if (focus_.is_relation(v) || domain_.primary_effect(memory_.vi(v).verbs) != SideEffect::Action) continue;
      if (intersects(closure, memory_.participant_closure(v))) predecessors.push_back({v, s});
    }
    for (const auto& [v, s] : predecessors) {
      memory_.add_link({LinkKind::Succession, v.value, id.value, s});
      focus_.set_strength(v, s * focus_params_.push_out);
    }
  }
  if (effect == SideEffect::InSummary) {
    auto closure = memory_.participant_closure(id);
    for (const auto& [v, s] : focus_.vis()) {
      if (focus_.is_relation(v) || domain_.primary_effect(memory_.vi(v).verbs) != SideEffect::Action) continue;
      if (intersects(closure, memory_.participant_closure(v))) {
        memory_.add_link({LinkKind::Summarization, id.value, v.value, s});
      }
    }
  }
  const VerbInstance& v = memory_.vi(id);
  if (effect == SideEffect::Relation && domain_.relation_kind(v.verbs) == kIdentityRelation) {
    if (auto o = v.object_instance()) memory_.add_link({LinkKind::Identity, v.subject.value, o->value, 1.0});
  }

  focus_.insert(id, effect == SideEffect::Relation || effect == SideEffect::SceneRelation);
  for (InstanceId p : memory_.participants(id)) focus_.reinforce(p);
  if (v.form == ViForm::Quote) focus_.reinforce(v.quote_scene);
  shadows_.create(id, {}, shadow_params_.cap_vi);
  apply_links(id);
  tick_vis_.push_back(id);
  trace_vi(id, origin);
  return id;
}

void Agent::apply_links(ViId id) {
  const VerbInstance& v = memory_.vi(id);
  for (ViId earlier : tick_vis_) {
    if (!memory_.has_link(LinkKind::Coincidence, earlier, id) && !memory_.has_link(LinkKind::Coincidence, id, earlier)) {
      memory_.add_link({LinkKind::Coincidence, earlier.value, id.value, 1.0});
    }
  }
  auto closure = memory_.participant_closure(id);
  for (const auto& [r, s] : focus_.vis()) {
    if (r == id || !focus_.is_relation(r)) continue;
    const VerbInstance& rv = memory_.vi(r);
    if (domain_.primary_effect(rv.verbs) != SideEffect::Relation) continue;
    if (domain_.relation_kind(rv.verbs) == kIdentityRelation) continue;
    if (intersects(closure, memory_.participant_closure(r))) {
      memory_.add_link({LinkKind::Context, r.value, id.value, s});
    }
  }
  if (!v.is_question) {
    const auto& vis = memory_.vis();
    for (std::size_t i = vis.size(); i-- > 0;) {
      const VerbInstance& q = vis[i];
      if (q.created_at < v.created_at - answer_window_) break;
      if (q.id == id || !q.is_question) continue;
      if (intersects(closure, memory_.participant_closure(q.id))) {
        memory_.add_link({LinkKind::QuestionAnswer, q.id.value, id.value, 1.0});
      }
    }
  }
}

// --- statements and ticks ------------------------------------------------------

Agent::StatementResult Agent::execute(std::string_view statement) {
  std::string text(statement);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    StatementResult result;
    result.internal = idle(1);
    return result;
  }
  Statement parsed = parse_statement(text, domain_);
  std::vector<Action> actions;
  if (auto* req = std::get_if<ViRequest>(&parsed)) {
    actions.push_back(*req);
  } else {
    Expansion expansion(*this);
    actions = expand_macro(std::get<MacroRequest>(parsed), expansion);
  }
  bool only_idle = std::all_of(actions.begin(), actions.end(),
                               [](const Action& a) { return std::holds_alternative<Idle>(a); });
  if (only_idle) {
    StatementResult result;
    for (const Action& a : actions) {
      auto internal = idle(std::get<Idle>(a).ticks);
      result.internal.insert(result.internal.end(), internal.begin(), internal.end());
    }
    return result;
  }
  if (auto* req = std::get_if<ViRequest>(&parsed)) validate(*req, focus_.current_scene());

  auto pre_instance = shadows_.instance_shadows();
  auto pre_vi = shadows_.vi_shadows();
  std::vector<std::pair<ViTemplate, double>> pre_continuations;
  double positive = 0.0;
  for (const auto& [h, s] : ranked(Purpose::Continuation)) {
    pre_continuations.push_back({h->tmpl, s});
    positive += s;
  }

  StatementResult result;
  std::optional<ViTemplate> matched;
  double matched_support = 0.0;
  {
    Focus::SpikeScope spike(focus_);
    for (const Action& action : actions) {
      if (const auto* req = std::get_if<ViRequest>(&action)) {
        ViId id = instantiate(*req, focus_.current_scene(), Origin::Narrated);
        result.vis.push_back(id);
        if (req->form == ViForm::Quote) {
          last_quote_ = *req;
          // A `$.//` continuation keeps the prefix of the quote it continues.
          if (std::holds_alternative<ViRequest>(parsed)) last_quote_text_ = std::string(text);
        }
      } else if (const auto* scene = std::get_if<CreateScene>(&action)) {
        InstanceId s = create_instance(domain_.concept_overlay(scene->words), InstanceId{}, true);
        if (scene->make_current) focus_.set_current_scene(s);
      } else if (const auto* inst = std::get_if<CreateInstance>(&action)) {
        create_instance(domain_.concept_overlay(inst->words), focus_.current_scene(), false);
      }
    }
    // Expectation: the narrated event was predicted by a continuation HLS.
    if (!result.vis.empty()) {
      ViId principal = result.vis.back();
      if (auto inquit = memory_.vi(principal).inquit()) principal = *inquit;
      for (const auto& [h, s] : ranked(Purpose::Continuation)) {
        if (expected(h->tmpl, memory_.vi(principal))) {
          matched = h->tmpl;
          matched_support = s;
          seed_shadow(principal, *h, Purpose::Continuation);
          break;
        }
      }
    }
  }
  flush_warnings();
  advance_dynamics();
  if (!result.vis.empty()) {
    SurpriseRecord record;
    record.vi = result.vis.back();
    record.tick = focus_.tick();
    record.expectedness = positive > 0.0 ? matched_support / positive : 0.0;
    record.surprise = surprise_since(pre_instance, pre_vi, pre_continuations, matched ? &*matched : nullptr);
    surprises_.push_back(record);
    result.surprise = record;
    nlohmann::ordered_json payload;
    payload["vi"] = to_string(record.vi);
    payload["expectedness"] = record.expectedness;
    payload["surprise"] = record.surprise;
    emit("surprise", std::move(payload));
  }
  result.internal = finish_tick();
  return result;
}

void Agent::run_story(std::string_view text) {
  for (const SourceStatement& st : split_story(text)) {
    try {
      execute(st.text);
    } catch (const StoryError&) {
      throw;
    } catch (const Error& e) {
      throw StoryError(st.line, e.what());
    }
  }
}

void Agent::run_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StoryError(0, "cannot read story file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  run_story(buf.str());
}

std::vector<ViId> Agent::idle(int ticks) {
  std::vector<ViId> internal;
  for (int i = 0; i < ticks; ++i) {
    advance_dynamics();
    auto created = finish_tick();
    internal.insert(internal.end(), created.begin(), created.end());
  }
  return internal;
}

void Agent::advance_dynamics() {
  DecayResult expired = focus_.decay_step(1.0, memory_, focus_params_);
  for (InstanceId id : expired.expired_instances) shadows_.remove(id);
  for (ViId id : expired.expired_vis) shadows_.remove(id);
  ShadowParams params = effective_shadow_params();
  shadows_.diffusion_step(1.0, ShadowContext{domain_, memory_, focus_, params});
  hls_ = compute_hls(hls_context());
}

std::vector<ViId> Agent::finish_tick() {
  std::vector<ViId> internal = infer();
  flush_warnings();
  focus_.advance(1);
  tick_vis_.clear();
  tick_instances_.clear();
  return internal;
}

}  // namespace xapagy
