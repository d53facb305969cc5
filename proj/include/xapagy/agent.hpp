#pragma once

// The agent: domain knowledge, memory, focus and shadows, driven one tick at
// a time by narrated statements, idle time and mood-gated internal activity.

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xapagy/config.hpp"
#include "xapagy/error.hpp"
#include "xapagy/focus.hpp"
#include "xapagy/hls.hpp"
#include "xapagy/knowledge.hpp"
#include "xapagy/memory.hpp"
#include "xapagy/shadow.hpp"
#include "xapagy/xapi.hpp"

namespace xapagy {

enum class Origin { Narrated, Inferred, Recalled };

std::string_view to_string(Origin origin);

/// Parameters gating internal instantiation.
struct Mood {
  std::string preset = "story_following";
  std::array<double, 4> budget{};     // per purpose, per tick
  std::array<double, 4> threshold{};  // per purpose
  double relaxation = 1.0;
  double adherence = 1.0;
  int top_k = 3;

  double budget_of(Purpose p) const { return budget[static_cast<std::size_t>(p)]; }
  double threshold_of(Purpose p) const { return threshold[static_cast<std::size_t>(p)]; }

  /// story_following, recall or confabulation. Throws ConfigError otherwise.
  static Mood preset_named(std::string_view name);
  /// Preset named by `mood`, then explicitly set `mood.*` keys on top.
  static Mood from_config(const Config& config);
};

struct SurpriseRecord {
  ViId vi;
  Tick tick = 0;
  double expectedness = 0.0;
  double surprise = 0.0;
};

/// A statement failed; `line` is 0 when the text did not come from a file.
class StoryError : public Error {
 public:
  StoryError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A fully resolved VI about to be recorded.
struct ResolvedVi {
  ViForm form = ViForm::SV;
  VerbOverlay verbs;
  InstanceId subject;
  ViObject object;
  InstanceId scene;
  InstanceId quote_scene;
  bool is_question = false;
};

class Agent {
 public:
  explicit Agent(Domain domain, Config config = Config());

  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;
  Agent(Agent&&) noexcept;
  Agent& operator=(Agent&&) noexcept;
  ~Agent();

  // --- input -------------------------------------------------------------------

  struct StatementResult {
    std::vector<ViId> vis;        // narrated VIs, in creation order
    std::vector<ViId> internal;   // VIs created by mood-gated inference this tick
    std::optional<SurpriseRecord> surprise;
  };

  /// Execute one statement as one tick (an empty statement is an idle tick,
  /// `$Wait n` n idle ticks). Errors leave no partial VIs behind.
  StatementResult execute(std::string_view statement);
  /// Run a whole story; errors become StoryError with the line number.
  void run_story(std::string_view text);
  void run_file(const std::filesystem::path& path);
  /// Idle ticks: decay, diffusion, HLS recompute and mood-gated inference.
  std::vector<ViId> idle(int ticks = 1);

  /// One recall step; nullopt when no continuation clears the threshold.
  std::optional<ViId> recall_step();
  std::vector<ViId> recall(int steps);

  // --- mood and configuration ---------------------------------------------------

  void set_mood(std::string_view preset);
  /// `mood.*` key override, e.g. ("mood.adherence", "0").
  void set_mood_value(std::string_view key, std::string_view value);
  const Mood& mood() const { return mood_; }
  const Config& config() const { return config_; }

  // --- state -------------------------------------------------------------------

  const Domain& domain() const { return domain_; }
  const Memory& memory() const { return memory_; }
  const Focus& focus() const { return focus_; }
  const Shadows& shadows() const { return shadows_; }
  const std::vector<Hls>& hls() const { return hls_; }
  const std::vector<SurpriseRecord>& surprises() const { return surprises_; }
  Tick tick() const { return focus_.tick(); }
  HlsContext hls_context() const;
  const SupportMatrix& support_matrix() const { return support_; }

  /// Support for a purpose, including missing-relation inhibition.
  double support_of(const Hls& hls, Purpose purpose) const;
  /// HLSs usable for a purpose (not yet in the focus, right verb kind),
  /// with positive support, by descending support then creation order.
  std::vector<std::pair<const Hls*, double>> ranked(Purpose purpose) const;

  /// Resolve a reference in `scene` without creating anything; nullopt when
  /// the reference would create or does not resolve.
  std::optional<InstanceId> probe(const ReferenceExpr& ref, InstanceId scene) const;

  // --- rendering and dumps ------------------------------------------------------

  std::string render(ViId vi) const;
  std::string render(const ViTemplate& tmpl) const;
  /// Shortest `the ...` phrase that resolves to the instance in its scene.
  std::string reference_text(InstanceId id) const;

  std::string dump_focus() const;
  std::string dump_shadows(std::optional<std::string> head = std::nullopt) const;
  std::string dump_hls(Purpose purpose = Purpose::Continuation) const;
  std::string dump_memory() const;

  // --- trace and snapshots ------------------------------------------------------

  /// Receives one JSON line per record.
  void set_trace(std::function<void(const std::string&)> sink);
  /// Emit the effective configuration as a dump record.
  void trace_config();

  nlohmann::ordered_json snapshot() const;
  static Agent restore(const nlohmann::json& snapshot);
  void save(const std::filesystem::path& path) const;
  static Agent load(const std::filesystem::path& path);

 private:
  class Expansion;
  friend class Expansion;

  void configure();
  ShadowParams effective_shadow_params() const;

  // resolution
  InstanceId resolve(const ReferenceExpr& ref, InstanceId scene);
  InstanceId resolve_chain(const ChainRef& chain, InstanceId scene);
  /// Definite part of a chain without side effects; sets `creates` and
  /// returns nullopt for `a ...`; throws ResolutionError when nothing matches.
  std::optional<InstanceId> lookup_chain(const ChainRef& chain, InstanceId scene, bool& creates) const;
  std::optional<InstanceId> resolve_term(const Term& term, const std::vector<InstanceId>& candidates,
                                         bool warn) const;
  std::vector<InstanceId> candidates_in(InstanceId scene) const;
  std::vector<InstanceId> related(InstanceId base, const std::string& relation) const;
  std::optional<InstanceId> find_group(std::vector<InstanceId> members, InstanceId scene) const;
  InstanceId find_or_create_group(std::vector<InstanceId> members, InstanceId scene);
  std::optional<InstanceId> find_scene(const ReferenceExpr& ref) const;
  void validate(const ViRequest& req, InstanceId scene) const;

  // spike activities
  InstanceId create_instance(ConceptOverlay attributes, InstanceId scene, bool is_scene,
                             std::vector<InstanceId> members = {});
  InstanceId change_instance(InstanceId old, const ConceptOverlay& new_attributes);
  ViId instantiate(const ViRequest& req, InstanceId scene, Origin origin);
  ViId record_vi(ResolvedVi vi, Origin origin);
  void apply_links(ViId id);
  ViId instantiate_hls(const Hls& hls, Purpose purpose, Origin origin);
  void seed_shadow(ViId id, const Hls& hls, Purpose purpose);

  // tick phases
  void advance_dynamics();
  std::vector<ViId> finish_tick();
  std::vector<ViId> infer();
  std::vector<ViId> summarize_builtin(double& budget);
  bool expected(const ViTemplate& tmpl, const VerbInstance& vi) const;
  double surprise_since(const std::map<InstanceId, Body<InstanceId>>& pre_instance,
                        const std::map<ViId, Body<ViId>>& pre_vi,
                        const std::vector<std::pair<ViTemplate, double>>& pre_continuations,
                        const ViTemplate* matched) const;

  // rendering helpers
  std::string verb_text(const VerbOverlay& verbs) const;
  std::string concept_text(const ConceptOverlay& attrs) const;
  std::string part_text(const TemplatePart& part) const;
  std::string instance_phrase(InstanceId id, bool indefinite, InstanceId scene) const;
  std::string reference_in(InstanceId id, InstanceId scene) const;

  // trace
  void emit(std::string_view kind, nlohmann::ordered_json payload);
  void trace_vi(ViId id, Origin origin);
  void trace_instance(InstanceId id);
  void warn(const std::string& message);
  void flush_warnings();

  Domain domain_;
  Config config_;
  FocusParams focus_params_;
  ShadowParams shadow_params_;
  HlsParams hls_params_;
  SupportMatrix support_;
  int answer_window_ = 3;
  int summary_window_ = 3;
  Mood mood_;

  Memory memory_;
  Focus focus_;
  Shadows shadows_;
  std::vector<Hls> hls_;
  std::vector<SurpriseRecord> surprises_;
  std::vector<ViId> tick_vis_;           // VIs created during the current tick
  std::set<InstanceId> tick_instances_;  // instances created during the current tick
  std::optional<ViRequest> last_quote_;       // prefix for `$.//`
  std::optional<std::string> last_quote_text_;  // its statement, for snapshots
  std::mt19937_64 rng_;

  std::function<void(const std::string&)> sink_;
  mutable std::vector<std::string> pending_warnings_;
  std::uint64_t seq_ = 0;
};

/// Uniform double in [0, 1) from 53 random bits; stable across platforms.
double uniform01(std::mt19937_64& rng);

}  // namespace xapagy
