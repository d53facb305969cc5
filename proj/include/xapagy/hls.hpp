#pragma once

// Headless shadows: shadow-VI relations (SVRs) interpreted into focus-level
// VI templates (SVRIs) and aggregated into scored HLSs.

#include <array>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "xapagy/config.hpp"
#include "xapagy/focus.hpp"
#include "xapagy/memory.hpp"
#include "xapagy/shadow.hpp"

namespace xapagy {

enum class SvrType {
  InShadow,
  Predecessor,
  Successor,
  Summary,
  Elaboration,
  Answer,
  Question,
  Context,
  ContextImplication,
};

inline constexpr std::array<SvrType, 9> kSvrTypes = {
    SvrType::InShadow, SvrType::Predecessor, SvrType::Successor,
    SvrType::Summary,  SvrType::Elaboration, SvrType::Answer,
    SvrType::Question, SvrType::Context,     SvrType::ContextImplication};

/// Involution pairing the eight directed types; IN_SHADOW maps to itself.
SvrType opposite(SvrType type);
std::string_view to_string(SvrType type);
std::optional<SvrType> parse_svr_type(std::string_view text);

enum class Purpose { Continuation, MissingAction, MissingRelation, Summarization };

inline constexpr std::array<Purpose, 4> kPurposes = {Purpose::Continuation, Purpose::MissingAction,
                                                     Purpose::MissingRelation, Purpose::Summarization};

std::string_view to_string(Purpose purpose);
/// Accepts `continuation` and `CONTINUATION` spellings.
std::optional<Purpose> parse_purpose(std::string_view text);

/// Type of the relation seen from the shadow root towards the source, for a
/// link leaving (`outgoing`) or entering the root. Nullopt for kinds that
/// carry no evidence.
std::optional<SvrType> svr_type_of(LinkKind kind, bool outgoing);

struct Svr {
  ViId focus_vi;
  ViId vi_root;
  ViId vi_source;
  SvrType type = SvrType::InShadow;
  double energy = 0.0;

  friend bool operator==(const Svr&, const Svr&) = default;
};

/// One part of a VI template: a focus instance, an instance to be created
/// (NEW, carrying the attributes of the memory instance it came from), or a
/// group of such parts.
struct TemplatePart {
  enum class Kind { Focus, New, Group };
  Kind kind = Kind::Focus;
  InstanceId instance;          // Focus: the instance; New: its memory origin
  ConceptOverlay attributes;    // New only
  std::vector<TemplatePart> members;  // Group only

  static TemplatePart focus(InstanceId id) { return {Kind::Focus, id, {}, {}}; }
  static TemplatePart fresh(InstanceId origin, ConceptOverlay attributes) {
    return {Kind::New, origin, std::move(attributes), {}};
  }

  friend bool operator==(const TemplatePart&, const TemplatePart&) = default;
};

struct ViTemplate {
  ViForm form = ViForm::SV;
  VerbOverlay verbs;
  TemplatePart subject;
  std::optional<TemplatePart> object;  // SVO
  ConceptOverlay adjective;            // SVAdj
  InstanceId scene;

  friend bool operator==(const ViTemplate&, const ViTemplate&) = default;
};

struct Svri {
  Svr svr;
  ViTemplate tmpl;
  double weight = 0.0;
};

struct Supporter {
  ViId source;
  SvrType type = SvrType::InShadow;
  double weight = 0.0;

  friend bool operator==(const Supporter&, const Supporter&) = default;
};

struct Hls {
  ViTemplate tmpl;
  std::map<SvrType, double> evidence;
  std::vector<Supporter> supporters;
  bool in_focus = false;  // the template already happened

  double evidence_of(SvrType type) const {
    auto it = evidence.find(type);
    return it == evidence.end() ? 0.0 : it->second;
  }
};

/// Purpose x type evidence weights.
class SupportMatrix {
 public:
  SupportMatrix();  // defaults
  static SupportMatrix from_config(const Config& config);

  double weight(Purpose purpose, SvrType type) const {
    return w_[static_cast<std::size_t>(purpose)][static_cast<std::size_t>(type)];
  }
  void set(Purpose purpose, SvrType type, double value) {
    w_[static_cast<std::size_t>(purpose)][static_cast<std::size_t>(type)] = value;
  }

 private:
  struct Zero {};
  explicit SupportMatrix(Zero) {}
  std::array<std::array<double, 9>, 4> w_{};
};

double support(const Hls& hls, Purpose purpose, const SupportMatrix& matrix);

struct HlsParams {
  double epsilon_svr = 0.001;
  double theta_compat = 0.8;
  double new_floor = 0.1;
};

struct HlsContext {
  const Domain& domain;
  const Memory& memory;
  const Focus& focus;
  const Shadows& shadows;
  HlsParams params;
};

/// All SVRs of the current state, ordered by focus VI, root, then link order.
/// Energy = focus strength of the focus VI x root's shadow energy x link weight.
std::vector<Svr> collect_svrs(const HlsContext& ctx);

/// Templates of one SVR with their interpretation weights. SVRIs below
/// epsilon_svr are dropped; quote sources yield nothing.
std::vector<Svri> interpret(const Svr& svr, const HlsContext& ctx);

/// Greedy descending-weight clustering into HLSs.
std::vector<Hls> aggregate(std::vector<Svri> svris, const HlsContext& ctx);

/// collect -> interpret -> aggregate.
std::vector<Hls> compute_hls(const HlsContext& ctx);

bool parts_compatible(const TemplatePart& a, const TemplatePart& b, const SymbolTable& concepts,
                      double theta);
bool templates_compatible(const ViTemplate& a, const ViTemplate& b, const Domain& domain,
                          double theta);
/// The template describes this recorded VI (same form, same focus parts,
/// verb/adjective match >= theta).
bool template_matches_vi(const ViTemplate& tmpl, const VerbInstance& vi, const Memory& memory,
                         const Domain& domain, double theta);

/// Verb-kind filter: missing actions need action verbs, missing relations
/// relation verbs, summarizations in-summary verbs.
bool serves(const ViTemplate& tmpl, Purpose purpose, const Domain& domain);

}  // namespace xapagy
