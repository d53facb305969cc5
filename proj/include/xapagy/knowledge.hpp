#pragma once

// Domain knowledge: concepts, verbs, overlays and the word dictionary.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xapagy {

using SymbolId = std::uint32_t;

/// Lower bound for any stored overlay energy. Impacts dim members down to
/// this value but never remove them.
inline constexpr double kEnergyFloor = 0.01;

struct ConceptTag {};
struct VerbTag {};

/// Weighted activation of a set of concepts (or verbs). Energies live in
/// (0, 1]; members are kept sorted by symbol id.
template <class Tag>
class Overlay {
 public:
  using Map = std::map<SymbolId, double>;
  using const_iterator = Map::const_iterator;

  Overlay() = default;
  Overlay(std::initializer_list<std::pair<const SymbolId, double>> init) : energies_(init) {}

  double energy(SymbolId id) const {
    auto it = energies_.find(id);
    return it == energies_.end() ? 0.0 : it->second;
  }
  bool contains(SymbolId id) const { return energies_.count(id) != 0; }
  void set(SymbolId id, double e) { energies_[id] = e; }

  double mass() const {
    double m = 0.0;
    for (const auto& [id, e] : energies_) m += e;
    return m;
  }

  bool empty() const { return energies_.empty(); }
  std::size_t size() const { return energies_.size(); }
  const_iterator begin() const { return energies_.begin(); }
  const_iterator end() const { return energies_.end(); }
  const Map& energies() const { return energies_; }

  friend bool operator==(const Overlay&, const Overlay&) = default;
  friend bool operator<(const Overlay& a, const Overlay& b) { return a.energies_ < b.energies_; }

 private:
  Map energies_;
};

using ConceptOverlay = Overlay<ConceptTag>;
using VerbOverlay = Overlay<VerbTag>;

/// Concepts or verbs with their area, pairwise overlap and impact.
class SymbolTable {
 public:
  SymbolId add(std::string name, double area = 1.0);
  std::optional<SymbolId> find(std::string_view name) const;
  bool contains(SymbolId id) const { return id < names_.size(); }
  std::size_t size() const { return names_.size(); }

  const std::string& name(SymbolId id) const { return names_.at(id); }
  double area(SymbolId id) const { return areas_.at(id); }

  /// overlap(a, a) == area(a); unset pairs overlap by 0.
  double overlap(SymbolId a, SymbolId b) const;
  double impact(SymbolId from, SymbolId to) const;

  /// Return false when the pair was already set.
  bool set_overlap(SymbolId a, SymbolId b, double value);
  bool set_impact(SymbolId from, SymbolId to, double value);

  const std::map<std::pair<SymbolId, SymbolId>, double>& overlaps() const { return overlaps_; }
  const std::map<std::pair<SymbolId, SymbolId>, double>& impacts() const { return impacts_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> areas_;
  std::unordered_map<std::string, SymbolId> index_;
  std::map<std::pair<SymbolId, SymbolId>, double> overlaps_;  // keyed (min, max)
  std::map<std::pair<SymbolId, SymbolId>, double> impacts_;   // keyed (from, to)
};

/// Adds `addition` (scaled) to `target`. Added members saturate at 1; members
/// already present are rescaled by the impacts of the added ones and floored
/// at kEnergyFloor. Throws Error on ids unknown to `table`.
template <class Tag>
Overlay<Tag> overlay_add(const SymbolTable& table, const Overlay<Tag>& target,
                         const Overlay<Tag>& addition, double scale = 1.0);

/// Members of `target` whose energy would be clamped at the floor by the add.
template <class Tag>
std::vector<SymbolId> overlay_add_floored(const SymbolTable& table, const Overlay<Tag>& target,
                                          const Overlay<Tag>& addition, double scale = 1.0);

/// Symmetric similarity in [0, 1]: area-normalized overlap mass divided by the
/// geometric mean of the two overlay masses.
template <class Tag>
double overlay_match(const SymbolTable& table, const Overlay<Tag>& a, const Overlay<Tag>& b);

enum class SideEffect {
  None,
  Action,         // succession links, pushes predecessors out
  IsA,            // adds attributes to the subject
  Changes,        // replaces the subject with a new identity-linked instance
  Relation,       // persistent relation VI of a named kind
  SceneRelation,  // relation between two scenes
  Quote,          // carries an inquit VI in another scene
  InSummary,      // marks a summary VI
};

std::string_view to_string(SideEffect effect);

struct VerbInfo {
  SideEffect effect = SideEffect::None;
  std::string relation_kind;  // only for SideEffect::Relation
};

enum class WordKind { Concept, Verb };

struct Word {
  WordKind kind = WordKind::Concept;
  std::map<SymbolId, double> members;
};

inline constexpr std::string_view kIdentityRelation = "identity";
inline constexpr std::string_view kOwnershipRelation = "ownership";

/// The agent's domain knowledge. Loaded from a declarative text file; the
/// only mutation after load is minting of proper-name concepts.
class Domain {
 public:
  Domain();

  static Domain parse(std::string_view text);
  static Domain load(const std::filesystem::path& path);

  const SymbolTable& concepts() const { return concepts_; }
  const SymbolTable& verbs() const { return verbs_; }
  const VerbInfo& verb_info(SymbolId verb) const { return verb_info_.at(verb); }

  /// Highest-priority side effect among the verbs of an overlay.
  SideEffect primary_effect(const VerbOverlay& verbs) const;
  /// Relation kind of the first relation verb in the overlay, empty if none.
  std::string relation_kind(const VerbOverlay& verbs) const;
  std::optional<SymbolId> relation_verb(std::string_view kind) const;
  bool conflicting(SymbolId verb_a, SymbolId verb_b) const;
  const std::set<std::pair<SymbolId, SymbolId>>& conflicts() const { return conflicts_; }

  /// True for dictionary words and for quoted proper names.
  bool has_word(std::string_view word) const;
  const Word* find_word(std::string_view word) const;
  const std::map<std::string, Word, std::less<>>& words() const { return words_; }

  /// Dictionary lookup of a concept word. Quoted names mint their concept.
  ConceptOverlay lookup_concept(std::string_view word);
  VerbOverlay lookup_verb(std::string_view word) const;

  /// Concept overlay for a list of concept words merged with overlay_add.
  ConceptOverlay concept_overlay(const std::vector<std::string>& words);
  /// As concept_overlay but never mints: nullopt if a name is not known yet.
  std::optional<ConceptOverlay> known_concept_overlay(const std::vector<std::string>& words) const;
  VerbOverlay verb_overlay(const std::vector<std::string>& words) const;

  /// Mint (or fetch) the concept of a proper name such as "LRRH".
  SymbolId proper_name(std::string_view name);
  std::optional<std::string> proper_name_of(SymbolId id) const;
  const std::map<SymbolId, std::string>& proper_names() const { return proper_names_; }

  SymbolId scene_concept() const { return scene_concept_; }
  SymbolId group_concept() const { return group_concept_; }

  static bool is_quoted(std::string_view word);

  /// Text the domain was parsed from; snapshots re-parse it.
  const std::string& source() const { return source_; }

 private:
  friend class DomainBuilder;
  struct Empty {};
  explicit Domain(Empty) {}

  std::string source_;

  SymbolTable concepts_;
  SymbolTable verbs_;
  std::vector<VerbInfo> verb_info_;
  std::map<std::string, Word, std::less<>> words_;
  std::set<std::pair<SymbolId, SymbolId>> conflicts_;
  std::map<SymbolId, std::string> proper_names_;
  SymbolId scene_concept_ = 0;
  SymbolId group_concept_ = 0;
};

}  // namespace xapagy
