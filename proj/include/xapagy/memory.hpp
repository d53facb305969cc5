#pragma once

// The event fabric: instances, verb instances and links, recorded in the
// append-only autobiographical memory.

#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "xapagy/ids.hpp"
#include "xapagy/knowledge.hpp"
#include "xapagy/xapi.hpp"

namespace xapagy {

using Tick = std::int64_t;

struct Instance {
  InstanceId id;
  ConceptOverlay attributes;
  InstanceId scene;  // a scene instance is its own scene
  Tick created_at = 0;
  bool is_scene = false;
  std::vector<InstanceId> members;  // non-empty for groups

  bool is_group() const { return !members.empty(); }
};

/// Object slot of a VI: nothing (S-V), an instance (S-V-O), an adjective
/// overlay (S-V-Adj) or the inquit VI (quote).
using ViObject = std::variant<std::monostate, InstanceId, ConceptOverlay, ViId>;

struct VerbInstance {
  ViId id;
  ViForm form = ViForm::SV;
  VerbOverlay verbs;
  InstanceId subject;
  ViObject object;
  InstanceId scene;        // scene the VI happens in
  InstanceId quote_scene;  // quotes only: scene of the inquit
  Tick created_at = 0;
  bool is_question = false;

  std::optional<InstanceId> object_instance() const {
    if (auto* p = std::get_if<InstanceId>(&object)) return *p;
    return std::nullopt;
  }
  std::optional<ViId> inquit() const {
    if (auto* p = std::get_if<ViId>(&object)) return *p;
    return std::nullopt;
  }
};

enum class LinkKind { Succession, Coincidence, Context, Summarization, QuestionAnswer, Identity };

std::string_view to_string(LinkKind kind);

/// Directed link. Identity links join instances, all other kinds join VIs;
/// `from`/`to` hold the raw id value of the matching table.
struct Link {
  LinkKind kind = LinkKind::Succession;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double weight = 1.0;
};

/// Append-only record of everything the agent ever experienced.
class Memory {
 public:
  InstanceId add_instance(Instance instance);
  ViId add_vi(VerbInstance vi);
  void add_link(Link link);

  /// The one permitted mutation: attribute growth of an instance that is
  /// still in the focus (enforced by the caller).
  void set_attributes(InstanceId id, ConceptOverlay attributes);

  const Instance& instance(InstanceId id) const { return instances_.at(id.value); }
  const VerbInstance& vi(ViId id) const { return vis_.at(id.value); }
  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<VerbInstance>& vis() const { return vis_; }
  const std::vector<Link>& links() const { return links_; }
  std::size_t instance_count() const { return instances_.size(); }
  std::size_t vi_count() const { return vis_.size(); }

  /// Indices into links() of links leaving / entering a VI.
  const std::vector<std::size_t>& out_links(ViId id) const { return vi_out_.at(id.value); }
  const std::vector<std::size_t>& in_links(ViId id) const { return vi_in_.at(id.value); }
  bool has_link(LinkKind kind, ViId from, ViId to) const;

  /// Instances reachable over identity links in either direction, incl. `id`.
  std::set<InstanceId> identity_closure(InstanceId id) const;
  std::set<InstanceId> identity_neighbors(InstanceId id) const;

  /// Instance parts of a VI: subject, object instance, and group members.
  std::vector<InstanceId> participants(ViId id) const;
  /// participants() expanded to their identity closures.
  std::set<InstanceId> participant_closure(ViId id) const;

  double salience(InstanceId id) const { return instance_salience_.at(id.value); }
  double salience(ViId id) const { return vi_salience_.at(id.value); }
  void add_salience(InstanceId id, double amount) { instance_salience_.at(id.value) += amount; }
  void add_salience(ViId id, double amount) { vi_salience_.at(id.value) += amount; }

 private:
  std::vector<Instance> instances_;
  std::vector<VerbInstance> vis_;
  std::vector<Link> links_;
  std::vector<std::vector<std::size_t>> vi_out_;
  std::vector<std::vector<std::size_t>> vi_in_;
  std::vector<std::vector<InstanceId>> identity_adj_;
  std::vector<double> instance_salience_;
  std::vector<double> vi_salience_;
};

}  // namespace xapagy
