#pragma once

// Shadows: for every focus item, a weighted body of memory items aligned
// with it, maintained by diffusion.

#include <map>
#include <optional>
#include <vector>

#include "xapagy/focus.hpp"
#include "xapagy/ids.hpp"
#include "xapagy/knowledge.hpp"
#include "xapagy/memory.hpp"

namespace xapagy {

/// Rate constants of the diffusion rules. Every rule rate scales linearly
/// with dt; setting one to zero disables that rule.
struct ShadowParams {
  double mu = 0.1;                      // (a) decay
  double rate_head = 0.05;              // (b) memory instance matches the head
  double rate_body = 0.05;              // (c) memory instance matches a body item
  double beta = 0.5;                    //     body-match attenuation
  double rate_verb = 0.05;              // (d) memory VI verb matches the head VI
  double gamma = 0.2;                   //     share fed back into the part shadows
  double rate_identity = 0.05;          // (e) identity with head or body items
  double rate_link = 0.05;              // (f) link consistency
  double rate_sharpen_instance = 0.1;   // (g) same-scene instance sharpening
  double rate_sharpen_vi = 0.1;         // (h) same-scene VI sharpening
  double cap_instance = 1.0;
  double cap_vi = 1.0;
  double epsilon = 0.001;               // body entries below this are dropped
  double salience_floor = 0.0;          // memory items at or below are not scanned
};

template <class Id>
using Body = std::map<Id, double>;

/// One interpretation of a memory instance as a focus instance; `head`
/// empty means "an instance not yet in the focus".
struct ReverseCandidate {
  std::optional<InstanceId> head;
  double share = 0.0;

  friend bool operator==(const ReverseCandidate&, const ReverseCandidate&) = default;
};

struct ShadowContext {
  const Domain& domain;
  const Memory& memory;
  const Focus& focus;
  const ShadowParams& params;
};

class Shadows {
 public:
  /// Empty shadow for a newly inserted focus item. Throws on a duplicate.
  void create(InstanceId head);
  /// Seeded shadow; a seed heavier than the cap is scaled down to it.
  void create(ViId head, const Body<ViId>& seed, double cap);
  /// Replace the body of an existing VI shadow by a (capped) seed.
  void reseed(ViId head, const Body<ViId>& seed, double cap);
  void remove(InstanceId head);
  void remove(ViId head);

  bool has(InstanceId head) const { return instance_.count(head) != 0; }
  bool has(ViId head) const { return vi_.count(head) != 0; }
  /// 0 when absent from the body; throws Error for an unknown head.
  double energy(InstanceId head, InstanceId item) const;
  double energy(ViId head, ViId item) const;
  const Body<InstanceId>& body(InstanceId head) const;
  const Body<ViId>& body(ViId head) const;

  const std::map<InstanceId, Body<InstanceId>>& instance_shadows() const { return instance_; }
  const std::map<ViId, Body<ViId>>& vi_shadows() const { return vi_; }

  /// Heads whose shadow contains `item`, with the item's share of that
  /// body, plus the NEW interpretation with weight max(new_floor, 1 - best).
  std::vector<ReverseCandidate> reverse_shadow(InstanceId item, double new_floor) const;

  /// One Jacobi step of all rules against the pre-step snapshot, then cap
  /// renormalization and epsilon pruning.
  void diffusion_step(double dt, const ShadowContext& ctx);

  void restore(std::map<InstanceId, Body<InstanceId>> instance, std::map<ViId, Body<ViId>> vi);

 private:
  double memory_match(const ShadowContext& ctx, InstanceId a, InstanceId b);
  void sync_pool(const ShadowContext& ctx);

  std::map<InstanceId, Body<InstanceId>> instance_;
  std::map<ViId, Body<ViId>> vi_;

  // Derived, recomputable: attribute matches between memory instances
  // (their attributes are frozen once they leave the focus).
  std::map<InstanceId, std::size_t> pool_index_;
  std::vector<InstanceId> pool_;
  std::vector<std::vector<double>> pool_match_;  // lower triangle
};

}  // namespace xapagy
