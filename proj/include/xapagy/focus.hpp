#pragma once

// The focus: weighted working memory of recent instances and VIs. Items that
// leave it are tombstoned and can never return.

#include <map>
#include <set>
#include <vector>

#include "xapagy/ids.hpp"
#include "xapagy/memory.hpp"

namespace xapagy {

struct FocusParams {
  double lambda_instance = 0.2;  // per tick
  double lambda_vi = 0.2;
  double expiry = 0.05;
  double push_out = 0.5;  // multiplier applied to predecessors of an action
};

struct Residency {
  Tick inserted = 0;
  std::optional<Tick> expired;
};

struct DecayResult {
  std::vector<InstanceId> expired_instances;
  std::vector<ViId> expired_vis;
};

class Focus {
 public:
  /// Insertions are only legal inside a spike activity.
  class SpikeScope {
   public:
    explicit SpikeScope(Focus& focus) : focus_(focus), outer_(focus.in_spike_) { focus_.in_spike_ = true; }
    ~SpikeScope() { focus_.in_spike_ = outer_; }
    SpikeScope(const SpikeScope&) = delete;
    SpikeScope& operator=(const SpikeScope&) = delete;

   private:
    Focus& focus_;
    bool outer_;
  };

  /// Strength 1.0. Throws InvariantViolation on a tombstoned id or outside
  /// a spike activity.
  void insert(InstanceId id);
  void insert(ViId id, bool relation);

  /// Raise to 1.0; no-op for items not in the focus.
  void reinforce(InstanceId id);
  void reinforce(ViId id);
  void set_strength(InstanceId id, double s);
  void set_strength(ViId id, double s);

  bool contains(InstanceId id) const { return instances_.count(id) != 0; }
  bool contains(ViId id) const { return vis_.count(id) != 0; }
  bool expired(InstanceId id) const { return expired_instances_.count(id) != 0; }
  bool expired(ViId id) const { return expired_vis_.count(id) != 0; }
  double strength(InstanceId id) const;
  double strength(ViId id) const;
  bool is_relation(ViId id) const { return relation_vis_.count(id) != 0; }

  const std::map<InstanceId, double>& instances() const { return instances_; }
  const std::map<ViId, double>& vis() const { return vis_; }

  InstanceId current_scene() const { return current_scene_; }
  void set_current_scene(InstanceId scene) { current_scene_ = scene; }
  Tick tick() const { return tick_; }
  void advance(Tick dt) { tick_ += dt; }

  /// Exponential decay of instances and non-relation VIs, relation VIs
  /// pinned to their weakest participant, salience accumulation, expiry.
  /// The current scene does not decay.
  DecayResult decay_step(double dt, Memory& memory, const FocusParams& params);

  /// Never-return audit data.
  const std::map<InstanceId, std::vector<Residency>>& instance_residency() const { return instance_residency_; }
  const std::map<ViId, std::vector<Residency>>& vi_residency() const { return vi_residency_; }

  /// Restore raw state (snapshots).
  struct Raw {
    std::map<InstanceId, double> instances;
    std::map<ViId, double> vis;
    std::set<ViId> relation_vis;
    std::set<InstanceId> expired_instances;
    std::set<ViId> expired_vis;
    InstanceId current_scene;
    Tick tick = 0;
    std::map<InstanceId, std::vector<Residency>> instance_residency;
    std::map<ViId, std::vector<Residency>> vi_residency;
  };
  Raw raw() const;
  void restore(Raw raw);

 private:
  void expire(InstanceId id);
  void expire(ViId id);

  std::map<InstanceId, double> instances_;
  std::map<ViId, double> vis_;
  std::set<ViId> relation_vis_;
  std::set<InstanceId> expired_instances_;
  std::set<ViId> expired_vis_;
  InstanceId current_scene_;
  Tick tick_ = 0;
  bool in_spike_ = false;
  std::map<InstanceId, std::vector<Residency>> instance_residency_;
  std::map<ViId, std::vector<Residency>> vi_residency_;
};

}  // namespace xapagy
