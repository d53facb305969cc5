#include "xapagy/focus.hpp"

#include <algorithm>
#include <cmath>

#include "xapagy/error.hpp"

namespace xapagy {

void Focus::insert(InstanceId id) {
  if (!in_spike_) throw InvariantViolation("focus insertion outside a spike activity: " + to_string(id));
  if (expired_instances_.count(id)) throw InvariantViolation("expired instance re-entered focus: " + to_string(id));
  if (instances_.count(id)) throw InvariantViolation("instance inserted twice: " + to_string(id));
  instances_[id] = 1.0;
  instance_residency_[id].push_back({tick_, std::nullopt});
}

void Focus::insert(ViId id, bool relation) {
  if (!in_spike_) throw InvariantViolation("focus insertion outside a spike activity: " + to_string(id));
  if (expired_vis_.count(id)) throw InvariantViolation("expired VI re-entered focus: " + to_string(id));
  if (vis_.count(id)) throw InvariantViolation("VI inserted twice: " + to_string(id));
  vis_[id] = 1.0;
  if (relation) relation_vis_.insert(id);
  vi_residency_[id].push_back({tick_, std::nullopt});
}

void Focus::reinforce(InstanceId id) {
  if (auto it = instances_.find(id); it != instances_.end()) it->second = 1.0;
}

void Focus::reinforce(ViId id) {
  if (auto it = vis_.find(id); it != vis_.end()) it->second = 1.0;
}

void Focus::set_strength(InstanceId id, double s) {
  if (auto it = instances_.find(id); it != instances_.end()) it->second = s;
}

void Focus::set_strength(ViId id, double s) {
  if (auto it = vis_.find(id); it != vis_.end()) it->second = s;
}

double Focus::strength(InstanceId id) const {
  auto it = instances_.find(id);
  return it == instances_.end() ? 0.0 : it->second;
}

double Focus::strength(ViId id) const {
  auto it = vis_.find(id);
  return it == vis_.end() ? 0.0 : it->second;
}

void Focus::expire(InstanceId id) {
  instances_.erase(id);
  expired_instances_.insert(id);
  instance_residency_[id].back().expired = tick_;
}

void Focus::expire(ViId id) {
  vis_.erase(id);
  relation_vis_.erase(id);
  expired_vis_.insert(id);
  vi_residency_[id].back().expired = tick_;
}

DecayResult Focus::decay_step(double dt, Memory& memory, const FocusParams& params) {
  DecayResult result;
  if (dt <= 0.0) return result;

  for (const auto& [id, s] : instances_) memory.add_salience(id, s * dt);
  for (const auto& [id, s] : vis_) memory.add_salience(id, s * dt);

  double instance_factor = std::exp(-params.lambda_instance * dt);
  double vi_factor = std::exp(-params.lambda_vi * dt);
  for (auto& [id, s] : instances_) {
    if (id != current_scene_) s *= instance_factor;
  }
  for (auto& [id, s] : vis_) {
    if (!relation_vis_.count(id)) s *= vi_factor;
  }

  for (const auto& [id, s] : instances_) {
    if (s < params.expiry && id != current_scene_) result.expired_instances.push_back(id);
  }
  for (InstanceId id : result.expired_instances) expire(id);

  // Relation VIs live exactly as long as all their participants.
  for (auto& [id, s] : vis_) {
    if (!relation_vis_.count(id)) continue;
    double weakest = 1.0;
    for (InstanceId p : memory.participants(id)) weakest = std::min(weakest, strength(p));
    s = std::min(s, weakest);
  }
  for (const auto& [id, s] : vis_) {
    if (s < params.expiry) result.expired_vis.push_back(id);
  }
  for (ViId id : result.expired_vis) expire(id);
  return result;
}

Focus::Raw Focus::raw() const {
  return Raw{instances_,         vis_,  relation_vis_,        expired_instances_, expired_vis_,
             current_scene_,     tick_, instance_residency_, vi_residency_};
}

void Focus::restore(Raw raw) {
  instances_ = std::move(raw.instances);
  vis_ = std::move(raw.vis);
  relation_vis_ = std::move(raw.relation_vis);
  expired_instances_ = std::move(raw.expired_instances);
  expired_vis_ = std::move(raw.expired_vis);
  current_scene_ = raw.current_scene;
  tick_ = raw.tick;
  instance_residency_ = std::move(raw.instance_residency);
  vi_residency_ = std::move(raw.vi_residency);
}

}  // namespace xapagy
