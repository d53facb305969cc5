#include "xapagy/memory.hpp"

#include <algorithm>
#include <deque>

#include "xapagy/error.hpp"

namespace xapagy {

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Succession: return "succession";
    case LinkKind::Coincidence: return "coincidence";
    case LinkKind::Context: return "context";
    case LinkKind::Summarization: return "summarization";
    case LinkKind::QuestionAnswer: return "question_answer";
    case LinkKind::Identity: return "identity";
  }
  return "succession";
}

InstanceId Memory::add_instance(Instance instance) {
  InstanceId id(static_cast<std::uint32_t>(instances_.size()));
  instance.id = id;
  if (instance.is_scene) instance.scene = id;
  instances_.push_back(std::move(instance));
  identity_adj_.emplace_back();
  instance_salience_.push_back(0.0);
  return id;
}

ViId Memory::add_vi(VerbInstance vi) {
  ViId id(static_cast<std::uint32_t>(vis_.size()));
  vi.id = id;
  vis_.push_back(std::move(vi));
  vi_out_.emplace_back();
  vi_in_.emplace_back();
  vi_salience_.push_back(0.0);
  return id;
}

void Memory::add_link(Link link) {
  std::size_t index = links_.size();
  if (link.kind == LinkKind::Identity) {
    if (link.from >= instances_.size() || link.to >= instances_.size()) {
      throw InvariantViolation("identity link between unknown instances");
    }
    identity_adj_[link.from].push_back(InstanceId(link.to));
    identity_adj_[link.to].push_back(InstanceId(link.from));
  } else {
    if (link.from >= vis_.size() || link.to >= vis_.size()) {
      throw InvariantViolation("link between unknown VIs");
    }
    vi_out_[link.from].push_back(index);
    vi_in_[link.to].push_back(index);
  }
  links_.push_back(link);
}

void Memory::set_attributes(InstanceId id, ConceptOverlay attributes) {
  instances_.at(id.value).attributes = std::move(attributes);
}

bool Memory::has_link(LinkKind kind, ViId from, ViId to) const {
  for (std::size_t i : vi_out_.at(from.value)) {
    if (links_[i].kind == kind && links_[i].to == to.value) return true;
  }
  return false;
}

std::set<InstanceId> Memory::identity_neighbors(InstanceId id) const {
  const auto& adj = identity_adj_.at(id.value);
  return {adj.begin(), adj.end()};
}

std::set<InstanceId> Memory::identity_closure(InstanceId id) const {
  std::set<InstanceId> seen{id};
  std::deque<InstanceId> queue{id};
  while (!queue.empty()) {
    InstanceId cur = queue.front();
    queue.pop_front();
    for (InstanceId next : identity_adj_.at(cur.value)) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

std::vector<InstanceId> Memory::participants(ViId id) const {
  const VerbInstance& v = vi(id);
  std::vector<InstanceId> out;
  auto add = [&](InstanceId p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    for (InstanceId m : instance(p).members) {
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
  };
  add(v.subject);
  if (auto o = v.object_instance()) add(*o);
  return out;
}

std::set<InstanceId> Memory::participant_closure(ViId id) const {
  std::set<InstanceId> out;
  for (InstanceId p : participants(id)) {
    auto c = identity_closure(p);
    out.insert(c.begin(), c.end());
  }
  return out;
}

}  // namespace xapagy
