#include "xapagy/shadow.hpp"

#include <algorithm>
#include <cmath>

#include "xapagy/error.hpp"

namespace xapagy {

void Shadows::create(InstanceId head) {
  if (!instance_.emplace(head, Body<InstanceId>{}).second) {
    throw Error("duplicate shadow for " + to_string(head));
  }
}

void Shadows::create(ViId head, const Body<ViId>& seed, double cap) {
  Body<ViId> body;
  double mass = 0.0;
  for (const auto& [id, e] : seed) {
    if (e > 0.0) {
      body[id] = e;
      mass += e;
    }
  }
  if (mass > cap) {
    for (auto& [id, e] : body) e *= cap / mass;
  }
  if (!vi_.emplace(head, std::move(body)).second) {
    throw Error("duplicate shadow for " + to_string(head));
  }
}

void Shadows::reseed(ViId head, const Body<ViId>& seed, double cap) {
  if (!vi_.count(head)) throw Error("no shadow for " + to_string(head));
  vi_.erase(head);
  create(head, seed, cap);
}

void Shadows::remove(InstanceId head) { instance_.erase(head); }
void Shadows::remove(ViId head) { vi_.erase(head); }

const Body<InstanceId>& Shadows::body(InstanceId head) const {
  auto it = instance_.find(head);
  if (it == instance_.end()) throw Error("no shadow for " + to_string(head));
  return it->second;
}

const Body<ViId>& Shadows::body(ViId head) const {
  auto it = vi_.find(head);
  if (it == vi_.end()) throw Error("no shadow for " + to_string(head));
  return it->second;
}

double Shadows::energy(InstanceId head, InstanceId item) const {
  const auto& b = body(head);
  auto it = b.find(item);
  return it == b.end() ? 0.0 : it->second;
}

double Shadows::energy(ViId head, ViId item) const {
  const auto& b = body(head);
  auto it = b.find(item);
  return it == b.end() ? 0.0 : it->second;
}

std::vector<ReverseCandidate> Shadows::reverse_shadow(InstanceId item, double new_floor) const {
  std::vector<ReverseCandidate> out;
  double best = 0.0;
  for (const auto& [head, body] : instance_) {
    auto it = body.find(item);
    if (it == body.end()) continue;
    double total = 0.0;
    for (const auto& [id, e] : body) total += e;
    double share = it->second / total;
    out.push_back({head, share});
    best = std::max(best, share);
  }
  out.push_back({std::nullopt, std::max(new_floor, 1.0 - best)});
  return out;
}

void Shadows::restore(std::map<InstanceId, Body<InstanceId>> instance,
                      std::map<ViId, Body<ViId>> vi) {
  instance_ = std::move(instance);
  vi_ = std::move(vi);
}

// --- diffusion -----------------------------------------------------------------

void Shadows::sync_pool(const ShadowContext& ctx) {
  const Memory& memory = ctx.memory;
  for (std::uint32_t raw = 0; raw < memory.instance_count(); ++raw) {
    InstanceId id(raw);
    if (pool_index_.count(id) || !ctx.focus.expired(id)) continue;
    std::size_t k = pool_.size();
    pool_index_[id] = k;
    pool_.push_back(id);
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) {
      row[j] = overlay_match(ctx.domain.concepts(), memory.instance(id).attributes,
                             memory.instance(pool_[j]).attributes);
    }
    pool_match_.push_back(std::move(row));
  }
}

double Shadows::memory_match(const ShadowContext& ctx, InstanceId a, InstanceId b) {
  auto ia = pool_index_.find(a);
  auto ib = pool_index_.find(b);
  if (ia == pool_index_.end() || ib == pool_index_.end()) {
    return overlay_match(ctx.domain.concepts(), ctx.memory.instance(a).attributes,
                         ctx.memory.instance(b).attributes);
  }
  std::size_t i = ia->second;
  std::size_t j = ib->second;
  if (i == j) {
    const auto& attrs = ctx.memory.instance(a).attributes;
    return overlay_match(ctx.domain.concepts(), attrs, attrs);
  }
  return i > j ? pool_match_[i][j] : pool_match_[j][i];
}

namespace {

// Rules (g)/(h): within each scene the strongest member takes a share of
// the scene mass from the others, proportionally to their energy.
template <class Id, class SceneOf>
void sharpen(const Body<Id>& body, double rate, double dt, SceneOf scene_of, Body<Id>& delta) {
  if (rate == 0.0 || dt == 0.0) return;
  std::map<InstanceId, std::vector<std::pair<Id, double>>> by_scene;
  for (const auto& [id, e] : body) by_scene[scene_of(id)].push_back({id, e});
  for (const auto& [scene, members] : by_scene) {
    if (members.size() < 2) continue;
    double mass = 0.0;
    std::size_t strongest = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      mass += members[i].second;
      if (members[i].second > members[strongest].second) strongest = i;
    }
    double rest = mass - members[strongest].second;
    if (rest <= 0.0) continue;
    double gain = std::min(rate * dt * mass, rest);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i == strongest) {
        delta[members[i].first] += gain;
      } else {
        delta[members[i].first] -= gain * members[i].second / rest;
      }
    }
  }
}

template <class Id>
void commit(Body<Id>& body, const Body<Id>& delta, double cap, double epsilon) {
  Body<Id> next;
  for (const auto& [id, e] : body) next[id] = e;
  for (const auto& [id, d] : delta) next[id] += d;
  double mass = 0.0;
  for (auto it = next.begin(); it != next.end();) {
    if (it->second <= 0.0) {
      it = next.erase(it);
    } else {
      mass += it->second;
      ++it;
    }
  }
  if (mass > cap) {
    double scale = cap / mass;
    for (auto& [id, e] : next) e *= scale;
  }
  for (auto it = next.begin(); it != next.end();) {
    it = it->second < epsilon ? next.erase(it) : std::next(it);
  }
  body = std::move(next);
}

bool linkable(LinkKind kind) {
  return kind == LinkKind::Succession || kind == LinkKind::Coincidence ||
         kind == LinkKind::Context || kind == LinkKind::Summarization;
}

}  // namespace

void Shadows::diffusion_step(double dt, const ShadowContext& ctx) {
  if (dt <= 0.0) return;
  sync_pool(ctx);
  const ShadowParams& p = ctx.params;
  const Memory& memory = ctx.memory;
  const Focus& focus = ctx.focus;
  const SymbolTable& concepts = ctx.domain.concepts();
  const SymbolTable& verbs = ctx.domain.verbs();

  // Snapshot: every rule reads the pre-step state.
  const auto pre_instance = instance_;
  const auto pre_vi = vi_;

  std::vector<InstanceId> instance_pool;
  for (InstanceId id : pool_) {
    if (memory.salience(id) > p.salience_floor) instance_pool.push_back(id);
  }
  std::sort(instance_pool.begin(), instance_pool.end());
  std::vector<ViId> vi_pool;
  for (std::uint32_t raw = 0; raw < memory.vi_count(); ++raw) {
    ViId id(raw);
    if (focus.expired(id) && memory.salience(id) > p.salience_floor) vi_pool.push_back(id);
  }

  std::map<InstanceId, Body<InstanceId>> instance_delta;
  std::map<ViId, Body<ViId>> vi_delta;
  double decay = std::exp(-p.mu * dt) - 1.0;

  for (const auto& [head, body] : pre_instance) {
    Body<InstanceId>& delta = instance_delta[head];
    // (a)
    for (const auto& [id, e] : body) delta[id] += e * decay;
    const ConceptOverlay& head_attrs = memory.instance(head).attributes;
    // (b), (c)
    for (InstanceId m : instance_pool) {
      if (p.rate_head != 0.0) {
        double match = overlay_match(concepts, head_attrs, memory.instance(m).attributes);
        if (match > 0.0) delta[m] += p.rate_head * dt * match * memory.salience(m);
      }
      if (p.rate_body != 0.0) {
        double best = 0.0;
        for (const auto& [b, e] : body) {
          if (b == m) continue;
          best = std::max(best, memory_match(ctx, b, m) * e);
        }
        if (best > 0.0) delta[m] += p.rate_body * dt * p.beta * best;
      }
    }
    // (e)
    if (p.rate_identity != 0.0) {
      std::map<InstanceId, double> identity;
      for (InstanceId m : memory.identity_closure(head)) {
        if (m != head && focus.expired(m)) identity[m] = 1.0;
      }
      for (const auto& [b, e] : body) {
        for (InstanceId m : memory.identity_closure(b)) {
          if (m == b || !focus.expired(m)) continue;
          identity[m] = std::max(identity[m], e);
        }
      }
      for (const auto& [m, w] : identity) delta[m] += p.rate_identity * dt * w;
    }
    // (g)
    sharpen(body, p.rate_sharpen_instance, dt,
            [&](InstanceId id) { return memory.instance(id).scene; }, delta);
  }

  auto part_energy = [&](InstanceId head, InstanceId item) {
    auto it = pre_instance.find(head);
    if (it == pre_instance.end()) return 0.0;
    auto jt = it->second.find(item);
    return jt == it->second.end() ? 0.0 : jt->second;
  };

  for (const auto& [head, body] : pre_vi) {
    Body<ViId>& delta = vi_delta[head];
    const VerbInstance& hv = memory.vi(head);
    // (a)
    for (const auto& [id, e] : body) delta[id] += e * decay;
    // (d)
    if (p.rate_verb != 0.0) {
      auto head_object = hv.object_instance();
      for (ViId v : vi_pool) {
        const VerbInstance& mv = memory.vi(v);
        double match = overlay_match(verbs, hv.verbs, mv.verbs);
        if (match <= 0.0) continue;
        double amplifier = 1.0 + part_energy(hv.subject, mv.subject);
        auto mv_object = mv.object_instance();
        if (head_object && mv_object) amplifier += part_energy(*head_object, *mv_object);
        double gain = p.rate_verb * dt * match * amplifier;
        delta[v] += gain;
        if (p.gamma == 0.0) continue;
        // Side effect: strengthen the alignment of the parts.
        if (pre_instance.count(hv.subject) && focus.expired(mv.subject)) {
          instance_delta[hv.subject][mv.subject] += p.gamma * gain;
        }
        if (head_object && mv_object && pre_instance.count(*head_object) && focus.expired(*mv_object)) {
          instance_delta[*head_object][*mv_object] += p.gamma * gain;
        }
      }
    }
    // (f)
    if (p.rate_link != 0.0) {
      auto consistent = [&](const std::vector<std::size_t>& head_links, bool outgoing) {
        for (std::size_t hl : head_links) {
          const Link& link = memory.links()[hl];
          if (!linkable(link.kind)) continue;
          ViId neighbor(outgoing ? link.to : link.from);
          auto nb = pre_vi.find(neighbor);
          if (nb == pre_vi.end()) continue;
          for (const auto& [v, e] : body) {
            const auto& v_links = outgoing ? memory.out_links(v) : memory.in_links(v);
            for (std::size_t vl : v_links) {
              const Link& l2 = memory.links()[vl];
              if (l2.kind != link.kind) continue;
              ViId other(outgoing ? l2.to : l2.from);
              auto it = nb->second.find(other);
              if (it != nb->second.end()) delta[v] += p.rate_link * dt * it->second;
            }
          }
        }
      };
      consistent(memory.out_links(head), true);
      consistent(memory.in_links(head), false);
    }
    // (h)
    sharpen(body, p.rate_sharpen_vi, dt, [&](ViId id) { return memory.vi(id).scene; }, delta);
  }

  for (auto& [head, body] : instance_) commit(body, instance_delta[head], p.cap_instance, p.epsilon);
  for (auto& [head, body] : vi_) commit(body, vi_delta[head], p.cap_vi, p.epsilon);
}

}  // namespace xapagy
