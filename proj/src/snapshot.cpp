// Trace records and whole-agent snapshots.

#include <fstream>
#include <sstream>

#include "xapagy/agent.hpp"
#include "xapagy/error.hpp"

namespace xapagy {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kSnapshotVersion = 1;

template <class Tag>
json overlay_to_json(const Overlay<Tag>& o) {
  json out = json::array();
  for (const auto& [id, e] : o) out.push_back({id, e});
  return out;
}

template <class Tag>
Overlay<Tag> overlay_from_json(const json& j) {
  Overlay<Tag> o;
  for (const auto& pair : j) o.set(pair.at(0).get<SymbolId>(), pair.at(1).get<double>());
  return o;
}

template <class Id>
json body_map_to_json(const std::map<Id, Body<Id>>& shadows) {
  json out = json::array();
  for (const auto& [head, body] : shadows) {
    json items = json::array();
    for (const auto& [id, e] : body) items.push_back({id.value, e});
    out.push_back({head.value, items});
  }
  return out;
}

template <class Id>
std::map<Id, Body<Id>> body_map_from_json(const json& j) {
  std::map<Id, Body<Id>> out;
  for (const auto& entry : j) {
    Body<Id>& body = out[Id(entry.at(0).get<std::uint32_t>())];
    for (const auto& item : entry.at(1)) body[Id(item.at(0).get<std::uint32_t>())] = item.at(1).get<double>();
  }
  return out;
}

template <class Id>
json residency_to_json(const std::map<Id, std::vector<Residency>>& residency) {
  json out = json::array();
  for (const auto& [id, spans] : residency) {
    json list = json::array();
    for (const Residency& r : spans) list.push_back({r.inserted, r.expired ? json(*r.expired) : json(nullptr)});
    out.push_back({id.value, list});
  }
  return out;
}

template <class Id>
std::map<Id, std::vector<Residency>> residency_from_json(const json& j) {
  std::map<Id, std::vector<Residency>> out;
  for (const auto& entry : j) {
    auto& spans = out[Id(entry.at(0).get<std::uint32_t>())];
    for (const auto& r : entry.at(1)) {
      Residency res;
      res.inserted = r.at(0).get<Tick>();
      if (!r.at(1).is_null()) res.expired = r.at(1).get<Tick>();
      spans.push_back(res);
    }
  }
  return out;
}

template <class Id>
json strengths_to_json(const std::map<Id, double>& m) {
  json out = json::array();
  for (const auto& [id, s] : m) out.push_back({id.value, s});
  return out;
}

template <class Id>
std::map<Id, double> strengths_from_json(const json& j) {
  std::map<Id, double> out;
  for (const auto& e : j) out[Id(e.at(0).get<std::uint32_t>())] = e.at(1).get<double>();
  return out;
}

template <class Id>
json ids_to_json(const std::set<Id>& s) {
  json out = json::array();
  for (Id id : s) out.push_back(id.value);
  return out;
}

template <class Id>
std::set<Id> ids_from_json(const json& j) {
  std::set<Id> out;
  for (const auto& e : j) out.insert(Id(e.get<std::uint32_t>()));
  return out;
}

}  // namespace

// --- trace -----------------------------------------------------------------------

void Agent::set_trace(std::function<void(const std::string&)> sink) { sink_ = std::move(sink); }

void Agent::emit(std::string_view kind, ordered_json payload) {
  ++seq_;
  if (!sink_) return;
  ordered_json record;
  record["tick"] = focus_.tick();
  record["seq"] = seq_;
  record["kind"] = kind;
  for (auto& [key, value] : payload.items()) record[key] = std::move(value);
  sink_(record.dump());
}

void Agent::trace_vi(ViId id, Origin origin) {
  if (!sink_) {
    ++seq_;
    return;
  }
  const VerbInstance& v = memory_.vi(id);
  ordered_json payload;
  payload["id"] = to_string(id);
  payload["origin"] = to_string(origin);
  payload["form"] = to_string(v.form);
  payload["text"] = render(id);
  payload["scene"] = to_string(v.scene);
  emit("vi", std::move(payload));
}

void Agent::trace_instance(InstanceId id) {
  if (!sink_) {
    ++seq_;
    return;
  }
  const Instance& inst = memory_.instance(id);
  ordered_json payload;
  payload["id"] = to_string(id);
  payload["label"] = concept_text(inst.attributes);
  payload["scene"] = to_string(inst.scene);
  if (inst.is_scene) payload["is_scene"] = true;
  if (inst.is_group()) {
    ordered_json members = ordered_json::array();
    for (InstanceId m : inst.members) members.push_back(to_string(m));
    payload["members"] = members;
  }
  emit("instance", std::move(payload));
}

void Agent::warn(const std::string& message) { pending_warnings_.push_back(message); }

void Agent::flush_warnings() {
  std::vector<std::string> pending;
  pending.swap(pending_warnings_);
  for (const auto& message : pending) emit("warning", ordered_json{{"message", message}});
}

void Agent::trace_config() {
  ordered_json values = ordered_json::object();
  for (const auto& key : Config::keys()) {
    const ConfigValue& v = config_.values().at(key.name);
    if (const auto* d = std::get_if<double>(&v)) {
      values[key.name] = *d;
    } else {
      values[key.name] = std::get<std::string>(v);
    }
  }
  emit("dump", ordered_json{{"what", "config"}, {"config", values}});
}

// --- snapshots -------------------------------------------------------------------

ordered_json Agent::snapshot() const {
  ordered_json s;
  s["format"] = "xapagy-snapshot";
  s["version"] = kSnapshotVersion;
  s["domain"] = domain_.source();
  json names = json::array();
  for (const auto& [id, name] : domain_.proper_names()) names.push_back({id, name});
  s["names"] = names;

  json config = json::object();
  for (const auto& [key, v] : config_.values()) {
    if (const auto* d = std::get_if<double>(&v)) {
      config[key] = *d;
    } else {
      config[key] = std::get<std::string>(v);
    }
  }
  s["config"] = config;
  s["mood"] = {{"preset", mood_.preset}, {"budget", mood_.budget},   {"threshold", mood_.threshold},
               {"relaxation", mood_.relaxation}, {"adherence", mood_.adherence}, {"top_k", mood_.top_k}};

  json instances = json::array();
  for (const Instance& inst : memory_.instances()) {
    json members = json::array();
    for (InstanceId m : inst.members) members.push_back(m.value);
    instances.push_back({{"attributes", overlay_to_json(inst.attributes)},
                         {"scene", inst.scene.value},
                         {"created_at", inst.created_at},
                         {"is_scene", inst.is_scene},
                         {"members", members},
                         {"salience", memory_.salience(inst.id)}});
  }
  json vis = json::array();
  for (const VerbInstance& v : memory_.vis()) {
    json object;
    if (auto o = v.object_instance()) {
      object = {{"instance", o->value}};
    } else if (auto q = v.inquit()) {
      object = {{"inquit", q->value}};
    } else if (const auto* adj = std::get_if<ConceptOverlay>(&v.object)) {
      object = {{"adjective", overlay_to_json(*adj)}};
    }
    vis.push_back({{"form", static_cast<int>(v.form)},
                   {"verbs", overlay_to_json(v.verbs)},
                   {"subject", v.subject.value},
                   {"object", object},
                   {"scene", v.scene.value},
                   {"quote_scene", v.quote_scene.value},
                   {"created_at", v.created_at},
                   {"question", v.is_question},
                   {"salience", memory_.salience(v.id)}});
  }
  json links = json::array();
  for (const Link& l : memory_.links()) links.push_back({static_cast<int>(l.kind), l.from, l.to, l.weight});
  s["memory"] = {{"instances", instances}, {"vis", vis}, {"links", links}};

  Focus::Raw raw = focus_.raw();
  s["focus"] = {{"instances", strengths_to_json(raw.instances)},
                {"vis", strengths_to_json(raw.vis)},
                {"relation_vis", ids_to_json(raw.relation_vis)},
                {"expired_instances", ids_to_json(raw.expired_instances)},
                {"expired_vis", ids_to_json(raw.expired_vis)},
                {"current_scene", raw.current_scene.value},
                {"tick", raw.tick},
                {"instance_residency", residency_to_json(raw.instance_residency)},
                {"vi_residency", residency_to_json(raw.vi_residency)}};
  s["shadows"] = {{"instances", body_map_to_json(shadows_.instance_shadows())},
                  {"vis", body_map_to_json(shadows_.vi_shadows())}};

  json surprises = json::array();
  for (const SurpriseRecord& r : surprises_) surprises.push_back({r.vi.value, r.tick, r.expectedness, r.surprise});
  s["surprises"] = surprises;
  s["last_quote"] = last_quote_text_ ? json(*last_quote_text_) : json(nullptr);
  std::ostringstream rng;
  rng << rng_;
  s["rng"] = rng.str();
  s["seq"] = seq_;
  return s;
}

Agent Agent::restore(const json& s) {
  try {
    if (s.at("format") != "xapagy-snapshot") throw ConfigError("not a snapshot");
    if (s.at("version").get<int>() != kSnapshotVersion) throw ConfigError("unsupported snapshot version");

    Domain domain = Domain::parse(s.at("domain").get<std::string>());
    for (const auto& entry : s.at("names")) {
      SymbolId id = domain.proper_name(entry.at(1).get<std::string>());
      if (id != entry.at(0).get<SymbolId>()) throw ConfigError("snapshot names do not match the domain");
    }
    Config config;
    for (const auto& [key, value] : s.at("config").items()) {
      if (value.is_number()) {
        config.set(key, value.get<double>());
      } else {
        config.set(key, value.get<std::string>());
      }
    }
    Agent agent(std::move(domain), std::move(config));

    const json& mood = s.at("mood");
    agent.mood_.preset = mood.at("preset").get<std::string>();
    agent.mood_.budget = mood.at("budget").get<std::array<double, 4>>();
    agent.mood_.threshold = mood.at("threshold").get<std::array<double, 4>>();
    agent.mood_.relaxation = mood.at("relaxation").get<double>();
    agent.mood_.adherence = mood.at("adherence").get<double>();
    agent.mood_.top_k = mood.at("top_k").get<int>();

    Memory memory;
    const json& m = s.at("memory");
    for (const auto& j : m.at("instances")) {
      Instance inst;
      inst.attributes = overlay_from_json<ConceptTag>(j.at("attributes"));
      inst.scene = InstanceId(j.at("scene").get<std::uint32_t>());
      inst.created_at = j.at("created_at").get<Tick>();
      inst.is_scene = j.at("is_scene").get<bool>();
      for (const auto& member : j.at("members")) inst.members.emplace_back(member.get<std::uint32_t>());
      InstanceId id = memory.add_instance(std::move(inst));
      memory.add_salience(id, j.at("salience").get<double>());
    }
    for (const auto& j : m.at("vis")) {
      VerbInstance v;
      v.form = static_cast<ViForm>(j.at("form").get<int>());
      v.verbs = overlay_from_json<VerbTag>(j.at("verbs"));
      v.subject = InstanceId(j.at("subject").get<std::uint32_t>());
      const json& object = j.at("object");
      if (object.contains("instance")) {
        v.object = InstanceId(object.at("instance").get<std::uint32_t>());
      } else if (object.contains("inquit")) {
        v.object = ViId(object.at("inquit").get<std::uint32_t>());
      } else if (object.contains("adjective")) {
        v.object = overlay_from_json<ConceptTag>(object.at("adjective"));
      }
      v.scene = InstanceId(j.at("scene").get<std::uint32_t>());
      v.quote_scene = InstanceId(j.at("quote_scene").get<std::uint32_t>());
      v.created_at = j.at("created_at").get<Tick>();
      v.is_question = j.at("question").get<bool>();
      ViId id = memory.add_vi(std::move(v));
      memory.add_salience(id, j.at("salience").get<double>());
    }
    for (const auto& j : m.at("links")) {
      memory.add_link(Link{static_cast<LinkKind>(j.at(0).get<int>()), j.at(1).get<std::uint32_t>(),
                           j.at(2).get<std::uint32_t>(), j.at(3).get<double>()});
    }
    agent.memory_ = std::move(memory);

    const json& f = s.at("focus");
    Focus::Raw raw;
    raw.instances = strengths_from_json<InstanceId>(f.at("instances"));
    raw.vis = strengths_from_json<ViId>(f.at("vis"));
    raw.relation_vis = ids_from_json<ViId>(f.at("relation_vis"));
    raw.expired_instances = ids_from_json<InstanceId>(f.at("expired_instances"));
    raw.expired_vis = ids_from_json<ViId>(f.at("expired_vis"));
    raw.current_scene = InstanceId(f.at("current_scene").get<std::uint32_t>());
    raw.tick = f.at("tick").get<Tick>();
    raw.instance_residency = residency_from_json<InstanceId>(f.at("instance_residency"));
    raw.vi_residency = residency_from_json<ViId>(f.at("vi_residency"));
    agent.focus_ = Focus();
    agent.focus_.restore(std::move(raw));

    agent.shadows_ = Shadows();
    agent.shadows_.restore(body_map_from_json<InstanceId>(s.at("shadows").at("instances")),
                           body_map_from_json<ViId>(s.at("shadows").at("vis")));

    agent.surprises_.clear();
    for (const auto& r : s.at("surprises")) {
      agent.surprises_.push_back(SurpriseRecord{ViId(r.at(0).get<std::uint32_t>()), r.at(1).get<Tick>(),
                                                r.at(2).get<double>(), r.at(3).get<double>()});
    }
    agent.last_quote_.reset();
    agent.last_quote_text_.reset();
    if (!s.at("last_quote").is_null()) {
      std::string text = s.at("last_quote").get<std::string>();
      Statement st = parse_statement(text, agent.domain_);
      if (auto* req = std::get_if<ViRequest>(&st)) agent.last_quote_ = *req;
      agent.last_quote_text_ = text;
    }
    std::istringstream rng(s.at("rng").get<std::string>());
    rng >> agent.rng_;
    agent.seq_ = s.at("seq").get<std::uint64_t>();
    agent.tick_vis_.clear();
    agent.tick_instances_.clear();
    agent.pending_warnings_.clear();
    agent.hls_ = compute_hls(agent.hls_context());
    return agent;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed snapshot: ") + e.what());
  }
}

void Agent::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write snapshot " + path.string());
  out << snapshot().dump() << "\n";
}

Agent Agent::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read snapshot " + path.string());
  json s;
  try {
    in >> s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed snapshot: ") + e.what());
  }
  return restore(s);
}

}  // namespace xapagy
