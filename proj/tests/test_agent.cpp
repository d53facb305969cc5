#include <set>
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "support.hpp"

using namespace xapagy;

namespace {

std::string stories_dir() { return (testing::data_dir() / "stories").string(); }

const VerbInstance& last_vi(const Agent& a) { return a.memory().vis().back(); }

std::size_t count_origin(const testing::TraceLog& log, const char* origin) {
  return log.count(std::string("\"origin\":\"") + origin + "\"");
}

}  // namespace

TEST_CASE("config keys") {
  Config c;
  CHECK(c.number("focus.lambda") == 0.2);
  CHECK(c.text("mood") == "story_following");
  c.set_assignment("focus.lambda=0.3");
  CHECK(c.number("focus.lambda") == 0.3);
  CHECK(c.is_explicit("focus.lambda"));
  CHECK_THROWS_AS(c.set("focus.lambda", "abc"), ConfigError);
  CHECK_THROWS_AS(c.set("no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set_assignment("focus.lambda"), ConfigError);
  c.parse("# comment\nshadow.mu = 0.2\n\nmood = recall\n");
  CHECK(c.number("shadow.mu") == 0.2);
  CHECK(c.text("mood") == "recall");
  CHECK_THROWS_AS(c.parse("shadow.mu 0.2\n"), ConfigError);
  CHECK(c.number("support.continuation.successor") == 1.0);
  CHECK(c.number("support.continuation.in_shadow") == -1.0);
}

TEST_CASE("mood presets") {
  auto sf = Mood::preset_named("story_following");
  CHECK(sf.budget_of(Purpose::Continuation) == 0.0);
  auto conf = Mood::preset_named("confabulation");
  CHECK(conf.relaxation == 1.5);
  CHECK(conf.adherence < 1.0);
  CHECK_THROWS_AS(Mood::preset_named("dreamy"), ConfigError);

  Agent a(testing::lrrh_domain());
  a.set_mood("recall");
  CHECK(a.mood().budget_of(Purpose::Continuation) > 0.0);
  a.set_mood_value("mood.adherence", "0");
  CHECK(a.mood().adherence == 0.0);
  CHECK_THROWS_AS(a.set_mood_value("mood.adherence", "2"), ConfigError);
  CHECK_THROWS_AS(a.set_mood_value("mood.wibble", "2"), ConfigError);
  CHECK_THROWS_AS(a.set_mood_value("focus.lambda", "2"), ConfigError);
  CHECK(a.mood().adherence == 0.0);

  Config c;
  c.set("mood", "confabulation");
  c.set("mood.relaxation", "2");
  Agent b(testing::lrrh_domain(), c);
  CHECK(b.mood().relaxation == 2.0);
  CHECK(b.mood().adherence == doctest::Approx(0.3));
  c.set("mood.relaxation", "0.5");
  CHECK_THROWS_AS(Agent(testing::lrrh_domain(), c), ConfigError);
}

TEST_CASE("story following never instantiates internally") {
  Agent a(testing::lrrh_domain());
  testing::TraceLog log;
  log.attach(a);
  a.run_file(testing::data_dir() / "stories" / "missing_action.xapi");
  CHECK(count_origin(log, "internal-inferred") == 0);
  CHECK(count_origin(log, "internal-recalled") == 0);
  CHECK(a.recall(3).empty());
}

TEST_CASE("first event of a fresh agent is unexpected") {
  Agent a(testing::lrrh_domain());
  a.execute("$NewSceneCurrent \"Home\", view, girl, wolf");
  auto r = a.execute("The girl / greets / the wolf.");
  REQUIRE(r.surprise);
  CHECK(r.surprise->expectedness == 0.0);
  CHECK(a.shadows().body(r.vis.front()).empty());
}

TEST_CASE("missing actions need budget and threshold") {
  Config c;
  c.set("mood", "recall");
  SUBCASE("zero budget") { c.set("mood.budget.missing_action", "0"); }
  SUBCASE("threshold above every candidate") { c.set("mood.threshold.missing_action", "5"); }
  Agent a(testing::lrrh_domain(), c);
  testing::TraceLog log;
  log.attach(a);
  a.run_file(testing::data_dir() / "stories" / "missing_action.xapi");
  CHECK(count_origin(log, "internal-inferred") == 0);
}

TEST_CASE("missing relation is inhibited by a present or conflicting relation") {
  const char* training = R"($NewSceneCurrent "Visit1", view, girl, grandma
The girl / loves / the grandma.
The girl / walks.
The girl / greets / the grandma.
$Wait 15
$NewSceneCurrent "Visit2", view, girl, grandma
The girl / loves / the grandma.
The girl / walks.
The girl / greets / the grandma.
$Wait 15
$NewSceneCurrent "Visit3", view, girl, grandma
)";
  auto loves_support = [](const Agent& a) {
    double best = 0.0;
    for (const auto& [h, s] : a.ranked(Purpose::MissingRelation)) {
      if (a.domain().verbs().name(h->tmpl.verbs.begin()->first) == "loves") best = std::max(best, s);
    }
    return best;
  };
  SUBCASE("inferred when absent") {
    Agent a(testing::lrrh_domain());
    a.run_story(std::string(training) + "The girl / walks.\nThe girl / greets / the grandma.\n");
    CHECK(loves_support(a) > 0.0);
  }
  SUBCASE("inhibited when present") {
    Agent a(testing::lrrh_domain());
    a.run_story(std::string(training) + "The girl / loves / the grandma.\nThe girl / walks.\nThe girl / greets / the grandma.\n");
    CHECK(loves_support(a) == 0.0);
  }
  SUBCASE("inhibited by a conflicting relation") {
    Agent a(testing::lrrh_domain());
    a.run_story(std::string(training) + "The girl / hates / the grandma.\nThe girl / walks.\nThe girl / greets / the grandma.\n");
    CHECK(loves_support(a) == 0.0);
  }
}

TEST_CASE("built-in summary needs a full window of repeated actions") {
  Config c;
  c.set("mood.budget.summarization", "1");
  auto summaries = [&](const char* story) {
    Agent a(testing::lrrh_domain(), c);
    testing::TraceLog log;
    log.attach(a);
    a.run_story(story);
    return log.count("in-summary");
  };
  CHECK(summaries("$NewSceneCurrent \"F\", view, hunter, wolf\nThe hunter / hits / the wolf.\nThe wolf / bites / the hunter.\n") == 0);
  CHECK(summaries("$NewSceneCurrent \"F\", view, hunter, wolf\nThe hunter / hits / the wolf.\nThe wolf / bites / the hunter.\n"
                  "The hunter / kicks / the wolf.\n") == 1);
}

TEST_CASE("stale HLS is discarded without state change") {
  Agent a(testing::lrrh_domain());
  a.run_story("$NewSceneCurrent \"F\", view, girl, wolf\nThe girl / greets / the wolf.\n");
  InstanceId girl = last_vi(a).subject;
  Hls h;
  h.tmpl.form = ViForm::SV;
  h.tmpl.verbs = a.domain().lookup_verb("cries");
  h.tmpl.subject = TemplatePart::focus(girl);
  h.tmpl.scene = a.focus().current_scene();
  a.idle(30);
  REQUIRE(a.focus().expired(girl));
  auto vis = a.memory().vi_count();
  a.set_mood("recall");
  a.recall(2);
  CHECK(a.memory().vi_count() == vis);
}

TEST_CASE("render") {
  Agent a(testing::lrrh_domain());
  a.run_story("$NewSceneCurrent \"F\", view, wolf, girl\n");
  a.execute("The wolf / swallows / the girl.");
  CHECK(a.render(last_vi(a).id) == "The wolf / swallows / the girl.");
  a.execute("The girl / cries.");
  CHECK(a.render(last_vi(a).id) == "The girl / cries.");
  a.execute("The girl / cries?");
  CHECK(a.render(last_vi(a).id).back() == '?');
}

TEST_CASE("property: render round-trips to an equivalent VI") {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int round = 0; round < 6; ++round) {
    std::string story = testing::random_story(rng, 30);
    Agent a(testing::lrrh_domain());
    for (const auto& st : split_story(story)) {
      if (!st.text.empty() && st.text[0] == '$') {
        a.execute(st.text);
        continue;
      }
      nlohmann::json before = a.snapshot();
      Agent::StatementResult result;
      try {
        result = a.execute(st.text);
      } catch (const Error&) {
        continue;
      }
      if (result.vis.size() != 1) continue;
      const VerbInstance& v = a.memory().vi(result.vis.front());
      std::string text = a.render(v.id);
      CAPTURE(st.text);
      CAPTURE(text);
      Agent twin = Agent::restore(before);
      auto replay = twin.execute(text);
      REQUIRE(replay.vis.size() == 1);
      const VerbInstance& w = twin.memory().vi(replay.vis.front());
      CHECK(w.form == v.form);
      CHECK(w.subject == v.subject);
      CHECK(w.object_instance() == v.object_instance());
      CHECK(w.is_question == v.is_question);
      CHECK(overlay_match(a.domain().verbs(), w.verbs, v.verbs) >= 0.8);
      ++checked;
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("snapshot fidelity: save then load continues identically") {
  auto script = std::string("$NewSceneCurrent \"F\", view, hunter, wolf, girl\nThe hunter / hits / the wolf.\n"
                            "The wolf / bites / the hunter.\n$Wait 10\n");
  const char* rest[] = {"$NewSceneCurrent \"G\", view, hunter, wolf", "The hunter / hits / the wolf.", "",
                        "The wolf / bites / the hunter.", "The hunter / kicks / the wolf."};
  Config c;
  c.set("mood", "recall");
  Agent straight(testing::lrrh_domain(), c);
  straight.run_story(script);
  auto path = std::filesystem::temp_directory_path() / "xapagy_snapshot_test.json";
  straight.save(path);
  Agent loaded = Agent::load(path);
  CHECK(loaded.snapshot() == straight.snapshot());

  testing::TraceLog la, lb;
  la.attach(straight);
  lb.attach(loaded);
  for (const char* s : rest) {
    straight.execute(s);
    loaded.execute(s);
  }
  straight.recall(3);
  loaded.recall(3);
  CHECK(la.lines == lb.lines);
  CHECK(loaded.snapshot() == straight.snapshot());
  std::filesystem::remove(path);
}

TEST_CASE("snapshot rejects malformed input") {
  CHECK_THROWS_AS(Agent::restore(nlohmann::json::object()), ConfigError);
  CHECK_THROWS_AS(Agent::restore(nlohmann::json{{"format", "other"}}), ConfigError);
}

TEST_CASE("determinism: identical inputs give identical traces") {
  auto run = [](int seed) {
    Config c;
    c.set("seed", static_cast<double>(seed));
    c.set("mood", "confabulation");
    c.set("mood.adherence", "0");
    Agent a(testing::lrrh_domain(), c);
    testing::TraceLog log;
    log.attach(a);
    a.run_file(testing::data_dir() / "stories" / "missing_action.xapi");
    a.recall(6);
    return log.joined();
  };
  CHECK(run(1) == run(1));
}

TEST_CASE("trace records") {
  Agent a(testing::lrrh_domain());
  testing::TraceLog log;
  log.attach(a);
  a.trace_config();
  a.run_story("$NewSceneCurrent \"F\", view, girl\nThe girl / cries.\n");
  std::uint64_t seq = nlohmann::json::parse(log.lines.front())["seq"].get<std::uint64_t>();
  for (const auto& line : log.lines) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("tick"));
    CHECK(j["seq"].get<std::uint64_t>() == seq++);
    CHECK(j.contains("kind"));
  }
  CHECK(log.count("\"kind\":\"dump\"") == 1);
  CHECK(log.count("\"kind\":\"vi\"") == a.memory().vi_count());
  CHECK(log.count("\"kind\":\"instance\"") + 1 == a.memory().instance_count());
}

TEST_CASE("story errors carry the line") {
  Agent a(testing::lrrh_domain());
  try {
    a.run_story("$NewSceneCurrent \"F\", view, girl\n\nThe girl / cries.\n# note\nThe girl / zaps.\n");
    FAIL("expected StoryError");
  } catch (const StoryError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("a failing statement leaves no partial VIs") {
  Agent a(testing::lrrh_domain());
  a.run_story("$NewSceneCurrent \"F\", view, girl\n");
  auto vis = a.memory().vi_count();
  auto instances = a.memory().instance_count();
  CHECK_THROWS(a.execute("A wolf / bites / the basket."));
  CHECK(a.memory().vi_count() == vis);
  CHECK(a.memory().instance_count() == instances);
}

TEST_CASE("dumps") {
  Agent a(testing::lrrh_domain());
  a.run_file(testing::data_dir() / "stories" / "missing_action.xapi");
  CHECK(a.dump_focus().find("Glade4") != std::string::npos);
  CHECK_FALSE(a.dump_shadows().empty());
  CHECK(a.dump_hls(Purpose::MissingAction).find("bites") != std::string::npos);
  CHECK(a.dump_memory().find("succession") != std::string::npos);
}

TEST_CASE("LRRH corpus run") {
  Agent a(testing::lrrh_domain());
  testing::TraceLog log;
  log.attach(a);
  a.trace_config();
  a.run_file(testing::data_dir() / "stories/lrrh.xapi");
  CHECK(a.memory().vi_count() == 84);
  CHECK(a.memory().instance_count() == 46);

  std::optional<InstanceId> girl;
  for (const auto& inst : a.memory().instances()) {
    if (a.reference_text(inst.id) == "\"LRRH\"") {
      girl = inst.id;
      break;
    }
  }
  REQUIRE(girl);
  CHECK(a.memory().identity_closure(*girl).size() == 10);

  // One record per VI and per instance created after the trace was attached
  // (the root scene predates it), one surprise per narrating statement, plus
  // the configuration header and any warnings.
  std::set<std::int64_t> narrating_ticks;
  for (const auto& l : log.lines) {
    auto j = nlohmann::json::parse(l);
    if (j["kind"] == "vi" && j["origin"] == "narrated") narrating_ticks.insert(j["tick"].get<std::int64_t>());
  }
  std::size_t instances = a.memory().instance_count() - 1;
  CHECK(log.count("\"kind\":\"vi\"") == a.memory().vi_count());
  CHECK(log.count("\"kind\":\"instance\"") == instances);
  CHECK(log.count("\"kind\":\"surprise\"") == narrating_ticks.size());
  CHECK(log.lines.size() == a.memory().vi_count() + instances + narrating_ticks.size() + 1 +
                                log.count("\"kind\":\"warning\""));
}

TEST_CASE("recorded VIs never change") {
  Agent a(testing::lrrh_domain());
  a.run_file(testing::data_dir() / "stories/lrrh_intro.xapi");
  std::vector<std::string> before;
  std::vector<VerbInstance> raw(a.memory().vis().begin(), a.memory().vis().end());
  for (const auto& v : raw) before.push_back(a.render(v.id));
  a.run_file(testing::data_dir() / "stories/fight.xapi");
  a.set_mood("recall");
  a.recall(3);
  a.idle(30);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const VerbInstance& now = a.memory().vi(raw[i].id);
    CHECK(now.form == raw[i].form);
    CHECK(now.subject == raw[i].subject);
    CHECK(now.object == raw[i].object);
    CHECK(now.scene == raw[i].scene);
    CHECK(now.created_at == raw[i].created_at);
    CHECK(now.verbs == raw[i].verbs);
  }
}
