import json
import pathlib

import pytest

import xapagy

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


@pytest.fixture
def domain():
    return xapagy.Domain.load(str(DATA / "lrrh.xapd"))


def test_execute_reports_vis_and_surprise(domain):
    a = xapagy.Agent(domain)
    a.execute('$NewSceneCurrent "Glade", view, hunter, wolf')
    r = a.execute("The hunter / hits / the wolf.")
    assert r["vis"] == ["The hunter / hits / the wolf."]
    assert r["internal"] == []
    assert r["expectedness"] == 0.0
    assert a.vi_count == 2


def test_story_error_names_the_line(domain):
    a = xapagy.Agent(domain)
    with pytest.raises(xapagy.StoryError, match="line 2"):
        a.run_story('$NewSceneCurrent "Glade", view, hunter, wolf\nThe wolf / zaps / the hunter.\n')


def test_bad_config_is_rejected(domain):
    with pytest.raises(xapagy.ConfigError):
        xapagy.Agent(domain, {"focus.lambda": "abc"})
    with pytest.raises(xapagy.ConfigError):
        xapagy.Agent(domain, {"no.such.key": 1})


def test_missing_action_is_inferred_in_recall_mood(domain):
    a = xapagy.Agent(domain)
    a.set_mood("recall")
    lines = []
    a.set_trace(lines.append)
    a.run_file(str(DATA / "stories" / "missing_action.xapi"))
    inferred = [json.loads(l) for l in lines if '"internal-inferred"' in l]
    assert any(r["text"] == "The wolf / bites / the hunter." for r in inferred)


def test_summarization_candidate(domain):
    a = xapagy.Agent(domain)
    a.run_file(str(DATA / "stories" / "fight.xapi"))
    top = a.hls("summarization")[0]
    assert "are-fighting" in top["template"]
    assert top["support"] > 0


def test_dumps_and_snapshot_round_trip(domain, tmp_path):
    a = xapagy.Agent(domain)
    a.run_file(str(DATA / "stories" / "lrrh_intro.xapi"))
    assert a.dump_focus().startswith("tick")
    assert "purpose continuation" in a.dump_hls()
    path = tmp_path / "snap.json"
    a.save(str(path))
    b = xapagy.Agent.load(str(path))
    assert b.vis() == a.vis()
    assert b.dump_focus() == a.dump_focus()
    assert a.idle(3) == b.idle(3)
