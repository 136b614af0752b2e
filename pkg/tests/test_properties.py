from nangle.properties import PROPERTIES, run_properties


def test_suite_passes_and_is_seeded():
    a = run_properties(7, 2 * len(PROPERTIES))
    assert a["all_passed"]
    assert all(t["cases"] == 2 for t in a["properties"].values())
    assert run_properties(7, 2 * len(PROPERTIES)) == a


def test_failures_are_recorded(monkeypatch):
    monkeypatch.setitem(PROPERTIES, "ring_laws", lambda rng: "forced failure")
    rep = run_properties(0, len(PROPERTIES))
    assert not rep["all_passed"]
    assert rep["properties"]["ring_laws"]["failures"] == [{"case": 0, "detail": "forced failure"}]
