import numpy as np
import pytest
from hypothesis import given, strategies as st

from robustcall import noise, synth
from robustcall.model import validate
from robustcall.synth import Persona, Rule


@pytest.mark.parametrize("persona", synth.bundled_personas(), ids=lambda p: p.name)
def test_noise_free_is_rule_consistent(persona):
    ds, mask = synth.generate(persona, 1000, 0.0, 0)
    assert mask.flipped == () and mask.realized_rate == 0.0
    assert validate(ds) == []
    for row, label in zip(ds.rows, ds.labels):
        assert persona.label(dict(zip(ds.schema.attributes, row))) == label


def test_exact_flip_count():
    ds, mask = synth.generate(synth.student(), 1000, 0.05, 3)
    assert len(mask.flipped) == 50 and mask.realized_rate == 0.05
    clean, _ = synth.generate(synth.student(), 1000, 0.0, 3)
    assert synth.noise_count(100, 0.29) == 29


def test_mask_records_originals():
    persona = synth.executive()
    ds, mask = synth.generate(persona, 800, 0.10, 9)
    flipped = mask.as_bool(len(ds))
    for i, (row, label) in enumerate(zip(ds.rows, ds.labels)):
        truth = persona.label(dict(zip(ds.schema.attributes, row)))
        assert (label != truth) == flipped[i]
    assert list(mask.original) == [persona.label(dict(zip(ds.schema.attributes, ds.rows[i])))
                                   for i in mask.flipped]


def test_determinism():
    a = synth.generate(synth.office_worker(), 300, 0.1, 42)
    b = synth.generate(synth.office_worker(), 300, 0.1, 42)
    assert a[0] == b[0] and a[1] == b[1]
    assert synth.generate(synth.office_worker(), 300, 0.1, 43)[0] != a[0]


def test_argument_errors():
    with pytest.raises(ValueError):
        synth.generate(synth.student(), 0)
    with pytest.raises(ValueError):
        synth.generate(synth.student(), 10, 1.0)


def test_office_worker_rules():
    p = synth.office_worker()
    assert p.label({"Location": "Office", "Situation": "Meeting", "Relationship": "Boss"}) == "Accept"
    assert p.label({"Location": "Home", "Situation": "Lunch", "Relationship": "Unknown"}) == "Missed"
    assert p.label({"Location": "Office", "Situation": "Lecture", "Relationship": "Boss"}) == "Reject"


def test_totality_checked():
    with pytest.raises(ValueError):
        Persona.build("gap", {"A": {"x": 1.0, "y": 1.0}}, [Rule.of("P", A="x")], ("P", "Q"))


@pytest.mark.parametrize("persona", synth.bundled_personas(), ids=lambda p: p.name)
def test_persona_is_naive_bayes_consistent(persona):
    # every context must be labelled correctly by naive Bayes on expected counts,
    # otherwise the likelihood filter would wipe whole contexts
    assert min(m for _, _, m in synth.naive_bayes_margins(persona)) > 0.3


def test_thin_margin_persona_loses_clean_rows():
    # uniform marginals leave Office+Meeting+Boss with a tiny expected margin; sampling
    # noise then tips naive Bayes and whole clean contexts get flagged
    p = Persona.build("uniform", {
        "Location": {"Home": 1.0, "Office": 1.0},
        "Situation": {"Meeting": 1.0, "Lecture": 1.0, "Lunch": 1.0},
        "Relationship": {"Boss": 1.0, "Friend": 1.0, "Colleague": 1.0, "Unknown": 1.0},
    }, synth.office_worker().rules, ("Accept", "Reject", "Missed"))
    assert 0 < min(m for _, _, m in synth.naive_bayes_margins(p)) < 0.15
    flagged = [len(noise.detect_noise(synth.generate(p, 500, 0.0, s)[0]).noise_ids) for s in range(10)]
    assert max(flagged) > 0
    bundled = [len(noise.detect_noise(synth.generate(synth.office_worker(), 500, 0.0, s)[0]).noise_ids)
               for s in range(10)]
    assert bundled == [0] * 10


@given(st.integers(1, 300), st.floats(0, 0.5), st.integers(0, 10**6))
def test_mask_invariants(n, rate, seed):
    ds, mask = synth.generate(synth.student(), n, rate, seed)
    assert len(ds) == n
    assert len(mask.flipped) == synth.noise_count(n, rate)
    assert len(set(mask.flipped)) == len(mask.flipped) and list(mask.flipped) == sorted(mask.flipped)
    assert all(ds.labels[i] != o for i, o in zip(mask.flipped, mask.original))


def test_dumps_mask():
    _, mask = synth.generate(synth.student(), 40, 0.05, 0)
    lines = synth.dumps_mask(mask).splitlines()
    assert lines[0] == "id,original_label" and len(lines) == 3


def test_persona_lookup():
    assert synth.persona_by_name("student").name == "student"
    with pytest.raises(KeyError):
        synth.persona_by_name("astronaut")
