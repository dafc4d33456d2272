import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustcall import bayes
from robustcall.model import AttributeSchema, Dataset

import oracles
from conftest import small_datasets

# Every conditional of the nine-row sample, counted by hand.
SAMPLE_CONDITIONALS = [
    ("DayTime", "Fri[S1]", "Reject", 3, 5), ("DayTime", "Fri[S1]", "Accept", 1, 4),
    ("DayTime", "Fri[S2]", "Reject", 0, 5), ("DayTime", "Fri[S2]", "Accept", 1, 4),
    ("DayTime", "Wed[S1]", "Reject", 2, 5), ("DayTime", "Wed[S1]", "Accept", 1, 4),
    ("DayTime", "Wed[S2]", "Reject", 0, 5), ("DayTime", "Wed[S2]", "Accept", 1, 4),
    ("Location", "Office", "Reject", 5, 5), ("Location", "Office", "Accept", 2, 4),
    ("Location", "Home", "Reject", 0, 5), ("Location", "Home", "Accept", 2, 4),
    ("Situation", "Meeting", "Reject", 3, 5), ("Situation", "Meeting", "Accept", 1, 4),
    ("Situation", "Seminar", "Reject", 2, 5), ("Situation", "Seminar", "Accept", 1, 4),
    ("Situation", "Dinner", "Reject", 0, 5), ("Situation", "Dinner", "Accept", 2, 4),
    ("Relationship", "Friend", "Reject", 2, 5), ("Relationship", "Friend", "Accept", 1, 4),
    ("Relationship", "Colleague", "Reject", 2, 5), ("Relationship", "Colleague", "Accept", 0, 4),
    ("Relationship", "Boss", "Reject", 0, 5), ("Relationship", "Boss", "Accept", 1, 4),
    ("Relationship", "Mother", "Reject", 0, 5), ("Relationship", "Mother", "Accept", 1, 4),
    ("Relationship", "Unknown", "Reject", 1, 5), ("Relationship", "Unknown", "Accept", 1, 4),
]


def laplace_example_model():
    # 1000 Reject calls: 0 Unknown, 990 Friend, 10 Mother; one Accept call makes Unknown observed (V = 3)
    schema = AttributeSchema(("Relationship",), (("Unknown", "Friend", "Mother"),), ("Reject", "Accept"))
    rows = [("Friend",)] * 990 + [("Mother",)] * 10 + [("Unknown",)]
    labels = ["Reject"] * 1000 + ["Accept"]
    return bayes.fit(Dataset(schema, tuple(rows), tuple(labels)))


def test_laplace_worked_example():
    model = laplace_example_model()
    assert model.value_cardinality == (3,)
    got = [bayes.conditional(model, "Relationship", v, "Reject", "laplace") for v in ("Unknown", "Friend", "Mother")]
    assert got == [Fraction(1, 1003), Fraction(991, 1003), Fraction(11, 1003)]
    assert [round(float(p), 3) for p in got] == [0.001, 0.988, 0.011]
    assert bayes.conditional(model, "Relationship", "Friend", "Reject") == Fraction(990, 1000)


def test_fit_counts(sample):
    model = bayes.fit(sample)
    assert model.total == 9
    assert dict(zip(model.schema.class_set, model.class_counts.tolist())) == {"Reject": 5, "Accept": 4}
    assert model.count("DayTime", "Fri[S1]", "Reject") == 3
    assert model.count("Location", "Home", "Reject") == 0


def test_priors_sample(sample):
    model = bayes.fit(sample)
    assert bayes.prior(model, "Reject") == Fraction(5, 9)
    assert bayes.prior(model, "Accept") == Fraction(4, 9)
    with pytest.raises(KeyError):
        bayes.prior(model, "Missed")


@pytest.mark.parametrize("attr,value,label,num,den", SAMPLE_CONDITIONALS)
def test_conditionals_sample(sample, attr, value, label, num, den):
    assert bayes.conditional(bayes.fit(sample), attr, value, label) == Fraction(num, den)


def test_single_instance_fit():
    schema = AttributeSchema(("L", "S"), (("a", "b"), ("x",)), ("P", "Q"))
    model = bayes.fit(Dataset(schema, (("a", "x"),), ("P",)))
    assert model.class_counts.tolist() == [1, 0]
    assert model.count("L", "a", "P") == 1 and model.count("S", "x", "P") == 1
    # one-class data: the present class takes the whole unsmoothed mass before priors get smoothed
    assert bayes.prior(model, "P") == Fraction(2, 3)


def test_fit_empty_raises():
    with pytest.raises(ValueError):
        bayes.fit(Dataset(AttributeSchema(("L",), (("a",),), ("P", "Q"))))


def test_conditional_zero_class_unsmoothed_raises():
    schema = AttributeSchema(("L",), (("a",),), ("P", "Q"))
    model = bayes.fit(Dataset(schema, (("a",),), ("P",)))
    with pytest.raises(ZeroDivisionError):
        bayes.conditional(model, "L", "a", "Q")
    assert bayes.conditional(model, "L", "a", "Q", "laplace") == Fraction(1, 1)


def test_likelihood_unsmoothed(sample):
    model = bayes.fit(sample)
    ll, smoothed = bayes.likelihood(model, ("Fri[S1]", "Office", "Meeting", "Friend"), "Reject")
    assert not smoothed
    assert math.isclose(ll, math.log(Fraction(18, 125)), rel_tol=1e-12)


def test_likelihood_zero_factor_smooths_every_factor(sample):
    model = bayes.fit(sample)
    ll, smoothed = bayes.likelihood(model, ("Fri[S2]", "Office", "Meeting", "Friend"), "Reject")
    assert smoothed
    # (0+1)/(5+4) * (5+1)/(5+2) * (3+1)/(5+3) * (2+1)/(5+5)
    assert math.isclose(ll, math.log(Fraction(1, 70)), rel_tol=1e-12)


def test_likelihood_out_of_domain_value_smooths(sample):
    model = bayes.fit(sample)
    _, smoothed = bayes.likelihood(model, ("Fri[S1]", "Office", "Meeting", "Stranger"), "Reject")
    assert smoothed


def test_empty_attribute_schema_likelihood_is_one():
    schema = AttributeSchema((), (), ("P", "Q"))
    model = bayes.fit(Dataset(schema, ((), ()), ("P", "Q")))
    assert bayes.likelihood(model, (), "P") == (0.0, False)
    assert bayes.likelihood(model, (), "Q") == (0.0, False)


def test_predict_sample(sample):
    model = bayes.fit(sample)
    label, score = bayes.predict(model, ("Fri[S1]", "Office", "Meeting", "Friend"))
    assert label == "Reject"
    assert math.isclose(score, math.log(Fraction(5, 9) * Fraction(18, 125)), rel_tol=1e-12)
    assert round(math.exp(score), 3) == 0.080
    accept = Fraction(4, 9) * Fraction(1, 4) * Fraction(2, 4) * Fraction(1, 4) * Fraction(1, 4)
    assert round(float(accept), 4) == 0.0035


def test_predict_single_class():
    schema = AttributeSchema(("L",), (("a", "b"),), ("P", "Q"))
    model = bayes.fit(Dataset(schema, (("a",), ("b",)), ("Q", "Q")))
    assert bayes.predict(model, ("a",))[0] == "Q"
    assert bayes.predict(model, ("zzz",))[0] == "Q"


def test_predict_tie_goes_to_first_class():
    schema = AttributeSchema(("L",), (("a", "b"),), ("P", "Q"))
    model = bayes.fit(Dataset(schema, (("a",), ("b",), ("a",), ("b",)), ("Q", "Q", "P", "P")))
    assert bayes.predict(model, ("a",))[0] == "P"
    flipped = AttributeSchema(("L",), (("a", "b"),), ("Q", "P"))
    model = bayes.fit(Dataset(flipped, (("a",), ("b",), ("a",), ("b",)), ("Q", "Q", "P", "P")))
    assert bayes.predict(model, ("a",))[0] == "Q"


def test_model_dump_round_trip(sample):
    model = bayes.fit(sample)
    assert bayes.loads_model(bayes.dumps_model(model)) == model


@given(small_datasets())
def test_conditionals_normalize(ds):
    model = bayes.fit(ds)
    for a, name in enumerate(ds.schema.attributes):
        observed = sorted({r[a] for r in ds.rows})
        for c, label in enumerate(ds.schema.class_set):
            total = sum(bayes.conditional(model, name, v, label, "laplace") for v in observed)
            assert total == 1
            if model.class_counts[c] > 0:
                assert sum(bayes.conditional(model, name, v, label) for v in observed) == 1


@given(small_datasets())
def test_counting_consistency(ds):
    model = bayes.fit(ds)
    assert model.class_counts.sum() == model.total == len(ds)
    for table in model.cond_counts:
        assert (table.sum(axis=0) == model.class_counts).all()


@given(small_datasets(), st.data())
def test_smoothed_flag_iff_zero_factor(ds, data):
    model = bayes.fit(ds)
    x = data.draw(st.sampled_from(ds.rows))
    for label in ds.schema.class_set:
        _, flag = bayes.likelihood(model, x, label)
        c = ds.schema.class_index(label)
        zero = model.class_counts[c] == 0 or any(
            model.count(a, v, label) == 0 for a, v in zip(ds.schema.attributes, x))
        assert flag == (bool(zero) and len(x) > 0)


@given(small_datasets(), st.floats(0.1, 50))
def test_argmax_invariant_under_rescaling(ds, scale):
    model = bayes.fit(ds)
    ll, _ = bayes.log_likelihoods(model, ds.X)
    post = ll + bayes.log_priors(model)[None, :]
    assert (bayes.argmax_first(post) == bayes.argmax_first(post + math.log(scale))).all()


@settings(max_examples=300)
@given(small_datasets(), st.data())
def test_predict_matches_exact_oracle(ds, data):
    model = bayes.fit(ds)
    doms = [list(d) + ["unseen"] for d in ds.schema.domains]
    x = tuple(data.draw(st.sampled_from(d)) for d in doms)
    want, want_score = oracles.nb_predict(ds.rows, ds.labels, ds.schema.class_set, x)
    got, score = bayes.predict(model, x)
    assert got == want
    assert math.isclose(score, math.log(want_score), rel_tol=1e-9, abs_tol=1e-12)
