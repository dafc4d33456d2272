import pytest
from hypothesis import given

from robustcall.model import (
    AttributeSchema, Dataset, DatasetFormatError, Instance, SchemaError, class_counts,
    dumps_dataset, loads_dataset, validate, write_dataset, read_dataset,
)

from conftest import small_datasets


def test_sample_validates(sample):
    assert validate(sample) == []


def test_empty_dataset_validates():
    schema = AttributeSchema(("Location",), (("Office", "Home"),), ("Accept", "Reject"))
    assert validate(Dataset(schema)) == []


def test_out_of_domain_value_is_reported():
    schema = AttributeSchema(("Location",), (("Office", "Home"),), ("Accept", "Reject"))
    ds = Dataset(schema, (("Office",), ("Mars",)), ("Accept", "Reject"))
    [v] = validate(ds)
    assert v.instance_id == 1 and "Mars" in v.reason


def test_unknown_label_and_wrong_arity_are_reported():
    schema = AttributeSchema(("Location",), (("Office",),), ("Accept", "Reject"))
    ds = Dataset(schema, (("Office", "x"), ("Office",)), ("Accept", "Dance"))
    assert [v.instance_id for v in validate(ds)] == [0, 1]


def test_class_counts(sample):
    assert class_counts(sample) == {"Reject": 5, "Accept": 4}


def test_class_counts_empty_and_single():
    schema = AttributeSchema(("L",), (("a",),))
    assert class_counts(Dataset(schema)) == {"Accept": 0, "Reject": 0, "Missed": 0, "Outgoing": 0}
    one = Dataset(schema, (("a",),), ("Accept",))
    assert class_counts(one) == {"Accept": 1, "Reject": 0, "Missed": 0, "Outgoing": 0}


@pytest.mark.parametrize("kwargs", [
    dict(attributes=("a", "a"), domains=(("x",), ("y",)), class_set=("P", "Q")),
    dict(attributes=("a",), domains=(("x",),), class_set=("P",)),
    dict(attributes=("a",), domains=(("x", "x"),), class_set=("P", "Q")),
])
def test_schema_invariants(kwargs):
    with pytest.raises(SchemaError):
        AttributeSchema(**kwargs)


def test_ids_are_positions(sample):
    assert [i.id for i in sample.instances] == list(range(9))
    sub = sample.take([4, 0])
    assert [i.id for i in sub.instances] == [0, 1]
    assert sub.instances[0] == Instance(sample.rows[4], "Accept", 0)


def test_dataset_is_immutable(sample):
    with pytest.raises(AttributeError):
        sample.rows = ()
    with pytest.raises(ValueError):
        sample.X[0, 0] = 3


@given(small_datasets(min_n=0))
def test_class_counts_conserve_instances(ds):
    assert sum(class_counts(ds).values()) == len(ds)


@given(small_datasets(min_n=0))
def test_validate_is_deterministic(ds):
    assert validate(ds) == validate(ds) == []


def test_round_trip(sample, tmp_path):
    text = dumps_dataset(sample)
    assert text.splitlines()[0] == "DayTime,Location,Situation,Relationship,behavior"
    back = loads_dataset(text)
    assert back.rows == sample.rows and back.labels == sample.labels
    # observed order: default classes first
    assert back.schema.class_set == ("Accept", "Reject")
    write_dataset(sample, tmp_path / "t.csv")
    assert read_dataset(tmp_path / "t.csv", class_set=("Reject", "Accept")) == sample.__class__(
        back.schema.__class__(back.schema.attributes, back.schema.domains, ("Reject", "Accept")),
        sample.rows, sample.labels)


def test_delimiter_in_value_rejected(tmp_path):
    schema = AttributeSchema(("L",), (("a,b",),), ("P", "Q"))
    with pytest.raises(DatasetFormatError):
        write_dataset(Dataset(schema, (("a,b",),), ("P",)), tmp_path / "x.csv")
    with pytest.raises(DatasetFormatError):
        loads_dataset("L,behavior\na,b,P\n")
