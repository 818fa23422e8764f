import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tarsquad.squad import (
    Answer,
    Dataset,
    DatasetError,
    SpanError,
    check_spans,
    dataset_from_json,
    read_dataset,
    write_dataset,
)

from conftest import random_dataset


def _minimal(context="Fryderyk Chopin was born in Żelazowa Wola.", start=28, text="Żelazowa Wola"):
    return {
        "version": "1.1",
        "data": [
            {
                "title": "Chopin",
                "paragraphs": [
                    {
                        "context": context,
                        "qas": [
                            {
                                "id": "q1",
                                "question": "Where?",
                                "answers": [{"text": text, "answer_start": start}],
                            }
                        ],
                    }
                ],
            }
        ],
    }


def _dump(tmp_path, obj, name="d.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj, ensure_ascii=False), encoding="utf-8")
    return p


def test_read_minimal(tmp_path):
    ds = read_dataset(_dump(tmp_path, _minimal()))
    assert ds.counts() == (1, 1, 1, 1)
    assert ds.version == "1.1"
    ans = ds.articles[0].paragraphs[0].qas[0].answers[0]
    assert ans == Answer("Żelazowa Wola", 28)


def test_span_past_end_names_qa_id(tmp_path):
    with pytest.raises(SpanError, match="q1"):
        read_dataset(_dump(tmp_path, _minimal(start=40)))


def test_lenient_flags_bad_span(tmp_path):
    ds = read_dataset(_dump(tmp_path, _minimal(start=27)), lenient=True)
    ans = ds.articles[0].paragraphs[0].qas[0].answers[0]
    assert ans.span_ok is False
    assert ans.answer_start == 27  # not silently fixed
    assert [p[0] for p in check_spans(ds)] == ["q1"]


def test_dev_style_three_answers(tmp_path):
    obj = _minimal()
    obj["data"][0]["paragraphs"][0]["qas"][0]["answers"] = [
        {"text": "Żelazowa Wola", "answer_start": 28},
        {"text": "Żelazowa Wola", "answer_start": 28},
        {"text": "Wola", "answer_start": 37},
    ]
    ds = read_dataset(_dump(tmp_path, obj))
    assert len(ds.articles[0].paragraphs[0].qas[0].answers) == 3


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda o: o.pop("data"), "data"),
        (lambda o: o["data"][0].pop("title"), "title"),
        (lambda o: o["data"][0]["paragraphs"][0]["qas"][0].pop("id"), "id"),
        (lambda o: o["data"][0]["paragraphs"][0]["qas"][0]["answers"][0].update(answer_start="28"), "answer_start"),
    ],
)
def test_missing_or_bad_keys(tmp_path, mutate, message):
    obj = _minimal()
    mutate(obj)
    with pytest.raises(DatasetError, match=message):
        read_dataset(_dump(tmp_path, obj))


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(DatasetError, match="malformed JSON"):
        read_dataset(p)


def test_duplicate_ids(tmp_path):
    obj = _minimal()
    qas = obj["data"][0]["paragraphs"][0]["qas"]
    qas.append(dict(qas[0]))
    with pytest.raises(DatasetError, match="duplicate"):
        read_dataset(_dump(tmp_path, obj))


def test_round_trip_non_ascii(tmp_path):
    ds = read_dataset(_dump(tmp_path, _minimal()))
    out = tmp_path / "out.json"
    write_dataset(ds, out)
    assert "Żelazowa Wola" in out.read_text(encoding="utf-8")
    assert read_dataset(out) == ds


def test_empty_articles(tmp_path):
    out = tmp_path / "empty.json"
    write_dataset(Dataset("1.1", ()), out)
    assert json.loads(out.read_text(encoding="utf-8")) == {"version": "1.1", "data": []}
    assert read_dataset(out).articles == ()


def test_extra_keys_preserved(tmp_path):
    obj = _minimal()
    obj["source"] = "unit"
    obj["data"][0]["paragraphs"][0]["qas"][0]["is_impossible"] = False
    obj["data"][0]["paragraphs"][0]["qas"][0]["answers"][0]["annotator"] = 3
    ds = read_dataset(_dump(tmp_path, obj))
    out = tmp_path / "out.json"
    write_dataset(ds, out)
    assert json.loads(out.read_text(encoding="utf-8")) == obj


def test_offsets_are_code_points():
    # "ó" is 2 bytes in UTF-8; a byte offset would be 1 too large
    ds = dataset_from_json(_minimal(context="nació en Wola", start=9, text="Wola"))
    assert ds.articles[0].paragraphs[0].qas[0].answers[0].answer_start == 9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 12))
def test_read_write_identity(tmp_path_factory, seed, n):
    ds = random_dataset(seed, n)
    out = tmp_path_factory.mktemp("rt") / "ds.json"
    write_dataset(ds, out)
    assert read_dataset(out) == ds
    assert check_spans(ds) == []
