import json

import pytest

from asysig.catalog import CORPORA, DEFAULT_CORPUS, SPECS, build_systems, data_path, load_systems, render
from asysig.constructions import FundamentalModeSpec, TransferSpec
from asysig.dsl import format_corpus, format_system, parse_corpus

RENDERED = render()


@pytest.mark.parametrize("name", sorted(RENDERED))
def test_shipped_file_matches_builders(name):
    assert data_path(name).read_text() == RENDERED[name]


@pytest.mark.parametrize("name", sorted(CORPORA))
def test_corpus_round_trip_is_byte_exact(name):
    text = data_path(name).read_text()
    assert format_corpus(parse_corpus(text)) == text


def test_systems_file_round_trip():
    text = data_path("systems.dsl").read_text()
    assert "".join(format_system(f) for f in load_systems().values()) == text
    assert list(load_systems()) == list(build_systems())


def test_every_system_has_a_corpus():
    assert set(DEFAULT_CORPUS) == set(build_systems())
    assert set(DEFAULT_CORPUS.values()) <= set(CORPORA)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_specs_load(name):
    data = json.loads(data_path(name).read_text())
    cls = TransferSpec if name.startswith("transfer") else FundamentalModeSpec
    assert cls.from_json(data) == SPECS[name]()
