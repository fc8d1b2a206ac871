from pathlib import Path

import pytest

from modgen.bench.corpus import default_corpus_dir, load_entry
from modgen.lang import load_program

CORPUS = default_corpus_dir()


def corpus_program(name: str):
    return load_entry(CORPUS / f"{name}.moo").program


@pytest.fixture(scope="session")
def consistency():
    return corpus_program("consistency")


@pytest.fixture(scope="session")
def album():
    return corpus_program("album")


@pytest.fixture(scope="session")
def artists():
    return corpus_program("artists")


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def program_of():
    return load_program
