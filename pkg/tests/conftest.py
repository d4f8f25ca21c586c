from pathlib import Path

import pytest

from pegrec import load_grammar

GRAMMARS = Path(__file__).resolve().parent.parent / "grammars"


@pytest.fixture(scope="session")
def grammar_dir() -> Path:
    return GRAMMARS


@pytest.fixture(scope="session")
def tiny_java():
    return load_grammar(str(GRAMMARS / "tiny_java.peg"))


@pytest.fixture(scope="session")
def tiny_java_labeled():
    return load_grammar(str(GRAMMARS / "tiny_java_labeled.peg"))


@pytest.fixture(scope="session")
def tiny_java_annotated_file():
    return load_grammar(str(GRAMMARS / "tiny_java_annotated.peg"))
