"""Corpus files: MiniOO sources tagged with the pattern they embody."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..lang import CheckedProgram, load_program

_PATTERN_RE = re.compile(r"^\s*//\s*pattern:\s*([A-Z_]+)\s*$", re.MULTILINE)


class Pattern(enum.Enum):
    STATE_INIT = "STATE_INIT"
    INDIRECT_CALLEE = "INDIRECT_CALLEE"
    PUBLIC_FIELD = "PUBLIC_FIELD"
    STATIC_UTIL = "STATIC_UTIL"
    PLAIN = "PLAIN"


@dataclass(frozen=True)
class Target:
    cls: str
    method: str

    @property
    def qualified(self) -> str:
        return f"{self.cls}.{self.method}"

    def __str__(self) -> str:
        return self.qualified


@dataclass
class CorpusEntry:
    file: Path
    program: CheckedProgram
    targets: list[Target]
    pattern: Pattern

    @property
    def name(self) -> str:
        return self.file.stem


def default_corpus_dir() -> Path:
    return Path(str(resources.files("modgen") / "corpus"))


def discover_targets(program: CheckedProgram) -> list[Target]:
    """Public methods with a body, in declaration order; constructors excluded."""
    out = []
    for c in program.program.classes:
        for m in c.methods:
            if m.public and m.body:
                out.append(Target(c.name, m.name))
    return out


def load_entry(path: Path | str) -> CorpusEntry:
    """Parse, typecheck and tag one corpus file.

    Raises :class:`~modgen.lang.LangError` on invalid source and
    ``OSError`` when the file cannot be read.
    """
    path = Path(path)
    source = path.read_text(encoding="utf-8")
    program = load_program(source)
    m = _PATTERN_RE.search(source)
    pattern = Pattern(m.group(1)) if m else Pattern.PLAIN
    return CorpusEntry(path, program, discover_targets(program), pattern)


def load_corpus(directory: Path | str | None = None) -> list[CorpusEntry]:
    directory = Path(directory) if directory is not None else default_corpus_dir()
    if not directory.is_dir():
        raise NotADirectoryError(f"{directory}: corpus directory not found")
    return [load_entry(p) for p in sorted(directory.glob("*.moo"))]
