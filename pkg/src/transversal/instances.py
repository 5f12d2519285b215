"""Plain-text instance files holding a collection of tournaments.

Layout (one item per line, ``\\n`` line endings)::

    transversal-instance 1
    n <n>
    m <m>
    labels <label_0> ... <label_{n-1}>      (optional)
    color <c>
    <row 0 of the adjacency matrix as 0/1 characters>
    ...
    <row n-1>
    color <c'>
    ...

Row ``u`` has a ``1`` in column ``v`` iff ``u -> v``.  Serialization is
canonical, so parsing and re-serializing a file reproduces it byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import ParameterError, Tournament, TournamentCollection

MAGIC = "transversal-instance"
VERSION = 1


class InstanceFormatError(ParameterError):
    pass


@dataclass(frozen=True)
class InstanceFile:
    n: int
    colors: tuple[int, ...]
    matrices: tuple[tuple[str, ...], ...]
    labels: tuple[str, ...] | None = None
    version: int = VERSION

    @property
    def m(self) -> int:
        return len(self.colors)

    def __post_init__(self):
        if self.version != VERSION:
            raise InstanceFormatError(f"unsupported format version {self.version}")
        if len(self.matrices) != len(self.colors) or not self.colors:
            raise InstanceFormatError("need one matrix per color and at least one color")
        if self.labels is not None and len(self.labels) != self.n:
            raise InstanceFormatError("need one label per vertex")
        for rows in self.matrices:
            if len(rows) != self.n or any(len(r) != self.n or set(r) - {"0", "1"} for r in rows):
                raise InstanceFormatError("matrix rows must be n characters of 0/1")

    @classmethod
    def from_collection(cls, coll: TournamentCollection, labels: Sequence[str] | None = None) -> "InstanceFile":
        if coll.vertices != tuple(range(coll.n)):
            raise ParameterError("instance files store collections on vertices 0..n-1")
        return cls(coll.n, tuple(coll.colors), tuple(tuple(t.to_strings()) for t in coll.members),
                   None if labels is None else tuple(labels))

    def to_collection(self) -> TournamentCollection:
        try:
            members = [Tournament.from_strings(rows) for rows in self.matrices]
        except ParameterError as exc:
            raise InstanceFormatError(f"matrix is not a tournament: {exc}") from None
        return TournamentCollection(members, self.colors)

    def dumps(self) -> str:
        lines = [f"{MAGIC} {self.version}", f"n {self.n}", f"m {self.m}"]
        if self.labels is not None:
            lines.append("labels " + " ".join(self.labels))
        for c, rows in zip(self.colors, self.matrices):
            lines.append(f"color {c}")
            lines.extend(rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "InstanceFile":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        it = iter(lines)

        def field(name: str) -> str:
            line = next(it, None)
            if line is None or not line.startswith(name + " "):
                raise InstanceFormatError(f"expected '{name} ...', got {line!r}")
            return line[len(name) + 1:]

        try:
            version = int(field(MAGIC))
            n = int(field("n"))
            m = int(field("m"))
        except ValueError:
            raise InstanceFormatError("malformed header") from None
        rest = list(it)
        labels = None
        if rest and rest[0].startswith("labels "):
            labels = tuple(rest.pop(0)[len("labels "):].split(" "))
        colors, matrices = [], []
        pos = 0
        for _ in range(m):
            if pos >= len(rest) or not rest[pos].startswith("color "):
                raise InstanceFormatError("expected a 'color <c>' line")
            try:
                colors.append(int(rest[pos][len("color "):]))
            except ValueError:
                raise InstanceFormatError("malformed color line") from None
            matrices.append(tuple(rest[pos + 1: pos + 1 + n]))
            pos += 1 + n
        if pos != len(rest):
            raise InstanceFormatError("trailing content after the last matrix")
        inst = cls(n, tuple(colors), tuple(matrices), labels, version)
        inst.to_collection()  # validates every matrix
        return inst

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="ascii", newline="\n")

    @classmethod
    def read(cls, path: str | Path) -> "InstanceFile":
        return cls.loads(Path(path).read_text(encoding="ascii"))
