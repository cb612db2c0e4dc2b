"""Bundled knowledge base of Bluetooth and Android attacks and mitigations.

The data lives in ``data/catalog.agc``, a line-oriented text file::

    #!agc 1
    attack "Blueover" surface=bluetooth
      author "Minar [24]"
      mitigation "Keep device address secret"
      tags bluetooth,device_address

An ``attack`` line opens a record; ``author``, ``mitigation`` and ``tags``
lines attach to the most recent one.  Indentation is cosmetic.
"""

from __future__ import annotations

import os
import re
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from agraph.errors import MalformedCatalog

SURFACES = ("bluetooth", "android")
CATALOG_ENV = "AGRAPH_CATALOG"
FORMAT_VERSION = 1

_STRING = r'"((?:[^"\\]|\\.)*)"'
_ATTACK = re.compile(rf"attack\s+{_STRING}(?P<rest>.*)\Z")
_TEXT_LINE = re.compile(rf"(author|mitigation)\s+{_STRING}\s*\Z")
_TAGS = re.compile(r"tags\s+([a-z0-9_]+(?:\s*,\s*[a-z0-9_]+)*)\s*\Z")
_SURFACE = re.compile(r"\s*surface=(\S+)\s*\Z")


class CatalogWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MitigationRecord:
    attack_name: str
    surface: str
    authors: tuple[str, ...] = ()
    mitigations: tuple[str, ...] = ()
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Catalog:
    records: tuple[MitigationRecord, ...] = ()
    source: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass(frozen=True)
class CatalogDiagnostic:
    line: int
    field: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.field}: {self.message}"


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def parse_catalog(text: str, source: str = "<string>") -> Catalog:
    records: list[MitigationRecord] = []
    diags: list[CatalogDiagnostic] = []
    current: dict | None = None
    broken = False  # inside a record whose header was rejected

    def close() -> None:
        if current is not None:
            records.append(MitigationRecord(
                attack_name=current["name"],
                surface=current["surface"],
                authors=tuple(current["authors"]),
                mitigations=tuple(current["mitigations"]),
                tags=frozenset(current["tags"]),
            ))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#!agc"):
            if line[len("#!agc"):].strip() != str(FORMAT_VERSION):
                diags.append(CatalogDiagnostic(lineno, "header", f"unsupported version in {line!r}"))
            continue
        if line.startswith("#"):
            continue
        m = _ATTACK.match(line)
        if m:
            close()
            current = None
            broken = True
            name = _unescape(m.group(1))
            sm = _SURFACE.match(m.group("rest"))
            if not name.strip():
                diags.append(CatalogDiagnostic(lineno, "attack", "attack name is empty"))
            elif sm is None:
                diags.append(CatalogDiagnostic(lineno, "surface", "missing surface=<bluetooth|android>"))
            elif sm.group(1) not in SURFACES:
                diags.append(CatalogDiagnostic(lineno, "surface", f"unknown surface {sm.group(1)!r}"))
            else:
                current = {"name": name, "surface": sm.group(1), "authors": [], "mitigations": [], "tags": set()}
                broken = False
            continue
        m = _TEXT_LINE.match(line)
        if m and current is not None:
            current[m.group(1) + "s"].append(_unescape(m.group(2)))
            continue
        m = _TAGS.match(line)
        if m and current is not None:
            current["tags"].update(t.strip() for t in m.group(1).split(","))
            continue
        keyword = line.split()[0]
        if keyword in ("author", "mitigation", "tags"):
            if broken:
                continue
            if current is None:
                diags.append(CatalogDiagnostic(lineno, keyword, "no open attack record"))
            else:
                diags.append(CatalogDiagnostic(lineno, keyword, f"cannot parse {line!r}"))
        else:
            diags.append(CatalogDiagnostic(lineno, keyword, "expected attack, author, mitigation or tags"))
    close()
    if diags:
        raise MalformedCatalog(diags)
    if not records:
        warnings.warn(f"catalog {source} holds no records", CatalogWarning, stacklevel=2)
    return Catalog(tuple(records), source)


def serialize_catalog(catalog: Catalog) -> str:
    out = [f"#!agc {FORMAT_VERSION}"]
    for r in catalog.records:
        out.append("")
        out.append(f'attack "{_escape(r.attack_name)}" surface={r.surface}')
        out += [f'  author "{_escape(a)}"' for a in r.authors]
        out += [f'  mitigation "{_escape(m)}"' for m in r.mitigations]
        if r.tags:
            out.append(f"  tags {','.join(sorted(r.tags))}")
    return "\n".join(out) + "\n"


def bundled_catalog_path() -> Path:
    return Path(str(resources.files("agraph") / "data" / "catalog.agc"))


def default_catalog_path() -> Path:
    """The catalog named by ``$AGRAPH_CATALOG``, else the bundled one."""
    override = os.environ.get(CATALOG_ENV)
    return Path(override) if override else bundled_catalog_path()


def load_catalog(source: str | os.PathLike | None = None) -> Catalog:
    """Load a catalog file; with no argument, the bundled catalog."""
    path = Path(source) if source is not None else bundled_catalog_path()
    return parse_catalog(path.read_text(encoding="utf-8"), source=str(path))


def lookup(
    catalog: Catalog,
    surface: str | None = None,
    tag: str | None = None,
    name: str | None = None,
) -> list[MitigationRecord]:
    """Records matching every given filter, in file order.

    ``name`` is a case-insensitive substring of the attack name.
    """
    out = []
    for r in catalog.records:
        if surface is not None and r.surface != surface:
            continue
        if tag is not None and tag not in r.tags:
            continue
        if name is not None and name.casefold() not in r.attack_name.casefold():
            continue
        out.append(r)
    return out


def matching_records(catalog: Catalog, tags: frozenset[str] | set[str]) -> list[MitigationRecord]:
    """Records sharing a specific tag with ``tags``.

    Surface names are ignored for matching: every record of a surface
    carries its surface as a tag, so they would match everything.
    """
    wanted = set(tags) - set(SURFACES)
    return [r for r in catalog.records if wanted & (r.tags - set(SURFACES))]
