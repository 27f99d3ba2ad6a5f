"""Embedded reference data: quite sincere representations with weights, the
critical λ-families, their maximal subdimension tables and two weight cones.

The data lives in ``data/catalog.txt`` in the same notation the parser
accepts everywhere else.  Loading validates every record; a record that
parses but contradicts itself (for instance a witness that does not produce
its listed subdimension vector) is kept and flagged as a discrepancy rather
than corrected.
"""

from __future__ import annotations

import re
from enum import Enum
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import BudgetExceeded, CatalogCorrupt, ParseError, PosetRepError
from .linalg import Subspace, unit_vector
from .notation import is_symbolic, parse_poset, parse_row, parse_space, split_top
from .poset import Poset
from .reps import DimVector, SubspaceRep, dim_vector, extended_rep
from .stability import SubdimVector, Weight, restrict

FAMILY_LAMBDAS = (2, 3, 5)


def _ints(text: str) -> tuple:
    return tuple(int(t) for t in re.split(r"[;,]", text.strip().strip("()")) if t.strip())


def _fracs(text: str) -> tuple:
    return tuple(Fraction(t.strip()) for t in text.strip().strip("()").split(",") if t.strip())


def normalize_id(name: str) -> str:
    return re.sub(r"\s+", "", name)


@dataclass
class CatalogEntry:
    id: str
    kind: str                    # "row", "family" or "example"
    poset: Poset
    row: str                     # row literal, possibly with λ
    weight: Weight | None = None
    dim_vector_claim: DimVector | None = None
    starred: bool = False
    base: str | None = None      # families: id of the row they extend
    extend: tuple = ()
    new_element: str | None = None
    probes: tuple = ()           # 1-based indices of v1, v2
    source: str = ""
    discrepancies: list = field(default_factory=list)

    @property
    def parametric(self) -> bool:
        inner = self.row.strip()[1:-1]
        return any(is_symbolic(s) for s in split_top(inner, ",;")[1:] if s)

    def rep(self, lam=None) -> SubspaceRep:
        if self.parametric and lam is None:
            raise ParseError(f"{self.id} depends on λ; pass a value")
        r = parse_row(self.row, self.poset, lam)
        return SubspaceRep(r.poset, r.ambient_dim, r.spaces, name=self.id)


@dataclass
class TableRow:
    vector: tuple                # (k; c_1, ..., c_n)
    witness: str
    failing_lambdas: tuple = ()  # λ values where the witness misses the vector

    def subspace(self, ambient_dim: int, lam=None) -> Subspace:
        return parse_space(self.witness, ambient_dim, lam)

    def subdim(self, ambient_dim: int, lam=None) -> SubdimVector:
        return SubdimVector(self.vector[0], tuple(self.vector[1:]),
                            self.subspace(ambient_dim, lam))

    @property
    def quarantined(self) -> bool:
        return bool(self.failing_lambdas)


@dataclass
class SubdimTable:
    family: str
    rows: list

    def vectors(self, ambient_dim: int, lam=None) -> list[SubdimVector]:
        return [r.subdim(ambient_dim, lam) for r in self.rows]


@dataclass
class ConeData:
    entry: str
    subdims: list = field(default_factory=list)       # tuples (k; c...)
    matrix: list = field(default_factory=list)        # rows of Fractions (subdim block)
    rays: list = field(default_factory=list)
    interior: list = field(default_factory=list)
    boundary: list = field(default_factory=list)


class Catalog:
    def __init__(self):
        self.posets: dict[str, Poset] = {}
        self.entries: dict[str, CatalogEntry] = {}
        self.tables: dict[str, SubdimTable] = {}
        self.cones: dict[str, ConeData] = {}

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, name) -> CatalogEntry:
        key = normalize_id(name)
        if key not in self.entries:
            raise KeyError(name)
        return self.entries[key]

    def rows(self) -> list[CatalogEntry]:
        return [e for e in self if e.kind == "row"]

    def families(self) -> list[CatalogEntry]:
        return [e for e in self if e.kind == "family"]

    def poset(self, name: str) -> Poset:
        return self.posets[normalize_id(name)]

    def to_json(self) -> dict:
        out = {"posets": {k: p.describe() for k, p in self.posets.items()}, "entries": []}
        for e in self:
            out["entries"].append({
                "id": e.id, "kind": e.kind, "poset": e.poset.name, "row": e.row,
                "weight": [str(a) for a in e.weight] if e.weight else None,
                "dim_vector_claim": list(e.dim_vector_claim.as_tuple()) if e.dim_vector_claim else None,
                "starred": e.starred, "discrepancies": list(e.discrepancies)})
        out["tables"] = {k: [{"vector": list(r.vector), "witness": r.witness,
                              "failing_lambdas": list(r.failing_lambdas)} for r in t.rows]
                         for k, t in self.tables.items()}
        return out


# --------------------------------------------------------------------------
# reading


def _records(text: str) -> list[tuple[str, list[str]]]:
    recs = []
    for raw in text.splitlines():
        # '#' starts a comment only at line start or after whitespace; ids use "name#k"
        line = re.sub(r"(^|\s)#.*$", "", raw).rstrip()
        if not line.strip():
            continue
        if not raw[0].isspace():
            recs.append((line.strip(), []))
        else:
            if not recs:
                raise CatalogCorrupt(f"continuation line without a record: {raw!r}")
            recs[-1][1].append(line.strip())
    return recs


_HEAD = re.compile(r"(entry|family|example)\s+(\S+)\s+on\s+(\S+)(.*)")


def _parse_head_options(rest: str) -> dict:
    opts = {}
    m = re.search(r"weight\s+(\([^)]*\))", rest)
    if m:
        opts["weight"] = m.group(1)
    m = re.search(r"dim\s+(\([^)]*\))", rest)
    if m:
        opts["dim"] = m.group(1)
    opts["star"] = bool(re.search(r"\bstar\b", rest))
    return opts


def _join_row(lines: list[str]) -> str:
    return " ".join(lines)


def parse_catalog(text: str, source: str = "catalog") -> Catalog:
    cat = Catalog()
    for head, body in _records(text):
        try:
            if head.startswith("poset"):
                p = parse_poset(head)
                cat.posets[normalize_id(p.name)] = p
            elif _HEAD.match(head):
                kind, eid, pname, rest = _HEAD.match(head).groups()
                opts = _parse_head_options(rest)
                poset = cat.posets[normalize_id(pname)]
                e = CatalogEntry(id=eid, kind={"entry": "row"}.get(kind, kind), poset=poset,
                                 row="", source=source, starred=opts["star"])
                if "weight" in opts:
                    e.weight = Weight(_fracs(opts["weight"]))
                if "dim" in opts:
                    d = _ints(opts["dim"])
                    e.dim_vector_claim = DimVector(d[0], tuple(d[1:]))
                row_lines = []
                for line in body:
                    if line.startswith("base "):
                        m = re.fullmatch(r"base\s+(\S+)\s+extend\s+(\S+)\s+new\s+(\S+)\s+probes\s+e(\d+)\s+e(\d+)", line)
                        if not m:
                            raise CatalogCorrupt(f"bad base line {line!r}")
                        e.base = m.group(1)
                        e.extend = () if m.group(2) == "-" else tuple(m.group(2).split(","))
                        e.new_element = m.group(3)
                        e.probes = (int(m.group(4)), int(m.group(5)))
                    else:
                        row_lines.append(line)
                e.row = _join_row(row_lines)
                cat.entries[normalize_id(eid)] = e
            elif head.startswith("table"):
                fam = head.split(None, 1)[1].strip()
                rows = []
                for line in body:
                    m = re.fullmatch(r"(\([\d;,]+\))\s+(.+)", line)
                    if not m:
                        raise CatalogCorrupt(f"bad table line {line!r}")
                    rows.append(TableRow(_ints(m.group(1)), m.group(2).strip()))
                cat.tables[normalize_id(fam)] = SubdimTable(fam, rows)
            elif head.startswith("cone"):
                cd = ConeData(head.split(None, 1)[1].strip())
                section = None
                for line in body:
                    word, _, rest = line.partition(" ")
                    if word in ("subdims", "matrix", "rays", "interior", "boundary"):
                        section = word
                        line = rest
                    if not line.strip():
                        continue
                    if section == "matrix":
                        cd.matrix.append(tuple(Fraction(t) for t in line.split()))
                    elif section == "subdims":
                        cd.subdims += [_ints(t) for t in re.findall(r"\([^)]*\)", line)]
                    else:
                        target = getattr(cd, section)
                        target += [_fracs(t) for t in re.findall(r"\([^)]*\)", line)]
                cat.cones[normalize_id(cd.entry)] = cd
            else:
                raise CatalogCorrupt(f"unknown record {head!r}")
        except CatalogCorrupt:
            raise
        except (PosetRepError, KeyError, ValueError) as exc:
            raise CatalogCorrupt(f"cannot read record {head!r}: {exc}") from exc
    _validate(cat)
    return cat


def _validate(cat: Catalog):
    for e in cat:
        lams = FAMILY_LAMBDAS if e.parametric else (None,)
        for lam in lams:
            try:
                rep = e.rep(lam)
            except PosetRepError as exc:
                raise CatalogCorrupt(f"{e.id}: {exc}") from exc
            if e.weight is not None and len(e.weight) != len(e.poset):
                raise CatalogCorrupt(f"{e.id}: weight length {len(e.weight)} for {len(e.poset)} elements")
            if e.dim_vector_claim is not None and dim_vector(rep) != e.dim_vector_claim:
                e.discrepancies.append(f"dimension vector at λ={lam} is {dim_vector(rep).as_tuple()}")
            if e.kind == "family" and e.base is not None:
                derived = derive_family_member(cat, e, lam)
                if derived.spaces != rep.spaces:
                    e.discrepancies.append(f"listed member differs from the extension at λ={lam}")
    for key, table in cat.tables.items():
        fam = cat.entries.get(key)
        if fam is None:
            raise CatalogCorrupt(f"table {table.family} has no family")
        n = len(fam.poset)
        for row in table.rows:
            if len(row.vector) != n + 1:
                raise CatalogCorrupt(f"table {table.family}: vector {row.vector} has wrong length")
            failing = []
            for lam in FAMILY_LAMBDAS:
                rep = fam.rep(lam)
                try:
                    U = row.subspace(rep.ambient_dim, lam)
                except PosetRepError as exc:
                    raise CatalogCorrupt(f"table {table.family}: {exc}") from exc
                if U.is_zero() or restrict(rep, U).as_tuple() != row.vector:
                    failing.append(lam)
            row.failing_lambdas = tuple(failing)


def derive_family_member(cat: Catalog, fam: CatalogEntry, lam) -> SubspaceRep:
    """Rebuild a family member from its base row by one-point extension."""
    base = cat[fam.base].rep()
    n = base.ambient_dim
    v1, v2 = unit_vector(n, fam.probes[0]), unit_vector(n, fam.probes[1])
    ext = extended_rep(base, fam.extend, v1, v2, lam, new=fam.new_element)
    return ext.relabel(fam.poset)


_CACHE: dict = {}


def load_catalog(path=None) -> Catalog:
    key = str(path)
    if key not in _CACHE:
        if path is None:
            text = resources.files("posetunit").joinpath("data/catalog.txt").read_text("utf-8")
            source = "embedded catalog"
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
            source = str(path)
        _CACHE[key] = parse_catalog(text, source)
    return _CACHE[key]


def critical_family(name: str, lam) -> SubspaceRep:
    """Member of the λ-family on a critical poset (element order of the poset)."""
    cat = load_catalog()
    e = cat[name]
    if e.kind != "family":
        raise KeyError(f"{name} is not a family")
    return e.rep(lam)


# --------------------------------------------------------------------------
# regression driver


class Check(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNVERIFIED = "unverified"
    QUARANTINED = "quarantined"


@dataclass(frozen=True)
class ReportLine:
    entry: str
    check: str
    status: Check
    detail: str = ""
    lam: object = None

    def render(self) -> str:
        at = f" [λ={self.lam}]" if self.lam is not None else ""
        tail = f": {self.detail}" if self.detail else ""
        return f"{self.status.value:11s} {self.entry}{at} {self.check}{tail}"


@dataclass
class CatalogReport:
    lines: list = field(default_factory=list)
    seed: int = 0

    @property
    def ok(self) -> bool:
        return not any(l.status is Check.FAIL for l in self.lines)

    def counts(self) -> dict:
        out = {c.value: 0 for c in Check}
        for l in self.lines:
            out[l.status.value] += 1
        return out

    def failures(self) -> list:
        return [l for l in self.lines if l.status is Check.FAIL]

    def to_json(self) -> dict:
        return {"seed": self.seed, "ok": self.ok, "counts": self.counts(),
                "lines": [{"entry": l.entry, "check": l.check, "status": l.status.value,
                           "detail": l.detail, "lambda": None if l.lam is None else str(l.lam)}
                          for l in self.lines]}


def _exact_lines(cat: Catalog, e: CatalogEntry, rep: SubspaceRep, lam, budget: int, seed: int):
    from .stability import is_stable, search_subdims

    table = cat.tables.get(normalize_id(e.id))
    if table is not None:
        subdims, source = table.vectors(rep.ambient_dim, lam), "listed subdimension vectors"
    else:
        try:
            subdims = search_subdims(rep, budget=budget, seed=seed)
        except BudgetExceeded as exc:
            return ReportLine(e.id, "stability (exact)", Check.UNVERIFIED, str(exc), lam)
        source = f"{len(subdims)} searched subdimension vectors"
    v = is_stable(rep, e.weight, subdims)
    detail = f"{v.status.value} over {source}"
    if v.vector is not None and not v.stable:
        detail += f"; tight/violating {v.vector!r}"
    return ReportLine(e.id, "stability (exact)", Check.PASS if v.stable else Check.FAIL, detail, lam)


def _flow_line(e: CatalogEntry, rep: SubspaceRep, lam, params, tol: float):
    from .flow import FlowStatus, flow

    try:
        r = flow(rep, e.weight, params)
    except PosetRepError as exc:
        return ReportLine(e.id, "flow", Check.FAIL, str(exc), lam)
    detail = f"{r.status.value} after {r.iterations} iterations, residual {r.final_residual:.3g}"
    if r.status is FlowStatus.CONVERGED and r.final_residual < tol:
        status = Check.PASS
    elif r.status is FlowStatus.MAX_ITERS:
        status = Check.UNVERIFIED
    else:
        status = Check.FAIL
    return ReportLine(e.id, "flow", status, detail, lam)


def verify_catalog(cat: Catalog | None = None, engines=("exact", "flow"), budget: int = 4096,
                   lams=FAMILY_LAMBDAS, seed: int = 0, flow_params=None,
                   flow_tol: float = 1e-8, entries=None) -> CatalogReport:
    """Re-check every entry with the requested engines; failures are report lines."""
    from .reps import is_quite_sincere

    cat = cat if cat is not None else load_catalog()
    report = CatalogReport(seed=seed)
    add = report.lines.append
    wanted = None if entries is None else {normalize_id(x) for x in entries}
    for e in cat:
        if wanted is not None and normalize_id(e.id) not in wanted:
            continue
        for lam in (lams if e.parametric else (None,)):
            try:
                rep = e.rep(lam)
            except PosetRepError as exc:
                add(ReportLine(e.id, "nesting", Check.FAIL, str(exc), lam))
                continue
            add(ReportLine(e.id, "nesting", Check.PASS, "", lam))
            if e.dim_vector_claim is not None:
                d = dim_vector(rep)
                ok = d == e.dim_vector_claim
                add(ReportLine(e.id, "dimension vector", Check.PASS if ok else Check.FAIL,
                               str(d.as_tuple()), lam))
            if e.kind == "row":
                qs = is_quite_sincere(rep, seed=seed)
                detail = "" if qs else f"{qs.clause} ({qs.element})"
                add(ReportLine(e.id, "quite sincere", Check.PASS if qs else Check.FAIL, detail, lam))
            if e.weight is not None:
                if "exact" in engines:
                    add(_exact_lines(cat, e, rep, lam, budget, seed))
                if "flow" in engines:
                    add(_flow_line(e, rep, lam, flow_params, flow_tol))
        table = cat.tables.get(normalize_id(e.id))
        if table is not None:
            for row in table.rows:
                if row.quarantined:
                    add(ReportLine(e.id, f"witness {row.vector}", Check.QUARANTINED,
                                   f"{row.witness} misses the vector at λ ∈ {list(row.failing_lambdas)}"))
                else:
                    add(ReportLine(e.id, f"witness {row.vector}", Check.PASS, row.witness))
    return report
