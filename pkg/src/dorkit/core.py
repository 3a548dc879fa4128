"""Domain types: criteria hierarchies, performance tables, preference structures."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

ROOT_CODE = "0"
RATIO, INTERVAL = "ratio", "interval"
CARDINAL, DIFFERENCE_ORDINAL, RATIO_ORDINAL = "cardinal", "difference_ordinal", "ratio_ordinal"


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class CriterionNode:
    code: str
    parent: str | None
    direction: str | None = None  # 'increasing' | 'decreasing', leaves only


class CriterionHierarchy:
    """Tree of criteria; leaves are the elementary criteria carrying data."""

    def __init__(self, nodes: list[CriterionNode]):
        if not nodes:
            raise ValidationError("empty hierarchy spec")
        self._nodes = {}
        children = {}
        roots = []
        for node in nodes:
            if node.code in self._nodes:
                raise ValidationError(f"duplicate code {node.code!r}")
            if node.code == node.parent:
                raise ValidationError(f"cycle detected at {node.code!r}")
            self._nodes[node.code] = node
            children.setdefault(node.code, [])
            if node.parent is None:
                roots.append(node.code)
            else:
                children.setdefault(node.parent, []).append(node.code)
        if len(roots) != 1:
            raise ValidationError(f"expected exactly one root, got {roots}")
        self.root = roots[0]
        for node in nodes:
            if node.parent is not None and node.parent not in self._nodes:
                raise ValidationError(f"unknown parent {node.parent!r} of {node.code!r}")
        self._children = {c: tuple(children[c]) for c in self._nodes}
        # reachability doubles as the cycle check: parent links that loop
        # never reach the root
        seen = set()
        stack = [self.root]
        while stack:
            code = stack.pop()
            if code in seen:
                raise ValidationError(f"cycle detected at {code!r}")
            seen.add(code)
            stack.extend(self._children[code])
        if seen != set(self._nodes):
            raise ValidationError(f"cycle detected: unreachable nodes {sorted(set(self._nodes) - seen)}")
        for code in self._nodes:
            if self.is_leaf(code):
                if self._nodes[code].direction not in ("increasing", "decreasing"):
                    raise ValidationError(f"leaf {code!r} without preference direction")
        self.leaves = tuple(c for c in self._iter_preorder() if self.is_leaf(c))

    def _iter_preorder(self):
        stack = [self.root]
        while stack:
            code = stack.pop(0)
            yield code
            stack = list(self._children[code]) + stack

    def __contains__(self, code):
        return code in self._nodes

    def node(self, code):
        try:
            return self._nodes[code]
        except KeyError:
            raise ValidationError(f"unknown criterion {code!r}") from None

    def children(self, code):
        self.node(code)
        return self._children[code]

    def is_leaf(self, code):
        return not self.children(code)

    def subtree_leaves(self, code):
        """The elementary criteria under a node (the node itself if a leaf)."""
        out = []
        stack = [code]
        while stack:
            c = stack.pop(0)
            if self.is_leaf(c):
                out.append(c)
            else:
                stack = list(self._children[c]) + stack
        if not out:
            raise ValidationError(f"node {code!r} has no elementary criteria")
        return tuple(out)

    def non_leaf_codes(self):
        return tuple(c for c in self._iter_preorder() if not self.is_leaf(c))

    def to_json(self):
        return [
            {"code": n.code, "parent": n.parent, "direction": n.direction}
            for n in self._nodes.values()
        ]

    @classmethod
    def from_json(cls, data):
        return cls([CriterionNode(d["code"], d.get("parent"), d.get("direction")) for d in data])

    @classmethod
    def flat(cls, leaf_codes, directions=None):
        """Root plus one level of leaves."""
        directions = directions or {}
        nodes = [CriterionNode(ROOT_CODE, None)]
        nodes += [
            CriterionNode(c, ROOT_CODE, directions.get(c, "increasing")) for c in leaf_codes
        ]
        return cls(nodes)


def build_hierarchy(spec):
    """spec: iterable of (code, parent, direction) triples, parent None for root."""
    return CriterionHierarchy([CriterionNode(*row) for row in spec])


class PerformanceTable:
    """Alternatives x elementary criteria, normalized so every column is
    increasing-is-better (decreasing columns are negated on construction)."""

    def __init__(self, alternatives, leaf_codes, values, hierarchy=None):
        self.alternatives = list(alternatives)
        if len(set(self.alternatives)) != len(self.alternatives):
            raise ValidationError("duplicate alternative ids")
        self.leaf_codes = list(leaf_codes)
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.alternatives), len(self.leaf_codes)):
            raise ValidationError(
                f"values shape {values.shape} does not match "
                f"{len(self.alternatives)}x{len(self.leaf_codes)}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("non-finite performance value")
        self.raw_values = values.copy()
        self.values = values.copy()
        self.hierarchy = hierarchy
        if hierarchy is not None:
            missing = set(hierarchy.leaves) ^ set(self.leaf_codes)
            if missing:
                raise ValidationError(f"leaf mismatch with hierarchy: {sorted(missing)}")
            for j, code in enumerate(self.leaf_codes):
                if hierarchy.node(code).direction == "decreasing":
                    self.values[:, j] = -self.values[:, j]
        self._row = {a: i for i, a in enumerate(self.alternatives)}
        self._col = {c: j for j, c in enumerate(self.leaf_codes)}

    def row(self, alternative):
        try:
            return self.values[self._row[alternative]]
        except KeyError:
            raise ValidationError(f"unknown alternative {alternative!r}") from None

    def value(self, alternative, leaf):
        if leaf not in self._col:
            raise ValidationError(f"unknown criterion {leaf!r}")
        return float(self.row(alternative)[self._col[leaf]])

    def column(self, leaf):
        if leaf not in self._col:
            raise ValidationError(f"unknown criterion {leaf!r}")
        return self.values[:, self._col[leaf]]

    def domain(self, leaf):
        """X_i: sorted distinct observed values on a leaf (post-normalization)."""
        return np.unique(self.column(leaf))

    def to_json(self):
        return {
            "alternatives": self.alternatives,
            "criteria": self.leaf_codes,
            "values": self.raw_values.tolist(),
        }

    @classmethod
    def from_json(cls, data, hierarchy=None):
        return cls(data["alternatives"], data["criteria"], data["values"], hierarchy)

    @classmethod
    def from_csv(cls, text, hierarchy=None):
        """Header: id,<leaf codes...>; one row per alternative."""
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("empty CSV") from None
        leaf_codes = [h.strip() for h in header[1:]]
        alternatives, rows = [], []
        for line in reader:
            if not line or all(not cell.strip() for cell in line):
                continue
            alternatives.append(line[0].strip())
            try:
                rows.append([float(x) for x in line[1:]])
            except ValueError as exc:
                raise ValidationError(f"bad numeric cell in row {line[0]!r}: {exc}") from None
        return cls(alternatives, leaf_codes, rows, hierarchy)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["id"] + self.leaf_codes)
        for a, row in zip(self.alternatives, self.raw_values):
            writer.writerow([a] + [repr(float(x)) for x in row])
        return buf.getvalue()


def dominates(table: PerformanceTable, a, b, node=ROOT_CODE, hierarchy=None):
    """a dominates b on the node's subtree: >= everywhere and > somewhere."""
    hierarchy = hierarchy or table.hierarchy
    if hierarchy is None:
        leaves = table.leaf_codes
    else:
        leaves = hierarchy.subtree_leaves(node)
    ra, rb = table.row(a), table.row(b)
    cols = [table._col[c] for c in leaves]
    diffs = ra[cols] - rb[cols]
    return bool(np.all(diffs >= 0.0) and np.any(diffs > 0.0))


@dataclass(frozen=True)
class BlankCard:
    """Blank-card count between two consecutive levels: exact, bounded on one
    or both sides, or fully unknown."""

    lo: int | None = None
    hi: int | None = None

    def __post_init__(self):
        for v in (self.lo, self.hi):
            if v is not None and (int(v) != v or v < 0):
                raise ValidationError(f"card bounds must be non-negative integers, got {v!r}")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValidationError(f"card interval [{self.lo}, {self.hi}] is empty")

    @classmethod
    def exact(cls, e):
        return cls(e, e)

    @classmethod
    def between(cls, lo, hi):
        return cls(lo, hi)

    @classmethod
    def at_least(cls, lo):
        return cls(lo, None)

    @classmethod
    def at_most(cls, hi):
        return cls(None, hi)

    @classmethod
    def unknown(cls):
        return cls(None, None)

    @property
    def is_exact(self):
        return self.lo is not None and self.lo == self.hi

    @property
    def case(self):
        """The five-way classification of what the DM could specify."""
        if self.is_exact:
            return "A"
        if self.lo is not None and self.hi is not None:
            return "B"
        if self.lo is not None:
            return "C"
        if self.hi is not None:
            return "D"
        return "E"

    def to_json(self):
        if self.is_exact:
            return {"exact": self.lo}
        out = {}
        if self.lo is not None:
            out["lo"] = self.lo
        if self.hi is not None:
            out["hi"] = self.hi
        return out

    @classmethod
    def from_json(cls, data):
        if "exact" in data:
            return cls.exact(data["exact"])
        return cls(data.get("lo"), data.get("hi"))


@dataclass
class PreferenceStructure:
    """Deck-of-cards preference information for one criterion node.

    levels are ordered worst to best; blank_cards[h] sits between level h-1
    and level h, with blank_cards[0] between the fictitious zero alternative
    and the worst level.
    """

    node_code: str
    levels: list[list[str]]
    blank_cards: list[BlankCard]
    scale: str = RATIO
    intensity: str = CARDINAL

    def __post_init__(self):
        if self.scale not in (RATIO, INTERVAL):
            raise ValidationError(f"unknown scale {self.scale!r}")
        if self.intensity not in (CARDINAL, DIFFERENCE_ORDINAL, RATIO_ORDINAL):
            raise ValidationError(f"unknown intensity semantics {self.intensity!r}")
        if not self.levels or any(not lv for lv in self.levels):
            raise ValidationError("levels must be non-empty")
        seen = set()
        for lv in self.levels:
            for a in lv:
                if a in seen:
                    raise ValidationError(f"alternative {a!r} appears in more than one level")
                seen.add(a)
        if len(self.blank_cards) != len(self.levels):
            raise ValidationError(
                f"expected {len(self.levels)} blank-card entries (indices 0..s-1), "
                f"got {len(self.blank_cards)}"
            )

    @property
    def s(self):
        return len(self.levels)

    @property
    def reference_set(self):
        return [a for lv in self.levels for a in lv]

    @property
    def all_exact(self):
        return all(c.is_exact for c in self.blank_cards)

    def exact_cards(self):
        if not self.all_exact:
            raise ValidationError("preference structure has non-exact blank cards")
        return [c.lo for c in self.blank_cards]

    def level_of(self, alternative):
        for h, lv in enumerate(self.levels, start=1):
            if alternative in lv:
                return h
        raise ValidationError(f"{alternative!r} is not a reference alternative")

    def validate_against(self, table: PerformanceTable):
        for a in self.reference_set:
            table.row(a)

    def to_json(self):
        return {
            "node": self.node_code,
            "levels": self.levels,
            "cards": [c.to_json() for c in self.blank_cards],
            "scale": self.scale,
            "intensity": self.intensity,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["node"],
            [list(lv) for lv in data["levels"]],
            [BlankCard.from_json(c) for c in data["cards"]],
            data.get("scale", RATIO),
            data.get("intensity", CARDINAL),
        )


def dumps(obj):
    """Stable JSON used for hashing and persistence."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
