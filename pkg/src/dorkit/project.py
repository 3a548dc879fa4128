"""File-based project persistence: inputs as diffable JSON/CSV under one
directory, analysis runs as immutable artifacts stamped with the hash of the
inputs they were computed from."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import pathlib
import uuid

from .core import (
    CriterionHierarchy,
    PerformanceTable,
    PreferenceStructure,
    ValidationError,
    dumps,
)
from .mchp import HierarchicalPreferences
from .models import PIECEWISE, ValueModelSpec

FIT, ROR, SMAA = "fit", "ror", "smaa"


class ProjectError(ValueError):
    pass


class Project:
    def __init__(self, path):
        self.path = pathlib.Path(path)

    @classmethod
    def create(cls, path, project_id=None):
        p = cls(path)
        p.path.mkdir(parents=True, exist_ok=True)
        (p.path / "runs").mkdir(exist_ok=True)
        meta = {"id": project_id or p.path.name}
        (p.path / "project.json").write_text(json.dumps(meta, indent=2))
        return p

    @classmethod
    def open(cls, path):
        p = cls(path)
        if not (p.path / "project.json").exists():
            raise ProjectError(f"no project at {p.path}")
        return p

    @property
    def meta(self):
        return json.loads((self.path / "project.json").read_text())

    # -- inputs -------------------------------------------------------------

    def save_hierarchy(self, hierarchy: CriterionHierarchy):
        (self.path / "hierarchy.json").write_text(json.dumps(hierarchy.to_json(), indent=2))

    def hierarchy(self) -> CriterionHierarchy:
        f = self.path / "hierarchy.json"
        if not f.exists():
            raise ProjectError("project has no hierarchy")
        return CriterionHierarchy.from_json(json.loads(f.read_text()))

    def save_table_csv(self, text):
        PerformanceTable.from_csv(text, self.hierarchy())  # validate before storing
        (self.path / "table.csv").write_text(text)

    def table(self) -> PerformanceTable:
        f = self.path / "table.csv"
        if not f.exists():
            raise ProjectError("project has no performance table")
        return PerformanceTable.from_csv(f.read_text(), self.hierarchy())

    def save_preferences(self, node, prefs: PreferenceStructure):
        data = self.preferences_json()
        data[node] = prefs.to_json()
        (self.path / "preferences.json").write_text(json.dumps(data, indent=2))

    def delete_preferences(self, node):
        data = self.preferences_json()
        data.pop(node, None)
        (self.path / "preferences.json").write_text(json.dumps(data, indent=2))

    def preferences_json(self):
        f = self.path / "preferences.json"
        return json.loads(f.read_text()) if f.exists() else {}

    def preferences(self) -> HierarchicalPreferences:
        data = self.preferences_json()
        if not data:
            raise ProjectError("no assessed nodes")
        return HierarchicalPreferences.from_json(data, self.hierarchy())

    def save_model(self, kind, options=None):
        (self.path / "model.json").write_text(json.dumps(
            {"kind": kind, "options": options or {}}, indent=2))

    def model_json(self):
        f = self.path / "model.json"
        return json.loads(f.read_text()) if f.exists() else {"kind": "ws", "options": {}}

    def model_spec(self) -> ValueModelSpec:
        data = self.model_json()
        kind = data["kind"]
        hierarchy = self.hierarchy()
        if kind == "ws":
            return ValueModelSpec.weighted_sum(hierarchy)
        if kind == "choquet2":
            return ValueModelSpec.choquet2(hierarchy)
        if kind == "ga":
            return ValueModelSpec.general_additive(hierarchy, self.table())
        if kind == "pl":
            segments = int(data["options"].get("segments", 4))
            return ValueModelSpec.piecewise(hierarchy, self.table(), segments=segments)
        raise ProjectError(f"unknown model kind {kind!r}")

    # -- hashing and runs -----------------------------------------------------

    def input_hash(self):
        parts = []
        for name in ("hierarchy.json", "table.csv", "preferences.json", "model.json"):
            f = self.path / name
            parts.append(f.read_text() if f.exists() else "")
        return hashlib.sha256("\x1e".join(parts).encode()).hexdigest()

    def new_run(self, kind, options):
        run_id = uuid.uuid4().hex[:12]
        run_dir = self.path / "runs" / run_id
        run_dir.mkdir(parents=True)
        meta = {
            "run": run_id,
            "kind": kind,
            "options": options,
            "input_hash": self.input_hash(),
            "status": "queued",
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }
        (run_dir / "meta.json").write_text(json.dumps(meta, indent=2))
        return run_id

    def run_dir(self, run_id):
        d = self.path / "runs" / run_id
        if not d.exists():
            raise ProjectError(f"unknown run {run_id!r}")
        return d

    def run_meta(self, run_id):
        return json.loads((self.run_dir(run_id) / "meta.json").read_text())

    def update_run(self, run_id, **fields):
        meta = self.run_meta(run_id)
        meta.update(fields)
        (self.run_dir(run_id) / "meta.json").write_text(json.dumps(meta, indent=2))
        return meta

    def store_result(self, run_id, result_json, files=None):
        run_dir = self.run_dir(run_id)
        (run_dir / "result.json").write_text(dumps(result_json))
        for name, text in (files or {}).items():
            (run_dir / name).write_text(text)
        self.update_run(run_id, status="done",
                        finished=_dt.datetime.now(_dt.timezone.utc).isoformat())

    def result(self, run_id):
        f = self.run_dir(run_id) / "result.json"
        if not f.exists():
            raise ProjectError(f"run {run_id!r} has no result")
        return json.loads(f.read_text())

    def is_stale(self, run_id):
        return self.run_meta(run_id)["input_hash"] != self.input_hash()

    def runs(self):
        out = []
        base = self.path / "runs"
        if base.exists():
            for d in sorted(base.iterdir()):
                if (d / "meta.json").exists():
                    out.append(json.loads((d / "meta.json").read_text()))
        return out
