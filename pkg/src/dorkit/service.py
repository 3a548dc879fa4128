"""HTTP/JSON service over project directories. Analyses are queued per
project (single writer per project, projects run concurrently) and polled by
run id; results are immutable once computed and never served silently stale."""

from __future__ import annotations

import pathlib
import queue
import threading
import traceback

from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import lp
from .analyses import InfeasibleModel, execute
from .core import CriterionHierarchy, PreferenceStructure, ValidationError
from .project import Project, ProjectError
from .regression import InfeasiblePreferences


class _ProjectWorker:
    """One analysis at a time per project; independent projects in parallel."""

    def __init__(self, project):
        self.project = project
        self.queue: queue.Queue = queue.Queue()
        self.thread = threading.Thread(target=self._loop, daemon=True)
        self.thread.start()

    def submit(self, run_id, kind, options):
        self.queue.put((run_id, kind, options))

    def _loop(self):
        while True:
            run_id, kind, options = self.queue.get()
            try:
                self.project.update_run(run_id, status="running")
                result, files = execute(self.project, kind, options)
                self.project.store_result(run_id, result, files)
            except (InfeasibleModel, InfeasiblePreferences) as exc:
                self.project.update_run(run_id, status="infeasible", error=str(exc))
            except (ValidationError, ProjectError, ValueError) as exc:
                self.project.update_run(run_id, status="invalid", error=str(exc))
            except lp.SolverFailure as exc:
                self.project.update_run(run_id, status="solver-failure", error=str(exc))
            except Exception as exc:  # pragma: no cover - defensive
                self.project.update_run(run_id, status="error",
                                        error=f"{exc}\n{traceback.format_exc()}")
            finally:
                self.queue.task_done()


def create_app(root_dir=".") -> FastAPI:
    root = pathlib.Path(root_dir)
    app = FastAPI(title="dorkit", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    workers: dict[str, _ProjectWorker] = {}
    workers_lock = threading.Lock()

    def project_of(project_id) -> Project:
        try:
            return Project.open(root / project_id)
        except ProjectError:
            raise HTTPException(404, f"unknown project {project_id!r}")

    def worker_of(project_id) -> _ProjectWorker:
        with workers_lock:
            if project_id not in workers:
                workers[project_id] = _ProjectWorker(project_of(project_id))
            return workers[project_id]

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        from fastapi.responses import JSONResponse

        return JSONResponse({"error": "validation", "message": str(exc)}, status_code=400)

    @app.exception_handler(ProjectError)
    async def _project(request: Request, exc: ProjectError):
        from fastapi.responses import JSONResponse

        return JSONResponse({"error": "project", "message": str(exc)}, status_code=400)

    @app.exception_handler(lp.SolverFailure)
    async def _solver(request: Request, exc: lp.SolverFailure):
        from fastapi.responses import JSONResponse

        return JSONResponse({"error": "solver-failure", "message": str(exc)}, status_code=500)

    @app.post("/projects", status_code=201)
    def create_project(body: dict = Body(default={})):
        project_id = body.get("id") or f"project-{len(list(root.glob('*')))}"
        if (root / project_id / "project.json").exists():
            raise HTTPException(409, f"project {project_id!r} already exists")
        Project.create(root / project_id, project_id)
        return {"id": project_id}

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        project = project_of(project_id)
        return {
            "meta": project.meta,
            "input_hash": project.input_hash(),
            "has_hierarchy": (project.path / "hierarchy.json").exists(),
            "has_table": (project.path / "table.csv").exists(),
            "preferences": sorted(project.preferences_json()),
            "model": project.model_json(),
        }

    @app.put("/projects/{project_id}/hierarchy")
    def put_hierarchy(project_id: str, body: list = Body(...)):
        project = project_of(project_id)
        project.save_hierarchy(CriterionHierarchy.from_json(body))
        return {"ok": True}

    @app.get("/projects/{project_id}/hierarchy")
    def get_hierarchy(project_id: str):
        return project_of(project_id).hierarchy().to_json()

    @app.put("/projects/{project_id}/table")
    async def put_table(project_id: str, request: Request):
        project = project_of(project_id)
        text = (await request.body()).decode()
        project.save_table_csv(text)
        return {"ok": True}

    @app.get("/projects/{project_id}/table")
    def get_table(project_id: str):
        project = project_of(project_id)
        f = project.path / "table.csv"
        if not f.exists():
            raise HTTPException(404, "no table")
        return Response(f.read_text(), media_type="text/csv")

    @app.put("/projects/{project_id}/preferences/{node}")
    def put_preferences(project_id: str, node: str, body: dict = Body(...)):
        project = project_of(project_id)
        body = dict(body)
        body.setdefault("node", node)
        if body["node"] != node:
            raise HTTPException(400, "node in path and body disagree")
        prefs = PreferenceStructure.from_json(body)
        hierarchy = project.hierarchy()
        if node not in hierarchy:
            raise HTTPException(400, f"unknown node {node!r}")
        try:
            prefs.validate_against(project.table())
        except ProjectError:
            pass  # a table may arrive later; re-validated at analysis time
        project.save_preferences(node, prefs)
        return {"ok": True}

    @app.get("/projects/{project_id}/preferences/{node}")
    def get_preferences(project_id: str, node: str):
        data = project_of(project_id).preferences_json()
        if node not in data:
            raise HTTPException(404, f"no preferences for {node!r}")
        return data[node]

    @app.delete("/projects/{project_id}/preferences/{node}")
    def delete_preferences(project_id: str, node: str):
        project_of(project_id).delete_preferences(node)
        return {"ok": True}

    @app.put("/projects/{project_id}/model")
    def put_model(project_id: str, body: dict = Body(...)):
        kind = body.get("kind", "ws")
        if kind not in ("ws", "pl", "ga", "choquet2"):
            raise HTTPException(400, f"unknown model kind {kind!r}")
        project_of(project_id).save_model(kind, body.get("options", {}))
        return {"ok": True}

    @app.post("/projects/{project_id}/analyses", status_code=202)
    def post_analysis(project_id: str, body: dict = Body(...)):
        kind = body.get("kind")
        if kind not in ("fit", "ror", "smaa"):
            raise HTTPException(400, "kind must be fit, ror or smaa")
        project = project_of(project_id)
        run_id = project.new_run(kind, body.get("options", {}))
        worker_of(project_id).submit(run_id, kind, body.get("options", {}))
        return {"run": run_id}

    @app.get("/projects/{project_id}/analyses")
    def list_analyses(project_id: str):
        project = project_of(project_id)
        runs = project.runs()
        for meta in runs:
            meta["stale"] = meta["input_hash"] != project.input_hash()
        return runs

    @app.get("/projects/{project_id}/analyses/{run_id}")
    def get_analysis(project_id: str, run_id: str):
        project = project_of(project_id)
        try:
            meta = project.run_meta(run_id)
        except ProjectError:
            raise HTTPException(404, f"unknown run {run_id!r}")
        meta["stale"] = meta["input_hash"] != project.input_hash()
        if meta["status"] == "infeasible":
            raise HTTPException(422, meta.get("error", "infeasible preference system"))
        if meta["status"] == "invalid":
            raise HTTPException(400, meta.get("error", "invalid input"))
        if meta["status"] in ("solver-failure", "error"):
            raise HTTPException(500, meta.get("error", "solver failure"))
        return meta

    @app.get("/projects/{project_id}/analyses/{run_id}/results")
    def get_results(project_id: str, run_id: str, allow_stale: bool = False):
        project = project_of(project_id)
        try:
            meta = project.run_meta(run_id)
        except ProjectError:
            raise HTTPException(404, f"unknown run {run_id!r}")
        if meta["status"] != "done":
            raise HTTPException(404, f"run {run_id!r} is {meta['status']}")
        stale = project.is_stale(run_id)
        if stale and not allow_stale:
            raise HTTPException(409, "inputs changed since this run; "
                                     "pass allow_stale=true to fetch anyway")
        return {"stale": stale, "meta": meta, "result": project.result(run_id)}

    return app
