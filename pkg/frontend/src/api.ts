import { PreferenceJson, RunMeta } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class DorkitClient {
  constructor(private base: string, private fetchImpl: typeof fetch = fetch) {}

  private async request<T>(method: string, path: string, body?: unknown,
                           contentType = "application/json"): Promise<T> {
    const res = await this.fetchImpl(`${this.base}${path}`, {
      method,
      headers: body !== undefined ? { "content-type": contentType } : undefined,
      body:
        body === undefined
          ? undefined
          : contentType === "application/json"
            ? JSON.stringify(body)
            : (body as string),
    });
    const text = await res.text();
    if (!res.ok) {
      let message = text;
      try {
        const parsed = JSON.parse(text);
        message = parsed.message ?? parsed.detail ?? text;
      } catch {
        /* plain-text error */
      }
      throw new ApiError(res.status, message);
    }
    return (text ? JSON.parse(text) : undefined) as T;
  }

  createProject(id: string) {
    return this.request<{ id: string }>("POST", "/projects", { id });
  }

  putHierarchy(project: string, nodes: unknown[]) {
    return this.request("PUT", `/projects/${project}/hierarchy`, nodes);
  }

  putTable(project: string, csv: string) {
    return this.request("PUT", `/projects/${project}/table`, csv, "text/csv");
  }

  putModel(project: string, kind: string, options: Record<string, unknown> = {}) {
    return this.request("PUT", `/projects/${project}/model`, { kind, options });
  }

  putPreferences(project: string, prefs: PreferenceJson) {
    return this.request("PUT", `/projects/${project}/preferences/${prefs.node}`, prefs);
  }

  getPreferences(project: string, node: string) {
    return this.request<PreferenceJson>("GET", `/projects/${project}/preferences/${node}`);
  }

  startAnalysis(project: string, kind: "fit" | "ror" | "smaa",
                options: Record<string, unknown> = {}) {
    return this.request<{ run: string }>("POST", `/projects/${project}/analyses`,
                                         { kind, options });
  }

  runMeta(project: string, run: string) {
    return this.request<RunMeta>("GET", `/projects/${project}/analyses/${run}`);
  }

  results<T>(project: string, run: string, allowStale = false) {
    const q = allowStale ? "?allow_stale=true" : "";
    return this.request<{ stale: boolean; result: T }>(
      "GET", `/projects/${project}/analyses/${run}/results${q}`);
  }

  /** Poll a run until it leaves the queue; the service answers 4xx/5xx for
   * infeasible or failed runs, which surfaces here as ApiError. */
  async awaitRun(project: string, run: string, intervalMs = 250,
                 timeoutMs = 120_000): Promise<RunMeta> {
    const started = Date.now();
    for (;;) {
      const meta = await this.runMeta(project, run);
      if (meta.status === "done") return meta;
      if (Date.now() - started > timeoutMs) {
        throw new ApiError(408, `run ${run} still ${meta.status} after ${timeoutMs} ms`);
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
