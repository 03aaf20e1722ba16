/** Typed client for the conceptscope service HTTP API.
 *
 * The client carries no business logic: it parses responses and surfaces
 * errors, nothing more. The fetch function is injectable so tests can run
 * against a fake service implementing the same contract.
 */

export interface Member {
  label: string;
  image_url: string | null;
}

export interface TreeNode {
  id: number;
  name: string | null;
  height: number;
  size: number;
  children: number[];
  members: Member[];
}

export interface DendrogramPayload {
  structure_hash: string;
  root: number;
  nodes: TreeNode[];
}

export interface Cluster {
  node: number;
  name: string | null;
  size: number;
  members: Member[];
}

export interface ClustersPayload {
  cut: number;
  clusters: Cluster[];
}

export interface ExplanationPayload {
  label: string;
  concepts: string[];
  display_concepts: string[];
  sentences: string[];
  members: string[][];
}

export type ApiResult<T> =
  | { ok: true; value: T }
  | { ok: false; status: number; message: string };

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${response.status}`;
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly baseUrl: string = "",
  ) {}

  private async get<T>(path: string): Promise<ApiResult<T>> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path);
    } catch (exc) {
      return { ok: false, status: 0, message: `service unreachable: ${exc}` };
    }
    if (!response.ok) {
      return { ok: false, status: response.status, message: await errorMessage(response) };
    }
    return { ok: true, value: (await response.json()) as T };
  }

  async getDendrogram(): Promise<ApiResult<{ payload: DendrogramPayload; etag: string }>> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + "/dendrogram");
    } catch (exc) {
      return { ok: false, status: 0, message: `service unreachable: ${exc}` };
    }
    if (!response.ok) {
      return { ok: false, status: response.status, message: await errorMessage(response) };
    }
    const payload = (await response.json()) as DendrogramPayload;
    const etag = response.headers.get("ETag") ?? "";
    return { ok: true, value: { payload, etag } };
  }

  async getClusters(cut: number): Promise<ApiResult<ClustersPayload>> {
    return this.get<ClustersPayload>(`/clusters?cut=${encodeURIComponent(cut)}`);
  }

  async renameNode(node: number, name: string): Promise<ApiResult<TreeNode>> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/clusters/${node}/name`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ name }),
      });
    } catch (exc) {
      return { ok: false, status: 0, message: `service unreachable: ${exc}` };
    }
    if (!response.ok) {
      return { ok: false, status: response.status, message: await errorMessage(response) };
    }
    return { ok: true, value: (await response.json()) as TreeNode };
  }

  async explain(label: string): Promise<ApiResult<ExplanationPayload>> {
    return this.get<ExplanationPayload>(`/explain?label=${encodeURIComponent(label)}`);
  }

  async classifyExplain(recordJson: string): Promise<ApiResult<ExplanationPayload>> {
    let record: unknown;
    try {
      record = JSON.parse(recordJson);
    } catch {
      return { ok: false, status: 0, message: "pasted record is not valid JSON" };
    }
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/classify-explain`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(record),
      });
    } catch (exc) {
      return { ok: false, status: 0, message: `service unreachable: ${exc}` };
    }
    if (!response.ok) {
      return { ok: false, status: response.status, message: await errorMessage(response) };
    }
    return { ok: true, value: (await response.json()) as ExplanationPayload };
  }
}
