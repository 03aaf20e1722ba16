import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { FakeService, makeStore } from "./fake_service.js";

let service: FakeService;
let client: ApiClient;

beforeEach(() => {
  service = new FakeService(makeStore());
  client = new ApiClient(service.fetch);
});

describe("getDendrogram", () => {
  it("returns the served payload verbatim with its etag", async () => {
    const result = await client.getDendrogram();
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.payload.root).toBe(6);
    expect(result.value.payload.nodes).toHaveLength(7);
    expect(result.value.payload.nodes[4].name).toBe("furniture");
    expect(result.value.etag).not.toBe("");
  });

  it("repeated reads give the same etag", async () => {
    const first = await client.getDendrogram();
    const second = await client.getDendrogram();
    if (!first.ok || !second.ok) throw new Error("expected ok");
    expect(second.value.etag).toBe(first.value.etag);
  });

  it("surfaces network failure as an error result", async () => {
    service.failNextGet = true;
    const result = await client.getDendrogram();
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.status).toBe(0);
    expect(result.message).toContain("unreachable");
  });
});

describe("getClusters", () => {
  it("slider at 0 shows all leaves", async () => {
    const result = await client.getClusters(0);
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.clusters.map((c) => c.name)).toEqual([
      "armchair", "bed", "chair", "monkey",
    ]);
  });

  it("mid cut returns the named furniture cluster", async () => {
    const result = await client.getClusters(0.3);
    if (!result.ok) throw new Error("expected ok");
    const names = result.value.clusters.map((c) => c.name);
    expect(names).toContain("furniture");
  });

  it("negative cut surfaces the service 400 detail", async () => {
    const result = await client.getClusters(-1);
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.status).toBe(400);
    expect(result.message).toContain("bad cut");
  });
});

describe("renameNode", () => {
  it("returns the renamed node payload", async () => {
    const result = await client.renameNode(4, "sleeping gear");
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.name).toBe("sleeping gear");
  });

  it("changes the dendrogram etag", async () => {
    const before = await client.getDendrogram();
    await client.renameNode(4, "sleeping gear");
    const after = await client.getDendrogram();
    if (!before.ok || !after.ok) throw new Error("expected ok");
    expect(after.value.etag).not.toBe(before.value.etag);
  });

  it("surfaces 404 for unknown nodes", async () => {
    const result = await client.renameNode(99, "x");
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.status).toBe(404);
  });

  it("surfaces 422 for empty names", async () => {
    const result = await client.renameNode(4, "   ");
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.status).toBe(422);
    expect(result.message).toContain("empty");
  });
});

describe("explain", () => {
  it("renders the chair sentences in order", async () => {
    const result = await client.explain("chair");
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.sentences).toEqual([
      "A chair is part of the concept furniture",
      "A furniture is part of the concept entity",
    ]);
    expect(result.value.display_concepts.filter((c) => c === "furniture")).toHaveLength(1);
  });

  it("unknown labels give an inline not-found message", async () => {
    const result = await client.explain("sofa");
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.status).toBe(404);
    expect(result.message).toContain("sofa");
  });
});

describe("classifyExplain", () => {
  it("routes a pasted record to the argmax label", async () => {
    const record = JSON.stringify({
      image_id: "q1",
      true_label: "bed",
      entries: [["chair", 0.6], ["bed", 0.4]],
    });
    const result = await client.classifyExplain(record);
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.label).toBe("chair");
  });

  it("rejects unparseable pastes before any request", async () => {
    const result = await client.classifyExplain("{not json");
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.message).toContain("not valid JSON");
  });

  it("surfaces the service 400 for empty entries", async () => {
    const record = JSON.stringify({ image_id: "q", true_label: "bed", entries: [] });
    const result = await client.classifyExplain(record);
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.status).toBe(400);
  });
});
