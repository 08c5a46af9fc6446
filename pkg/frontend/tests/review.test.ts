import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderQueue } from "../src/render.js";
import { ReviewController } from "../src/review.js";
import { FakeServer, fixtureQueue, INTERNAL_NAMES } from "./fakeServer.js";

function setup() {
  const server = new FakeServer(fixtureQueue());
  const api = new ApiClient(server.fetch);
  const controller = new ReviewController(api, "r1");
  return { server, api, controller };
}

describe("review round trip", () => {
  it("stores exactly one record with the correct (y_w, y_l) and shrinks the queue to 2", async () => {
    const { server, controller } = setup();
    await controller.load();
    expect(controller.state.items).toHaveLength(3);

    await controller.submit("q0", "K-12");
    expect(server.preferences).toHaveLength(1);
    expect(server.preferences[0]).toMatchObject({
      doc_id: "q0",
      y_w: "K-12",
      y_l: "K-11",
      reviewer: "r1",
    });
    expect(controller.state.items).toHaveLength(2);

    // The server agrees after a reload.
    await controller.load();
    expect(controller.state.items.map((i) => i.doc_id)).toEqual(["q1", "q2"]);
  });

  it("never renders internal class names (alias audit)", async () => {
    const { controller } = setup();
    await controller.load();
    const html = renderQueue(controller.state);
    for (const name of INTERNAL_NAMES) {
      expect(html).not.toContain(name);
    }
    for (const alias of ["K-11", "K-12", "K-21", "K-22", "K-31", "K-32"]) {
      expect(html).toContain(alias);
    }
  });

  it("issues no writes other than POST /api/preferences", async () => {
    const { server, controller } = setup();
    await controller.load();
    await controller.submit("q0", "K-11");
    const writes = server.requests.filter((r) => r.method !== "GET");
    expect(writes).toEqual([{ method: "POST", path: "/api/preferences" }]);
  });

  it("rolls the item back into place when the submit fails", async () => {
    const { server, controller } = setup();
    await controller.load();
    server.failNextSubmit = true;
    await controller.submit("q1", "K-21");
    expect(server.preferences).toHaveLength(0);
    expect(controller.state.items.map((i) => i.doc_id)).toEqual(["q0", "q1", "q2"]);
    expect(controller.state.error).toBe("backend unavailable");
  });

  it("reports a duplicate judgment as already reviewed without re-queuing", async () => {
    const { controller } = setup();
    await controller.load();
    await controller.submit("q0", "K-11");
    // Simulate a second tab racing on the same doc.
    controller.state = {
      ...controller.state,
      items: [fixtureQueue()[0]!, ...controller.state.items],
    };
    await controller.submit("q0", "K-12");
    expect(controller.state.alreadyReviewed).toEqual(["q0"]);
    expect(controller.state.items.map((i) => i.doc_id)).toEqual(["q1", "q2"]);
    expect(renderQueue(controller.state)).toContain("already reviewed");
  });

  it("rejects a winner that is not one of the item's candidates", async () => {
    const { server, controller } = setup();
    await controller.load();
    await controller.submit("q0", "K-99");
    expect(server.preferences).toHaveLength(0);
    expect(controller.state.items).toHaveLength(3);
    expect(controller.state.error).toContain("not a candidate");
  });
});

describe("queue rendering", () => {
  it("shows an explicit empty state", async () => {
    const server = new FakeServer([]);
    const controller = new ReviewController(new ApiClient(server.fetch), "r1");
    await controller.load();
    expect(renderQueue(controller.state)).toContain("no items to review");
  });

  it("renders three cards in queue order with the first focused", async () => {
    const { controller } = setup();
    await controller.load();
    const html = renderQueue(controller.state);
    const ids = [...html.matchAll(/<article[^>]*data-doc-id="(q\d)"/g)].map(
      (m) => m[1],
    );
    expect(ids).toEqual(["q0", "q1", "q2"]);
    expect(html.match(/class="card focused"/g)).toHaveLength(1);
    expect(html.indexOf("focused")).toBeLessThan(html.indexOf("q1"));
  });

  it("shows an error banner with a retry affordance on server failure", async () => {
    const failing = new ApiClient(async () => ({
      status: 500,
      ok: false,
      json: async () => ({ detail: "boom" }),
    }));
    const controller = new ReviewController(failing, "r1");
    await controller.load();
    const html = renderQueue(controller.state);
    expect(html).toContain("boom");
    expect(html).toContain('data-action="retry"');
  });

  it("hides raw model responses behind a toggle", async () => {
    const server = new FakeServer([
      {
        doc_id: "q0",
        text: "doc",
        candidates: ["K-11", "K-12"],
        raw_response: '{"topic": "K-11"}',
      },
    ]);
    const controller = new ReviewController(new ApiClient(server.fetch), "r1");
    await controller.load();
    const html = renderQueue(controller.state);
    expect(html).toContain("<details");
    expect(html).toContain("model response");
  });
});
