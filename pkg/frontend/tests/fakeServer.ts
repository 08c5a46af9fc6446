import type { FetchLike } from "../src/api.js";
import type { PreferenceRecord, ReviewItem } from "../src/types.js";

/** In-memory stand-in for the serve API, mirroring its status codes:
 * 201 on stored preference, 409 on duplicate (doc_id, reviewer), 422 when
 * winner equals loser. */
export class FakeServer {
  preferences: PreferenceRecord[] = [];
  requests: { method: string; path: string }[] = [];
  failNextSubmit = false;

  constructor(public queue: ReviewItem[]) {}

  get fetch(): FetchLike {
    return async (input, init) => {
      const method = init?.method ?? "GET";
      const path = input.replace(/^https?:\/\/[^/]+/, "");
      this.requests.push({ method, path });

      if (method === "GET" && path === "/api/review/queue") {
        const judged = new Set(this.preferences.map((p) => p.doc_id));
        const items = this.queue.filter((i) => !judged.has(i.doc_id));
        return respond(200, { items });
      }
      if (method === "POST" && path === "/api/preferences") {
        if (this.failNextSubmit) {
          this.failNextSubmit = false;
          return respond(503, { detail: "backend unavailable" });
        }
        const record = JSON.parse(init?.body ?? "{}") as PreferenceRecord;
        if (record.y_w === record.y_l) {
          return respond(422, { detail: "winner equals loser" });
        }
        const dup = this.preferences.some(
          (p) => p.doc_id === record.doc_id && p.reviewer === record.reviewer,
        );
        if (dup) {
          return respond(409, { detail: "already judged" });
        }
        this.preferences.push(record);
        return respond(201, record);
      }
      return respond(404, { detail: "not found" });
    };
  }
}

function respond(status: number, body: unknown) {
  return {
    status,
    ok: status >= 200 && status < 300,
    json: async () => body,
  };
}

export function fixtureQueue(): ReviewItem[] {
  return [
    { doc_id: "q0", text: "a small tart bush fruit", candidates: ["K-11", "K-12"] },
    { doc_id: "q1", text: "long yellow tropical fruit", candidates: ["K-21", "K-22"] },
    { doc_id: "q2", text: "sour green citrus wedge", candidates: ["K-31", "K-32"] },
  ];
}

/** Internal class names from the fixture schema; none may appear in any
 * rendered output. */
export const INTERNAL_NAMES = [
  "Red Fruits", "Yellow Fruits", "Green Fruits",
  "Cranberry", "Redcurrant", "Strawberry",
  "Banana", "Lemon", "Lime", "Green Apple",
];
