import { ApiClient, ApiError } from "./api.js";
import type { PreferenceRecord, ReviewItem } from "./types.js";

export type QueueStatus = "idle" | "loading" | "error";

export interface QueueState {
  items: ReviewItem[];
  status: QueueStatus;
  /** Human-readable message for the error banner; server 422 details are
   * surfaced verbatim. */
  error: string | null;
  /** doc_ids the server reported as already judged by this reviewer. */
  alreadyReviewed: string[];
  submitted: PreferenceRecord[];
}

export function initialState(): QueueState {
  return {
    items: [],
    status: "idle",
    error: null,
    alreadyReviewed: [],
    submitted: [],
  };
}

/** Drives the pairwise review queue: load, optimistic submit, rollback.
 * The server stays the source of truth; the only write is the preference
 * POST issued through the ApiClient. */
export class ReviewController {
  state: QueueState = initialState();

  constructor(
    private readonly api: ApiClient,
    readonly reviewer: string,
    private readonly onChange: (state: QueueState) => void = () => {},
  ) {}

  private update(patch: Partial<QueueState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  async load(): Promise<void> {
    this.update({ status: "loading", error: null });
    try {
      const items = await this.api.fetchReviewQueue();
      this.update({ items, status: "idle", error: null });
    } catch (err) {
      this.update({ status: "error", error: messageOf(err) });
    }
  }

  /** Submit a preference for one queue item. The item is removed
   * optimistically and restored in place if the server rejects the write. */
  async submit(docId: string, winner: string): Promise<void> {
    const index = this.state.items.findIndex((i) => i.doc_id === docId);
    const item = this.state.items[index];
    if (!item) {
      return;
    }
    if (!item.candidates.includes(winner)) {
      this.update({ error: `"${winner}" is not a candidate for ${docId}` });
      return;
    }
    const loser = item.candidates[0] === winner
      ? item.candidates[1]
      : item.candidates[0];
    const record: PreferenceRecord = {
      doc_id: docId,
      y_w: winner,
      y_l: loser,
      reviewer: this.reviewer,
    };

    const remaining = this.state.items.filter((i) => i.doc_id !== docId);
    this.update({ items: remaining, error: null });
    try {
      const stored = await this.api.submitPreference(record);
      this.update({ submitted: [...this.state.submitted, stored] });
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // Already judged server-side: keep it out of the queue but flag it.
        this.update({
          alreadyReviewed: [...this.state.alreadyReviewed, docId],
        });
        return;
      }
      // Invariant violation (422) or transport failure: roll back.
      const restored = [...this.state.items];
      restored.splice(Math.min(index, restored.length), 0, item);
      this.update({ items: restored, error: messageOf(err) });
    }
  }
}

function messageOf(err: unknown): string {
  if (err instanceof ApiError) {
    return err.detail;
  }
  return err instanceof Error ? err.message : String(err);
}
