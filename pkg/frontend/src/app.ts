import { ApiClient } from "./api.js";
import { renderHeatmap } from "./heatmap.js";
import { renderDrift, renderQueue } from "./render.js";
import { ReviewController } from "./review.js";

/** Browser entry point: wires the controllers to the DOM. Kept free of
 * logic so everything interesting stays in the pure, testable modules. */
export function mount(root: HTMLElement): void {
  const api = new ApiClient((input, init) => fetch(input, init));
  const reviewer =
    localStorage.getItem("reviewer") ??
    (() => {
      const name = window.prompt("Reviewer name?") || "anonymous";
      localStorage.setItem("reviewer", name);
      return name;
    })();

  const queueEl = document.createElement("div");
  const heatmapEl = document.createElement("div");
  const driftEl = document.createElement("div");
  root.replaceChildren(queueEl, heatmapEl, driftEl);

  const controller = new ReviewController(api, reviewer, (state) => {
    queueEl.innerHTML = renderQueue(state);
  });

  queueEl.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === "retry") {
      void controller.load();
    } else if (target.dataset.docId && target.dataset.winner) {
      void controller.submit(target.dataset.docId, target.dataset.winner);
    }
  });

  void controller.load();

  void (async () => {
    try {
      const runs = await api.listRuns();
      const latest = runs[runs.length - 1];
      if (latest) {
        const [matrix, diagnostics] = await Promise.all([
          api.fetchAlignment(latest),
          api.fetchDiagnostics(latest),
        ]);
        heatmapEl.innerHTML = renderHeatmap(matrix, diagnostics);
      }
    } catch {
      heatmapEl.innerHTML = `<p class="empty-state">no alignment run found</p>`;
    }
  })();

  void (async () => {
    try {
      driftEl.innerHTML = renderDrift(await api.fetchDriftLatest());
    } catch {
      driftEl.innerHTML = "";
    }
  })();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app") as HTMLElement);
}
