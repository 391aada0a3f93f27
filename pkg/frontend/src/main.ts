/** Browser wiring: binds the controllers to the DOM. */

import { ApiClient } from "./api.js";
import { ExplorerController } from "./explorer.js";
import { GridExplorer, parseValueList } from "./gridview.js";
import { TuringPanel } from "./turing.js";
import type { TuringLabel } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function pngSrc(b64: string): string {
  return `data:image/png;base64,${b64}`;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const info = await api.modelInfo();
  const space = info.condition_space;
  el<HTMLSpanElement>("model-version").textContent = info.model_version;

  // ---- explorer tab ----
  const trSlider = el<HTMLInputElement>("tr-slider");
  const teSlider = el<HTMLInputElement>("te-slider");
  const trValue = el<HTMLSpanElement>("tr-value");
  const teValue = el<HTMLSpanElement>("te-value");
  const orientationSelect = el<HTMLSelectElement>("orientation");
  const seedInput = el<HTMLInputElement>("seed");
  const image = el<HTMLImageElement>("preview");
  const readback = el<HTMLSpanElement>("readback");
  const banner = el<HTMLDivElement>("error-banner");

  [trSlider.min, trSlider.max] = space.tr_range.map(String) as [string, string];
  [teSlider.min, teSlider.max] = space.te_range.map(String) as [string, string];
  for (const o of space.orientations) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = o;
    orientationSelect.appendChild(opt);
  }

  const explorer = new ExplorerController(api, space, {}, (state) => {
    trSlider.value = String(state.tr_ms);
    teSlider.value = String(state.te_ms);
    trValue.textContent = `${state.tr_ms.toFixed(0)} ms`;
    teValue.textContent = `${state.te_ms.toFixed(1)} ms`;
    banner.hidden = state.error === null;
    banner.textContent = state.error ?? "";
    if (state.lastResponse) {
      image.src = pngSrc(state.lastResponse.images[0]);
      const r = state.lastResponse.readback[0];
      readback.textContent =
        `readback: TR ${r.tr_ms.toFixed(0)} ms, TE ${r.te_ms.toFixed(1)} ms, ${r.orientation}`;
    }
    image.style.opacity = state.pending ? "0.6" : "1.0";
  });

  trSlider.addEventListener("input", () => explorer.setField("tr_ms", Number(trSlider.value)));
  teSlider.addEventListener("input", () => explorer.setField("te_ms", Number(teSlider.value)));
  seedInput.addEventListener("change", () => explorer.setField("seed", Number(seedInput.value)));
  orientationSelect.addEventListener("change", () =>
    explorer.setOrientation(orientationSelect.value),
  );
  explorer.regenerate();

  // ---- grid tab ----
  const gridView = new GridExplorer(api, space, (state) => {
    const gridError = el<HTMLDivElement>("grid-error");
    gridError.hidden = state.error === null;
    gridError.textContent = state.error ?? "";
    const montage = el<HTMLImageElement>("grid-montage");
    const annotations = el<HTMLDivElement>("grid-annotations");
    if (state.response) {
      montage.src = pngSrc(state.response.montage);
      annotations.textContent = state.response.rows
        .map(
          (r) =>
            `(${r.row},${r.col}) intended ${r.intended_tr_ms}/${r.intended_te_ms} ` +
            `read ${r.readback_tr_ms.toFixed(0)}/${r.readback_te_ms.toFixed(1)}`,
        )
        .join("  |  ");
    }
  });
  el<HTMLButtonElement>("grid-render").addEventListener("click", () => {
    void gridView.render(
      parseValueList(el<HTMLInputElement>("grid-tr").value),
      parseValueList(el<HTMLInputElement>("grid-te").value),
      el<HTMLSelectElement>("orientation").value,
      Number(seedInput.value),
    );
  });

  // ---- labeling tab ----
  const startButton = el<HTMLButtonElement>("turing-start");
  startButton.addEventListener("click", () => {
    const sessionId = el<HTMLInputElement>("session-id").value.trim();
    const reader = el<HTMLInputElement>("reader-id").value.trim();
    if (!sessionId || !reader) {
      return;
    }
    const tilesBox = el<HTMLDivElement>("turing-tiles");
    const status = el<HTMLDivElement>("turing-status");
    const submit = el<HTMLButtonElement>("turing-submit");
    const panel = new TuringPanel(api, sessionId, reader, (state) => {
      submit.disabled = !panel.submitEnabled() || state.submitting;
      status.textContent = state.finished
        ? "session complete, thank you"
        : state.message ??
          (state.grid ? `grid ${state.grid.index + 1} of ${state.grid.count}` : "");
      tilesBox.replaceChildren();
      state.grid?.items.forEach((item, i) => {
        const tile = document.createElement("div");
        tile.className = `tile ${state.labels[i] ?? "unlabeled"}`;
        const img = document.createElement("img");
        img.src = item.ref;
        img.title = `TR ${item.tr_ms} ms / TE ${item.te_ms} ms`;
        const mark = (label: TuringLabel) => {
          panel.toggle(i, label);
        };
        img.addEventListener("click", () => mark("real"));
        img.addEventListener("contextmenu", (ev) => {
          ev.preventDefault();
          mark("synthetic");
        });
        const caption = document.createElement("div");
        caption.textContent = state.labels[i] ?? "unlabeled";
        tile.append(img, caption);
        tilesBox.appendChild(tile);
      });
    });
    submit.addEventListener("click", () => void panel.submit());
    void panel.loadGrid(0);
  });
}

window.addEventListener("load", () => {
  void boot().catch((err) => {
    document.body.insertAdjacentText("afterbegin", `failed to start: ${err}`);
  });
});
