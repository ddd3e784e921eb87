// Browser entry: wires the controller to the DOM. Everything analytical is
// rendered from controller state, which mirrors service responses verbatim.

import { OrdlogClient } from "./api.js";
import { sweepChart } from "./chart.js";
import { renderVariant, renderVariantCard } from "./render.js";
import { ExplorerController, type ViewState } from "./state.js";
import { GRANULARITIES, type GranularityName } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "http://127.0.0.1:8640";
  const controller = new ExplorerController(new OrdlogClient(base));

  const fileInput = el<HTMLInputElement>("file");
  const orderSelect = el<HTMLSelectElement>("order-source");
  const uploadBtn = el<HTMLButtonElement>("upload");
  const granSlider = el<HTMLInputElement>("granularity");
  const granLabel = el<HTMLElement>("granularity-label");
  const summaryBox = el<HTMLElement>("summary");
  const variantsBox = el<HTMLElement>("variants");
  const detailBox = el<HTMLElement>("detail");
  const sweepBox = el<HTMLElement>("sweep");
  const tbText = el<HTMLTextAreaElement>("tiebreaker");
  const tbCommit = el<HTMLButtonElement>("tiebreaker-commit");
  const tbStatus = el<HTMLElement>("tiebreaker-status");
  const exportK = el<HTMLInputElement>("export-k");
  const exportSeed = el<HTMLInputElement>("export-seed");
  const exportFormat = el<HTMLSelectElement>("export-format");
  const exportBtn = el<HTMLButtonElement>("export");
  const toast = el<HTMLElement>("toast");
  const errorBox = el<HTMLElement>("error");
  const pagePrev = el<HTMLButtonElement>("page-prev");
  const pageNext = el<HTMLButtonElement>("page-next");

  granSlider.min = "0";
  granSlider.max = String(GRANULARITIES.length - 1);
  granSlider.value = String(GRANULARITIES.indexOf(controller.state.granularity));

  uploadBtn.addEventListener("click", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    const format = file.name.toLowerCase().endsWith(".xes") ? "xes" : "csv";
    await controller.uploadLog(file, file.name, {
      format,
      column_map:
        format === "csv"
          ? { case: "case_id", activity: "activity", timestamp: "timestamp", id: null }
          : undefined,
      explicit_order_source: orderSelect.value,
    });
  });

  granSlider.addEventListener("input", () => {
    const g = GRANULARITIES[Number(granSlider.value)] as GranularityName;
    granLabel.textContent = g;
    void controller.setGranularity(g);
  });

  tbText.addEventListener("input", () => controller.editTiebreakerDraft(tbText.value));
  tbCommit.addEventListener("click", () => void controller.commitTiebreaker());

  exportBtn.addEventListener("click", async () => {
    const result = await controller.exportLog(
      Number(exportK.value || "1"),
      Number(exportSeed.value || "0"),
      exportFormat.value as "xes" | "csv",
    );
    if (result) {
      const blob = new Blob([result.bytes]);
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = result.filename;
      a.click();
      URL.revokeObjectURL(a.href);
    }
  });

  pagePrev.addEventListener("click", () => {
    if (controller.state.page > 1) void controller.setPage(controller.state.page - 1);
  });
  pageNext.addEventListener("click", () => void controller.setPage(controller.state.page + 1));

  variantsBox.addEventListener("click", (ev) => {
    const card = (ev.target as HTMLElement).closest(".variant-card");
    if (card) void controller.selectVariant(card.getAttribute("data-key"));
  });

  controller.subscribe((state: ViewState) => {
    granLabel.textContent = state.granularity;
    summaryBox.innerHTML = state.summary
      ? `<b>${state.summary.events}</b> events · <b>${state.summary.cases}</b> cases · ` +
        `<b>${state.summary.activities}</b> activities · ` +
        (state.consistent ? "consistent" : "<b class='bad'>inconsistent</b>")
      : "no log uploaded";
    if (state.variants) {
      const { total_variants, page, page_size, variants } = state.variants;
      const header = `<p>${total_variants} variant(s) at <b>${state.variants.granularity}</b>, page ${page}</p>`;
      variantsBox.innerHTML = header + variants.map(renderVariantCard).join("");
      pagePrev.disabled = page <= 1;
      pageNext.disabled = page * page_size >= total_variants;
    } else {
      variantsBox.innerHTML = "";
    }
    detailBox.innerHTML = state.selectedVariant
      ? renderVariant(state.selectedVariant) +
        `<p>cases: ${state.selectedVariant.case_ids.join(", ")}</p>`
      : "";
    sweepBox.innerHTML = state.sweep ? sweepChart(state.sweep, state.granularity) : "";
    tbStatus.innerHTML = state.tiebreakerConflicts.length
      ? `<ul class="conflicts">` +
        state.tiebreakerConflicts
          .map(
            (c) =>
              `<li>${c.first_activity} → ${c.second_activity} contradicts ${c.contradicts} ` +
              `(events ${c.first_id}, ${c.second_id})</li>`,
          )
          .join("") +
        `</ul>`
      : state.tiebreakerId
        ? `committed (id ${state.tiebreakerId})`
        : "no tiebreaker committed";
    toast.textContent = state.lastExport
      ? `exported ${state.lastExport.filename}: ${state.lastExport.traceCount} traces`
      : "";
    errorBox.textContent = state.error ?? "";
    document.body.classList.toggle("busy", state.busy);
  });
}

main();
