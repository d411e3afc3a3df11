// DOM wiring. All domain logic lives in the tested modules (api, state,
// validation, overlay, heatmap); this file moves data between them and the
// page. Displayed numbers are fetched, never recomputed here.

import { ApiError, Client, ConflictError } from "./api.js";
import { cellColor, cellTooltip, rowRates } from "./heatmap.js";
import {
  bboxCommands,
  centroidCommands,
  contributionBars,
  cropRowToLine,
  hullCommands,
  lineRowInCrop,
  plotSeries,
  resampleColumn,
  sharedRange,
  skeletonCommands,
  trampolineLineCommands,
  type DrawCmd,
} from "./overlay.js";
import {
  initialState,
  noteRefsetRevision,
  noteRoutineRevision,
  prefetchWindow,
  seekCursor,
  selectSegment,
  setPendingLabel,
  stepCursor,
  toggleOverlay,
  withRoutine,
  type OverlayToggles,
  type ViewState,
} from "./state.js";
import { parsePoseStream } from "./poses.js";
import type {
  CatalogRow,
  ClassifyResult,
  FrameMeta,
  ReferenceSetDoc,
  SegmentsDoc,
  TrajectoryDoc,
} from "./types.js";
import { FEATURE_NAMES } from "./types.js";
import { validateCode } from "./validation.js";

const STYLES: Record<string, string> = {
  skeleton: "#52e07c",
  joint: "#ffd23f",
  hull: "#6fb2ff",
  bbox: "#ff9d42",
  centroid: "#ff4463",
  trampoline: "#37c8f0",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class App {
  client = new Client("");
  state: ViewState = initialState();
  catalog: CatalogRow[] = [];
  segmentsDoc: SegmentsDoc | null = null;
  poseByFrame = new Map<number, number[][]>();
  metaCache = new Map<number, FrameMeta | null>();
  prefetched = new Set<number>();
  lineDraft: number | null = null;
  dragging = false;
  frameImage: HTMLImageElement | null = null;

  canvas = el<HTMLCanvasElement>("frame-canvas");
  slider = el<HTMLInputElement>("frame-slider");

  async start(): Promise<void> {
    this.catalog = await this.client.catalog();
    const datalist = el<HTMLDataListElement>("catalog-codes");
    datalist.innerHTML = this.catalog
      .map((r) => `<option value="${r.code}">${r.name} (${r.tariff.toFixed(1)})</option>`)
      .join("");
    this.buildToggles();
    this.bindEvents();
    const routines = await this.client.routines();
    const select = el<HTMLSelectElement>("routine-select");
    select.innerHTML = routines.map((r) => `<option value="${r.id}">${r.id}</option>`).join("");
    if (routines.length > 0) {
      await this.loadRoutine(routines[0].id);
    }
  }

  banner(message: string | null): void {
    const node = el<HTMLDivElement>("banner");
    node.classList.toggle("hidden", message === null);
    node.textContent = message ?? "";
  }

  surfaceError(err: unknown): void {
    if (err instanceof ConflictError) {
      this.banner(
        "The server has newer data (stale revision token). Reload the routine to continue.",
      );
    } else if (err instanceof ApiError) {
      this.banner(`request failed (${err.status}): ${err.message}`);
    } else {
      this.banner(String(err));
    }
  }

  async loadRoutine(id: string): Promise<void> {
    this.banner(null);
    const [routine, segments] = await Promise.all([
      this.client.routine(id),
      this.client.segments(id),
    ]);
    this.segmentsDoc = segments;
    this.metaCache.clear();
    this.prefetched.clear();
    const poseText = await this.client.poses(id);
    this.poseByFrame = poseText ? parsePoseStream(poseText) : new Map();
    this.state = withRoutine(this.state, id, routine.revision, segments);
    this.slider.min = String(this.state.frameRange[0]);
    this.slider.max = String(this.state.frameRange[1]);
    this.renderSegments(routine.labels);
    await this.showFrame();
  }

  buildToggles(): void {
    const names: (keyof OverlayToggles)[] = [
      "skeleton", "hull", "bbox", "centroidTrack", "trampolineLine", "anglePlots",
    ];
    const host = el<HTMLDivElement>("overlay-toggles");
    host.innerHTML = "";
    for (const name of names) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = this.state.toggles[name];
      box.addEventListener("change", () => {
        this.state = toggleOverlay(this.state, name);
        void this.showFrame();
      });
      label.append(box, ` ${name}`);
      host.append(label);
    }
  }

  bindEvents(): void {
    el<HTMLSelectElement>("routine-select").addEventListener("change", (ev) => {
      void this.loadRoutine((ev.target as HTMLSelectElement).value).catch((e) =>
        this.surfaceError(e),
      );
    });
    document.querySelectorAll<HTMLButtonElement>("nav .tab").forEach((button) => {
      button.addEventListener("click", () => void this.showTab(button.dataset.tab!));
    });
    el<HTMLButtonElement>("prev-frame").addEventListener("click", () => this.moveCursor(-1));
    el<HTMLButtonElement>("next-frame").addEventListener("click", () => this.moveCursor(+1));
    document.addEventListener("keydown", (ev) => {
      if (ev.key === "ArrowLeft") this.moveCursor(-1);
      if (ev.key === "ArrowRight") this.moveCursor(+1);
    });
    this.slider.addEventListener("input", () => {
      this.state = seekCursor(this.state, Number(this.slider.value));
      void this.showFrame();
    });
    this.canvas.addEventListener("mousedown", (ev) => this.onCanvasDown(ev));
    this.canvas.addEventListener("mousemove", (ev) => this.onCanvasMove(ev));
    window.addEventListener("mouseup", () => {
      this.dragging = false;
    });
    el<HTMLButtonElement>("line-apply").addEventListener("click", () => {
      void this.applyLine().catch((e) => this.surfaceError(e));
    });
    el<HTMLButtonElement>("line-cancel").addEventListener("click", () => {
      this.lineDraft = null; // no request on cancel
      el("line-edit").classList.add("hidden");
      void this.showFrame();
    });
    el<HTMLFormElement>("label-form").addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submitLabel().catch((e) => this.surfaceError(e));
    });
    el<HTMLButtonElement>("classify-button").addEventListener("click", () => {
      void this.classifyCurrent().catch((e) => this.surfaceError(e));
    });
  }

  moveCursor(delta: number): void {
    this.state = stepCursor(this.state, delta);
    void this.showFrame();
  }

  async showTab(tab: string): Promise<void> {
    for (const name of ["review", "refset", "confusion"]) {
      el(`view-${name}`).classList.toggle("hidden", name !== tab);
    }
    document.querySelectorAll<HTMLButtonElement>("nav .tab").forEach((b) => {
      b.classList.toggle("active", b.dataset.tab === tab);
    });
    if (tab === "refset") await this.renderRefset().catch((e) => this.surfaceError(e));
    if (tab === "confusion") await this.renderConfusion().catch((e) => this.surfaceError(e));
  }

  segmentId(index: number): string {
    return `${this.state.routineId}:${index}`;
  }

  renderSegments(labels: Record<string, string>): void {
    const host = el<HTMLOListElement>("segment-list");
    host.innerHTML = "";
    this.segmentsDoc?.segments.forEach((segment, index) => {
      const item = document.createElement("li");
      const label = labels[String(index)];
      const kind = segment.is_routine_jump ? `jump ${index}` : "bounce";
      item.textContent = label ? `${kind} · ${label}` : kind;
      item.classList.toggle("bounce", !segment.is_routine_jump);
      item.classList.toggle("selected", this.state.currentSegment === index);
      item.addEventListener("click", () => {
        this.state = selectSegment(this.state, index, segment);
        this.renderSegments(labels);
        void this.showFrame();
      });
      host.append(item);
    });
  }

  async frameMeta(frame: number): Promise<FrameMeta | null> {
    if (!this.metaCache.has(frame)) {
      try {
        this.metaCache.set(frame, await this.client.frameMeta(this.state.routineId!, frame));
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) {
          this.metaCache.set(frame, null); // contact frame: no crop saved
        } else {
          throw err;
        }
      }
    }
    return this.metaCache.get(frame)!;
  }

  async showFrame(): Promise<void> {
    const frame = this.state.frameCursor;
    this.slider.value = String(frame);
    el("frame-label").textContent = `frame ${frame}`;
    const ctx = this.canvas.getContext("2d")!;
    const meta = this.state.routineId ? await this.frameMeta(frame) : null;
    ctx.fillStyle = "#000";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    if (!meta) {
      ctx.fillStyle = "#889";
      ctx.fillText("no crop for this frame (bed contact)", 16, 24);
      return;
    }
    const image = new Image();
    image.src = this.client.frameUrl(this.state.routineId!, frame);
    await image.decode();
    this.canvas.width = image.naturalWidth;
    this.canvas.height = image.naturalHeight;
    ctx.drawImage(image, 0, 0);
    this.drawOverlays(ctx, meta);
    this.prefetchAround();
  }

  drawOverlays(ctx: CanvasRenderingContext2D, meta: FrameMeta): void {
    const t = this.state.toggles;
    const commands: DrawCmd[] = [];
    if (t.hull) commands.push(...hullCommands(meta.hull, meta.origin));
    if (t.bbox) commands.push(...bboxCommands(meta.bbox, meta.origin));
    commands.push(...centroidCommands(meta.centroid, meta.origin));
    if (t.trampolineLine && this.segmentsDoc) {
      const row = this.lineDraft ?? this.segmentsDoc.line_row;
      commands.push(...trampolineLineCommands(row, meta.origin, this.canvas.height));
    }
    const pose = this.poseByFrame.get(meta.frame);
    if (t.skeleton && pose) commands.push(...skeletonCommands(pose, meta.origin));
    for (const cmd of commands) {
      ctx.strokeStyle = ctx.fillStyle = STYLES[cmd.style] ?? "#fff";
      ctx.lineWidth = 2;
      if (cmd.kind === "polyline") {
        ctx.beginPath();
        cmd.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
        ctx.stroke();
      } else if (cmd.kind === "circle") {
        ctx.beginPath();
        ctx.arc(cmd.points[0][0], cmd.points[0][1], cmd.radius ?? 3, 0, Math.PI * 2);
        ctx.fill();
      } else if (cmd.kind === "rect") {
        const [[x0, y0], [x1, y1]] = cmd.points;
        ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
      } else if (cmd.kind === "hline") {
        ctx.beginPath();
        ctx.moveTo(0, cmd.y!);
        ctx.lineTo(this.canvas.width, cmd.y!);
        ctx.stroke();
      }
    }
  }

  prefetchAround(): void {
    for (const frame of prefetchWindow(this.state)) {
      if (!this.prefetched.has(frame)) {
        this.prefetched.add(frame);
        new Image().src = this.client.frameUrl(this.state.routineId!, frame);
      }
    }
  }

  canvasRow(ev: MouseEvent): number {
    const rect = this.canvas.getBoundingClientRect();
    return ((ev.clientY - rect.top) / rect.height) * this.canvas.height;
  }

  async onCanvasDown(ev: MouseEvent): Promise<void> {
    if (!this.segmentsDoc) return;
    const meta = await this.frameMeta(this.state.frameCursor);
    if (!meta) return;
    const row = this.segmentsDoc.line_row;
    const local = lineRowInCrop(this.lineDraft ?? row, meta.origin, this.canvas.height);
    if (local !== null && Math.abs(this.canvasRow(ev) - local) < 12) {
      this.dragging = true;
    }
  }

  async onCanvasMove(ev: MouseEvent): Promise<void> {
    if (!this.dragging || !this.segmentsDoc) return;
    const meta = await this.frameMeta(this.state.frameCursor);
    if (!meta) return;
    this.lineDraft = cropRowToLine(this.canvasRow(ev), meta.origin);
    el("line-edit").classList.remove("hidden");
    el("line-preview").textContent = String(this.lineDraft);
    await this.showFrame();
  }

  async applyLine(): Promise<void> {
    if (this.lineDraft === null || !this.state.routineId) return;
    const { routine, segments } = await this.client.putTrampolineLine(
      this.state.routineId,
      this.lineDraft,
      this.state.routineRevision,
    );
    this.lineDraft = null;
    el("line-edit").classList.add("hidden");
    this.segmentsDoc = segments; // recomputed contact flags render immediately
    this.state = noteRoutineRevision(this.state, routine.revision);
    this.metaCache.clear();
    this.renderSegments(routine.labels);
    await this.showFrame();
  }

  async submitLabel(): Promise<void> {
    const input = el<HTMLInputElement>("label-input");
    const errorHost = el<HTMLDivElement>("label-error");
    errorHost.textContent = "";
    const check = validateCode(this.catalog, input.value);
    if (!check.ok) {
      errorHost.textContent = check.reason; // rejected client-side, no request
      return;
    }
    const segmentIndex = this.state.currentSegment;
    if (segmentIndex === null) {
      errorHost.textContent = "select a segment first";
      return;
    }
    this.state = setPendingLabel(this.state, check.code);
    const addToRef = el<HTMLInputElement>("label-add-ref").checked;
    const response = await this.client.labelSegment(
      this.segmentId(segmentIndex),
      check.code,
      addToRef,
      this.state.routineRevision,
    );
    this.state = noteRoutineRevision(this.state, response.revision);
    this.renderSegments(response.labels);
    if (response.reference_entry) {
      await this.renderRefset();
    }
  }

  async classifyCurrent(): Promise<void> {
    if (this.state.currentSegment === null) {
      this.banner("select a segment to classify");
      return;
    }
    const segId = this.segmentId(this.state.currentSegment);
    const [result, observed, refset] = await Promise.all([
      this.client.classifySegment(segId),
      this.client.segmentFeatures(segId),
      this.client.referenceSet(),
    ]);
    this.renderRanked(result);
    this.renderBars(result);
    const best = refset.entries.find((e) => e.entry_id === result.ranked[0].entry_id);
    if (this.state.toggles.anglePlots && best) {
      this.renderPlots(observed, best.trajectory);
    }
  }

  renderRanked(result: ClassifyResult): void {
    const table = el<HTMLTableElement>("ranked-table");
    const rows = result.ranked
      .slice(0, 8)
      .map(
        (m, i) =>
          `<tr><td>${i + 1}</td><td>${m.code}</td><td>${m.entry_id}</td>` +
          `<td>${m.mse.toFixed(2)}</td></tr>`,
      )
      .join("");
    table.innerHTML =
      `<tr><th>#</th><th>code</th><th>reference</th><th>MSE (deg&sup2;)</th></tr>` + rows;
  }

  renderBars(result: ClassifyResult): void {
    const host = el<HTMLDivElement>("feature-bars");
    const widths = contributionBars(result.per_feature, 100);
    host.innerHTML = result.per_feature
      .map(
        (value, i) =>
          `<span>${FEATURE_NAMES[i]}</span>` +
          `<span><span class="bar" style="width:${widths[i].toFixed(1)}%"></span></span>` +
          `<span>${value.toFixed(1)}</span>`,
      )
      .join("");
  }

  renderPlots(observed: TrajectoryDoc, reference: TrajectoryDoc): void {
    const host = el<HTMLDivElement>("angle-plots");
    host.innerHTML = "";
    for (let col = 0; col < FEATURE_NAMES.length; col++) {
      const figure = document.createElement("figure");
      const canvas = document.createElement("canvas");
      canvas.width = 160;
      canvas.height = 80;
      const caption = document.createElement("figcaption");
      caption.textContent = FEATURE_NAMES[col];
      figure.append(canvas, caption);
      host.append(figure);
      const obs = observed.angles.map((row) => row[col]);
      const ref = resampleColumn(
        reference.angles.map((row) => row[col]),
        obs.length,
      );
      const range = sharedRange(obs, ref);
      const ctx = canvas.getContext("2d")!;
      for (const [series, colour] of [
        [ref, "#aab4c8"],
        [obs, "#2d6cdf"],
      ] as const) {
        const plot = plotSeries(series, canvas.width, canvas.height, range);
        ctx.strokeStyle = colour;
        ctx.beginPath();
        plot.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
        ctx.stroke();
      }
    }
  }

  async renderRefset(): Promise<void> {
    const doc: ReferenceSetDoc = await this.client.referenceSet();
    this.state = noteRefsetRevision(this.state, doc.revision);
    const table = el<HTMLTableElement>("refset-table");
    const rows = doc.entries
      .map(
        (e) =>
          `<tr><td>${e.entry_id}</td><td>${e.code}</td><td>${e.routine_id ?? ""}</td>` +
          `<td>${e.trajectory.angles.length}</td>` +
          `<td><button data-entry="${e.entry_id}">delete</button></td></tr>`,
      )
      .join("");
    table.innerHTML =
      `<tr><th>entry</th><th>code</th><th>routine</th><th>frames</th><th></th></tr>` + rows;
    table.querySelectorAll<HTMLButtonElement>("button[data-entry]").forEach((button) => {
      button.addEventListener("click", () => {
        void this.client
          .deleteReference(button.dataset.entry!, this.state.refsetRevision)
          .then(() => this.renderRefset())
          .catch((e) => this.surfaceError(e));
      });
    });
  }

  async renderConfusion(): Promise<void> {
    const report = await this.client.latestEvaluation();
    const summary = el<HTMLDivElement>("eval-summary");
    const canvas = el<HTMLCanvasElement>("confusion-canvas");
    const ctx = canvas.getContext("2d")!;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (!report) {
      summary.textContent = "No evaluation has been run yet.";
      return;
    }
    summary.textContent =
      `mean accuracy ${(report.mean_accuracy * 100).toFixed(1)}% over ` +
      `${report.per_iteration.length} iterations`;
    const cm = report.confusion;
    const n = cm.labels.length;
    const margin = 70;
    const cell = Math.floor((canvas.width - margin) / Math.max(n, 1));
    const rates = rowRates(cm.counts);
    ctx.font = "10px sans-serif";
    for (let i = 0; i < n; i++) {
      ctx.fillStyle = "#1c2330";
      ctx.fillText(cm.labels[i], 4, margin + i * cell + cell / 2 + 3);
      ctx.save();
      ctx.translate(margin + i * cell + cell / 2 + 3, margin - 6);
      ctx.rotate(-Math.PI / 3);
      ctx.fillText(cm.labels[i], 0, 0);
      ctx.restore();
      for (let j = 0; j < n; j++) {
        ctx.fillStyle = cellColor(rates[i][j]);
        ctx.fillRect(margin + j * cell, margin + i * cell, cell - 1, cell - 1);
      }
    }
    canvas.onmousemove = (ev) => {
      const rect = canvas.getBoundingClientRect();
      const x = ((ev.clientX - rect.left) / rect.width) * canvas.width - margin;
      const y = ((ev.clientY - rect.top) / rect.height) * canvas.height - margin;
      const j = Math.floor(x / cell);
      const i = Math.floor(y / cell);
      el("confusion-tooltip").textContent =
        i >= 0 && j >= 0 && i < n && j < n ? cellTooltip(cm, i, j) : "";
    };
  }
}

const app = new App();
app.start().catch((err) => app.surfaceError(err));
