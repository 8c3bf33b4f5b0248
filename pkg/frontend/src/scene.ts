/** Scene controller: an interactive reference preview driven by the slice
 * atlas (so spinning it costs the manager nothing), plus the rendering
 * parameter controls. Drag gestures update the preview immediately and send
 * camera commands through a trailing rate limiter (<= 10 commands/s); wheel
 * zooms; sliders and selects send parameter commands on change. */

import type { ManagerApi } from "./api.js";
import { RateLimiter } from "./debounce.js";
import type { CameraValues, RenderParamValues, StateSnapshot } from "./types.js";

const CAMERA_INTERVAL_MS = 100; // 10 commands/s ceiling
const DRAG_DEGREES_PER_PX = 0.5;
const PREVIEW_SIZE = 220;

interface AtlasDescriptor {
  nx: number;
  ny: number;
  nz: number;
  tilesX: number;
}

export interface SceneCallbacks {
  onCamera(values: Partial<CameraValues>): void;
  onParams(values: Partial<RenderParamValues>): void;
}

export class SceneController {
  camera: CameraValues = {
    azimuth: 0, elevation: 0, roll: 0, zoom: 1, pan: [0, 0],
  };
  readonly cameraLimiter: RateLimiter<Partial<CameraValues>>;
  atlasMissing = true;

  private dragAt: [number, number] | null = null;
  private atlasImage: HTMLImageElement | null = null;
  private atlasMeta: AtlasDescriptor | null = null;
  private readonly canvas: HTMLCanvasElement;
  private readonly controls: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly api: ManagerApi,
    private readonly callbacks: SceneCallbacks,
  ) {
    this.canvas = document.createElement("canvas");
    this.canvas.className = "scene-preview";
    this.canvas.width = PREVIEW_SIZE;
    this.canvas.height = PREVIEW_SIZE;
    this.controls = document.createElement("div");
    this.controls.className = "param-controls";
    root.appendChild(this.canvas);
    root.appendChild(this.controls);
    this.cameraLimiter = new RateLimiter(CAMERA_INTERVAL_MS, (values) =>
      this.callbacks.onCamera(values),
    );
    this.buildControls();

    this.canvas.addEventListener("mousedown", (ev) => {
      this.dragAt = [ev.clientX, ev.clientY];
    });
    this.canvas.addEventListener("mousemove", (ev) => {
      if (!this.dragAt) return;
      const dx = ev.clientX - this.dragAt[0];
      const dy = ev.clientY - this.dragAt[1];
      this.dragAt = [ev.clientX, ev.clientY];
      this.camera.azimuth = wrapAngle(
        this.camera.azimuth + dx * DRAG_DEGREES_PER_PX,
      );
      this.camera.elevation = wrapAngle(
        this.camera.elevation + dy * DRAG_DEGREES_PER_PX,
      );
      this.drawPreview();
      this.cameraLimiter.push({
        azimuth: this.camera.azimuth,
        elevation: this.camera.elevation,
      });
    });
    const stop = () => {
      this.dragAt = null;
    };
    this.canvas.addEventListener("mouseup", stop);
    this.canvas.addEventListener("mouseleave", stop);
    this.canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
      this.camera.zoom = Math.max(0.05, this.camera.zoom * factor);
      this.drawPreview();
      this.cameraLimiter.push({ zoom: this.camera.zoom });
    });
  }

  /** Adopt acknowledged state so widget positions track the server. */
  syncFrom(state: StateSnapshot): void {
    this.camera = { ...state.camera, pan: [...state.camera.pan] };
    const params = state.params;
    for (const [name, value] of Object.entries({
      sample_step: params.sample_step,
      opacity_scale: params.opacity_scale,
      iso_level: params.iso_level,
    })) {
      const input = this.controls.querySelector<HTMLInputElement>(
        `input[name="${name}"]`,
      );
      if (input) input.value = String(value);
    }
    const map = this.controls.querySelector<HTMLSelectElement>(
      'select[name="colour_map"]',
    );
    if (map) map.value = params.colour_map;
    const mode = this.controls.querySelector<HTMLSelectElement>(
      'select[name="mode"]',
    );
    if (mode) mode.value = params.mode;
    this.drawPreview();
  }

  async loadAtlas(slot: string | null): Promise<void> {
    this.atlasImage = null;
    this.atlasMeta = null;
    this.atlasMissing = true;
    if (slot) {
      const meta = await this.api.atlasDescriptor(slot);
      if (meta) {
        this.atlasMeta = meta;
        this.atlasImage = await loadImage(this.api.atlasUrl(slot));
        this.atlasMissing = this.atlasImage === null;
      }
    }
    this.drawPreview();
  }

  private slider(
    name: keyof RenderParamValues,
    label: string,
    min: number,
    max: number,
    step: number,
  ): HTMLElement {
    const wrap = document.createElement("label");
    wrap.textContent = label;
    const input = document.createElement("input");
    input.type = "range";
    input.name = name;
    input.min = String(min);
    input.max = String(max);
    input.step = String(step);
    input.addEventListener("change", () => {
      this.callbacks.onParams({ [name]: parseFloat(input.value) });
    });
    wrap.appendChild(input);
    return wrap;
  }

  private buildControls(): void {
    this.controls.appendChild(
      this.slider("sample_step", "sampling", 0.1, 2.0, 0.05),
    );
    this.controls.appendChild(
      this.slider("opacity_scale", "opacity", 0.0, 1.0, 0.01),
    );
    this.controls.appendChild(
      this.slider("iso_level", "iso level", 0.0, 1.0, 0.01),
    );

    const mapWrap = document.createElement("label");
    mapWrap.textContent = "colour map";
    const mapSel = document.createElement("select");
    mapSel.name = "colour_map";
    for (const name of ["grey", "heat", "viridis", "file"]) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      mapSel.appendChild(opt);
    }
    mapSel.addEventListener("change", () => {
      this.callbacks.onParams({ colour_map: mapSel.value });
    });
    mapWrap.appendChild(mapSel);
    this.controls.appendChild(mapWrap);

    const modeWrap = document.createElement("label");
    modeWrap.textContent = "mode";
    const modeSel = document.createElement("select");
    modeSel.name = "mode";
    for (const name of ["volume", "isosurface"]) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      modeSel.appendChild(opt);
    }
    modeSel.addEventListener("change", () => {
      this.callbacks.onParams({
        mode: modeSel.value as RenderParamValues["mode"],
      });
    });
    modeWrap.appendChild(modeSel);
    this.controls.appendChild(modeWrap);
  }

  drawPreview(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const size = this.canvas.width;
    ctx.clearRect(0, 0, size, size);
    ctx.save();
    ctx.translate(size / 2, size / 2);
    ctx.rotate((this.camera.roll * Math.PI) / 180);
    const squish = Math.abs(Math.cos((this.camera.elevation * Math.PI) / 180));
    const scale = this.camera.zoom * 0.72;
    if (this.atlasImage && this.atlasMeta && !this.atlasMissing) {
      // draw the middle slice, sheared by azimuth for a cheap 3D cue
      const { nx, ny, nz, tilesX } = this.atlasMeta;
      const k = Math.floor(nz / 2);
      const sx = (k % tilesX) * nx;
      const sy = Math.floor(k / tilesX) * ny;
      ctx.rotate((this.camera.azimuth * Math.PI) / 180);
      ctx.scale(scale, scale * Math.max(0.08, squish));
      ctx.drawImage(
        this.atlasImage, sx, sy, nx, ny,
        -size / 2, -size / 2, size, size,
      );
    } else {
      // wireframe-box stand-in when no atlas is available
      const az = (this.camera.azimuth * Math.PI) / 180;
      const w = size * 0.5 * scale;
      const depth = w * 0.35 * Math.sin(az);
      ctx.strokeStyle = "#6a7a95";
      ctx.strokeRect(-w / 2, (-w / 2) * squish, w, w * squish);
      ctx.strokeRect(
        -w / 2 + depth, (-w / 2) * squish - depth * 0.4, w, w * squish,
      );
    }
    ctx.restore();
  }
}

function wrapAngle(deg: number): number {
  let a = deg % 360;
  if (a > 180) a -= 360;
  if (a <= -180) a += 360;
  return a;
}

function loadImage(url: string): Promise<HTMLImageElement | null> {
  return new Promise((resolve) => {
    if (typeof Image === "undefined") {
      resolve(null);
      return;
    }
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => resolve(null);
    img.src = url;
  });
}
