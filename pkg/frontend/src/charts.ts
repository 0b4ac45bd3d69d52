// Hand-rolled canvas strip charts; no chart library so the built page is
// a folder of static files.

import { TelemetryMsg } from "./protocol.js";

export interface Series {
    label: string;
    color: string;
    pick: (t: TelemetryMsg) => number | null; // null = gap in the trace
}

export interface StripOptions {
    min: number;
    max: number;
    window: number; // points shown
    threshold?: number; // horizontal marker line
    band?: [number, number]; // shaded validity band
    markInvalid?: (t: TelemetryMsg) => boolean;
}

const FONT = "11px system-ui, sans-serif";

export class StripChart {
    constructor(
        private canvas: HTMLCanvasElement,
        private series: Series[],
        private opts: StripOptions,
    ) {}

    draw(frames: TelemetryMsg[]): void {
        const ctx = this.canvas.getContext("2d");
        if (!ctx) {
            return;
        }
        const w = this.canvas.width;
        const h = this.canvas.height;
        const { min, max, window: n } = this.opts;
        const shown = frames.slice(-n);
        const toY = (v: number) => h - ((v - min) / (max - min)) * (h - 14) - 7;
        const toX = (i: number) => (i / Math.max(n - 1, 1)) * (w - 8) + 4;

        ctx.clearRect(0, 0, w, h);
        ctx.fillStyle = "#10141a";
        ctx.fillRect(0, 0, w, h);

        if (this.opts.band) {
            const [lo, hi] = this.opts.band;
            ctx.fillStyle = "rgba(80, 140, 95, 0.12)";
            ctx.fillRect(0, toY(hi), w, toY(lo) - toY(hi));
        }
        if (this.opts.threshold !== undefined) {
            ctx.strokeStyle = "#c2913d";
            ctx.setLineDash([4, 4]);
            ctx.beginPath();
            ctx.moveTo(0, toY(this.opts.threshold));
            ctx.lineTo(w, toY(this.opts.threshold));
            ctx.stroke();
            ctx.setLineDash([]);
        }

        for (const s of this.series) {
            ctx.strokeStyle = s.color;
            ctx.lineWidth = 1.25;
            ctx.beginPath();
            let pen = false;
            shown.forEach((frame, i) => {
                const v = s.pick(frame);
                if (v === null) {
                    pen = false; // leave a gap where the reading is invalid
                    return;
                }
                const x = toX(i);
                const y = toY(Math.max(min, Math.min(max, v)));
                if (pen) {
                    ctx.lineTo(x, y);
                } else {
                    ctx.moveTo(x, y);
                    pen = true;
                }
            });
            ctx.stroke();
        }

        if (this.opts.markInvalid) {
            ctx.fillStyle = "#b0433a";
            shown.forEach((frame, i) => {
                if (this.opts.markInvalid!(frame)) {
                    ctx.fillRect(toX(i) - 1, h - 6, 2, 4);
                }
            });
        }

        ctx.fillStyle = "#8b949e";
        ctx.font = FONT;
        ctx.fillText(String(max), 4, 12);
        ctx.fillText(String(min), 4, h - 2);
        let lx = 40;
        for (const s of this.series) {
            ctx.fillStyle = s.color;
            ctx.fillText(s.label, lx, 12);
            lx += ctx.measureText(s.label).width + 14;
        }
    }
}

// Top-down view: perch surface on the right, flyer as an oriented square.
export function drawPoseMap(canvas: HTMLCanvasElement, t: TelemetryMsg | null): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) {
        return;
    }
    const w = canvas.width;
    const h = canvas.height;
    ctx.clearRect(0, 0, w, h);
    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, w, h);

    const surfaceX = w - 20;
    ctx.strokeStyle = "#5f84a8";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.moveTo(surfaceX, 8);
    ctx.lineTo(surfaceX, h - 8);
    ctx.stroke();

    if (!t) {
        return;
    }
    // 0.6 m of approach mapped onto the view width.
    const px = surfaceX - (Math.max(0, Math.min(0.6, t.gap_mm / 1000)) / 0.6) * (w - 60);
    const py = h / 2 - Math.max(-0.2, Math.min(0.2, t.y_m)) * (h / 0.5);
    const size = 14;

    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-t.theta_rad);
    ctx.fillStyle = t.perched ? "#4f9e63" : t.pinned ? "#c2913d" : "#8b949e";
    ctx.fillRect(-size / 2, -size / 2, size, size);
    ctx.strokeStyle = "#e6edf3";
    ctx.beginPath();
    ctx.moveTo(0, 0);
    ctx.lineTo(size, 0);
    ctx.stroke();
    ctx.restore();

    ctx.fillStyle = "#8b949e";
    ctx.font = FONT;
    ctx.fillText(`gap ${t.gap_mm.toFixed(1)} mm`, 6, 14);
}
