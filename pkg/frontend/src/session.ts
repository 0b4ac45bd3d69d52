// Client-side session state. Everything the panels render lives here; the
// socket layer just feeds server messages in arrival order and forwards
// outgoing objects. Keeping it transport-free lets the tests drive it
// directly.

import {
    AckMsg,
    ExperimentsMsg,
    HelloMsg,
    RecordsMsg,
    Role,
    ServerMsg,
    StatusLamps,
    TelemetryMsg,
    commandSpec,
    decodeStatus,
} from "./protocol.js";
import { RingBuffer } from "./ring.js";

export const DEFAULT_DEPTH = 10000;
export const STALE_AFTER_MS = 2000;

export type SendFn = (obj: Record<string, unknown>) => void;

export interface LogLine {
    kind: "sent" | "ack" | "err" | "info";
    text: string;
}

interface Pending {
    resolve: (msg: AckMsg | RecordsMsg | ExperimentsMsg) => void;
    reject: (err: Error) => void;
}

export class ConsoleSession {
    connected = false;
    role: Role = "viewer";
    hello: HelloMsg | null = null;
    note: string | null = null;
    lastStatus = 0;
    lastTelemetry: TelemetryMsg | null = null;
    telemetry: RingBuffer<TelemetryMsg>;
    log = new RingBuffer<LogLine>(200);
    experiments: number[] = [];
    onChange: (() => void) | null = null;

    private send: SendFn;
    private nextId = 1;
    private pending = new Map<number, Pending>();
    private lastRxWallMs = 0;

    constructor(send: SendFn, depth: number = DEFAULT_DEPTH) {
        this.send = send;
        this.telemetry = new RingBuffer<TelemetryMsg>(depth);
    }

    // -- connection lifecycle --------------------------------------------

    opened(requestRole: Role): void {
        this.connected = true;
        this.send({ type: "hello", role: requestRole });
    }

    closed(): void {
        this.connected = false;
        this.role = "viewer";
        this.note = null;
        for (const p of this.pending.values()) {
            p.reject(new Error("disconnected"));
        }
        this.pending.clear();
        this.pushLog({ kind: "info", text: "link closed" });
        this.changed();
    }

    // -- inbound ------------------------------------------------------------

    feed(msg: ServerMsg, nowWallMs: number): void {
        switch (msg.type) {
            case "hello":
                this.hello = msg;
                this.role = msg.role;
                this.note = msg.note ?? null;
                this.pushLog({ kind: "info", text: `hello: role ${msg.role}` });
                break;
            case "telemetry":
                this.lastTelemetry = msg;
                this.lastStatus = msg.status;
                this.telemetry.push(msg);
                this.lastRxWallMs = nowWallMs;
                break;
            case "ack": {
                if (typeof msg.status === "number") {
                    this.lastStatus = msg.status;
                }
                const label = msg.name ?? (msg.reset ? "reset" : "ok");
                this.pushLog({
                    kind: "ack",
                    text: `${label} ack, status 0x${(msg.status ?? 0).toString(16).padStart(4, "0")}`,
                });
                this.settle(msg.id, msg);
                break;
            }
            case "err":
                // Device rejections arrive here with the error bits spelled
                // out; render the string verbatim.
                this.pushLog({ kind: "err", text: msg.error });
                this.settle(msg.id, msg);
                break;
            case "records":
                this.pushLog({
                    kind: "info",
                    text: `experiment ${msg.experiment}: ${msg.count} records`,
                });
                this.settle(msg.id, msg);
                break;
            case "experiments":
                this.experiments = msg.experiments;
                this.settle(msg.id, msg);
                break;
        }
        this.changed();
    }

    private settle(id: number | undefined, msg: ServerMsg): void {
        if (id === undefined) {
            return;
        }
        const pending = this.pending.get(id);
        if (!pending) {
            return;
        }
        this.pending.delete(id);
        if (msg.type === "err") {
            pending.reject(new Error(msg.error));
        } else {
            pending.resolve(msg as AckMsg | RecordsMsg | ExperimentsMsg);
        }
    }

    // -- derived state ----------------------------------------------------

    lamps(): StatusLamps {
        return decodeStatus(this.lastStatus);
    }

    stale(nowWallMs: number): boolean {
        if (!this.connected || this.lastRxWallMs === 0) {
            return false;
        }
        return nowWallMs - this.lastRxWallMs > STALE_AFTER_MS;
    }

    canCommand(): boolean {
        return this.connected && this.role === "commander";
    }

    // Dripping mid-experiment would race the writer; the lamp tells us.
    canDrip(): { ok: boolean; reason?: string } {
        if (!this.canCommand()) {
            return { ok: false, reason: "commander role required" };
        }
        if (this.lamps().experiment) {
            return { ok: false, reason: "experiment still logging; MARK 0 first" };
        }
        return { ok: true };
    }

    // -- outbound ------------------------------------------------------------

    issue(name: string, param?: number): Promise<AckMsg> {
        const spec = commandSpec(name);
        if (!spec) {
            return Promise.reject(new Error(`unknown command ${name}`));
        }
        if (spec.param === "required" && param === undefined) {
            return Promise.reject(new Error(`${name} needs a parameter`));
        }
        const body: Record<string, unknown> = { type: "cmd", name };
        if (param !== undefined) {
            body.param = param;
        }
        this.pushLog({
            kind: "sent",
            text: param === undefined ? name : `${name} ${param}`,
        });
        return this.request(body) as Promise<AckMsg>;
    }

    requestDrip(experiment: number): Promise<RecordsMsg> {
        return this.request({ type: "drip", experiment }) as Promise<RecordsMsg>;
    }

    requestExperiments(): Promise<ExperimentsMsg> {
        return this.request({ type: "experiments" }) as Promise<ExperimentsMsg>;
    }

    requestReset(): Promise<AckMsg> {
        this.pushLog({ kind: "sent", text: "reset" });
        return this.request({ type: "reset" }) as Promise<AckMsg>;
    }

    private request(body: Record<string, unknown>): Promise<AckMsg | RecordsMsg | ExperimentsMsg> {
        if (!this.connected) {
            return Promise.reject(new Error("not connected"));
        }
        const id = this.nextId++;
        const promise = new Promise<AckMsg | RecordsMsg | ExperimentsMsg>((resolve, reject) => {
            this.pending.set(id, { resolve, reject });
        });
        this.send({ ...body, id });
        this.changed();
        return promise;
    }

    // -- internals ----------------------------------------------------------

    private pushLog(line: LogLine): void {
        this.log.push(line);
    }

    private changed(): void {
        if (this.onChange) {
            this.onChange();
        }
    }
}
