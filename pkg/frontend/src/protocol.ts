// Message shapes for the serve JSON link (protocol version 1). The server
// sends one JSON object per text frame; replies echo the request id.

export const PROTOCOL_VERSION = 1;

export type Role = "viewer" | "commander";

export interface HelloMsg {
    type: "hello";
    version: number;
    role: Role;
    tick_ms: number;
    commands: string[];
    note?: string; // "commander-busy" when the slot is taken
}

export interface TelemetryMsg {
    type: "telemetry";
    t_ms: number;
    x_m: number;
    y_m: number;
    theta_rad: number;
    vx_m_s: number;
    gap_mm: number;
    tof_mm: number;
    tof_valid: boolean;
    currents_mA: number[]; // load A, load B, release, wrist
    status: number;
    auto_fsm: string;
    grasp_delay_ms: number;
    pinned: boolean;
    perched: boolean;
}

export interface AckMsg {
    type: "ack";
    id?: number;
    name?: string;
    status?: number;
    record?: string; // hex, only for RECORD
    reset?: boolean;
}

export interface ErrMsg {
    type: "err";
    id?: number;
    error: string;
}

export interface RecordsMsg {
    type: "records";
    id?: number;
    experiment: number;
    count: number;
    records: string[]; // 35-byte records as hex
    decoded: Record<string, unknown>[];
}

export interface ExperimentsMsg {
    type: "experiments";
    id?: number;
    experiments: number[];
}

export type ServerMsg =
    | HelloMsg
    | TelemetryMsg
    | AckMsg
    | ErrMsg
    | RecordsMsg
    | ExperimentsMsg;

// STATUS register bits, lowest first. Lamps are a pure decode of this word.
export interface StatusLamps {
    pairA: boolean;
    pairB: boolean;
    wrist: boolean;
    auto: boolean;
    experiment: boolean;
}

export const STATUS_BITS: { key: keyof StatusLamps; mask: number; label: string }[] = [
    { key: "pairA", mask: 1 << 0, label: "PAIR A" },
    { key: "pairB", mask: 1 << 1, label: "PAIR B" },
    { key: "wrist", mask: 1 << 2, label: "WRIST LOCK" },
    { key: "auto", mask: 1 << 3, label: "AUTO" },
    { key: "experiment", mask: 1 << 4, label: "LOGGING" },
];

export function decodeStatus(word: number): StatusLamps {
    return {
        pairA: (word & (1 << 0)) !== 0,
        pairB: (word & (1 << 1)) !== 0,
        wrist: (word & (1 << 2)) !== 0,
        auto: (word & (1 << 3)) !== 0,
        experiment: (word & (1 << 4)) !== 0,
    };
}

// The operator command vocabulary. Four commands carry a u16 parameter;
// the rest must be sent bare. STATUS and RECORD are reads on the device
// side but travel through the same cmd message.
export interface CommandSpec {
    name: string;
    param: "none" | "required";
    hint?: string;
}

export const COMMANDS: CommandSpec[] = [
    { name: "OPEN", param: "none" },
    { name: "CLOSE", param: "none" },
    { name: "TOGGLE AUTO", param: "none" },
    { name: "MARK", param: "required", hint: "experiment id (0 closes)" },
    { name: "ENGAGE", param: "none" },
    { name: "DISENGAGE", param: "none" },
    { name: "LOCK", param: "none" },
    { name: "UNLOCK", param: "none" },
    { name: "ENABLE AUTO", param: "none" },
    { name: "DISABLE AUTO", param: "none" },
    { name: "SET DELAY", param: "required", hint: "milliseconds" },
    { name: "OPEN EXP", param: "required", hint: "experiment id" },
    { name: "CLOSE EXP", param: "none" },
    { name: "NEXT RECORD", param: "required", hint: "records to advance" },
    { name: "STATUS", param: "none" },
    { name: "RECORD", param: "none" },
];

export function commandSpec(name: string): CommandSpec | undefined {
    return COMMANDS.find((c) => c.name === name);
}

export type ParamCheck = { ok: true; param?: number } | { ok: false; reason: string };

// Client-side validation so a bad click never reaches the wire.
export function validateParam(spec: CommandSpec, text: string): ParamCheck {
    const trimmed = text.trim();
    if (spec.param === "none") {
        if (trimmed !== "") {
            return { ok: false, reason: `${spec.name} takes no parameter` };
        }
        return { ok: true };
    }
    if (trimmed === "") {
        return { ok: false, reason: `${spec.name} needs a value` };
    }
    if (!/^\d+$/.test(trimmed)) {
        return { ok: false, reason: `${spec.name}: not a whole number` };
    }
    const value = parseInt(trimmed, 10);
    if (value > 0xffff) {
        return { ok: false, reason: `${spec.name}: value exceeds 65535` };
    }
    return { ok: true, param: value };
}
