// Page wiring: one socket, one session, all updates applied in message
// order on the UI event loop.

import { StripChart, drawPoseMap } from "./charts.js";
import {
    COMMANDS,
    RecordsMsg,
    STATUS_BITS,
    TelemetryMsg,
    validateParam,
} from "./protocol.js";
import {
    DecodedRecord,
    concatRecords,
    decodeRecord,
    hexToBytes,
    recordsToCsv,
} from "./records.js";
import { ConsoleSession } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing #${id}`);
    }
    return node as T;
}

let socket: WebSocket | null = null;
let wantReconnect = false;

const session = new ConsoleSession((obj) => {
    if (socket && socket.readyState === WebSocket.OPEN) {
        socket.send(JSON.stringify(obj));
    }
});

// -- connection ---------------------------------------------------------

function connect(): void {
    const url = el<HTMLInputElement>("url").value.trim();
    const role = el<HTMLSelectElement>("role").value === "commander" ? "commander" : "viewer";
    disconnect();
    wantReconnect = false;
    socket = new WebSocket(url);
    socket.onopen = () => session.opened(role);
    socket.onmessage = (ev) => {
        try {
            session.feed(JSON.parse(String(ev.data)), Date.now());
        } catch {
            // non-JSON frame; nothing to render
        }
    };
    socket.onclose = () => {
        socket = null;
        wantReconnect = true;
        session.closed();
    };
    socket.onerror = () => {
        // onclose follows and handles the prompt
    };
    render();
}

function disconnect(): void {
    if (socket) {
        socket.onclose = null;
        socket.close();
        socket = null;
        session.closed();
    }
}

// -- palette ---------------------------------------------------------------

interface PaletteRow {
    button: HTMLButtonElement;
    input: HTMLInputElement | null;
    note: HTMLSpanElement;
}

const paletteRows: PaletteRow[] = [];

function buildPalette(): void {
    const host = el<HTMLDivElement>("palette");
    for (const spec of COMMANDS) {
        const row = document.createElement("div");
        row.className = "cmd-row";
        const button = document.createElement("button");
        button.textContent = spec.name;
        row.appendChild(button);
        let input: HTMLInputElement | null = null;
        if (spec.param === "required") {
            input = document.createElement("input");
            input.placeholder = spec.hint ?? "value";
            input.inputMode = "numeric";
            row.appendChild(input);
        }
        const note = document.createElement("span");
        note.className = "cmd-note";
        row.appendChild(note);
        host.appendChild(row);

        button.onclick = () => {
            note.textContent = "";
            note.className = "cmd-note";
            const check = validateParam(spec, input ? input.value : "");
            if (!check.ok) {
                note.textContent = check.reason;
                note.className = "cmd-note bad";
                return;
            }
            session
                .issue(spec.name, check.param)
                .then((ack) => {
                    note.textContent = `ack 0x${(ack.status ?? 0).toString(16).padStart(4, "0")}`;
                    if (ack.record) {
                        note.textContent += ` record ${ack.record.slice(0, 16)}…`;
                    }
                })
                .catch((err: Error) => {
                    note.textContent = err.message;
                    note.className = "cmd-note bad";
                });
        };
        paletteRows.push({ button, input, note });
    }
}

// -- experiment browser -----------------------------------------------------

let dripped: { experiment: number; msg: RecordsMsg; decoded: DecodedRecord[] } | null = null;

function refreshExperiments(): void {
    session.requestExperiments().then(render).catch(() => undefined);
}

function drip(experiment: number): void {
    const gate = session.canDrip();
    const note = el<HTMLSpanElement>("exp-note");
    if (!gate.ok) {
        note.textContent = gate.reason ?? "blocked";
        return;
    }
    note.textContent = `dripping experiment ${experiment}…`;
    session
        .requestDrip(experiment)
        .then((msg) => {
            const decoded = msg.records.map((hex) => decodeRecord(hexToBytes(hex)));
            dripped = { experiment, msg, decoded };
            note.textContent = msg.count === 0 ? "experiment is empty" : "";
            render();
        })
        .catch((err: Error) => {
            note.textContent = err.message;
        });
}

function offerDownload(name: string, blob: Blob): void {
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = name;
    a.click();
    URL.revokeObjectURL(a.href);
}

function downloadGeckolog(): void {
    if (!dripped) {
        return;
    }
    const bytes = concatRecords(dripped.msg.records);
    // copy into a plain ArrayBuffer so Blob typing is satisfied
    const buf = bytes.buffer.slice(bytes.byteOffset, bytes.byteOffset + bytes.byteLength) as ArrayBuffer;
    const pad = String(dripped.experiment).padStart(3, "0");
    offerDownload(`exp${pad}.geckolog`, new Blob([buf], { type: "application/octet-stream" }));
}

function downloadCsv(): void {
    if (!dripped) {
        return;
    }
    const pad = String(dripped.experiment).padStart(3, "0");
    offerDownload(`exp${pad}.csv`, new Blob([recordsToCsv(dripped.decoded)], { type: "text/csv" }));
}

// -- rendering ----------------------------------------------------------

const tofChart = () =>
    new StripChart(
        el<HTMLCanvasElement>("chart-tof"),
        [{ label: "tof mm", color: "#6ea8dc", pick: (t) => (t.tof_valid ? t.tof_mm : null) }],
        {
            min: 0,
            max: 120,
            window: 400,
            threshold: 40, // auto-grasp arming line
            band: [5, 100], // sensor validity
            markInvalid: (t) => !t.tof_valid,
        },
    );

const CURRENT_COLORS = ["#6ea8dc", "#4f9e63", "#c2913d", "#b0433a"];
const CURRENT_LABELS = ["load A", "load B", "release", "wrist"];

function currentsChart(): StripChart {
    return new StripChart(
        el<HTMLCanvasElement>("chart-currents"),
        CURRENT_LABELS.map((label, i) => ({
            label,
            color: CURRENT_COLORS[i],
            pick: (t: TelemetryMsg) => t.currents_mA?.[i] ?? null,
        })),
        { min: 0, max: 250, window: 400 },
    );
}

let charts: { tof: StripChart; currents: StripChart } | null = null;

function renderLamps(): void {
    const lamps = session.lamps();
    const host = el<HTMLDivElement>("lamps");
    host.innerHTML = "";
    for (const bit of STATUS_BITS) {
        const lamp = document.createElement("div");
        lamp.className = lamps[bit.key] ? "lamp on" : "lamp";
        lamp.textContent = bit.label;
        host.appendChild(lamp);
    }
    el<HTMLSpanElement>("status-word").textContent =
        "0x" + session.lastStatus.toString(16).padStart(4, "0");
}

function renderRecords(): void {
    const table = el<HTMLTableElement>("records");
    table.innerHTML =
        "<tr><th>seq</th><th>t ms</th><th>tof</th><th>status</th><th>crc</th></tr>";
    if (!dripped) {
        return;
    }
    for (const r of dripped.decoded.slice(0, 500)) {
        const tr = document.createElement("tr");
        if (!r.crcOk) {
            tr.className = "bad-row";
        }
        tr.innerHTML =
            `<td>${r.seq}</td><td>${r.timestampMs}</td>` +
            `<td>${r.tofValid ? r.tofMm : "n/a"}</td>` +
            `<td>0x${r.status.toString(16).padStart(4, "0")}</td>` +
            `<td>${r.crcOk ? "ok" : "BAD"}</td>`;
        table.appendChild(tr);
    }
}

function render(): void {
    const connected = session.connected;
    el<HTMLSpanElement>("link-state").textContent = connected
        ? `connected (${session.role})`
        : "disconnected";
    el<HTMLSpanElement>("link-state").className = connected ? "ok" : "bad";
    el<HTMLDivElement>("busy-note").textContent =
        session.note === "commander-busy" ? "another commander holds the slot; viewing only" : "";
    el<HTMLDivElement>("reconnect").style.display =
        !connected && wantReconnect ? "block" : "none";

    const commander = session.canCommand();
    for (const row of paletteRows) {
        row.button.disabled = !commander;
        if (row.input) {
            row.input.disabled = !commander;
        }
    }
    el<HTMLButtonElement>("reset").disabled = !commander;
    el<HTMLButtonElement>("refresh-exps").disabled = !connected;

    renderLamps();

    const t = session.lastTelemetry;
    el<HTMLSpanElement>("tele-line").textContent = t
        ? `t=${(t.t_ms / 1000).toFixed(1)}s gap=${t.gap_mm.toFixed(1)}mm ` +
          `auto=${t.auto_fsm} pinned=${t.pinned} perched=${t.perched}`
        : "no telemetry yet";

    const host = el<HTMLDivElement>("exp-list");
    host.innerHTML = "";
    for (const id of session.experiments) {
        const button = document.createElement("button");
        button.textContent = `drip ${id}`;
        const gate = session.canDrip();
        button.disabled = !gate.ok;
        button.title = gate.ok ? "" : gate.reason ?? "";
        button.onclick = () => drip(id);
        host.appendChild(button);
    }
    el<HTMLButtonElement>("dl-log").disabled = !dripped;
    el<HTMLButtonElement>("dl-csv").disabled = !dripped;
    renderRecords();

    const logHost = el<HTMLDivElement>("log");
    logHost.innerHTML = "";
    for (const line of session.log.tail(14)) {
        const div = document.createElement("div");
        div.className = `log-${line.kind}`;
        div.textContent = line.text;
        logHost.appendChild(div);
    }
}

function tickUi(): void {
    el<HTMLDivElement>("stale").style.display = session.stale(Date.now()) ? "block" : "none";
    if (charts) {
        const frames = session.telemetry.tail(400);
        charts.tof.draw(frames);
        charts.currents.draw(frames);
        drawPoseMap(el<HTMLCanvasElement>("posemap"), session.lastTelemetry);
    }
}

export function main(): void {
    buildPalette();
    charts = { tof: tofChart(), currents: currentsChart() };
    session.onChange = render;

    el<HTMLButtonElement>("connect").onclick = connect;
    el<HTMLButtonElement>("disconnect").onclick = () => {
        wantReconnect = false;
        disconnect();
        render();
    };
    el<HTMLButtonElement>("reconnect-btn").onclick = connect;
    el<HTMLButtonElement>("refresh-exps").onclick = refreshExperiments;
    el<HTMLButtonElement>("dl-log").onclick = downloadGeckolog;
    el<HTMLButtonElement>("dl-csv").onclick = downloadCsv;
    el<HTMLButtonElement>("reset").onclick = () => {
        session.requestReset().catch(() => undefined);
        dripped = null;
    };

    window.setInterval(tickUi, 100);
    render();
}

main();
