// Decoder for the 35-byte experiment record, mirroring the device layout:
//
//   0   u32  seq
//   4   u32  timestamp_ms
//   8   u16  experiment_id
//   10  u16  tof_mm
//   12  u8   tof_valid
//   13  4xu16 servo_current_mA   (load A, load B, release, wrist)
//   21  4xu16 servo_command      (same order)
//   29  u16  status
//   31  u16  grasp_delay_ms
//   33  u16  crc16 (CCITT, init 0xFFFF, over bytes 0..32)
//
// All little-endian. A bad CRC flags the row instead of throwing so the
// browser can show exactly which record arrived damaged.

export const RECORD_SIZE = 35;

const CRC_TABLE: number[] = (() => {
    const table: number[] = [];
    for (let b = 0; b < 256; b++) {
        let c = b << 8;
        for (let i = 0; i < 8; i++) {
            c = c & 0x8000 ? ((c << 1) ^ 0x1021) & 0xffff : (c << 1) & 0xffff;
        }
        table.push(c);
    }
    return table;
})();

export function crc16Ccitt(data: Uint8Array, crc = 0xffff): number {
    for (const byte of data) {
        crc = ((crc << 8) & 0xffff) ^ CRC_TABLE[((crc >> 8) ^ byte) & 0xff];
    }
    return crc;
}

export interface DecodedRecord {
    seq: number;
    timestampMs: number;
    experimentId: number;
    tofMm: number;
    tofValid: boolean;
    servoCurrentMa: [number, number, number, number];
    servoCommand: [number, number, number, number];
    status: number;
    graspDelayMs: number;
    crcOk: boolean;
}

export function decodeRecord(raw: Uint8Array): DecodedRecord {
    if (raw.length !== RECORD_SIZE) {
        throw new Error(`record must be ${RECORD_SIZE} bytes, got ${raw.length}`);
    }
    const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
    const stored = view.getUint16(33, true);
    const crcOk = crc16Ccitt(raw.subarray(0, 33)) === stored;
    const u16x4 = (off: number): [number, number, number, number] => [
        view.getUint16(off, true),
        view.getUint16(off + 2, true),
        view.getUint16(off + 4, true),
        view.getUint16(off + 6, true),
    ];
    return {
        seq: view.getUint32(0, true),
        timestampMs: view.getUint32(4, true),
        experimentId: view.getUint16(8, true),
        tofMm: view.getUint16(10, true),
        tofValid: view.getUint8(12) !== 0,
        servoCurrentMa: u16x4(13),
        servoCommand: u16x4(21),
        status: view.getUint16(29, true),
        graspDelayMs: view.getUint16(31, true),
        crcOk,
    };
}

export function hexToBytes(hex: string): Uint8Array {
    if (hex.length % 2) {
        throw new Error("odd hex length");
    }
    const out = new Uint8Array(hex.length / 2);
    for (let i = 0; i < out.length; i++) {
        const pair = hex.slice(2 * i, 2 * i + 2);
        const value = parseInt(pair, 16);
        if (Number.isNaN(value)) {
            throw new Error(`bad hex byte ${pair}`);
        }
        out[i] = value;
    }
    return out;
}

export function bytesToHex(bytes: Uint8Array): string {
    return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

// The .geckolog download is just the records back to back.
export function concatRecords(hexRecords: string[]): Uint8Array {
    const parts = hexRecords.map(hexToBytes);
    const out = new Uint8Array(parts.reduce((n, p) => n + p.length, 0));
    let off = 0;
    for (const part of parts) {
        out.set(part, off);
        off += part.length;
    }
    return out;
}

const CSV_HEADER = [
    "seq",
    "timestamp_ms",
    "experiment_id",
    "tof_mm",
    "tof_valid",
    "current_load_a_ma",
    "current_load_b_ma",
    "current_release_ma",
    "current_wrist_ma",
    "cmd_load_a",
    "cmd_load_b",
    "cmd_release",
    "cmd_wrist",
    "status",
    "grasp_delay_ms",
    "crc_ok",
].join(",");

export function recordsToCsv(records: DecodedRecord[]): string {
    const lines = [CSV_HEADER];
    for (const r of records) {
        lines.push(
            [
                r.seq,
                r.timestampMs,
                r.experimentId,
                r.tofMm,
                r.tofValid ? 1 : 0,
                ...r.servoCurrentMa,
                ...r.servoCommand,
                r.status,
                r.graspDelayMs,
                r.crcOk ? 1 : 0,
            ].join(","),
        );
    }
    return lines.join("\n") + "\n";
}
