import { describe, expect, it } from "vitest";
import { RingBuffer } from "../src/ring.js";

describe("RingBuffer", () => {
    it("keeps insertion order before wrapping", () => {
        const ring = new RingBuffer<number>(5);
        for (const v of [1, 2, 3]) ring.push(v);
        expect(ring.toArray()).toEqual([1, 2, 3]);
        expect(ring.length).toBe(3);
        expect(ring.last()).toBe(3);
    });

    it("drops the oldest once full", () => {
        const ring = new RingBuffer<number>(3);
        for (const v of [1, 2, 3, 4, 5]) ring.push(v);
        expect(ring.toArray()).toEqual([3, 4, 5]);
        expect(ring.length).toBe(3);
        expect(ring.at(0)).toBe(3);
        expect(ring.at(2)).toBe(5);
        expect(ring.at(3)).toBeUndefined();
    });

    it("tail returns the most recent n oldest-first", () => {
        const ring = new RingBuffer<number>(4);
        for (const v of [1, 2, 3, 4, 5, 6]) ring.push(v);
        expect(ring.tail(2)).toEqual([5, 6]);
        expect(ring.tail(10)).toEqual([3, 4, 5, 6]);
    });

    it("capacity one holds only the newest", () => {
        const ring = new RingBuffer<string>(1);
        ring.push("a");
        ring.push("b");
        expect(ring.toArray()).toEqual(["b"]);
    });

    it("clear empties and keeps working", () => {
        const ring = new RingBuffer<number>(3);
        for (const v of [1, 2, 3, 4]) ring.push(v);
        ring.clear();
        expect(ring.length).toBe(0);
        expect(ring.last()).toBeUndefined();
        ring.push(9);
        expect(ring.toArray()).toEqual([9]);
    });

    it("rejects zero capacity", () => {
        expect(() => new RingBuffer(0)).toThrow();
    });

    it("survives many wraps", () => {
        const ring = new RingBuffer<number>(7);
        for (let i = 0; i < 1000; i++) ring.push(i);
        expect(ring.toArray()).toEqual([993, 994, 995, 996, 997, 998, 999]);
    });
});
