// Fixed-capacity ring so a day-long session cannot grow memory without
// bound. Indexing is oldest-first.

export class RingBuffer<T> {
    private buf: T[] = [];
    private start = 0;

    constructor(readonly capacity: number) {
        if (capacity < 1) {
            throw new Error("ring capacity must be at least 1");
        }
    }

    get length(): number {
        return this.buf.length;
    }

    push(item: T): void {
        if (this.buf.length < this.capacity) {
            this.buf.push(item);
            return;
        }
        this.buf[this.start] = item;
        this.start = (this.start + 1) % this.capacity;
    }

    at(i: number): T | undefined {
        if (i < 0 || i >= this.buf.length) {
            return undefined;
        }
        return this.buf[(this.start + i) % this.buf.length];
    }

    last(): T | undefined {
        return this.at(this.buf.length - 1);
    }

    // Most recent n items, oldest first.
    tail(n: number): T[] {
        const count = Math.min(n, this.buf.length);
        const out: T[] = [];
        for (let i = this.buf.length - count; i < this.buf.length; i++) {
            out.push(this.at(i) as T);
        }
        return out;
    }

    toArray(): T[] {
        return this.tail(this.buf.length);
    }

    clear(): void {
        this.buf = [];
        this.start = 0;
    }
}
