// Live event subscription with reconnect/backoff and seq-resume.

import type { SessionEvent } from "./types.js";

export interface StreamHandlers {
  onEvent(event: SessionEvent): void;
  onStatus(connected: boolean): void;
  /** Called when the consumer flagged a resync; must return the seq to resume from. */
  resync(): Promise<number>;
  needsResync(): boolean;
  lastSeq(): number;
}

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 8000;

export class EventStream {
  private ws: WebSocket | null = null;
  private backoff = BACKOFF_START_MS;
  private closed = false;

  constructor(
    private urlFor: (fromSeq: number) => string,
    private handlers: StreamHandlers,
  ) {}

  start(): void {
    this.open(this.handlers.lastSeq());
  }

  stop(): void {
    this.closed = true;
    this.ws?.close();
  }

  private open(fromSeq: number): void {
    if (this.closed) return;
    const ws = new WebSocket(this.urlFor(fromSeq));
    this.ws = ws;
    ws.onopen = () => {
      this.backoff = BACKOFF_START_MS;
      this.handlers.onStatus(true);
    };
    ws.onmessage = async (msg: MessageEvent) => {
      let event: SessionEvent;
      try {
        event = JSON.parse(msg.data as string);
      } catch {
        return; // skip malformed frames
      }
      this.handlers.onEvent(event);
      if (this.handlers.needsResync()) {
        ws.close();
        const seq = await this.handlers.resync();
        this.open(seq);
      }
    };
    ws.onclose = () => {
      this.handlers.onStatus(false);
      if (!this.closed) {
        const wait = this.backoff;
        this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
        setTimeout(() => this.open(this.handlers.lastSeq()), wait);
      }
    };
    ws.onerror = () => {
      // onclose follows; nothing else to do here
    };
  }
}
