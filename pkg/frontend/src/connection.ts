// Websocket wrapper: feeds server messages into the store, sends client
// messages, reports connection state.

import { ClientMsg } from "./protocol.js";
import { SessionStore } from "./store.js";

export class Connection {
  private ws: WebSocket | null = null;
  onStateChange: ((connected: boolean) => void) | null = null;

  constructor(private store: SessionStore) {}

  connect(url: string): void {
    this.ws = new WebSocket(url);
    this.ws.onmessage = (ev: MessageEvent) => {
      this.store.applyJson(String(ev.data));
    };
    this.ws.onopen = () => this.onStateChange?.(true);
    this.ws.onclose = () => this.onStateChange?.(false);
    this.ws.onerror = () => this.onStateChange?.(false);
  }

  send(messages: ClientMsg[]): void {
    if (!this.ws || this.ws.readyState !== WebSocket.OPEN) return;
    for (const msg of messages) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  close(): void {
    this.ws?.close();
  }
}

export function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const host = params.get("host") ?? window.location.hostname ?? "127.0.0.1";
  const port = params.get("port") ?? "8723";
  return `ws://${host}:${port}/ws`;
}
