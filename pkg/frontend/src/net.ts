// Thin WebSocket wrapper around the session wire protocol.

import type { OutboundMessage, ServerMessage } from "./protocol.js";
import { encode } from "./protocol.js";

export class Connection {
  private ws: WebSocket;

  constructor(url: string, onMessage: (msg: ServerMessage) => void, onClose?: () => void) {
    this.ws = new WebSocket(url);
    this.ws.onmessage = event => onMessage(JSON.parse(event.data as string) as ServerMessage);
    if (onClose) this.ws.onclose = onClose;
  }

  ready(): Promise<void> {
    if (this.ws.readyState === WebSocket.OPEN) return Promise.resolve();
    return new Promise((resolve, reject) => {
      this.ws.addEventListener("open", () => resolve(), { once: true });
      this.ws.addEventListener("error", () => reject(new Error("websocket failed")), { once: true });
    });
  }

  send(msg: OutboundMessage): void {
    this.ws.send(encode(msg));
  }
}
