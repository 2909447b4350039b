/** A bidirectional line-oriented connection to the debug service. */

export interface Transport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

/** Browser transport: each WebSocket text frame carries one JSON line
 * (the bridge in ../bridge.mjs converts frames to TCP lines verbatim). */
export function webSocketTransport(url: string): Promise<Transport> {
  return new Promise((resolve, reject) => {
    const ws = new WebSocket(url);
    const lineHandlers: Array<(line: string) => void> = [];
    const closeHandlers: Array<() => void> = [];
    ws.onopen = () =>
      resolve({
        send: (line) => ws.send(line),
        onLine: (h) => lineHandlers.push(h),
        onClose: (h) => closeHandlers.push(h),
        close: () => ws.close(),
      });
    ws.onerror = () => reject(new Error(`cannot connect to ${url}`));
    ws.onmessage = (ev) => {
      for (const h of lineHandlers) h(String(ev.data).replace(/\n$/, ""));
    };
    ws.onclose = () => {
      for (const h of closeHandlers) h();
    };
  });
}
