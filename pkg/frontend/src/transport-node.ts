/** TCP transport for Node (tests and tooling): speaks to the service
 * directly, no bridge required. */

import * as net from "node:net";

import { LineCodec } from "./framing.js";
import type { Transport } from "./transport.js";

export function tcpTransport(host: string, port: number): Promise<Transport> {
  return new Promise((resolve, reject) => {
    const socket = net.createConnection({ host, port });
    const codec = new LineCodec();
    const lineHandlers: Array<(line: string) => void> = [];
    const closeHandlers: Array<() => void> = [];
    socket.setEncoding("utf-8");
    socket.on("connect", () =>
      resolve({
        send: (line) => socket.write(line),
        onLine: (h) => lineHandlers.push(h),
        onClose: (h) => closeHandlers.push(h),
        close: () => socket.end(),
      }),
    );
    socket.on("error", (err) => reject(err));
    socket.on("data", (chunk: string) => {
      for (const line of codec.push(chunk)) {
        for (const h of lineHandlers) h(line);
      }
    });
    socket.on("close", () => {
      for (const h of closeHandlers) h();
    });
  });
}
