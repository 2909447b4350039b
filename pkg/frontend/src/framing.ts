/** Newline-delimited JSON framing over a byte/text stream. */

export class LineCodec {
  private buffer = "";

  /** Feed a chunk; returns every complete line it closed off. */
  push(chunk: string): string[] {
    this.buffer += chunk;
    const lines: string[] = [];
    let nl = this.buffer.indexOf("\n");
    while (nl >= 0) {
      const line = this.buffer.slice(0, nl).replace(/\r$/, "");
      this.buffer = this.buffer.slice(nl + 1);
      if (line.length > 0) lines.push(line);
      nl = this.buffer.indexOf("\n");
    }
    return lines;
  }

  /** Anything buffered but not yet newline-terminated. */
  pending(): string {
    return this.buffer;
  }
}

export function encodeLine(message: unknown): string {
  return JSON.stringify(message) + "\n";
}
