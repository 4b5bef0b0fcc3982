/** Views render to plain strings so they test in node and stay free of any
 * framework; app.ts swaps them into the page. */

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function attr(value: unknown): string {
  return `"${esc(value)}"`;
}

export function toBase64(text: string): string {
  // btoa chokes on non-latin input; go through UTF-8 bytes.
  const bytes = new TextEncoder().encode(text);
  let binary = "";
  for (const b of bytes) {
    binary += String.fromCharCode(b);
  }
  if (typeof btoa === "function") {
    return btoa(binary);
  }
  return Buffer.from(bytes).toString("base64");
}
