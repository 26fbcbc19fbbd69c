// Tiny HTML-string helpers shared by all views. Views are pure functions
// from data to markup; app.ts mounts the strings and wires events.

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function escapeAttr(value: string): string {
  return escapeHtml(value);
}

/** Wrapper for Arabic content regions: right-to-left, tagged as Arabic. */
export function rtl(inner: string, cssClass = ""): string {
  const cls = cssClass ? ` class="${escapeAttr(cssClass)}"` : "";
  return `<div dir="rtl" lang="ar"${cls}>${inner}</div>`;
}
