// Presentation-only formatting. Values are rendered verbatim from API
// responses; the UI never computes domain numbers.

export function usd(value: number): string {
  return "$" + value.toLocaleString("en-US");
}

export function num(value: number): string {
  return value.toLocaleString("en-US");
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
