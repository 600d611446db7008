/** Remaining block time as a coarse human string. */
export function remainingTime(blockUntil: string, nowMs: number): string {
  const untilMs = Date.parse(blockUntil);
  if (Number.isNaN(untilMs)) return "?";
  let left = Math.floor((untilMs - nowMs) / 1000);
  if (left <= 0) return "expired";
  const hours = Math.floor(left / 3600);
  left -= hours * 3600;
  const minutes = Math.floor(left / 60);
  if (hours > 0) return `${hours}h ${minutes}m`;
  if (minutes > 0) return `${minutes}m ${left - minutes * 60}s`;
  return `${left}s`;
}

/** Strict dotted-quad IPv4, or a colon-form IPv6 candidate. */
export function isValidIp(value: string): boolean {
  const parts = value.split(".");
  if (parts.length === 4) {
    return parts.every(
      (p) => /^\d{1,3}$/.test(p) && Number(p) <= 255 && String(Number(p)) === p,
    );
  }
  // leave full IPv6 validation to the server, just require colon form
  return value.includes(":") && /^[0-9a-fA-F:]+$/.test(value);
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}
