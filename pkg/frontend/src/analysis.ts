import { el } from "./format";
import type { IpAnalysisRow, StatusInfo, WebAnalysisRow } from "./types";

/** Per-browser attack counts as a horizontal bar list. */
export function renderWebAnalysis(container: HTMLElement, rows: WebAnalysisRow[]): void {
  container.replaceChildren();
  if (rows.length === 0) {
    container.append(el("p", "empty-state", "no attacks recorded"));
    return;
  }
  const max = Math.max(...rows.map((r) => r.count));
  for (const row of rows) {
    const line = el("div", "bar-row");
    line.append(el("span", "bar-label", row.browser));
    const bar = el("div", "bar");
    bar.style.width = `${(row.count / max) * 100}%`;
    line.append(bar);
    line.append(el("span", "bar-count", String(row.count)));
    container.append(line);
  }
}

/**
 * Per-IP event grouping. Subjects that appear in blockedSubjects get a
 * block badge. When a row carries per-event timestamps (the single-IP
 * drill-down) they render as a sub-list.
 */
export function renderIpAnalysis(
  container: HTMLElement,
  rows: IpAnalysisRow[],
  blockedSubjects: ReadonlySet<string> = new Set(),
): void {
  container.replaceChildren();
  if (rows.length === 0) {
    container.append(el("p", "empty-state", "no attacks recorded"));
    return;
  }
  const table = el("table", "ip-table");
  const head = el("tr");
  for (const name of ["user", "ip", "requests", "first", "last", ""]) {
    head.append(el("th", undefined, name));
  }
  table.append(head);
  for (const row of rows) {
    const tr = el("tr");
    tr.append(el("td", "col-user", row.user_id || "-"));
    tr.append(el("td", "col-ip", row.ip));
    tr.append(el("td", "col-requests", String(row.requests)));
    tr.append(el("td", "col-first", row.first_ts));
    tr.append(el("td", "col-last", row.last_ts));
    const badgeCell = el("td");
    if (blockedSubjects.has(row.ip)) {
      badgeCell.append(el("span", "block-badge", "blocked"));
    }
    tr.append(badgeCell);
    table.append(tr);
    if (row.timestamps) {
      const detail = el("tr", "ip-detail");
      const cell = el("td");
      cell.colSpan = 6;
      const list = el("ul", "ts-list");
      for (const ts of row.timestamps) {
        list.append(el("li", undefined, ts));
      }
      cell.append(list);
      detail.append(cell);
      table.append(detail);
    }
  }
  container.append(table);
}

/** Status counters, rendered verbatim so they never drift from the API. */
export function renderStatus(container: HTMLElement, info: StatusInfo): void {
  container.replaceChildren();
  const items: [string, string][] = [
    ["requests", String(info.total_requests)],
    ["attack events", String(info.events_recorded)],
    ["active blocks", String(info.active_blocks)],
    ["uptime", `${Math.floor(info.uptime_s)}s`],
  ];
  for (const [label, value] of items) {
    const box = el("div", "stat");
    box.append(el("span", "stat-value", value));
    box.append(el("span", "stat-label", label));
    container.append(box);
  }
  const decisions = el("div", "decisions");
  for (const [kind, count] of Object.entries(info.decisions)) {
    decisions.append(el("span", "decision", `${kind}: ${count}`));
  }
  container.append(decisions);
}
