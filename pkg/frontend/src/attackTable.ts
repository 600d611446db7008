import type { ApiClient } from "./api";
import { el } from "./format";
import type { ConsoleRow } from "./types";

/** The console's six columns, in render order. */
export const CONSOLE_COLUMNS = [
  "id",
  "class",
  "ip",
  "login",
  "browser",
  "time",
] as const;

/**
 * Rebuild the attack table inside container. Rows are expected newest
 * first, as the API delivers them. Passwords are never displayed; the
 * login column carries the account name only.
 */
export function renderAttackTable(container: HTMLElement, rows: ConsoleRow[]): void {
  container.replaceChildren();
  if (rows.length === 0) {
    container.append(el("p", "empty-state", "no attacks recorded"));
    return;
  }
  const table = el("table", "attack-table");
  const head = el("thead");
  const headRow = el("tr");
  for (const column of CONSOLE_COLUMNS) {
    headRow.append(el("th", undefined, column));
  }
  head.append(headRow);
  table.append(head);

  const body = el("tbody");
  for (const row of rows) {
    const tr = el("tr");
    tr.title = row.desc;
    tr.append(el("td", "col-id", String(row.event_id)));
    tr.append(el("td", "col-class", row.class));
    const ipCell = el("td", "col-ip");
    const link = el("a", "ip-link", row.ip);
    link.href = `#ip/${encodeURIComponent(row.ip)}`;
    ipCell.append(link);
    tr.append(ipCell);
    tr.append(el("td", "col-login", row.login ?? "-"));
    tr.append(el("td", "col-browser", row.browser));
    tr.append(el("td", "col-time", row.ts));
    body.append(tr);
  }
  table.append(body);
  container.append(table);
}

/**
 * Poll /api/attacks with a since cursor and keep the table current.
 * On fetch failure the banner becomes visible and the next attempt backs
 * off (doubling up to 10x the base interval); a success hides the banner
 * and resets the pace.
 */
export class AttackTablePoller {
  private rows: ConsoleRow[] = [];
  private cursor: string | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private failures = 0;
  private stopped = true;

  constructor(
    private readonly client: ApiClient,
    private readonly container: HTMLElement,
    private readonly banner: HTMLElement,
    private readonly intervalMs = 1000,
    private readonly onRows?: (rows: ConsoleRow[]) => void,
  ) {}

  async tick(): Promise<void> {
    try {
      const fresh = await this.client.attacks(this.cursor ?? undefined);
      if (fresh.length > 0) {
        this.rows = fresh.concat(this.rows);
        this.cursor = fresh[0]!.ts;
        renderAttackTable(this.container, this.rows);
        this.onRows?.(this.rows);
      } else if (this.rows.length === 0) {
        renderAttackTable(this.container, this.rows);
      }
      this.failures = 0;
      this.banner.hidden = true;
    } catch {
      this.failures += 1;
      this.banner.hidden = false;
    }
  }

  private delay(): number {
    const factor = Math.min(2 ** this.failures, 10);
    return this.intervalMs * factor;
  }

  start(): void {
    this.stopped = false;
    const loop = async () => {
      if (this.stopped) return;
      await this.tick();
      if (this.stopped) return;
      this.timer = setTimeout(loop, this.delay());
    };
    void loop();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}
