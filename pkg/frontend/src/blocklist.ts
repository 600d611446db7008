import { ApiClient, ApiError } from "./api";
import { el, isValidIp, remainingTime } from "./format";
import type { BlockRow } from "./types";

/**
 * Blocklist panel: a form that places manual blocks and a table of active
 * blocks with remaining time and an unblock button per row.
 *
 * A 401 means the held token was rejected; the view raises onTokenNeeded
 * so the shell can prompt again. A 400 or a client-side validation miss
 * shows inline under the form without leaving the page.
 */
export class BlocklistView {
  readonly form: HTMLFormElement;
  readonly listContainer: HTMLElement;
  private readonly error: HTMLElement;
  rows: BlockRow[] = [];

  constructor(
    private readonly client: ApiClient,
    root: HTMLElement,
    private readonly onTokenNeeded?: () => void,
    private readonly now: () => number = Date.now,
  ) {
    this.form = el("form", "block-form");
    this.form.innerHTML = `
      <input name="subject" placeholder="address or account" required>
      <select name="kind">
        <option value="ip">ip</option>
        <option value="account">account</option>
      </select>
      <input name="duration_s" type="number" value="10800" min="1">
      <input name="reason" placeholder="reason">
      <button type="submit">block</button>
    `;
    this.error = el("p", "form-error");
    this.error.hidden = true;
    this.listContainer = el("div", "block-list");
    root.replaceChildren(this.form, this.error, this.listContainer);
    this.form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submit();
    });
  }

  private field(name: string): HTMLInputElement | HTMLSelectElement {
    return this.form.elements.namedItem(name) as HTMLInputElement | HTMLSelectElement;
  }

  private showError(message: string): void {
    this.error.textContent = message;
    this.error.hidden = false;
  }

  async refresh(): Promise<void> {
    this.rows = await this.client.blocked();
    this.renderList();
  }

  renderList(): void {
    this.listContainer.replaceChildren();
    if (this.rows.length === 0) {
      this.listContainer.append(el("p", "empty-state", "no active blocks"));
      return;
    }
    const table = el("table", "block-table");
    for (const row of this.rows) {
      const tr = el("tr");
      tr.append(el("td", "col-subject", row.subject));
      tr.append(el("td", "col-kind", row.kind));
      tr.append(el("td", "col-reason", row.reason));
      tr.append(el("td", "col-attacks", String(row.attacks)));
      tr.append(
        el("td", "col-remaining", remainingTime(row.block_until, this.now())),
      );
      const cell = el("td");
      const button = el("button", "unblock", "unblock");
      button.type = "button";
      button.addEventListener("click", () => void this.unblock(row.subject));
      cell.append(button);
      tr.append(cell);
      table.append(tr);
    }
    this.listContainer.append(table);
  }

  async submit(): Promise<void> {
    this.error.hidden = true;
    const subject = this.field("subject").value.trim();
    const kind = this.field("kind").value as "ip" | "account";
    const duration = Number(this.field("duration_s").value);
    const reason = this.field("reason").value.trim();
    if (!subject) {
      this.showError("subject is required");
      return;
    }
    if (kind === "ip" && !isValidIp(subject)) {
      this.showError(`not a valid IP address: ${subject}`);
      return;
    }
    try {
      await this.client.block({
        subject,
        kind,
        duration_s: duration,
        reason: reason || undefined,
      });
      (this.field("subject") as HTMLInputElement).value = "";
      await this.refresh();
    } catch (err) {
      this.handleApiError(err);
    }
  }

  async unblock(subject: string): Promise<void> {
    try {
      await this.client.unblock(subject);
      await this.refresh();
    } catch (err) {
      this.handleApiError(err);
    }
  }

  private handleApiError(err: unknown): void {
    if (err instanceof ApiError && err.status === 401) {
      this.showError("admin token rejected");
      this.onTokenNeeded?.();
      return;
    }
    if (err instanceof ApiError) {
      this.showError(err.message);
      return;
    }
    this.showError("admin API unreachable");
  }
}
