import "./styles.css";
import { ApiClient } from "./api";
import { renderIpAnalysis, renderStatus, renderWebAnalysis } from "./analysis";
import { AttackTablePoller } from "./attackTable";
import { BlocklistView } from "./blocklist";
import { el } from "./format";

const POLL_INTERVAL_MS = 1000;

function must(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function promptToken(client: ApiClient, onDone: () => void): void {
  const overlay = must("token-overlay");
  overlay.hidden = false;
  const form = overlay.querySelector("form") as HTMLFormElement;
  const input = form.elements.namedItem("token") as HTMLInputElement;
  input.value = "";
  form.onsubmit = (ev) => {
    ev.preventDefault();
    if (!input.value) return;
    client.setToken(input.value);
    overlay.hidden = true;
    onDone();
  };
}

async function refreshPanels(client: ApiClient, blocklist: BlocklistView): Promise<void> {
  const [status, web, blocked] = await Promise.all([
    client.status(),
    client.webAnalysis(),
    client.blocked(),
  ]);
  renderStatus(must("status"), status);
  renderWebAnalysis(must("web-analysis"), web);
  blocklist.rows = blocked;
  blocklist.renderList();
  const blockedIps = new Set(
    blocked.filter((b) => b.kind === "IP").map((b) => b.subject),
  );
  const ipRows = await client.ipAnalysis();
  renderIpAnalysis(must("ip-analysis"), ipRows, blockedIps);
}

async function showIpDetail(client: ApiClient, ip: string): Promise<void> {
  const host = must("ip-detail");
  host.replaceChildren(el("h3", undefined, `events from ${ip}`));
  const body = el("div");
  host.append(body);
  const rows = await client.ipAnalysis(ip);
  renderIpAnalysis(body, rows);
  host.hidden = false;
}

function boot(): void {
  const client = new ApiClient("");
  const blocklist = new BlocklistView(client, must("blocklist"), () =>
    promptToken(client, () => void refreshPanels(client, blocklist)),
  );
  const poller = new AttackTablePoller(
    client,
    must("attack-table"),
    must("stale-banner"),
    POLL_INTERVAL_MS,
    () => void refreshPanels(client, blocklist),
  );
  window.addEventListener("hashchange", () => {
    const match = window.location.hash.match(/^#ip\/(.+)$/);
    if (match) void showIpDetail(client, decodeURIComponent(match[1]!));
    else must("ip-detail").hidden = true;
  });
  promptToken(client, () => {
    poller.start();
    void refreshPanels(client, blocklist);
  });
}

document.addEventListener("DOMContentLoaded", boot);
