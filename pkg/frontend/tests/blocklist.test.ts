import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { BlocklistView } from "../src/blocklist";
import { isValidIp, remainingTime } from "../src/format";
import type { BlockRow } from "../src/types";
import blockedFixture from "./fixtures/blocked.json";
import { fakeFetch, jsonResponse, type RecordedCall } from "./helpers";

const fixtureRows = blockedFixture as BlockRow[];

function setup(handler: (call: RecordedCall) => Response) {
  const { fn, calls } = fakeFetch(handler);
  const client = new ApiClient("", fn);
  client.setToken("change-me");
  const root = document.createElement("div");
  const onTokenNeeded = vi.fn();
  const now = () => Date.parse(fixtureRows[0]!.blocked_at) + 60_000;
  const view = new BlocklistView(client, root, onTokenNeeded, now);
  return { view, root, calls, fn, onTokenNeeded };
}

function setField(view: BlocklistView, name: string, value: string) {
  (view.form.elements.namedItem(name) as HTMLInputElement).value = value;
}

describe("ip validation", () => {
  it("accepts dotted quads and colon-form addresses", () => {
    expect(isValidIp("198.51.100.7")).toBe(true);
    expect(isValidIp("2001:db8::1")).toBe(true);
  });

  it("rejects malformed addresses", () => {
    for (const bad of ["999.1.2.3", "1.2.3", "01.2.3.4", "a.b.c.d", "", "1.2.3.4.5"]) {
      expect(isValidIp(bad), bad).toBe(false);
    }
  });
});

describe("remainingTime", () => {
  it("formats coarse countdowns and expiry", () => {
    const until = "2026-08-26T01:00:00.000Z";
    const base = Date.parse("2026-08-25T22:00:00.000Z");
    expect(remainingTime(until, base)).toBe("3h 0m");
    expect(remainingTime(until, base + 2 * 3600_000 + 30 * 60_000)).toBe("30m 0s");
    expect(remainingTime(until, Date.parse(until))).toBe("expired");
  });
});

describe("BlocklistView", () => {
  it("lists fixture blocks with remaining time and unblock buttons", async () => {
    const { view, root } = setup(() => jsonResponse(fixtureRows));
    await view.refresh();

    const rows = root.querySelectorAll(".block-table tr");
    expect(rows.length).toBe(fixtureRows.length);
    const subjects = [...root.querySelectorAll(".col-subject")].map(
      (c) => c.textContent,
    );
    expect(subjects).toEqual(fixtureRows.map((r) => r.subject));
    for (const cell of root.querySelectorAll(".col-remaining")) {
      expect(cell.textContent).toMatch(/\dh \d+m/);
    }
    expect(root.querySelectorAll("button.unblock").length).toBe(fixtureRows.length);
  });

  it("rejects an invalid IP inline without sending a request", async () => {
    const { view, root, fn } = setup(() => jsonResponse([]));
    setField(view, "subject", "999.1.2.3");
    await view.submit();

    const error = root.querySelector(".form-error") as HTMLElement;
    expect(error.hidden).toBe(false);
    expect(error.textContent).toContain("999.1.2.3");
    expect(fn).not.toHaveBeenCalled();
  });

  it("round-trips block and unblock against a scripted backend", async () => {
    const state: BlockRow[] = [];
    const { view, root, calls } = setup((call) => {
      if (call.method === "POST") {
        const req = JSON.parse(call.body!);
        const row: BlockRow = {
          subject: req.subject,
          kind: req.kind.toUpperCase(),
          reason: "MANUAL",
          blocked_at: "2026-08-25T22:03:57.403Z",
          block_until: "2026-08-26T01:03:57.403Z",
          attacks: 0,
        };
        state.push(row);
        return jsonResponse(row);
      }
      if (call.method === "DELETE") {
        const subject = decodeURIComponent(call.url.split("/").pop()!);
        const index = state.findIndex((r) => r.subject === subject);
        expect(index).toBeGreaterThanOrEqual(0);
        state.splice(index, 1);
        return jsonResponse({ removed: true });
      }
      return jsonResponse([...state]);
    });

    setField(view, "subject", "198.51.100.7");
    await view.submit();
    expect(calls[0]!.method).toBe("POST");
    expect(root.querySelector(".col-subject")!.textContent).toBe("198.51.100.7");

    (root.querySelector("button.unblock") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(root.querySelector(".empty-state")).not.toBeNull();
    });
    expect(calls.some((c) => c.method === "DELETE")).toBe(true);
    expect(state.length).toBe(0);
  });

  it("asks for the token again on 401", async () => {
    const { view, root, onTokenNeeded } = setup(() =>
      jsonResponse({ error: "missing or wrong admin token" }, 401),
    );
    setField(view, "subject", "198.51.100.7");
    await view.submit();
    expect(onTokenNeeded).toHaveBeenCalledTimes(1);
    expect((root.querySelector(".form-error") as HTMLElement).hidden).toBe(false);
  });

  it("shows the server's validation message on 400", async () => {
    const { view, root } = setup(() =>
      jsonResponse({ error: "duration_s must be positive" }, 400),
    );
    setField(view, "subject", "mallory");
    (view.form.elements.namedItem("kind") as HTMLSelectElement).value = "account";
    setField(view, "duration_s", "-5");
    await view.submit();
    const error = root.querySelector(".form-error") as HTMLElement;
    expect(error.textContent).toBe("duration_s must be positive");
  });

  it("skips IP validation for account subjects", async () => {
    const { view, fn } = setup(() => jsonResponse([]));
    setField(view, "subject", "mallory");
    (view.form.elements.namedItem("kind") as HTMLSelectElement).value = "account";
    await view.submit();
    expect(fn).toHaveBeenCalled();
  });
});
