import { describe, expect, it } from "vitest";

import { renderIpAnalysis, renderStatus, renderWebAnalysis } from "../src/analysis";
import type { IpAnalysisRow, StatusInfo, WebAnalysisRow } from "../src/types";
import ipFiltered from "./fixtures/analysis_ip_filtered.json";
import ipFixture from "./fixtures/analysis_ip.json";
import webFixture from "./fixtures/analysis_web.json";
import statusFixture from "./fixtures/status.json";

const webRows = webFixture as WebAnalysisRow[];
const ipRows = ipFixture as IpAnalysisRow[];

describe("renderWebAnalysis", () => {
  it("draws one bar per browser with counts equal to the fixture", () => {
    const host = document.createElement("div");
    renderWebAnalysis(host, webRows);

    const lines = host.querySelectorAll(".bar-row");
    expect(lines.length).toBe(webRows.length);
    const labels = [...host.querySelectorAll(".bar-label")].map((n) => n.textContent);
    const counts = [...host.querySelectorAll(".bar-count")].map((n) => n.textContent);
    expect(labels).toEqual(webRows.map((r) => r.browser));
    expect(counts).toEqual(webRows.map((r) => String(r.count)));
  });

  it("scales bar widths to the largest count", () => {
    const host = document.createElement("div");
    renderWebAnalysis(host, webRows);
    const bars = [...host.querySelectorAll(".bar")] as HTMLElement[];
    const max = Math.max(...webRows.map((r) => r.count));
    bars.forEach((bar, i) => {
      expect(bar.style.width).toBe(`${(webRows[i]!.count / max) * 100}%`);
    });
  });

  it("shows an empty state with no data", () => {
    const host = document.createElement("div");
    renderWebAnalysis(host, []);
    expect(host.querySelector(".empty-state")).not.toBeNull();
  });
});

describe("renderIpAnalysis", () => {
  it("renders a row per address with a badge for blocked ones", () => {
    const host = document.createElement("div");
    renderIpAnalysis(host, ipRows, new Set(["203.0.113.50"]));

    const ips = [...host.querySelectorAll(".col-ip")].map((n) => n.textContent);
    expect(ips).toEqual(ipRows.map((r) => r.ip));
    const requests = [...host.querySelectorAll(".col-requests")].map(
      (n) => n.textContent,
    );
    expect(requests).toEqual(ipRows.map((r) => String(r.requests)));

    const badged = [...host.querySelectorAll("tr")].filter((tr) =>
      tr.querySelector(".block-badge"),
    );
    expect(badged.length).toBe(1);
    expect(badged[0]!.querySelector(".col-ip")!.textContent).toBe("203.0.113.50");
  });

  it("lists per-event timestamps in the drill-down view", () => {
    const host = document.createElement("div");
    renderIpAnalysis(host, ipFiltered as IpAnalysisRow[]);
    const items = host.querySelectorAll(".ts-list li");
    expect(items.length).toBe((ipFiltered[0] as IpAnalysisRow).timestamps!.length);
    expect(items.length).toBe((ipFiltered[0] as IpAnalysisRow).requests);
  });

  it("shows an empty state with no data", () => {
    const host = document.createElement("div");
    renderIpAnalysis(host, []);
    expect(host.querySelector(".empty-state")).not.toBeNull();
  });
});

describe("renderStatus", () => {
  it("displays the API totals verbatim", () => {
    const info = statusFixture as StatusInfo;
    const host = document.createElement("div");
    renderStatus(host, info);

    const values = [...host.querySelectorAll(".stat-value")].map((n) => n.textContent);
    expect(values.slice(0, 3)).toEqual([
      String(info.total_requests),
      String(info.events_recorded),
      String(info.active_blocks),
    ]);

    const decisions = [...host.querySelectorAll(".decision")].map((n) => n.textContent);
    expect(decisions.length).toBe(Object.keys(info.decisions).length);
    for (const [kind, count] of Object.entries(info.decisions)) {
      expect(decisions).toContain(`${kind}: ${count}`);
    }
  });
});
