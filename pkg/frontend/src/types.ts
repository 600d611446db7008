/** Wire types, mirroring the admin API responses field for field. */

export interface ConsoleRow {
  event_id: number;
  class: string;
  desc: string;
  ip: string;
  login: string | null;
  browser: string;
  url: string;
  ts: string;
}

export interface BlockRow {
  subject: string;
  kind: string;
  reason: string;
  blocked_at: string;
  block_until: string;
  attacks: number;
}

export interface StatusInfo {
  uptime_s: number;
  total_requests: number;
  decisions: Record<string, number>;
  active_blocks: number;
  events_recorded: number;
}

export interface IpAnalysisRow {
  user_id: string;
  ip: string;
  requests: number;
  first_ts: string;
  last_ts: string;
  /** present only when the view is filtered to a single address */
  timestamps?: string[];
}

export interface WebAnalysisRow {
  browser: string;
  count: number;
}

export interface BlockRequest {
  subject: string;
  kind: "ip" | "account";
  duration_s: number;
  reason?: string;
}
