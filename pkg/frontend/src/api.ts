// Thin fetch client for the service API. The UI displays what these calls
// return and nothing else.

import type { DesignJson, IntentJson, PlanJson, SessionCreated, SessionSummary } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    const body = await response.text();
    throw new ApiError(response.status, body || response.statusText);
  }
  return (await response.json()) as T;
}

export function submitIntent(text: string): Promise<SessionCreated> {
  return request("/intents", { method: "POST", body: JSON.stringify({ text }) });
}

export function getSession(id: string): Promise<SessionSummary> {
  return request(`/sessions/${id}`);
}

export function clarify(id: string, text: string): Promise<SessionSummary> {
  return request(`/sessions/${id}/clarify`, {
    method: "POST",
    body: JSON.stringify({ text }),
  });
}

export function getIntent(id: string): Promise<IntentJson> {
  return request(`/sessions/${id}/intent`);
}

export function getPlan(id: string): Promise<PlanJson> {
  return request(`/sessions/${id}/plan`);
}

export function getDesign(id: string): Promise<DesignJson> {
  return request(`/sessions/${id}/design`);
}

export const POLL_INTERVAL_MS = 1000;
