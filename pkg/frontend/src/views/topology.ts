// Force-directed topology graph rendered to SVG with a fixed seed, so the
// same design always draws the same picture. Roles are color-coded.

import { escapeHtml } from "../format.js";
import { mulberry32 } from "../rng.js";
import type { DesignJson } from "../types.js";

const WIDTH = 520;
const HEIGHT = 360;
const ROLE_COLORS: Record<string, string> = {
  hub: "#e08a20",
  core: "#4da6ff",
  edge: "#3fb950",
};
const DEFAULT_COLOR = "#b48eff";

interface LayoutNode {
  name: string;
  role?: string;
  x: number;
  y: number;
}

export function layoutTopology(design: DesignJson, seed = 42): LayoutNode[] {
  const rand = mulberry32(seed);
  const nodes: LayoutNode[] = design.sites.map((s) => ({
    name: s.name,
    role: s.role,
    x: 60 + rand() * (WIDTH - 120),
    y: 50 + rand() * (HEIGHT - 100),
  }));
  const index = new Map(nodes.map((n, i) => [n.name, i]));
  const links = design.fiber_routes
    .map((r) => [index.get(r.pair[0]), index.get(r.pair[1])])
    .filter((pair): pair is [number, number] => pair[0] !== undefined && pair[1] !== undefined);

  // Small fixed-iteration simulation: pairwise repulsion, spring links,
  // centering pull. Deterministic by construction.
  for (let iter = 0; iter < 150; iter++) {
    const fx = new Array(nodes.length).fill(0);
    const fy = new Array(nodes.length).fill(0);
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        let dx = nodes[i].x - nodes[j].x;
        let dy = nodes[i].y - nodes[j].y;
        const d2 = Math.max(dx * dx + dy * dy, 1);
        const push = 2600 / d2;
        const d = Math.sqrt(d2);
        dx /= d;
        dy /= d;
        fx[i] += dx * push;
        fy[i] += dy * push;
        fx[j] -= dx * push;
        fy[j] -= dy * push;
      }
    }
    for (const [a, b] of links) {
      const dx = nodes[b].x - nodes[a].x;
      const dy = nodes[b].y - nodes[a].y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = (d - 120) * 0.02;
      fx[a] += (dx / d) * pull;
      fy[a] += (dy / d) * pull;
      fx[b] -= (dx / d) * pull;
      fy[b] -= (dy / d) * pull;
    }
    for (let i = 0; i < nodes.length; i++) {
      fx[i] += (WIDTH / 2 - nodes[i].x) * 0.005;
      fy[i] += (HEIGHT / 2 - nodes[i].y) * 0.005;
      nodes[i].x = Math.min(WIDTH - 40, Math.max(40, nodes[i].x + fx[i]));
      nodes[i].y = Math.min(HEIGHT - 30, Math.max(30, nodes[i].y + fy[i]));
    }
  }
  return nodes;
}

export function renderTopology(design: DesignJson, seed = 42): string {
  const nodes = layoutTopology(design, seed);
  const pos = new Map(nodes.map((n) => [n.name, n]));
  const unverified = design.verified === false;

  const edges = design.fiber_routes
    .map((r) => {
      const a = pos.get(r.pair[0]);
      const b = pos.get(r.pair[1]);
      if (!a || !b) return "";
      const dash = unverified ? ' stroke-dasharray="6 4"' : "";
      return (
        `<line x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
        `x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" ` +
        `stroke="#5a6b80" stroke-width="2"${dash}>` +
        `<title>${escapeHtml(r.pair[0])} - ${escapeHtml(r.pair[1])} (${escapeHtml(
          r.fiber_type
        )})</title></line>`
      );
    })
    .join("");

  const circles = nodes
    .map((n) => {
      const color = (n.role && ROLE_COLORS[n.role]) || DEFAULT_COLOR;
      return (
        `<g class="topo-node"><circle cx="${n.x.toFixed(1)}" cy="${n.y.toFixed(1)}" r="14" ` +
        `fill="${color}"><title>${escapeHtml(n.name)}${
          n.role ? " (" + escapeHtml(n.role) + ")" : ""
        }</title></circle>` +
        `<text x="${n.x.toFixed(1)}" y="${(n.y - 20).toFixed(1)}" text-anchor="middle">` +
        `${escapeHtml(n.name)}</text></g>`
      );
    })
    .join("");

  const legend = Object.entries(ROLE_COLORS)
    .map(
      ([role, color], i) =>
        `<circle cx="${20 + i * 80}" cy="${HEIGHT - 12}" r="6" fill="${color}"/>` +
        `<text x="${30 + i * 80}" y="${HEIGHT - 8}">${role}</text>`
    )
    .join("");

  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="topology" role="img" ` +
    `aria-label="network topology">` +
    edges +
    circles +
    legend +
    "</svg>"
  );
}
