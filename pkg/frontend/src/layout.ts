/** Minimal force-directed layout for the query canvas.
 *
 * Pairwise repulsion, spring attraction along drawn relationships, and a
 * weak centering pull. Dragged nodes are pinned and skipped by the solver.
 */

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
  pinned: boolean;
}

export interface LayoutEdge {
  a: string;
  b: string;
}

export interface LayoutOptions {
  width: number;
  height: number;
  repulsion: number;
  springLength: number;
  springStrength: number;
  centering: number;
  damping: number;
}

export const DEFAULT_OPTIONS: LayoutOptions = {
  width: 800,
  height: 600,
  repulsion: 6000,
  springLength: 120,
  springStrength: 0.05,
  centering: 0.01,
  damping: 0.85,
};

export class ForceLayout {
  private readonly velocities = new Map<string, { vx: number; vy: number }>();
  readonly options: LayoutOptions;

  constructor(
    readonly nodes: LayoutNode[],
    readonly edges: LayoutEdge[],
    options: Partial<LayoutOptions> = {},
  ) {
    this.options = { ...DEFAULT_OPTIONS, ...options };
    for (const node of nodes) {
      this.velocities.set(node.id, { vx: 0, vy: 0 });
    }
  }

  pin(id: string, x: number, y: number): void {
    const node = this.nodes.find((n) => n.id === id);
    if (!node) {
      return;
    }
    node.x = x;
    node.y = y;
    node.pinned = true;
  }

  release(id: string): void {
    const node = this.nodes.find((n) => n.id === id);
    if (node) {
      node.pinned = false;
    }
  }

  step(): void {
    const { repulsion, springLength, springStrength, centering, damping, width, height } =
      this.options;
    const forces = new Map<string, { fx: number; fy: number }>(
      this.nodes.map((n) => [n.id, { fx: 0, fy: 0 }]),
    );

    for (let i = 0; i < this.nodes.length; i++) {
      for (let j = i + 1; j < this.nodes.length; j++) {
        const a = this.nodes[i];
        const b = this.nodes[j];
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const distSq = Math.max(dx * dx + dy * dy, 1);
        const dist = Math.sqrt(distSq);
        const push = repulsion / distSq;
        const fa = forces.get(a.id)!;
        const fb = forces.get(b.id)!;
        fa.fx += (dx / dist) * push;
        fa.fy += (dy / dist) * push;
        fb.fx -= (dx / dist) * push;
        fb.fy -= (dy / dist) * push;
      }
    }

    const byId = new Map(this.nodes.map((n) => [n.id, n]));
    for (const edge of this.edges) {
      const a = byId.get(edge.a);
      const b = byId.get(edge.b);
      if (!a || !b) {
        continue;
      }
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = (dist - springLength) * springStrength;
      const fa = forces.get(a.id)!;
      const fb = forces.get(b.id)!;
      fa.fx += (dx / dist) * pull;
      fa.fy += (dy / dist) * pull;
      fb.fx -= (dx / dist) * pull;
      fb.fy -= (dy / dist) * pull;
    }

    for (const node of this.nodes) {
      if (node.pinned) {
        continue;
      }
      const force = forces.get(node.id)!;
      force.fx += (width / 2 - node.x) * centering;
      force.fy += (height / 2 - node.y) * centering;
      const velocity = this.velocities.get(node.id)!;
      velocity.vx = (velocity.vx + force.fx) * damping;
      velocity.vy = (velocity.vy + force.fy) * damping;
      node.x = Math.min(Math.max(node.x + velocity.vx, 0), width);
      node.y = Math.min(Math.max(node.y + velocity.vy, 0), height);
    }
  }

  run(iterations: number): void {
    for (let i = 0; i < iterations; i++) {
      this.step();
    }
  }
}
