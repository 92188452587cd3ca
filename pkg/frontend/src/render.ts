// Schematic SVG rendering plus the interaction handlers.
//
// Layout: one column per layer, inputs on the left. Each lever is a beam
// rotating about its fulcrum; clamps are dots on the sending beam at the arc
// position equal to the weight. Strings run from each clamp up over the
// column gap into the receiving layer's pulley stack; the combined net
// string drops from the pulley to the receiving beam. A slack net string is
// drawn dashed and sagging.

import { badges, revealClamps } from "./challenge.js";
import { EditCommand } from "./protocol.js";
import { SessionStore } from "./store.js";
import {
  ARM_LENGTH,
  ClampViewEntry,
  ViewState,
  beamPoint,
  clampAngle,
  fulcrumY,
  layerX,
  rotationDeg,
  snapClamp,
  viewStateFrom,
} from "./view.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const RECV_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];

interface DragState {
  kind: "clamp" | "lever";
  startX: number;
  startY: number;
  startValue: number;
  // clamp identity (unused for lever drags)
  sendLayer: number;
  send: number;
  recv: number;
  // lever identity
  index: number;
  ghost: number;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export class Renderer {
  private store: SessionStore;
  private svg: SVGSVGElement;
  private banner: HTMLDivElement;
  private sidebar: HTMLDivElement;
  private drag: DragState | null = null;
  private reveal = false;

  constructor(root: HTMLElement, store: SessionStore) {
    this.store = store;
    root.innerHTML = "";
    root.className = "levernet-root";

    this.banner = document.createElement("div");
    this.banner.className = "banner";
    root.appendChild(this.banner);

    const row = document.createElement("div");
    row.className = "content";
    root.appendChild(row);

    this.svg = el("svg", { width: 980, height: 560 });
    this.svg.classList.add("scene");
    row.appendChild(this.svg);

    this.sidebar = document.createElement("div");
    this.sidebar.className = "sidebar";
    row.appendChild(this.sidebar);

    this.svg.addEventListener("pointerdown", (e) => this.pointerDown(e));
    this.svg.addEventListener("pointermove", (e) => this.pointerMove(e));
    this.svg.addEventListener("pointerup", (e) => this.pointerUp(e));
    this.svg.addEventListener("pointercancel", () => (this.drag = null));

    store.subscribe(() => this.draw());
    this.draw();
  }

  private view(): ViewState {
    return viewStateFrom(this.store.current);
  }

  // -- interaction ---------------------------------------------------------

  private pointerDown(e: PointerEvent): void {
    const view = this.view();
    if (view.readOnly) return;
    const target = e.target as Element;
    const kind = target.getAttribute("data-kind");
    if (kind === "clamp") {
      this.svg.setPointerCapture(e.pointerId);
      this.drag = {
        kind: "clamp",
        startX: e.clientX,
        startY: e.clientY,
        startValue: Number(target.getAttribute("data-position")),
        sendLayer: Number(target.getAttribute("data-send-layer")),
        send: Number(target.getAttribute("data-send")),
        recv: Number(target.getAttribute("data-recv")),
        index: 0,
        ghost: Number(target.getAttribute("data-position")),
      };
    } else if (kind === "input-lever") {
      this.svg.setPointerCapture(e.pointerId);
      this.drag = {
        kind: "lever",
        startX: e.clientX,
        startY: e.clientY,
        startValue: Number(target.getAttribute("data-angle")),
        sendLayer: 0,
        send: 0,
        recv: 0,
        index: Number(target.getAttribute("data-index")),
        ghost: Number(target.getAttribute("data-angle")),
      };
    }
  }

  private pointerMove(e: PointerEvent): void {
    if (!this.drag) return;
    if (this.drag.kind === "clamp") {
      const dx = e.clientX - this.drag.startX;
      this.drag.ghost = snapClamp(this.drag.startValue + dx / ARM_LENGTH);
    } else {
      // full arc of the beam tip spans about the arm length vertically
      const dy = e.clientY - this.drag.startY;
      this.drag.ghost = clampAngle(this.drag.startValue + dy / ARM_LENGTH);
    }
    this.draw();
  }

  private pointerUp(e: PointerEvent): void {
    if (!this.drag) return;
    const d = this.drag;
    this.drag = null;
    this.svg.releasePointerCapture(e.pointerId);
    const cmd: EditCommand =
      d.kind === "clamp"
        ? {
            command: "set_clamp",
            send: [d.sendLayer, d.send],
            recv: [d.sendLayer + 1, d.recv],
            position: d.ghost,
          }
        : { command: "set_input_lever", index: d.index, angle: d.ghost };
    this.store.queueEdit(cmd);
    this.draw();
  }

  // -- drawing -------------------------------------------------------------

  private draw(): void {
    const view = this.view();
    this.banner.textContent = view.banner ?? "";
    this.banner.style.display = view.banner ? "block" : "none";
    this.drawScene(view);
    this.drawSidebar(view);
  }

  private drawScene(view: ViewState): void {
    this.svg.innerHTML = "";
    if (view.levers.length === 0) return;

    // strings first, so beams draw over them
    for (const clamp of view.clamps) {
      this.drawClampString(view, clamp);
    }
    for (let k = 1; k < view.layerSizes.length; k++) {
      for (let i = 0; i < view.layerSizes[k]; i++) {
        this.drawNetString(view, k, i);
      }
    }
    for (const column of view.levers) {
      for (const lever of column) {
        this.drawLever(view, lever.layer, lever.index);
      }
    }
    const ghosts = this.reveal ? revealClamps(view.report) : null;
    if (ghosts) {
      for (const ghost of ghosts) {
        const angle = view.levers[ghost.sendLayer][ghost.send].angle;
        const p = beamPoint(ghost.sendLayer, ghost.send, angle, ghost.position);
        this.svg.appendChild(
          el("circle", {
            cx: p.x,
            cy: p.y,
            r: 7,
            fill: "none",
            stroke: RECV_COLORS[ghost.recv % RECV_COLORS.length],
            "stroke-width": 2,
            "stroke-dasharray": "3 2",
          }),
        );
      }
    }
  }

  private pulleyPoint(layer: number, recv: number): { x: number; y: number } {
    return { x: layerX(layer) - 52, y: fulcrumY(recv) - 46 };
  }

  private drawClampString(view: ViewState, clamp: ClampViewEntry): void {
    const sendLever = view.levers[clamp.sendLayer][clamp.send];
    const dragging =
      this.drag &&
      this.drag.kind === "clamp" &&
      this.drag.sendLayer === clamp.sendLayer &&
      this.drag.send === clamp.send &&
      this.drag.recv === clamp.recv;
    const position = dragging ? (this.drag as DragState).ghost : clamp.position;
    const from = beamPoint(
      clamp.sendLayer,
      clamp.send,
      sendLever.angle,
      position,
    );
    const to = this.pulleyPoint(clamp.sendLayer + 1, clamp.recv);
    const color = RECV_COLORS[clamp.recv % RECV_COLORS.length];
    this.svg.appendChild(
      el("line", {
        x1: from.x,
        y1: from.y,
        x2: to.x,
        y2: to.y,
        stroke: color,
        "stroke-width": 1,
        opacity: 0.45,
      }),
    );
    // the clamp itself: draggable dot on the beam
    const dot = el("circle", {
      cx: from.x,
      cy: from.y,
      r: 6,
      fill: color,
      stroke: dragging ? "#000" : "none",
      "stroke-width": 2,
    });
    dot.setAttribute("data-kind", "clamp");
    dot.setAttribute("data-send-layer", String(clamp.sendLayer));
    dot.setAttribute("data-send", String(clamp.send));
    dot.setAttribute("data-recv", String(clamp.recv));
    dot.setAttribute("data-position", String(clamp.position));
    dot.classList.add("grabbable");
    this.svg.appendChild(dot);
  }

  private drawNetString(view: ViewState, layer: number, index: number): void {
    const lever = view.levers[layer][index];
    const pulley = this.pulleyPoint(layer, index);
    const assembly = view.pulleys[layer - 1];
    const fraction = assembly ? assembly.attachment_fraction : 0.5;
    // the net string attaches left of the fulcrum at the compensating fraction
    const attach = beamPoint(layer, index, lever.angle, -fraction);
    const slack = lever.slack;
    if (slack) {
      const sagX = (pulley.x + attach.x) / 2;
      const sagY = Math.max(pulley.y, attach.y) + 26;
      this.svg.appendChild(
        el("path", {
          d: `M ${pulley.x} ${pulley.y} Q ${sagX} ${sagY} ${attach.x} ${attach.y}`,
          fill: "none",
          stroke: "#999",
          "stroke-width": 2,
          "stroke-dasharray": "5 4",
        }),
      );
    } else {
      this.svg.appendChild(
        el("line", {
          x1: pulley.x,
          y1: pulley.y,
          x2: attach.x,
          y2: attach.y,
          stroke: "#333",
          "stroke-width": 2,
        }),
      );
    }
    // pulley stack: one circle per stage
    const stages = assembly ? assembly.stages : 1;
    for (let s = 0; s < stages; s++) {
      this.svg.appendChild(
        el("circle", {
          cx: pulley.x,
          cy: pulley.y - s * 10,
          r: 5,
          fill: "#fff",
          stroke: "#333",
          "stroke-width": 1.5,
        }),
      );
    }
  }

  private drawLever(view: ViewState, layer: number, index: number): void {
    const lever = view.levers[layer][index];
    const dragging =
      this.drag &&
      this.drag.kind === "lever" &&
      layer === 0 &&
      this.drag.index === index;
    const angle = dragging ? (this.drag as DragState).ghost : lever.angle;
    const cx = layerX(layer);
    const cy = fulcrumY(index);
    const deg = rotationDeg(angle);

    const group = el("g", {
      transform: `rotate(${deg} ${cx} ${cy})`,
    });
    const beam = el("line", {
      x1: cx - ARM_LENGTH,
      y1: cy,
      x2: cx + ARM_LENGTH,
      y2: cy,
      stroke: lever.pinnedValue !== null ? "#b8860b" : "#4a3726",
      "stroke-width": 7,
      "stroke-linecap": "round",
    });
    if (layer === 0 && lever.pinnedValue === null) {
      beam.setAttribute("data-kind", "input-lever");
      beam.setAttribute("data-index", String(index));
      beam.setAttribute("data-angle", String(lever.angle));
      beam.classList.add("grabbable");
    }
    group.appendChild(beam);
    this.svg.appendChild(group);

    // fulcrum
    this.svg.appendChild(
      el("circle", { cx, cy, r: 5, fill: "#222" }),
    );
    // angle label, exact streamed value rounded only for display
    const label = el("text", {
      x: cx,
      y: cy + 34,
      "text-anchor": "middle",
      "font-size": 12,
    });
    label.textContent =
      (lever.pinnedValue !== null ? "pinned " : "") + angle.toFixed(3);
    this.svg.appendChild(label);
  }

  // -- sidebar: input controls, challenge table, errors ---------------------

  private drawSidebar(view: ViewState): void {
    this.sidebar.innerHTML = "";
    if (view.layerSizes.length === 0) {
      this.sidebar.textContent = "waiting for the session...";
      return;
    }

    const inputs = document.createElement("div");
    inputs.className = "inputs";
    inputs.appendChild(heading("input levers"));
    view.levers[0].forEach((lever) => {
      const row = document.createElement("div");
      row.className = "input-row";
      const name = document.createElement("span");
      name.textContent = `x${lever.index + 1}`;
      row.appendChild(name);
      if (lever.pinnedValue !== null) {
        row.appendChild(
          button("release pin", view.readOnly, () =>
            this.store.queueEdit({
              command: "pin_input",
              index: lever.index,
              value: null,
            }),
          ),
        );
      } else {
        for (const v of [0, 1] as const) {
          row.appendChild(
            button(String(v), view.readOnly, () =>
              this.store.queueEdit({
                command: "set_input_lever",
                index: lever.index,
                angle: v,
              }),
            ),
          );
        }
        row.appendChild(
          button("pin@1", view.readOnly, () =>
            this.store.queueEdit({
              command: "pin_input",
              index: lever.index,
              value: 1,
            }),
          ),
        );
      }
      inputs.appendChild(row);
    });
    this.sidebar.appendChild(inputs);

    if (view.challenge) {
      this.sidebar.appendChild(this.challengePanel(view));
    }

    if (view.error) {
      const err = document.createElement("div");
      err.className = "error";
      err.textContent = `${view.error.code}: ${view.error.message}`;
      this.sidebar.appendChild(err);
    }

    const rev = document.createElement("div");
    rev.className = "revision";
    rev.textContent = `revision ${view.revision}`;
    this.sidebar.appendChild(rev);
  }

  private challengePanel(view: ViewState): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "challenge";
    panel.appendChild(heading(`challenge: ${view.challenge}`));

    const table = document.createElement("table");
    for (const badge of badges(view.report)) {
      const tr = document.createElement("tr");
      tr.className = badge.passed ? "pass" : "fail";
      const cells = [
        badge.bits.join(" "),
        badge.expected ? "1" : "0",
        badge.got === null ? "-" : badge.got ? "1" : "0",
        badge.passed ? "✓" : "✗",
      ];
      for (const text of cells) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    panel.appendChild(table);

    if (view.report && !view.report.ready && view.report.message) {
      const hint = document.createElement("div");
      hint.className = "hint";
      hint.textContent = view.report.message;
      panel.appendChild(hint);
    }
    if (view.report && view.report.ready && view.report.passed) {
      const solved = document.createElement("div");
      solved.className = "solved";
      solved.textContent = "solved: all rows pass";
      panel.appendChild(solved);
    }

    panel.appendChild(
      button("check", view.readOnly, () => this.store.checkChallenge()),
    );
    panel.appendChild(
      button("reveal", view.readOnly, () => {
        this.reveal = true;
        this.store.checkChallenge(true);
      }),
    );
    return panel;
  }
}

function heading(text: string): HTMLElement {
  const h = document.createElement("h3");
  h.textContent = text;
  return h;
}

function button(
  label: string,
  disabled: boolean,
  onClick: () => void,
): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.disabled = disabled;
  b.addEventListener("click", onClick);
  return b;
}
