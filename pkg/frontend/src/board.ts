// Session board rendering: phase-locked panels, the upper-triangular
// collision matrix with a three-state toggle per cell, vision trays,
// timing-grid judgments and warning banners. Rendering is a pure
// function of the view model plus the last validation error; submissions
// are delegated to the handler passed in (the controller).

import type { ApiError } from "./types.js";
import type { MatrixCell, SessionViewModel } from "./viewmodel.js";

export type SubmitHandler = (stepName: string, body: unknown) => void;

const SCORES = ["boring", "interesting", "electric"] as const;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function banner(kind: string, text: string): HTMLElement {
  const node = el("div", `banner banner-${kind}`, text);
  node.dataset.banner = kind;
  return node;
}

function inlineError(error: ApiError): HTMLElement {
  const node = el(
    "p",
    "inline-error",
    error.field_path ? `${error.field_path}: ${error.message}` : error.message,
  );
  node.dataset.errorCode = error.code;
  if (error.field_path) node.dataset.errorFor = error.field_path;
  return node;
}

function textInput(name: string, placeholder: string): HTMLInputElement {
  const input = el("input");
  input.name = name;
  input.placeholder = placeholder;
  return input;
}

function valueOf(form: HTMLElement, name: string): string {
  const field = form.querySelector<HTMLInputElement | HTMLTextAreaElement | HTMLSelectElement>(
    `[name="${name}"]`,
  );
  return field ? field.value.trim() : "";
}

function checked(form: HTMLElement, name: string): boolean {
  const field = form.querySelector<HTMLInputElement>(`[name="${name}"]`);
  return field ? field.checked : false;
}

// --- ghosty panels ---------------------------------------------------------

function fragmentPanel(vm: SessionViewModel, submit: SubmitHandler): HTMLElement {
  const form = el("form", "panel-form");
  form.dataset.form = "fragment";
  form.append(
    textInput("id", "fragment id (optional)"),
    textInput("text", "fragment text"),
    textInput("domain_tag", "domain tag"),
    textInput("source_kind", "source kind (observation, aesthetic, ...)"),
  );
  const add = el("button", "", "Add fragment");
  add.type = "submit";
  form.appendChild(add);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const body: Record<string, unknown> = {
      id: valueOf(form, "id") || `f${vm.session.protocol === "ghosty" ? vm.session.fragments.length + 1 : 1}`,
      text: valueOf(form, "text"),
      domain_tag: valueOf(form, "domain_tag"),
      source_kind: valueOf(form, "source_kind") || "observation",
    };
    submit("fragment", body);
  });
  const begin = el("button", "", "Begin ghost extraction");
  begin.dataset.action = "advance";
  begin.addEventListener("click", () => submit("advance", {}));
  const wrap = el("div");
  wrap.append(form, begin);
  return wrap;
}

function ghostPanel(vm: SessionViewModel, submit: SubmitHandler): HTMLElement {
  const form = el("form", "panel-form");
  form.dataset.form = "ghost";
  const select = el("select");
  select.name = "fragment_id";
  if (vm.session.protocol === "ghosty") {
    const ghosted = new Set(vm.session.ghosts.map((g) => g.fragment_id));
    for (const fragment of vm.session.fragments) {
      if (ghosted.has(fragment.id)) continue;
      const option = el("option", "", fragment.id);
      option.value = fragment.id;
      select.appendChild(option);
    }
  }
  const description = el("textarea");
  description.name = "structural_description";
  form.append(select, description);
  for (const criterion of [
    "uses_verbs",
    "includes_emotion",
    "cross_domain_comprehensible",
    "reversibility_pass",
  ]) {
    const label = el("label", "checklist-item", criterion.replaceAll("_", " "));
    const box = el("input");
    box.type = "checkbox";
    box.name = criterion;
    label.prepend(box);
    form.appendChild(label);
  }
  const set = el("button", "", "Attach ghost");
  set.type = "submit";
  form.appendChild(set);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    submit("ghost", {
      fragment_id: valueOf(form, "fragment_id"),
      structural_description: valueOf(form, "structural_description"),
      checklist: {
        uses_verbs: checked(form, "uses_verbs"),
        includes_emotion: checked(form, "includes_emotion"),
        cross_domain_comprehensible: checked(form, "cross_domain_comprehensible"),
        reversibility_pass: checked(form, "reversibility_pass"),
      },
    });
  });
  return form;
}

function matrixGrid(vm: SessionViewModel, submit: SubmitHandler): HTMLElement {
  const ids = vm.session.protocol === "ghosty"
    ? vm.session.fragments.map((f) => f.id).sort()
    : [];
  const byKey = new Map(vm.matrix.map((c) => [c.pair.join(":"), c] as const));
  const table = el("table", "collision-matrix");
  table.dataset.testid = "matrix";
  const head = el("tr");
  head.appendChild(el("th"));
  for (const id of ids) head.appendChild(el("th", "", id));
  table.appendChild(head);
  for (let i = 0; i < ids.length; i += 1) {
    const row = el("tr");
    row.appendChild(el("th", "", ids[i]));
    for (let j = 0; j < ids.length; j += 1) {
      const cell = el("td");
      if (j <= i) {
        cell.className = "matrix-lower";
        row.appendChild(cell);
        continue;
      }
      const entry = byKey.get(`${ids[i]}:${ids[j]}`) as MatrixCell | undefined;
      if (!entry) {
        row.appendChild(cell);
        continue;
      }
      cell.dataset.pair = entry.pair.join(":");
      if (entry.score) {
        cell.dataset.score = entry.score;
        cell.className = `matrix-cell scored score-${entry.score}`;
        cell.textContent = entry.score;
      } else if (entry.pending && vm.currentPhase === "matrix") {
        cell.className = "matrix-cell pending";
        cell.dataset.pending = "true";
        for (const score of SCORES) {
          const toggle = el("button", `toggle toggle-${score}`, score[0].toUpperCase());
          toggle.dataset.score = score;
          toggle.title = score;
          toggle.addEventListener("click", () => {
            const rationale =
              score === "electric"
                ? window.prompt("Rationale for electric (required):") ?? ""
                : "";
            submit("collision", { pair: entry.pair, score, rationale });
          });
          cell.appendChild(toggle);
        }
      }
      row.appendChild(cell);
    }
    table.appendChild(row);
  }
  const pendingNote = el(
    "p",
    "pending-count",
    `${vm.pendingPairs.length} pending cell(s)`,
  );
  pendingNote.dataset.testid = "pending-count";
  const wrap = el("div");
  wrap.append(table, pendingNote);
  return wrap;
}

function visionPanel(vm: SessionViewModel, submit: SubmitHandler): HTMLElement {
  const form = el("form", "panel-form");
  form.dataset.form = "vision";
  const collision = el("select");
  collision.name = "collision_id";
  for (const id of vm.gateOutcome?.electric ?? []) {
    const option = el("option", "", id);
    option.value = id;
    collision.appendChild(option);
  }
  form.appendChild(collision);
  for (const field of ["name", "one_line", "emotion", "cinematic_image", "why_now"]) {
    form.appendChild(textInput(field, field.replaceAll("_", " ")));
  }
  for (const dim of ["novelty", "feasibility", "resonance", "timing"]) {
    const input = textInput(dim, `${dim} 1-5`);
    input.type = "number";
    form.appendChild(input);
  }
  const add = el("button", "", "Crystallize vision");
  add.type = "submit";
  form.appendChild(add);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    submit("vision", {
      collision_id: valueOf(form, "collision_id"),
      name: valueOf(form, "name"),
      one_line: valueOf(form, "one_line"),
      emotion: valueOf(form, "emotion"),
      cinematic_image: valueOf(form, "cinematic_image"),
      why_now: valueOf(form, "why_now"),
      ratings: {
        novelty: Number(valueOf(form, "novelty")),
        feasibility: Number(valueOf(form, "feasibility")),
        resonance: Number(valueOf(form, "resonance")),
        timing: Number(valueOf(form, "timing")),
      },
    });
  });
  return form;
}

function visionTrays(vm: SessionViewModel): HTMLElement {
  const wrap = el("div", "vision-trays");
  const advancing = el("div", "tray tray-advancing");
  advancing.dataset.tray = "advancing";
  advancing.appendChild(el("h3", "", "Advancing"));
  const parked = el("div", "tray tray-parked");
  parked.dataset.tray = "not-advancing";
  parked.appendChild(el("h3", "", "Not advancing"));
  for (const [tray, visions] of [
    [advancing, vm.advancingVisions],
    [parked, vm.parkedVisions],
  ] as const) {
    for (const vision of visions) {
      const card = el("div", "vision-card");
      card.dataset.visionId = vision.id;
      card.dataset.advances = String(vision.advances);
      const r = vision.ratings;
      card.append(
        el("strong", "", vision.name),
        el("p", "", vision.one_line),
        el(
          "p",
          "ratings",
          `novelty ${r.novelty} / feasibility ${r.feasibility} / resonance ${r.resonance} / timing ${r.timing}`,
        ),
      );
      tray.appendChild(card);
    }
  }
  wrap.append(advancing, parked);
  return wrap;
}

function bridgePanel(vm: SessionViewModel, submit: SubmitHandler): HTMLElement {
  const form = el("form", "panel-form");
  form.dataset.form = "bridge";
  const vision = el("select");
  vision.name = "vision_id";
  for (const v of vm.advancingVisions) {
    const option = el("option", "", `${v.id} ${v.name}`);
    option.value = v.id;
    vision.appendChild(option);
  }
  const kills = el("textarea");
  kills.name = "kill_conditions";
  kills.placeholder = "one kill condition per line";
  form.append(
    vision,
    textInput("mvv", "minimum viable vision"),
    kills,
    textInput("first_step_24h", "first step (24h)"),
  );
  const set = el("button", "", "Set bridge");
  set.type = "submit";
  form.appendChild(set);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    submit("bridge", {
      vision_id: valueOf(form, "vision_id"),
      mvv: valueOf(form, "mvv"),
      existing_capabilities: [],
      kill_conditions: valueOf(form, "kill_conditions")
        .split("\n")
        .map((line) => line.trim())
        .filter(Boolean),
      first_step_24h: valueOf(form, "first_step_24h"),
    });
  });
  const complete = el("button", "", "Complete session");
  complete.dataset.action = "complete";
  complete.addEventListener("click", () => submit("complete", {}));
  const wrap = el("div");
  wrap.append(form, complete);
  return wrap;
}

// --- precog panels ----------------------------------------------------------

function jsonPanel(
  stepName: string,
  buttonLabel: string,
  submit: SubmitHandler,
  extra?: HTMLElement,
): HTMLElement {
  const form = el("form", "panel-form");
  form.dataset.form = stepName;
  const area = el("textarea");
  area.name = "payload";
  area.placeholder = `${stepName} payload as JSON`;
  const send = el("button", "", buttonLabel);
  send.type = "submit";
  form.append(area, send);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    let body: unknown;
    try {
      body = JSON.parse(valueOf(form, "payload"));
    } catch {
      area.setCustomValidity("not valid JSON");
      area.reportValidity();
      return;
    }
    submit(stepName, body);
  });
  const wrap = el("div");
  wrap.appendChild(form);
  if (extra) wrap.appendChild(extra);
  return wrap;
}

function advanceButton(submit: SubmitHandler, label = "Advance phase"): HTMLElement {
  const button = el("button", "", label);
  button.dataset.action = "advance";
  button.addEventListener("click", () => submit("advance", {}));
  return button;
}

function gridPanel(vm: SessionViewModel, submit: SubmitHandler): HTMLElement {
  const form = el("form", "panel-form");
  form.dataset.form = "grid";
  const axes: [string, string[]][] = [
    ["market_phase", ["pre_emergence", "emergence", "acceleration", "peak", "correction", "plateau"]],
    ["competitive", ["first_mover", "fast_follower", "fortifier", "too_late", "undefined"]],
    ["readiness", ["not_ready", "partially_ready", "ready"]],
    ["external_window", ["open", "opening", "closed"]],
  ];
  form.appendChild(textInput("label", "grid label (e.g. vision name)"));
  for (const [axis, values] of axes) {
    const select = el("select");
    select.name = axis;
    for (const value of values) {
      const option = el("option", "", value);
      option.value = value;
      select.appendChild(option);
    }
    form.appendChild(select);
  }
  form.appendChild(textInput("annotation", "annotation (why-now context, overrides)"));
  const evaluate = el("button", "", "Evaluate grid");
  evaluate.type = "submit";
  form.appendChild(evaluate);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    submit("grid", {
      label: valueOf(form, "label"),
      market_phase: valueOf(form, "market_phase"),
      competitive: valueOf(form, "competitive"),
      readiness: valueOf(form, "readiness"),
      external_window: valueOf(form, "external_window"),
      annotation: valueOf(form, "annotation"),
    });
  });
  const wrap = el("div");
  wrap.append(form, advanceButton(submit));
  return wrap;
}

function judgmentList(vm: SessionViewModel): HTMLElement {
  const list = el("ul", "judgments");
  list.dataset.testid = "judgments";
  for (const evaluation of vm.judgments) {
    const row = el("li", `judgment judgment-${evaluation.judgment.overall}`);
    row.dataset.label = evaluation.label;
    row.dataset.overall = evaluation.judgment.overall;
    row.dataset.escalated = String(evaluation.judgment.escalated_contrarian_required);
    row.textContent =
      `${evaluation.label}: ${evaluation.judgment.overall} ` +
      `(sum=${evaluation.judgment.polarity_sum})`;
    list.appendChild(row);
  }
  return list;
}

// --- top-level board ---------------------------------------------------------

export function renderBoard(
  root: HTMLElement,
  vm: SessionViewModel,
  submit: SubmitHandler,
  error: ApiError | null = null,
): void {
  root.replaceChildren();
  const header = el("header");
  header.appendChild(el("h1", "", `Session ${vm.sessionId} — ${vm.status}`));
  header.dataset.status = vm.status;
  root.appendChild(header);

  if (vm.abortBanner) {
    root.appendChild(banner("terminal", `Session aborted: ${vm.abortBanner}`));
  }
  if (vm.escalationBanner) {
    root.appendChild(banner("escalation", vm.escalationBanner));
  }
  if (vm.inflationBanner) {
    root.appendChild(banner("inflation", vm.inflationBanner));
  }
  for (const warning of vm.warningBanners) {
    root.appendChild(banner("warning", warning));
  }

  const panelBodies: Record<string, (vm: SessionViewModel, s: SubmitHandler) => HTMLElement> =
    vm.protocol === "ghosty"
      ? {
          fragments: fragmentPanel,
          ghosts: ghostPanel,
          matrix: matrixGrid,
          visions: (m, s) => {
            const wrap = el("div");
            wrap.append(visionPanel(m, s), visionTrays(m));
            return wrap;
          },
          bridge: (m, s) => {
            const wrap = el("div");
            wrap.append(bridgePanel(m, s), visionTrays(m));
            return wrap;
          },
          done: (m) => visionTrays(m),
        }
      : {
          signals: (_m, s) => jsonPanel("signal", "Add signal", s, advanceButton(s)),
          convergences: (_m, s) => jsonPanel("convergence", "Add convergence", s, advanceButton(s)),
          contrarian: (_m, s) => jsonPanel("contrarian", "Set contrarian view", s, advanceButton(s)),
          grid: (m, s) => {
            const wrap = el("div");
            wrap.append(gridPanel(m, s), judgmentList(m));
            return wrap;
          },
          actions: (_m, s) => {
            const wrap = el("div");
            const finalize = el("button", "", "Finalize session");
            finalize.dataset.action = "finalize";
            finalize.addEventListener("click", () => s("finalize", {}));
            wrap.append(jsonPanel("action", "Add action", s), finalize);
            return wrap;
          },
          done: (m) => judgmentList(m),
        };

  for (const panel of vm.panels) {
    const section = el("section", `panel ${panel.open ? "open" : "locked"}`);
    section.dataset.panel = panel.id;
    section.dataset.open = String(panel.open);
    const title = el("h2", "", panel.title);
    if (panel.open) title.className = "active-phase";
    section.appendChild(title);
    if (panel.open || panel.id === "done") {
      const body = panelBodies[panel.id];
      if (body) section.appendChild(body(vm, submit));
      if (error && panel.open) section.appendChild(inlineError(error));
    }
    root.appendChild(section);
  }

  // Judgments stay visible on precog sessions whatever the phase.
  if (vm.protocol === "precog" && vm.judgments.length > 0 && !vm.terminal) {
    root.appendChild(judgmentList(vm));
  }
  if (vm.protocol === "ghosty" && vm.gateOutcome) {
    const gate = el(
      "p",
      "gate-outcome",
      vm.gateOutcome.kind === "advance"
        ? `Gate: advance with ${vm.gateOutcome.electric.length} electric`
        : "Gate: no electric collisions found",
    );
    gate.dataset.testid = "gate-outcome";
    gate.dataset.kind = vm.gateOutcome.kind;
    root.appendChild(gate);
  }
}

export function renderNotFound(root: HTMLElement, sessionId: string): void {
  root.replaceChildren();
  root.appendChild(banner("not-found", `No session ${sessionId} on this server.`));
}

export function renderNetworkRetry(
  root: HTMLElement,
  retry: () => void,
): void {
  root.replaceChildren();
  const note = banner("network", "Server unreachable.");
  const button = el("button", "", "Retry");
  button.dataset.action = "retry";
  button.addEventListener("click", retry);
  note.appendChild(button);
  root.appendChild(note);
}
