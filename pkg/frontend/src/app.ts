/**
 * Review UI controller: shows one candidate pair, collects three 1-5
 * agree/disagree ratings, submits, advances. A thin protocol client - no
 * score computation happens here, pair text is rendered verbatim via
 * textContent, and the UI only advances after the service confirms a
 * submission (no optimistic updates).
 */

import { ApiClient, PairPayload } from "./api.js";
import { ASPECT_KEYS, AspectKey, UI_COPY } from "./copy.js";

export interface StorageLike {
  get(key: string): string | null;
  set(key: string, value: string): void;
}

const REVIEWER_KEY = "paramine.reviewer";

type View = "identify" | "rating" | "done";

export class ReviewController {
  private reviewer = "";
  private pair: PairPayload | null = null;
  private selections: Partial<Record<AspectKey, number>> = {};
  private inFlight = false;
  private view: View = "identify";
  private pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly storage: StorageLike,
  ) {}

  /** Resolves when every scheduled fetch/render chain has settled. */
  idle(): Promise<void> {
    return this.pending;
  }

  start(): Promise<void> {
    const stored = this.storage.get(REVIEWER_KEY);
    if (stored) {
      this.reviewer = stored;
      this.schedule(() => this.fetchNext());
    } else {
      this.view = "identify";
      this.render();
    }
    return this.idle();
  }

  private schedule(task: () => Promise<void>): void {
    this.pending = this.pending.then(task, task);
  }

  private async fetchNext(): Promise<void> {
    try {
      const result = await this.api.nextPair(this.reviewer);
      if (result.kind === "done") {
        this.pair = null;
        this.view = "done";
        this.render();
        await this.renderDoneSummary();
      } else {
        this.pair = result.pair;
        this.selections = {};
        this.view = "rating";
        this.render();
      }
    } catch {
      this.render();
      this.showRetryBanner(() => this.fetchNext());
    }
  }

  private async submit(): Promise<void> {
    if (this.inFlight || this.pair === null) {
      return;
    }
    const { ld, cs, oq } = this.selections;
    if (ld === undefined || cs === undefined || oq === undefined) {
      return;
    }
    this.inFlight = true;
    this.updateSubmitState();
    try {
      const result = await this.api.submitRating({
        reviewer: this.reviewer,
        pair_id: this.pair.pair_id,
        ld,
        cs,
        oq,
      });
      this.inFlight = false;
      if (result.accepted) {
        await this.fetchNext();
      } else {
        this.showFieldError(`${result.field}: ${result.error}`);
        this.updateSubmitState();
      }
    } catch {
      this.inFlight = false;
      this.updateSubmitState();
      this.showRetryBanner(() => this.submit());
    }
  }

  // ----- rendering ---------------------------------------------------------

  private render(): void {
    this.root.textContent = "";
    this.root.appendChild(this.heading());
    if (this.view === "identify") {
      this.root.appendChild(this.identifyPane());
    } else if (this.view === "rating" && this.pair !== null) {
      this.root.appendChild(this.ratingPane(this.pair));
    } else if (this.view === "done") {
      this.root.appendChild(this.donePane());
    }
  }

  private heading(): HTMLElement {
    const h1 = document.createElement("h1");
    h1.textContent = UI_COPY.title;
    return h1;
  }

  private identifyPane(): HTMLElement {
    const pane = document.createElement("form");
    pane.id = "identify";
    const label = document.createElement("label");
    label.textContent = UI_COPY.reviewerPrompt;
    const input = document.createElement("input");
    input.id = "reviewer-input";
    input.name = "reviewer";
    input.required = true;
    label.appendChild(input);
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = UI_COPY.reviewerHint;
    const button = document.createElement("button");
    button.id = "start-button";
    button.type = "submit";
    button.textContent = UI_COPY.start;
    pane.append(label, hint, button);
    pane.addEventListener("submit", (event) => {
      event.preventDefault();
      const name = input.value.trim();
      if (!name) {
        return;
      }
      this.reviewer = name;
      this.storage.set(REVIEWER_KEY, name);
      this.schedule(() => this.fetchNext());
    });
    return pane;
  }

  private ratingPane(pair: PairPayload): HTMLElement {
    const pane = document.createElement("div");
    pane.id = "rating";

    for (const [label, text, cls] of [
      [UI_COPY.srcLabel, pair.src, "src-text"],
      [UI_COPY.paraLabel, pair.para, "para-text"],
    ] as const) {
      const block = document.createElement("section");
      const caption = document.createElement("h2");
      caption.textContent = label;
      const body = document.createElement("p");
      body.className = cls;
      body.textContent = text;
      block.append(caption, body);
      pane.appendChild(block);
    }

    for (const aspect of ASPECT_KEYS) {
      pane.appendChild(this.aspectFieldset(aspect));
    }

    const error = document.createElement("p");
    error.id = "field-error";
    error.className = "error";
    error.hidden = true;
    pane.appendChild(error);

    const submit = document.createElement("button");
    submit.id = "submit-button";
    submit.type = "button";
    submit.textContent = UI_COPY.submit;
    submit.disabled = true;
    submit.addEventListener("click", () => {
      this.schedule(() => this.submit());
    });
    pane.appendChild(submit);
    return pane;
  }

  private aspectFieldset(aspect: AspectKey): HTMLElement {
    const fieldset = document.createElement("fieldset");
    fieldset.id = `aspect-${aspect}`;
    const legend = document.createElement("legend");
    legend.textContent = `${UI_COPY.aspectNames[aspect]}: ${UI_COPY.aspects[aspect]}`;
    fieldset.appendChild(legend);
    for (let value = 1; value <= 5; value += 1) {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = aspect;
      radio.value = String(value);
      radio.addEventListener("change", () => {
        this.selections[aspect] = value;
        this.clearFieldError();
        this.updateSubmitState();
      });
      const caption =
        value === 1
          ? `1 - ${UI_COPY.scaleLow}`
          : value === 5
            ? `5 - ${UI_COPY.scaleHigh}`
            : String(value);
      label.append(radio, document.createTextNode(caption));
      fieldset.appendChild(label);
    }
    return fieldset;
  }

  private donePane(): HTMLElement {
    const pane = document.createElement("div");
    pane.id = "done";
    const message = document.createElement("p");
    message.textContent = UI_COPY.done;
    const summary = document.createElement("p");
    summary.id = "progress-summary";
    pane.append(message, summary);
    return pane;
  }

  private async renderDoneSummary(): Promise<void> {
    const summary = this.root.querySelector<HTMLElement>("#progress-summary");
    if (summary === null) {
      return;
    }
    try {
      const progress = await this.api.progress();
      const mine = progress.reviewers[this.reviewer];
      summary.textContent = UI_COPY.doneProgress(
        mine ? mine.rated : 0,
        progress.total_pairs,
      );
    } catch {
      summary.textContent = "";
    }
  }

  private updateSubmitState(): void {
    const submit = this.root.querySelector<HTMLButtonElement>("#submit-button");
    if (submit === null) {
      return;
    }
    const complete = ASPECT_KEYS.every((a) => this.selections[a] !== undefined);
    submit.disabled = this.inFlight || !complete;
  }

  private showFieldError(message: string): void {
    const error = this.root.querySelector<HTMLElement>("#field-error");
    if (error !== null) {
      error.textContent = message;
      error.hidden = false;
    }
  }

  private clearFieldError(): void {
    const error = this.root.querySelector<HTMLElement>("#field-error");
    if (error !== null) {
      error.hidden = true;
    }
  }

  private showRetryBanner(retry: () => Promise<void>): void {
    const existing = this.root.querySelector("#retry-banner");
    if (existing !== null) {
      return;
    }
    const banner = document.createElement("div");
    banner.id = "retry-banner";
    banner.className = "banner";
    const message = document.createElement("span");
    message.textContent = UI_COPY.retryMessage;
    const button = document.createElement("button");
    button.id = "retry-button";
    button.type = "button";
    button.textContent = UI_COPY.retryButton;
    button.addEventListener("click", () => {
      banner.remove();
      this.schedule(retry);
    });
    banner.append(message, button);
    this.root.prepend(banner);
  }
}
