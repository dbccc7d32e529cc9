import { ApiClient } from "../src/api.js";
import { ReviewController, StorageLike } from "../src/app.js";
import { FixtureService } from "./fixture_service.js";

export class MemoryStorage implements StorageLike {
  private readonly map = new Map<string, string>();

  get(key: string): string | null {
    return this.map.get(key) ?? null;
  }

  set(key: string, value: string): void {
    this.map.set(key, value);
  }
}

export interface Harness {
  root: HTMLElement;
  controller: ReviewController;
  storage: MemoryStorage;
}

export function mount(
  service: FixtureService,
  options: { reviewer?: string; fetchFn?: typeof service.fetch } = {},
): Harness {
  const root = document.createElement("main");
  document.body.appendChild(root);
  const storage = new MemoryStorage();
  if (options.reviewer) {
    storage.set("paramine.reviewer", options.reviewer);
  }
  const api = new ApiClient(options.fetchFn ?? service.fetch);
  const controller = new ReviewController(root, api, storage);
  return { root, controller, storage };
}

export function pick(root: HTMLElement, aspect: string, value: number): void {
  const radio = root.querySelector<HTMLInputElement>(
    `input[name="${aspect}"][value="${value}"]`,
  );
  if (radio === null) {
    throw new Error(`no radio for ${aspect}=${value}`);
  }
  radio.checked = true;
  radio.dispatchEvent(new Event("change"));
}

export function clickSubmit(root: HTMLElement): void {
  const button = root.querySelector<HTMLButtonElement>("#submit-button");
  if (button === null) {
    throw new Error("no submit button");
  }
  button.click();
}

export async function rateCurrentPair(
  harness: Harness,
  scores: { ld: number; cs: number; oq: number },
): Promise<void> {
  pick(harness.root, "ld", scores.ld);
  pick(harness.root, "cs", scores.cs);
  pick(harness.root, "oq", scores.oq);
  clickSubmit(harness.root);
  await harness.controller.idle();
}
