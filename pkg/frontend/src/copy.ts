/**
 * All reviewer-facing wording lives here so study owners can edit the
 * statements without touching the logic. Each aspect is phrased as a
 * statement the reviewer agrees or disagrees with on the 1-5 scale.
 */

export const UI_COPY = {
  title: "Paraphrase review",
  reviewerPrompt: "Reviewer name",
  reviewerHint: "Entered once; kept in this browser only.",
  start: "Start reviewing",
  srcLabel: "Source sentence",
  paraLabel: "Paraphrase candidate",
  aspects: {
    ld: "The wording of the paraphrase clearly differs from the source sentence.",
    cs: "The paraphrase preserves the meaning and intent of the source sentence.",
    oq: "Overall, the two sentences are worded differently yet mean the same thing.",
  },
  aspectNames: {
    ld: "Linguistic difference",
    cs: "Content similarity",
    oq: "Overall quality",
  },
  scaleLow: "disagree",
  scaleHigh: "agree",
  submit: "Submit rating",
  done: "All pairs rated - thank you!",
  doneProgress: (rated: number, total: number): string =>
    `You rated ${rated} of ${total} pairs.`,
  retryMessage: "Connection problem. Your selections are kept.",
  retryButton: "Retry",
} as const;

export type AspectKey = keyof typeof UI_COPY.aspects;

export const ASPECT_KEYS: readonly AspectKey[] = ["ld", "cs", "oq"];
