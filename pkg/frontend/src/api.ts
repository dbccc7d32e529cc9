/** Thin typed client over the review service's four endpoints. */

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface PairPayload {
  pair_id: string;
  src: string;
  para: string;
}

export interface RatingBody {
  reviewer: string;
  pair_id: string;
  ld: number;
  cs: number;
  oq: number;
}

export interface ProgressPayload {
  total_pairs: number;
  reviewers: Record<string, { rated: number; remaining: number }>;
}

export type NextPairResult = { kind: "pair"; pair: PairPayload } | { kind: "done" };

export type SubmitResult =
  | { accepted: true }
  | { accepted: false; error: string; field: string };

export class ApiClient {
  constructor(private readonly fetchFn: FetchLike, private readonly base = "") {}

  async nextPair(reviewer: string): Promise<NextPairResult> {
    const url = `${this.base}/api/pairs/next?reviewer=${encodeURIComponent(reviewer)}`;
    const resp = await this.fetchFn(url);
    if (resp.status === 204) {
      return { kind: "done" };
    }
    if (!resp.ok) {
      throw new Error(`next pair failed with status ${resp.status}`);
    }
    return { kind: "pair", pair: (await resp.json()) as PairPayload };
  }

  async submitRating(body: RatingBody): Promise<SubmitResult> {
    const resp = await this.fetchFn(`${this.base}/api/ratings`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (resp.status === 201) {
      return { accepted: true };
    }
    if (resp.status === 400) {
      const payload = (await resp.json()) as { error: string; field: string };
      return { accepted: false, error: payload.error, field: payload.field };
    }
    throw new Error(`submit failed with status ${resp.status}`);
  }

  async progress(): Promise<ProgressPayload> {
    const resp = await this.fetchFn(`${this.base}/api/progress`);
    if (!resp.ok) {
      throw new Error(`progress failed with status ${resp.status}`);
    }
    return (await resp.json()) as ProgressPayload;
  }
}
