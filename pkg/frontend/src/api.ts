import type {
  AdjudicationPage,
  FieldError,
  IaaReport,
  LabelBody,
  TaskPayload,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatingRejection extends Error {
  readonly errors: FieldError[];

  constructor(errors: FieldError[]) {
    super(errors.map((e) => `${e.field}: ${e.reason}`).join('; '));
    this.errors = errors;
  }
}

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }
}

export type SubmitOutcome = 'sent' | 'queued';

/**
 * Thin client for the annotation service.
 *
 * Submissions that fail with a network error (server unreachable, not an
 * HTTP rejection) are queued and retried by `flushQueue`; the caller can
 * surface `queuedCount` as an "unsent" badge. HTTP rejections are never
 * queued: they are real answers and must be shown to the user.
 */
export class ApiClient {
  private readonly base: string;
  private readonly token: string;
  private readonly fetchImpl: FetchLike;
  private queue: LabelBody[] = [];

  constructor(base: string, token: string, fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, '');
    this.token = token;
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  get queuedCount(): number {
    return this.queue.length;
  }

  private headers(): Record<string, string> {
    return {
      Authorization: `Bearer ${this.token}`,
      'Content-Type': 'application/json',
    };
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      ...init,
      headers: { ...this.headers(), ...(init?.headers ?? {}) },
    });
    if (response.status === 422) {
      const payload = await response.json();
      const errors: FieldError[] = payload?.detail?.errors ?? [];
      throw new GatingRejection(errors);
    }
    if (!response.ok && response.status !== 204) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        if (typeof payload?.detail === 'string') detail = payload.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async nextTask(annotator: string, session?: string): Promise<TaskPayload | null> {
    const params = new URLSearchParams({ annotator });
    if (session) params.set('session', session);
    const response = await this.request(`/api/tasks/next?${params}`);
    if (response.status === 204) return null;
    return (await response.json()) as TaskPayload;
  }

  async submitLabel(body: LabelBody): Promise<SubmitOutcome> {
    try {
      await this.request('/api/labels', {
        method: 'POST',
        body: JSON.stringify(body),
      });
      return 'sent';
    } catch (err) {
      if (err instanceof GatingRejection || err instanceof ApiError) throw err;
      this.queue.push(body);
      return 'queued';
    }
  }

  /**
   * Retry queued submissions in order. Stops at the first network
   * failure so ordering is preserved; HTTP rejections are surfaced by
   * throwing, with the offending body already dequeued.
   */
  async flushQueue(): Promise<number> {
    let sent = 0;
    while (this.queue.length > 0) {
      const body = this.queue[0]!;
      try {
        await this.request('/api/labels', {
          method: 'POST',
          body: JSON.stringify(body),
        });
      } catch (err) {
        if (err instanceof GatingRejection || err instanceof ApiError) {
          this.queue.shift();
          throw err;
        }
        break;
      }
      this.queue.shift();
      sent += 1;
    }
    return sent;
  }

  async iaaReport(session?: string): Promise<IaaReport> {
    const suffix = session ? `?session=${encodeURIComponent(session)}` : '';
    const response = await this.request(`/api/reports/iaa${suffix}`);
    return (await response.json()) as IaaReport;
  }

  async adjudicationPage(cursor = 0, limit = 50, session?: string): Promise<AdjudicationPage> {
    const params = new URLSearchParams({ cursor: String(cursor), limit: String(limit) });
    if (session) params.set('session', session);
    const response = await this.request(`/api/adjudication?${params}`);
    return (await response.json()) as AdjudicationPage;
  }

  async resolve(body: LabelBody): Promise<void> {
    await this.request('/api/adjudication/resolve', {
      method: 'POST',
      body: JSON.stringify(body),
    });
  }
}
