import { ApiClient, GatingRejection } from './api.js';
import { QuestionnaireState } from './state.js';
import {
  bindKeys,
  renderCompletion,
  renderFieldErrors,
  renderQueueBadge,
  renderTask,
} from './render.js';

/** Entry point: query-string config, then the annotate/submit/advance loop. */
export async function start(root: HTMLElement): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const annotator = params.get('annotator') ?? '';
  const token = params.get('token') ?? '';
  const session = params.get('session') ?? undefined;
  const client = new ApiClient(window.location.origin, token);

  let lang: 'EN' | 'ZH' = 'EN';

  const advance = async (): Promise<void> => {
    const task = await client.nextTask(annotator, session);
    if (!task) {
      renderCompletion(root, lang);
      return;
    }
    lang = task.language;
    const state = new QuestionnaireState(task);
    const callbacks = {
      onChange: () => renderTask(root, state, callbacks),
      onSubmit: async () => {
        const body = state.compose(annotator);
        if (!body) return;
        try {
          const outcome = await client.submitLabel(body);
          renderQueueBadge(root, client.queuedCount, lang);
          if (outcome === 'queued') {
            window.addEventListener('online', () => void client.flushQueue(), { once: true });
          }
          await advance();
        } catch (err) {
          if (err instanceof GatingRejection) {
            renderFieldErrors(root, err.errors);
          } else {
            throw err;
          }
        }
      },
    };
    renderTask(root, state, callbacks);
    bindKeys(document, state, callbacks);
  };

  await advance();
}

const root = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (root) {
  void start(root);
}
