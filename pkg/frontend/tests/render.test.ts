// @vitest-environment happy-dom
import { describe, expect, it } from 'vitest';

import { SUBCATEGORY_LABELS } from '../src/locale.js';
import {
  renderCompletion,
  renderFieldErrors,
  renderQueueBadge,
  renderTask,
} from '../src/render.js';
import { QuestionnaireState } from '../src/state.js';
import type { TaskPayload } from '../src/types.js';

function task(language: 'EN' | 'ZH' = 'EN'): TaskPayload {
  return {
    session: 's1', doc_id: 'd1', text: 'the document text', language,
    tips: 'judge the binary layer first', remaining: 2, total: 5,
  };
}

function mount(state: QuestionnaireState): HTMLElement {
  const container = document.createElement('div');
  const callbacks = {
    onChange: () => renderTask(container, state, callbacks),
    onSubmit: () => undefined,
  };
  renderTask(container, state, callbacks);
  return container;
}

describe('renderTask', () => {
  it('shows tips, text and all five subcategory labels', () => {
    const container = mount(new QuestionnaireState(task('ZH')));
    expect(container.querySelector('.tips')!.textContent).toContain('binary layer');
    expect(container.querySelector('.doc-text')!.textContent).toBe('the document text');
    for (const label of Object.values(SUBCATEGORY_LABELS.ZH)) {
      expect(container.textContent).toContain(label);
    }
  });

  it('disables lower layers until the binary answer is affirmative', () => {
    const state = new QuestionnaireState(task());
    const container = mount(state);
    const boxes = () => [...container.querySelectorAll<HTMLInputElement>('input[type=checkbox]')];
    expect(boxes().every((b) => b.disabled)).toBe(true);

    const yes = container.querySelector<HTMLButtonElement>('button[data-value=true]')!;
    yes.click();
    expect(boxes().every((b) => !b.disabled)).toBe(true);

    const no = container.querySelector<HTMLButtonElement>('button[data-value=false]')!;
    no.click();
    expect(boxes().every((b) => b.disabled)).toBe(true);
    expect(boxes().every((b) => !b.checked)).toBe(true);
  });

  it('disables submit while validation messages remain', () => {
    const state = new QuestionnaireState(task());
    const container = mount(state);
    const submit = () => container.querySelector<HTMLButtonElement>('button.submit')!;
    expect(submit().disabled).toBe(true);
    container.querySelector<HTMLButtonElement>('button[data-value=false]')!.click();
    expect(submit().disabled).toBe(false);
  });
});

describe('auxiliary views', () => {
  it('renders field errors with the field name attached', () => {
    const container = document.createElement('div');
    renderFieldErrors(container, [{ field: 'subcategories', reason: 'required' }]);
    const item = container.querySelector<HTMLElement>('.field-errors li')!;
    expect(item.dataset.field).toBe('subcategories');
    expect(item.textContent).toContain('required');
  });

  it('renders the completion screen', () => {
    const container = document.createElement('div');
    renderCompletion(container, 'EN');
    expect(container.querySelector('.completion')).not.toBeNull();
  });

  it('shows and clears the unsent badge', () => {
    const container = document.createElement('div');
    renderQueueBadge(container, 2, 'EN');
    expect(container.querySelector('.queue-badge')!.textContent).toContain('2');
    renderQueueBadge(container, 0, 'EN');
    expect(container.querySelector('.queue-badge')).toBeNull();
  });
});
