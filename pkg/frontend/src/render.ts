import {
  GROUP_LABELS,
  INTENSITY_LABELS,
  SUBCATEGORY_LABELS,
  text,
} from './locale.js';
import { QuestionnaireState } from './state.js';
import type { FieldError, TaskPayload } from './types.js';
import { GROUPS, INTENSITIES, SUBCATEGORIES } from './types.js';

export interface RenderCallbacks {
  onChange: () => void;
  onSubmit: () => void;
}

function el(tag: string, className?: string, textContent?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (textContent !== undefined) node.textContent = textContent;
  return node;
}

export function renderTask(
  container: HTMLElement,
  state: QuestionnaireState,
  callbacks: RenderCallbacks,
): void {
  const task: TaskPayload = state.task;
  const lang = task.language;
  container.innerHTML = '';

  container.appendChild(el('div', 'tips', task.tips));
  container.appendChild(el('div', 'doc-text', task.text));
  container.appendChild(el('div', 'progress', state.progressLabel()));

  const binary = el('fieldset', 'layer-binary');
  binary.appendChild(el('legend', undefined, text(lang, 'binaryQuestion')));
  for (const [value, key] of [[true, 'yes'], [false, 'no']] as const) {
    const button = el('button', 'binary-choice', text(lang, key)) as HTMLButtonElement;
    button.dataset.value = String(value);
    if (state.binaryAnswer === value) button.classList.add('selected');
    button.addEventListener('click', () => {
      state.setBinary(value);
      callbacks.onChange();
    });
    binary.appendChild(button);
  }
  container.appendChild(binary);

  const lower = el('div', 'lower-layers');
  const enabled = state.lowerLayersEnabled;

  const subs = el('fieldset', 'layer-subcategories');
  subs.appendChild(el('legend', undefined, text(lang, 'subcategoryQuestion')));
  for (const id of SUBCATEGORIES) {
    const label = el('label', 'subcategory-option');
    const box = el('input') as HTMLInputElement;
    box.type = 'checkbox';
    box.value = id;
    box.disabled = !enabled;
    box.checked = state.selectedSubcategories.includes(id);
    box.addEventListener('change', () => {
      state.toggleSubcategory(id);
      callbacks.onChange();
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(SUBCATEGORY_LABELS[lang][id]));
    subs.appendChild(label);
  }
  lower.appendChild(subs);

  const groups = el('fieldset', 'layer-group');
  groups.appendChild(el('legend', undefined, text(lang, 'groupQuestion')));
  const select = el('select') as HTMLSelectElement;
  select.disabled = !enabled;
  select.appendChild(el('option', undefined, '—') as HTMLOptionElement);
  for (const id of GROUPS) {
    const option = el('option', undefined, GROUP_LABELS[lang][id]) as HTMLOptionElement;
    option.value = id;
    option.selected = state.selectedGroup === id;
    select.appendChild(option);
  }
  select.addEventListener('change', () => {
    state.setGroup(select.value ? (select.value as (typeof GROUPS)[number]) : null);
    callbacks.onChange();
  });
  groups.appendChild(select);
  lower.appendChild(groups);

  const intensity = el('fieldset', 'layer-intensity');
  intensity.appendChild(el('legend', undefined, text(lang, 'intensityQuestion')));
  for (const id of INTENSITIES) {
    const button = el('button', 'intensity-choice', INTENSITY_LABELS[lang][id]) as HTMLButtonElement;
    button.dataset.value = id;
    button.disabled = !enabled;
    if (state.selectedIntensity === id) button.classList.add('selected');
    button.addEventListener('click', () => {
      state.setIntensity(id);
      callbacks.onChange();
    });
    intensity.appendChild(button);
  }
  lower.appendChild(intensity);
  container.appendChild(lower);

  const messages = el('ul', 'validation-messages');
  for (const message of state.validationMessages()) {
    messages.appendChild(el('li', undefined, message));
  }
  container.appendChild(messages);

  const submit = el('button', 'submit', text(lang, 'submit')) as HTMLButtonElement;
  submit.disabled = state.validationMessages().length > 0;
  submit.addEventListener('click', callbacks.onSubmit);
  container.appendChild(submit);
}

export function renderFieldErrors(container: HTMLElement, errors: FieldError[]): void {
  const list = el('ul', 'field-errors');
  for (const error of errors) {
    const item = el('li', undefined, `${error.field}: ${error.reason}`);
    item.dataset.field = error.field;
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderCompletion(container: HTMLElement, lang: 'EN' | 'ZH'): void {
  container.innerHTML = '';
  container.appendChild(el('div', 'completion', text(lang, 'done')));
}

export function renderQueueBadge(container: HTMLElement, queued: number, lang: 'EN' | 'ZH'): void {
  const existing = container.querySelector('.queue-badge');
  if (existing) existing.remove();
  if (queued > 0) {
    container.appendChild(
      el('div', 'queue-badge', `${text(lang, 'queued')}: ${queued}`),
    );
  }
}

/** Keyboard-first flow: 1/2 answer the binary layer, 3-7 toggle subcategories. */
export function bindKeys(
  target: EventTarget,
  state: QuestionnaireState,
  callbacks: RenderCallbacks,
): void {
  target.addEventListener('keydown', (event) => {
    const key = (event as KeyboardEvent).key;
    if (key === '1') {
      state.setBinary(true);
    } else if (key === '2') {
      state.setBinary(false);
    } else if (key >= '3' && key <= '7') {
      const sub = SUBCATEGORIES[Number(key) - 3];
      if (sub) state.toggleSubcategory(sub);
    } else if (key === 'Enter') {
      callbacks.onSubmit();
      return;
    } else {
      return;
    }
    callbacks.onChange();
  });
}
