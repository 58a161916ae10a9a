import { describe, expect, it } from 'vitest';

import {
  GROUP_LABELS,
  INTENSITY_LABELS,
  SUBCATEGORY_LABELS,
  UI_TEXT,
  text,
} from '../src/locale.js';
import { GROUPS, INTENSITIES, SUBCATEGORIES } from '../src/types.js';

describe('locale tables', () => {
  it('covers every subcategory in both languages', () => {
    for (const lang of ['EN', 'ZH'] as const) {
      for (const id of SUBCATEGORIES) {
        expect(SUBCATEGORY_LABELS[lang][id]).toBeTruthy();
      }
      expect(Object.keys(SUBCATEGORY_LABELS[lang])).toHaveLength(5);
    }
  });

  it('covers every group and intensity in both languages', () => {
    for (const lang of ['EN', 'ZH'] as const) {
      for (const id of GROUPS) expect(GROUP_LABELS[lang][id]).toBeTruthy();
      for (const id of INTENSITIES) expect(INTENSITY_LABELS[lang][id]).toBeTruthy();
    }
  });

  it('keeps EN and ZH ui-string keys in sync', () => {
    expect(Object.keys(UI_TEXT.ZH).sort()).toEqual(Object.keys(UI_TEXT.EN).sort());
  });

  it('falls back to English for unknown keys', () => {
    expect(text('ZH', 'yes')).toBe('是');
    expect(text('ZH', 'not-a-key')).toBe('not-a-key');
  });
});
