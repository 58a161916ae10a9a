import { describe, expect, it } from 'vitest';

import { adoptRecord, comparisonRows } from '../src/adjudication.js';
import type { Conflict } from '../src/types.js';

function conflict(): Conflict {
  return {
    doc_id: 'd7',
    submissions: [
      {
        doc_id: 'd7', annotator_id: 'a', pcl: true,
        subcategories: ['APPEAL'], group: 'WOMEN', intensity: 'MODERATE',
      },
      {
        doc_id: 'd7', annotator_id: 'b', pcl: true,
        subcategories: ['APPEAL'], group: 'WOMEN', intensity: 'SEVERE',
      },
    ],
    fields: ['intensity'],
  };
}

describe('comparisonRows', () => {
  it('marks exactly the conflicting fields', () => {
    const rows = comparisonRows(conflict());
    const highlighted = rows.filter((r) => r.conflicting).map((r) => r.field);
    expect(highlighted).toEqual(['intensity']);
    const intensity = rows.find((r) => r.field === 'intensity')!;
    expect(intensity.left).toBe('MODERATE');
    expect(intensity.right).toBe('SEVERE');
  });

  it('renders empty values as a dash', () => {
    const c = conflict();
    c.submissions[0] = {
      doc_id: 'd7', annotator_id: 'a', pcl: false,
      subcategories: [], group: null, intensity: 'NONE',
    };
    const rows = comparisonRows(c);
    expect(rows.find((r) => r.field === 'subcategories')!.left).toBe('—');
    expect(rows.find((r) => r.field === 'group')!.left).toBe('—');
  });
});

describe('adoptRecord', () => {
  it('copies the chosen side into a proofreader record', () => {
    const body = adoptRecord(conflict(), 1, 'proof', 's1');
    expect(body.round).toBe('PROOFREAD');
    expect(body.annotator_id).toBe('proof');
    expect(body.intensity).toBe('SEVERE');
    expect(body.subcategories).toEqual(['APPEAL']);
  });

  it('adopting a negative record clears the lower layers', () => {
    const c = conflict();
    c.submissions[0] = {
      doc_id: 'd7', annotator_id: 'a', pcl: false,
      subcategories: [], group: null, intensity: 'NONE',
    };
    const body = adoptRecord(c, 0, 'proof', 's1');
    expect(body.pcl).toBe(false);
    expect(body.subcategories).toEqual([]);
    expect(body.group).toBeNull();
    expect(body.intensity).toBe('NONE');
  });
});
