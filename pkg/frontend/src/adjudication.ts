import type { Conflict, LabelBody, StoredLabel } from './types.js';

/** Row model for the side-by-side disagreement table. */
export interface ComparisonRow {
  field: string;
  left: string;
  right: string;
  conflicting: boolean;
}

function show(value: unknown): string {
  if (value === null || value === undefined) return '—';
  if (Array.isArray(value)) return value.length ? [...value].sort().join(', ') : '—';
  return String(value);
}

export function comparisonRows(conflict: Conflict): ComparisonRow[] {
  const [a, b] = conflict.submissions;
  if (!a || !b) return [];
  const fields: Array<[string, unknown, unknown]> = [
    ['pcl', a.pcl, b.pcl],
    ['subcategories', a.subcategories, b.subcategories],
    ['group', a.group, b.group],
    ['intensity', a.intensity, b.intensity],
  ];
  return fields.map(([field, left, right]) => ({
    field,
    left: show(left),
    right: show(right),
    conflicting: conflict.fields.includes(field),
  }));
}

/** One-click adopt: turn one primary's record into the proofreader's final. */
export function adoptRecord(
  conflict: Conflict,
  side: 0 | 1,
  proofreaderId: string,
  session: string,
): LabelBody {
  const chosen: StoredLabel | undefined = conflict.submissions[side];
  if (!chosen) {
    throw new Error(`conflict for ${conflict.doc_id} has no submission ${side}`);
  }
  return {
    session,
    doc_id: conflict.doc_id,
    annotator_id: proofreaderId,
    round: 'PROOFREAD',
    pcl: chosen.pcl,
    subcategories: chosen.pcl ? [...chosen.subcategories] : [],
    group: chosen.pcl ? chosen.group : null,
    intensity: chosen.pcl ? (chosen.intensity as LabelBody['intensity']) : 'NONE',
  };
}
