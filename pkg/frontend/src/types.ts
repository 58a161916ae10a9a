export type SubcategoryId =
  | 'UNBALANCED_POWER'
  | 'SPECTATOR'
  | 'PREJUDICE'
  | 'APPEAL'
  | 'COMPASSION';

export type GroupId =
  | 'DISABLED'
  | 'WOMEN'
  | 'ELDERLY'
  | 'CHILDREN'
  | 'SINGLE_PARENT'
  | 'ORDINARY'
  | 'DISADVANTAGED'
  | 'OTHER';

export type IntensityId = 'MILD' | 'MODERATE' | 'SEVERE';

export type LanguageId = 'EN' | 'ZH';

export const SUBCATEGORIES: readonly SubcategoryId[] = [
  'UNBALANCED_POWER',
  'SPECTATOR',
  'PREJUDICE',
  'APPEAL',
  'COMPASSION',
];

export const GROUPS: readonly GroupId[] = [
  'DISABLED',
  'WOMEN',
  'ELDERLY',
  'CHILDREN',
  'SINGLE_PARENT',
  'ORDINARY',
  'DISADVANTAGED',
  'OTHER',
];

export const INTENSITIES: readonly IntensityId[] = ['MILD', 'MODERATE', 'SEVERE'];

export interface TaskPayload {
  session: string;
  doc_id: string;
  text: string;
  language: LanguageId;
  tips: string;
  remaining: number;
  total: number;
}

export interface LabelBody {
  session: string;
  doc_id: string;
  annotator_id: string;
  round: 'PRIMARY' | 'PROOFREAD';
  pcl: boolean;
  subcategories: SubcategoryId[];
  group: GroupId | null;
  intensity: IntensityId | 'NONE';
}

export interface StoredLabel {
  doc_id: string;
  annotator_id: string;
  pcl: boolean;
  subcategories: SubcategoryId[];
  group: GroupId | null;
  intensity: string;
}

export interface Conflict {
  doc_id: string;
  submissions: StoredLabel[];
  fields: string[];
}

export interface AdjudicationPage {
  items: Conflict[];
  next_cursor: number | null;
  total: number;
}

export interface IaaReport {
  kappa_all: number;
  kappa_weak_removed: number;
  kappa_per_subcategory: Record<string, number | null>;
  n_items: number;
  n_removed_weak: number;
}

export interface FieldError {
  field: string;
  reason: string;
}
