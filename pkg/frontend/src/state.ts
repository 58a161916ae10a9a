import type {
  GroupId,
  IntensityId,
  LabelBody,
  SubcategoryId,
  TaskPayload,
} from './types.js';

/**
 * Layered questionnaire state for one document.
 *
 * The gating rule the server enforces (no subcategories, group or
 * intensity unless the binary answer is "PCL"; at least one subcategory
 * when it is) is structural here: answering "not PCL" clears the lower
 * layers, and `compose` refuses to produce a record that would be
 * rejected. There is no way to build a 422-able body through this class.
 */
export class QuestionnaireState {
  readonly task: TaskPayload;
  private binary: boolean | null = null;
  private subcategories = new Set<SubcategoryId>();
  private group: GroupId | null = null;
  private intensity: IntensityId | null = null;

  constructor(task: TaskPayload) {
    this.task = task;
  }

  get binaryAnswer(): boolean | null {
    return this.binary;
  }

  /** Lower layers are interactive only after an affirmative binary answer. */
  get lowerLayersEnabled(): boolean {
    return this.binary === true;
  }

  get selectedSubcategories(): SubcategoryId[] {
    return [...this.subcategories];
  }

  get selectedGroup(): GroupId | null {
    return this.group;
  }

  get selectedIntensity(): IntensityId | null {
    return this.intensity;
  }

  setBinary(value: boolean): void {
    this.binary = value;
    if (!value) {
      this.subcategories.clear();
      this.group = null;
      this.intensity = null;
    }
  }

  toggleSubcategory(id: SubcategoryId): void {
    if (!this.lowerLayersEnabled) return;
    if (this.subcategories.has(id)) {
      this.subcategories.delete(id);
    } else {
      this.subcategories.add(id);
    }
  }

  setGroup(id: GroupId | null): void {
    if (!this.lowerLayersEnabled) return;
    this.group = id;
  }

  setIntensity(id: IntensityId): void {
    if (!this.lowerLayersEnabled) return;
    this.intensity = id;
  }

  /** Human-readable blockers; empty means `compose` will succeed. */
  validationMessages(): string[] {
    const messages: string[] = [];
    if (this.binary === null) {
      messages.push('Answer the binary question first.');
    }
    if (this.binary === true && this.subcategories.size === 0) {
      messages.push('Select at least one subcategory.');
    }
    if (this.binary === true && this.intensity === null) {
      messages.push('Select an intensity.');
    }
    return messages;
  }

  compose(annotatorId: string): LabelBody | null {
    if (this.validationMessages().length > 0) return null;
    const positive = this.binary === true;
    return {
      session: this.task.session,
      doc_id: this.task.doc_id,
      annotator_id: annotatorId,
      round: 'PRIMARY',
      pcl: positive,
      subcategories: positive ? [...this.subcategories] : [],
      group: positive ? this.group : null,
      intensity: positive && this.intensity ? this.intensity : 'NONE',
    };
  }

  progressLabel(): string {
    const finished = this.task.total - this.task.remaining;
    return `${finished}/${this.task.total}`;
  }
}
