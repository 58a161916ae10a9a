import type { GroupId, IntensityId, LanguageId, SubcategoryId } from './types.js';

/** Bilingual label strings keyed by the enum values the API uses. */

type Table<K extends string> = Record<LanguageId, Record<K, string>>;

export const SUBCATEGORY_LABELS: Table<SubcategoryId> = {
  EN: {
    UNBALANCED_POWER: 'Unbalanced Power Relations',
    SPECTATOR: 'Spectator',
    PREJUDICE: 'Prejudice',
    APPEAL: 'Appeal',
    COMPASSION: 'Elicit Compassion',
  },
  ZH: {
    UNBALANCED_POWER: '不平等权力关系',
    SPECTATOR: '旁观者',
    PREJUDICE: '偏见',
    APPEAL: '呼吁',
    COMPASSION: '唤起同情',
  },
};

export const GROUP_LABELS: Table<GroupId> = {
  EN: {
    DISABLED: 'Disabled people',
    WOMEN: 'Women',
    ELDERLY: 'Elderly people',
    CHILDREN: 'Children',
    SINGLE_PARENT: 'Single-parent families',
    ORDINARY: 'Ordinary people',
    DISADVANTAGED: 'Disadvantaged groups',
    OTHER: 'Other',
  },
  ZH: {
    DISABLED: '残障人士',
    WOMEN: '女性',
    ELDERLY: '老年人',
    CHILDREN: '儿童',
    SINGLE_PARENT: '单亲家庭',
    ORDINARY: '普通人',
    DISADVANTAGED: '弱势群体',
    OTHER: '其他',
  },
};

export const INTENSITY_LABELS: Table<IntensityId> = {
  EN: { MILD: 'Mild', MODERATE: 'Moderate', SEVERE: 'Severe' },
  ZH: { MILD: '轻微', MODERATE: '中等', SEVERE: '严重' },
};

export const UI_TEXT: Record<LanguageId, Record<string, string>> = {
  EN: {
    binaryQuestion: 'Does this text contain condescending language?',
    yes: 'Yes',
    no: 'No',
    subcategoryQuestion: 'Which categories apply?',
    groupQuestion: 'Which community is targeted?',
    intensityQuestion: 'How strong is it?',
    submit: 'Submit and next',
    queued: 'unsent',
    done: 'All assigned texts are annotated.',
    adopt: 'Adopt this record',
  },
  ZH: {
    binaryQuestion: '这段文字是否包含居高临下的言论？',
    yes: '是',
    no: '否',
    subcategoryQuestion: '属于哪些子类别？',
    groupQuestion: '针对哪个群体？',
    intensityQuestion: '强度如何？',
    submit: '提交并继续',
    queued: '未发送',
    done: '分配的文本已全部标注完成。',
    adopt: '采用此标注',
  },
};

export function text(lang: LanguageId, key: string): string {
  return UI_TEXT[lang][key] ?? UI_TEXT.EN[key] ?? key;
}
