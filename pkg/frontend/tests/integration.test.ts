import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { adoptRecord } from '../src/adjudication.js';
import { QuestionnaireState } from '../src/state.js';

// Scripted two-annotator session against the real Python service.

const REPO = resolve(__dirname, '..', '..');
const PORT = 8750 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

const BOOTSTRAP = `
import sys
sys.path.insert(0, ${JSON.stringify(join(REPO, 'src'))})
from pclkit.annotation import Role, create_session
from pclkit.model import load_dataset
docs = load_dataset(${JSON.stringify(join(REPO, 'fixtures', 'raw_docs.jsonl'))})[:6]
session = create_session(
    "ui", docs,
    {"ann-a": Role.PRIMARY, "ann-b": Role.PRIMARY, "proof": Role.PROOFREADER},
    seed=0,
)
session.save(sys.argv[1] + "/ui.session.json")
`;

async function waitForServer(client: ApiClient): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      await client.nextTask('ann-a', 'ui');
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error('annotation service did not come up');
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), 'ui-session-'));
  const sessions = join(dir, 'sessions');
  const tokens = join(dir, 'tokens.tsv');
  writeFileSync(
    tokens,
    'ta\tann-a\tPRIMARY\ntb\tann-b\tPRIMARY\ntp\tproof\tPROOFREADER\n',
  );
  spawnSync('python3', ['-c', 'import os,sys; os.makedirs(sys.argv[1])', sessions]);
  const boot = spawnSync('python3', ['-c', BOOTSTRAP, sessions], { encoding: 'utf-8' });
  if (boot.status !== 0) throw new Error(boot.stderr);

  server = spawn(
    'python3',
    ['-c', 'from pclkit.cli import main; main()', 'serve',
     '--port', String(PORT), '--sessions', sessions, '--tokens', tokens],
    { env: { ...process.env, PYTHONPATH: join(REPO, 'src') }, stdio: 'ignore' },
  );
  await waitForServer(new ApiClient(BASE, 'ta'));
}, 30_000);

afterAll(() => {
  server?.kill();
});

async function annotateEverything(
  annotator: string,
  token: string,
  disagreeable: boolean,
): Promise<number> {
  const client = new ApiClient(BASE, token);
  let submitted = 0;
  for (;;) {
    const task = await client.nextTask(annotator, 'ui');
    if (!task) break;
    const state = new QuestionnaireState(task);
    // Deterministic judgment keyed on the doc id; the second annotator
    // flips exactly one document so adjudication has work to do.
    const base = Number(task.doc_id.slice(-1)) % 2 === 0;
    const positive = disagreeable && task.doc_id.endsWith('3') ? !base : base;
    state.setBinary(positive);
    if (positive) {
      state.toggleSubcategory('COMPASSION');
      state.setIntensity('MODERATE');
    }
    const body = state.compose(annotator);
    expect(body).not.toBeNull();
    expect(await client.submitLabel(body!)).toBe('sent');
    submitted += 1;
  }
  return submitted;
}

describe('scripted two-annotator session', () => {
  it('ends with a populated IAA report and an empty adjudication queue', async () => {
    const a = await annotateEverything('ann-a', 'ta', false);
    const b = await annotateEverything('ann-b', 'tb', true);
    expect(a).toBe(6);
    expect(b).toBe(6);

    const proof = new ApiClient(BASE, 'tp');
    const iaa = await proof.iaaReport('ui');
    expect(iaa.n_items).toBe(6);
    expect(Number.isFinite(iaa.kappa_all)).toBe(true);

    let page = await proof.adjudicationPage(0, 50, 'ui');
    for (const conflict of page.items) {
      await proof.resolve(adoptRecord(conflict, 0, 'proof', 'ui'));
    }
    page = await proof.adjudicationPage(0, 50, 'ui');
    expect(page.items).toEqual([]);
    expect(page.total).toBe(0);
  }, 30_000);
});
