/** Wire types mirroring the assessment service's JSON documents. */

export type AnswerKindToken = 'binary' | 'level';
export type StatusToken = 'approved' | 'modified' | 'added';
export type AnswerWire = 'yes' | 'no' | number;
export type ModeToken = 'over-answered' | 'strict';

export interface CatalogQuestion {
  id: string;
  text: string;
  status: StatusToken;
  answer_kind: AnswerKindToken;
}

export interface CatalogIssue {
  name: string;
  questions: CatalogQuestion[];
}

export interface CatalogControl {
  id: string;
  title: string;
  statement: string;
  tier: string;
  issues: CatalogIssue[];
}

export interface CatalogDomain {
  name: string;
  clauses: number[];
  objectives: number | null;
  controls_declared: number | null;
  controls: CatalogControl[];
}

export interface CatalogDoc {
  id: string;
  version: string;
  profile: unknown;
  domains: CatalogDomain[];
}

export interface SessionAnswer {
  question_id: string;
  kind: AnswerKindToken;
  value: AnswerWire;
  note: string | null;
  answered_at: string;
}

export interface SessionDoc {
  id: string;
  catalog_id: string;
  catalog_digest: string;
  created_at: string;
  answers: SessionAnswer[];
  events: unknown[];
}

export interface SessionSummary {
  id: string;
  created_at?: string;
  answered?: number;
  total?: number;
  error?: string;
}

export interface Completeness {
  answered: number;
  total: number;
  per_domain: Record<string, { answered: number; total: number }>;
}

export interface NextQuestion {
  id: string;
  text: string;
  status: StatusToken;
  answer_kind: AnswerKindToken;
  issue: string;
  control_id: string;
  control_title: string;
  control_statement: string;
  domain: string;
}

export interface NextResponse {
  done: boolean;
  question: NextQuestion | null;
  completeness: Completeness;
}

export interface NodeScoreDoc {
  score: number | null;
  coverage: number;
}

export interface GapEntry {
  question_id: string;
  current: number | null;
  potential_gain: number;
  rank: number;
}

export interface ReportDoc {
  session: {
    id: string;
    catalog_id: string;
    catalog_digest: string;
    created_at: string;
    completeness: Completeness;
  };
  overall: NodeScoreDoc;
  domains: Array<{ name: string } & NodeScoreDoc>;
  controls: Array<{ id: string } & NodeScoreDoc>;
  issues: Array<{ control_id: string; name: string } & NodeScoreDoc>;
  questions: Array<{ id: string; score: number | null }>;
  mode: ModeToken;
  weights: Record<string, number>;
  gaps?: GapEntry[];
}

export interface WhatIfResponse {
  delta_overall: number;
  delta_per_domain: Record<string, number>;
  before: ReportDoc;
  after: ReportDoc;
}

export interface RadarDoc {
  axes: string[];
  values: Array<number | null>;
}
