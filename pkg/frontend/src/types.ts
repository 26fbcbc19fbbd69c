// Wire types mirroring the HTTP API payloads.

export type Role = "admin" | "teacher" | "student";

export interface LoginResponse {
  token: string;
  user_id: string;
  login: string;
  role: Role;
  expires_at: string;
}

export interface Theme {
  id: string;
  name: string;
}

export interface TokenInfo {
  index: number;
  surface: string;
  byte_span: [number, number];
}

export interface TextDocument {
  id: string;
  title: string;
  body: string;
  theme_id: string;
  tokens: TokenInfo[];
  lom: LomRecord;
  created_by: string;
  created_at: string;
}

export interface LomRecord {
  general: { title: string; language: string; description: string; keywords: string[] };
  educational: { difficulty: string; context: string; learning_resource_type: string };
  lifecycle: { author: string; date: string | null };
}

export interface TextSummary {
  id: string;
  title: string;
  theme_id: string;
  difficulty: string;
  context: string;
  created_by: string;
  created_at: string;
  token_count: number;
}

export interface AnnotationInfo {
  id: string;
  text_id: string;
  token_index: number;
  label: string;
  source: "automatic" | "manual";
  taxonomy_id: string | null;
  entry_index: number | null;
}

export interface TaxonomyInfo {
  id: string;
  name: string;
  entries: string[];
}

/** One rendered piece of a gap-fill exercise: either literal text or a gap. */
export type Segment = { literal: string } | { gap: number };

export interface ExerciseView {
  exercise_id: string;
  title: string;
  instructions: string;
  segments: Segment[];
  gap_count: number;
}

/** Teacher-facing exercise payload (includes the answer key). */
export interface ExerciseInfo {
  id: string;
  text_id: string;
  title: string;
  instructions: string;
  gaps: number[];
  expected_answers: string[];
  created_by: string;
  created_at: string;
}

export interface ExamInfo {
  id: string;
  title: string;
  exercise_ids: string[];
  created_by: string;
  created_at: string;
}

export interface AssignmentInfo {
  id: string;
  exam_id: string;
  student_id: string;
  status: "assigned" | "accomplished";
  assigned_at: string;
  accomplished_at: string | null;
}

export interface AssignmentRow {
  assignment_id: string;
  exam_id: string;
  exam_title: string;
  exercise_ids: string[];
  status: "assigned" | "accomplished";
  assigned_at: string;
  accomplished_at: string | null;
}

export interface GapAnswerPayload {
  exercise_id: string;
  gap: number;
  answer: string;
}

export interface GapResult {
  exercise_id: string;
  gap: number;
  expected: string;
  given: string | null;
  verdict: "correct" | "incorrect";
}

export interface CorrectionReport {
  exam_id: string;
  student_id: string;
  assignment_id: string;
  per_gap: GapResult[];
  correct_count: number;
  question_count: number;
  performance: number;
  performance_display: string;
}

export interface HistoryEntry {
  exam_id: string;
  accomplished_at: string;
  performance: number;
  performance_display: string;
}

export interface PerformanceHistory {
  student_id: string;
  entries: HistoryEntry[];
}

export interface UserInfo {
  id: string;
  login: string;
  role: Role;
  created_at: string;
  active: boolean;
}

export interface QueryCriteria {
  theme_id?: string;
  keyword?: string;
  difficulty?: string;
  context?: string;
  has_taxonomy?: string;
  author?: string;
}
