import type {
  AnnotationInfo,
  AssignmentInfo,
  AssignmentRow,
  CorrectionReport,
  ExamInfo,
  ExerciseInfo,
  ExerciseView,
  GapAnswerPayload,
  LoginResponse,
  PerformanceHistory,
  QueryCriteria,
  Role,
  TaxonomyInfo,
  TextDocument,
  TextSummary,
  Theme,
  UserInfo,
} from "./types";
import { ClientSession } from "./session";

/** Error bodies are always {code, message}; status is the HTTP status. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    readonly session: ClientSession,
  ) {}

  private headers(): Record<string, string> {
    const token = this.session.token;
    return token ? { Authorization: `Bearer ${token}` } : {};
  }

  private async request<T>(method: string, path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      ...init,
      headers: { ...this.headers(), ...(init?.headers as Record<string, string> | undefined) },
    });
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const code = body?.code ?? "error";
      const message = body?.message ?? response.statusText;
      throw new ApiError(response.status, code, message);
    }
    return body as T;
  }

  private json<T>(method: string, path: string, payload: unknown): Promise<T> {
    return this.request<T>(method, path, {
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  // -- sessions -----------------------------------------------------------

  async login(login: string, password: string): Promise<LoginResponse> {
    const data = await this.json<LoginResponse>("POST", "/api/login", { login, password });
    this.session.open({
      token: data.token,
      userId: data.user_id,
      login: data.login,
      role: data.role,
    });
    return data;
  }

  async logout(): Promise<void> {
    try {
      await this.request("POST", "/api/logout");
    } finally {
      this.session.clear();
    }
  }

  // -- admin ---------------------------------------------------------------

  createTheme(name: string): Promise<Theme> {
    return this.json("POST", "/api/themes", { name });
  }

  async listThemes(): Promise<Theme[]> {
    const data = await this.request<{ themes: Theme[] }>("GET", "/api/themes");
    return data.themes;
  }

  createUser(login: string, password: string, role: Role): Promise<UserInfo> {
    return this.json("POST", "/api/users", { login, password, role });
  }

  deleteUser(userId: string): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/api/users/${userId}`);
  }

  // -- corpus ------------------------------------------------------------------

  uploadText(title: string, themeId: string, body: string, lom?: object): Promise<TextDocument> {
    const form = new FormData();
    form.append("file", new Blob([body], { type: "text/plain" }), "text.txt");
    form.append("title", title);
    form.append("theme_id", themeId);
    form.append("lom", JSON.stringify(lom ?? {}));
    return this.request("POST", "/api/texts", { body: form });
  }

  async queryTexts(criteria: QueryCriteria = {}): Promise<TextSummary[]> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(criteria)) {
      if (value !== undefined && value !== "") params.set(key, value);
    }
    const suffix = params.size > 0 ? `?${params.toString()}` : "";
    const data = await this.request<{ texts: TextSummary[] }>("GET", `/api/texts${suffix}`);
    return data.texts;
  }

  getText(textId: string): Promise<TextDocument> {
    return this.request("GET", `/api/texts/${textId}`);
  }

  uploadTaxonomy(name: string, fileContent: string): Promise<TaxonomyInfo> {
    const form = new FormData();
    form.append("file", new Blob([fileContent], { type: "text/plain" }), "taxonomy.txt");
    form.append("name", name);
    return this.request("POST", "/api/taxonomies", { body: form });
  }

  async annotateAutomatic(textId: string, taxonomyId: string): Promise<AnnotationInfo[]> {
    const data = await this.request<{ annotations: AnnotationInfo[] }>(
      "POST",
      `/api/texts/${textId}/annotate/${taxonomyId}`,
    );
    return data.annotations;
  }

  annotateManual(textId: string, tokenIndex: number, label: string): Promise<AnnotationInfo> {
    return this.json("POST", `/api/texts/${textId}/annotations`, {
      token_index: tokenIndex,
      label,
    });
  }

  async listAnnotations(textId: string): Promise<AnnotationInfo[]> {
    const data = await this.request<{ annotations: AnnotationInfo[] }>(
      "GET",
      `/api/texts/${textId}/annotations`,
    );
    return data.annotations;
  }

  // -- activities ------------------------------------------------------------------

  createExercise(
    textId: string,
    gapPositions: number[],
    title: string,
    instructions: string,
  ): Promise<ExerciseInfo> {
    return this.json("POST", "/api/exercises", {
      text_id: textId,
      gap_positions: gapPositions,
      title,
      instructions,
    });
  }

  exerciseView(exerciseId: string): Promise<ExerciseView> {
    return this.request("GET", `/api/exercises/${exerciseId}/view`);
  }

  createExam(title: string, exerciseIds: string[]): Promise<ExamInfo> {
    return this.json("POST", "/api/exams", { title, exercise_ids: exerciseIds });
  }

  async assignExam(examId: string, studentIds: string[]): Promise<AssignmentInfo[]> {
    const data = await this.json<{ assignments: AssignmentInfo[] }>(
      "POST",
      `/api/exams/${examId}/assign`,
      { student_ids: studentIds },
    );
    return data.assignments;
  }

  async myAssignments(): Promise<AssignmentRow[]> {
    const data = await this.request<{ assignments: AssignmentRow[] }>(
      "GET",
      "/api/me/assignments",
    );
    return data.assignments;
  }

  submit(assignmentId: string, answers: GapAnswerPayload[]): Promise<CorrectionReport> {
    return this.json("POST", `/api/assignments/${assignmentId}/submit`, { answers });
  }

  report(assignmentId: string): Promise<CorrectionReport> {
    return this.request("GET", `/api/assignments/${assignmentId}/report`);
  }

  history(studentId: string): Promise<PerformanceHistory> {
    return this.request("GET", `/api/students/${studentId}/history`);
  }
}
