import { ApiClient, ApiError } from "./api";
import { escapeAttr, escapeHtml, rtl } from "./render";
import type { AssignmentRow, CorrectionReport, ExerciseView, GapAnswerPayload } from "./types";

function slotKey(exerciseId: string, gap: number): string {
  return `${exerciseId}:${gap}`;
}

/**
 * Per-gap input state for one exam sitting: values, dirty flags and the
 * submission lock. The lock engages on the first successful submission
 * (and during flight), so the form can never double-submit locally; a 409
 * from a parallel session surfaces as the already-accomplished state.
 */
export class GapFormState {
  private values = new Map<string, string>();
  private dirtyFlags = new Set<string>();
  submitting = false;
  submitted = false;
  error: string | null = null;

  constructor(readonly assignmentId: string) {}

  setAnswer(exerciseId: string, gap: number, value: string): void {
    this.values.set(slotKey(exerciseId, gap), value);
    this.dirtyFlags.add(slotKey(exerciseId, gap));
  }

  answer(exerciseId: string, gap: number): string {
    return this.values.get(slotKey(exerciseId, gap)) ?? "";
  }

  isDirty(exerciseId: string, gap: number): boolean {
    return this.dirtyFlags.has(slotKey(exerciseId, gap));
  }

  get locked(): boolean {
    return this.submitting || this.submitted;
  }

  /** All non-blank answers; blank gaps are simply omitted (the server
   * counts them as incorrect rather than rejecting the form). */
  answers(): GapAnswerPayload[] {
    const out: GapAnswerPayload[] = [];
    for (const [key, value] of this.values) {
      if (value.trim() === "") continue;
      const separator = key.lastIndexOf(":");
      out.push({
        exercise_id: key.slice(0, separator),
        gap: Number(key.slice(separator + 1)),
        answer: value,
      });
    }
    return out;
  }

  /** Submit exactly once; returns the report, or null when already locked.
   * A concurrent submission's 409 flips the form into the submitted state
   * with the already-accomplished message. */
  async submitOnce(client: ApiClient): Promise<CorrectionReport | null> {
    if (this.locked) return null;
    this.submitting = true;
    this.error = null;
    try {
      const report = await client.submit(this.assignmentId, this.answers());
      this.submitted = true;
      return report;
    } catch (error) {
      if (error instanceof ApiError && error.code === "already_accomplished") {
        this.submitted = true;
        this.error = "already accomplished";
        return null;
      }
      this.error = error instanceof Error ? error.message : String(error);
      throw error;
    } finally {
      this.submitting = false;
    }
  }
}

/** One exercise as a fill-in form: literals stay text, gaps become inputs.
 * Built purely from the answer-free view payload, so expected answers
 * cannot appear here by construction. */
export function renderExerciseForm(view: ExerciseView, state: GapFormState): string {
  const pieces = view.segments
    .map((segment) => {
      if ("literal" in segment) {
        return escapeHtml(segment.literal);
      }
      const value = state.answer(view.exercise_id, segment.gap);
      const disabled = state.locked ? " disabled" : "";
      return (
        `<input class="gap-input" dir="rtl" lang="ar" type="text"` +
        ` data-exercise-id="${escapeAttr(view.exercise_id)}" data-gap="${segment.gap}"` +
        ` value="${escapeAttr(value)}" placeholder="${segment.gap}"${disabled}>`
      );
    })
    .join("");
  const headline = view.title ? `<h3>${escapeHtml(view.title)}</h3>` : "";
  const instructions = view.instructions
    ? `<p class="instructions">${escapeHtml(view.instructions)}</p>`
    : "";
  return `<section class="exercise" data-exercise-id="${escapeAttr(view.exercise_id)}">${rtl(
    headline + instructions + `<p class="cloze">${pieces}</p>`,
  )}</section>`;
}

/** The whole exam sitting: exercises in exam order plus one submit button.
 * The button disables as soon as the form locks. */
export function renderExamTakingView(
  assignment: AssignmentRow,
  views: ExerciseView[],
  state: GapFormState,
): string {
  const ordered = assignment.exercise_ids
    .map((id) => views.find((view) => view.exercise_id === id))
    .filter((view): view is ExerciseView => view !== undefined);
  const body = ordered.map((view) => renderExerciseForm(view, state)).join("\n");
  const disabled = state.locked ? " disabled" : "";
  const notice = state.error ? `<p class="form-error">${escapeHtml(state.error)}</p>` : "";
  return (
    `<article class="exam" data-assignment-id="${escapeAttr(assignment.assignment_id)}">` +
    `<h2 dir="rtl" lang="ar">${escapeHtml(assignment.exam_title)}</h2>` +
    body +
    notice +
    `<button id="submit-exam" type="button"${disabled}>إرسال</button>` +
    `</article>`
  );
}
