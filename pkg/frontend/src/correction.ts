import { escapeHtml, rtl } from "./render";
import type { CorrectionReport, ExerciseView, GapResult } from "./types";

// Verdicts map to style classes, not hard-coded colors, so a
// color-blind-safe theme can restyle them; the default stylesheet paints
// gap-correct green and gap-incorrect red.

function renderGapResult(result: GapResult): string {
  const given = result.given && result.given.trim() !== "" ? result.given : "—";
  if (result.verdict === "correct") {
    return `<span class="gap-result gap-correct">${escapeHtml(given)}</span>`;
  }
  const expected = `<span class="expected-answer">(${escapeHtml(result.expected)})</span>`;
  return `<span class="gap-result gap-incorrect">${escapeHtml(given)}</span> ${expected}`;
}

/** Correction for one exercise: the gap-fill text with each gap replaced
 * by the learner's answer, colored by verdict, the expected answer shown
 * beside wrong ones. */
export function renderExerciseCorrection(view: ExerciseView, report: CorrectionReport): string {
  const byGap = new Map<number, GapResult>();
  for (const result of report.per_gap) {
    if (result.exercise_id === view.exercise_id) {
      byGap.set(result.gap, result);
    }
  }
  const pieces = view.segments
    .map((segment) => {
      if ("literal" in segment) return escapeHtml(segment.literal);
      const result = byGap.get(segment.gap);
      return result ? renderGapResult(result) : "";
    })
    .join("");
  const headline = view.title ? `<h3>${escapeHtml(view.title)}</h3>` : "";
  return `<section class="exercise-correction">${rtl(headline + `<p class="cloze">${pieces}</p>`)}</section>`;
}

export function correctionSummary(report: CorrectionReport): string {
  return (
    `<p class="correction-summary">` +
    `<span class="score">${report.correct_count}/${report.question_count}</span> ` +
    `<span class="performance">${escapeHtml(report.performance_display)}</span>%` +
    `</p>`
  );
}

/** The whole correction page: every exercise's colored gaps plus the
 * counts and the performance percentage. */
export function renderCorrectionView(views: ExerciseView[], report: CorrectionReport): string {
  const body = views.map((view) => renderExerciseCorrection(view, report)).join("\n");
  return `<article class="correction">${body}${correctionSummary(report)}</article>`;
}
