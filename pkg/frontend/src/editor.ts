import { ApiClient } from "./api";
import { escapeAttr, escapeHtml, rtl } from "./render";
import type { AnnotationInfo, ExerciseInfo, TextDocument } from "./types";

export interface EditorToken {
  index: number;
  surface: string;
  annotated: boolean;
  labels: string[];
}

/** Join a text's tokens with its annotations so the editor can highlight
 * annotated tokens as gap suggestions. */
export function buildEditorTokens(
  text: TextDocument,
  annotations: AnnotationInfo[],
): EditorToken[] {
  const labels = new Map<number, string[]>();
  for (const annotation of annotations) {
    const list = labels.get(annotation.token_index) ?? [];
    list.push(annotation.label);
    labels.set(annotation.token_index, list);
  }
  return text.tokens.map((token) => ({
    index: token.index,
    surface: token.surface,
    annotated: labels.has(token.index),
    labels: labels.get(token.index) ?? [],
  }));
}

/**
 * Exercise drafting state: clicking a token toggles it as a gap; saving
 * posts the draft. Toggling twice returns a token to plain text.
 */
export class ExerciseEditorState {
  readonly gaps = new Set<number>();
  title = "";
  instructions = "";

  constructor(readonly textId: string) {}

  toggleGap(tokenIndex: number): void {
    if (this.gaps.has(tokenIndex)) {
      this.gaps.delete(tokenIndex);
    } else {
      this.gaps.add(tokenIndex);
    }
  }

  isGap(tokenIndex: number): boolean {
    return this.gaps.has(tokenIndex);
  }

  gapPositions(): number[] {
    return [...this.gaps].sort((a, b) => a - b);
  }

  get canSave(): boolean {
    return this.gaps.size > 0;
  }

  /** POST the draft; API validation errors surface to the caller. */
  save(client: ApiClient): Promise<ExerciseInfo> {
    return client.createExercise(this.textId, this.gapPositions(), this.title, this.instructions);
  }
}

/** Clickable token strip: annotated tokens carry a hint class, selected
 * gaps are marked. Right-to-left like every Arabic region. */
export function renderEditorTokens(tokens: EditorToken[], state: ExerciseEditorState): string {
  const spans = tokens
    .map((token) => {
      const classes = ["token"];
      if (token.annotated) classes.push("annotated");
      if (state.isGap(token.index)) classes.push("gap-selected");
      const title = token.labels.length > 0 ? ` title="${escapeAttr(token.labels.join("، "))}"` : "";
      return `<span class="${classes.join(" ")}" data-token-index="${token.index}"${title}>${escapeHtml(token.surface)}</span>`;
    })
    .join(" ");
  return rtl(spans, "editor-tokens");
}
