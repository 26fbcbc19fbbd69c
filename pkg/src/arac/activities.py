"""Gap-fill activities: exercises, exams, assignments and grading.

Expected answers are snapshotted when the exercise is created, together
with a fingerprint of the source text's token surfaces; a text whose body
changed afterwards makes its exercises stale, and stale exercises refuse
to render or grade rather than silently drifting. Grading compares each
learner answer with its expected token under the platform normalization
config; missing or blank answers count as incorrect.

The performance score is kept as an exact rational (100 * correct /
total) and only rendered to one decimal place (half-up) at display
boundaries.
"""
from __future__ import annotations

from datetime import datetime
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import store as st
from .corpus import CorpusService, new_id, utc_now
from .errors import (
    AlreadyAccomplished,
    AlreadyAssigned,
    DuplicateExercise,
    DuplicateGapIndex,
    EmptyExam,
    EmptyGapSet,
    IndexOutOfRange,
    InvalidCounts,
    InvalidSubmission,
    NoAssignment,
    NotAccomplished,
    NotAuthorized,
    StaleExercise,
    UnknownExam,
    UnknownExercise,
    UnknownText,
    UnknownUser,
)
from .locks import KeyedLocks
from .models import (
    Assignment,
    AssignmentStatus,
    CorrectionReport,
    Exam,
    Exercise,
    ExerciseView,
    GapAnswer,
    GapResult,
    GapSegment,
    LiteralSegment,
    Role,
    Segment,
    Submission,
    User,
    Verdict,
)
from .normalization import normalize


def compute_performance(correct: int, total: int) -> Fraction:
    """Score as the exact rational 100 * correct / total."""
    if total <= 0:
        raise InvalidCounts(f"total questions must be positive, got {total}")
    if correct < 0 or correct > total:
        raise InvalidCounts(f"correct count {correct} outside [0, {total}]")
    return Fraction(100 * correct, total)


def render_performance(value: Fraction) -> str:
    """One-decimal rendering of a performance score, rounding half up."""
    tenths, remainder = divmod(value.numerator * 10, value.denominator)
    if 2 * remainder >= value.denominator:
        tenths += 1
    return f"{tenths // 10}.{tenths % 10}"


def _require_teacher(user: User):
    if user.role not in (Role.TEACHER, Role.ADMIN):
        raise NotAuthorized(f"{user.login} ({user.role.value}) may not author activities")


class ActivityService:
    def __init__(
        self,
        store: st.EntityStore,
        corpus: CorpusService,
        clock: Callable[[], datetime] = utc_now,
        idgen: Callable[[], str] = new_id,
    ):
        self.store = store
        self.corpus = corpus
        self.clock = clock
        self.idgen = idgen
        self.locks = KeyedLocks()

    # -- exercises ------------------------------------------------------------

    def create_exercise(
        self,
        text_id: str,
        gap_positions: Sequence[int],
        title: str,
        instructions: str,
        caller: User,
    ) -> Exercise:
        _require_teacher(caller)
        text = self.store.get(st.TEXTS, text_id)
        if text is None:
            raise UnknownText(f"no text {text_id!r}")
        if not gap_positions:
            raise EmptyGapSet("an exercise needs at least one gap")
        if len(set(gap_positions)) != len(gap_positions):
            raise DuplicateGapIndex(f"duplicate gap positions in {list(gap_positions)}")
        for pos in gap_positions:
            if not 0 <= pos < len(text.tokens):
                raise IndexOutOfRange(
                    f"gap position {pos} out of range for text with {len(text.tokens)} tokens"
                )
        gaps = tuple(sorted(gap_positions))
        exercise = Exercise(
            id=self.idgen(),
            text_id=text_id,
            title=title,
            instructions=instructions,
            gaps=gaps,
            expected_answers=tuple(text.tokens[i].surface for i in gaps),
            text_fingerprint=text.token_fingerprint(),
            created_by=caller.id,
            created_at=self.clock(),
        )
        self.store.transact([st.Put(st.EXERCISES, exercise)])
        return exercise

    def get_exercise(self, exercise_id: str) -> Exercise:
        exercise = self.store.get(st.EXERCISES, exercise_id)
        if exercise is None:
            raise UnknownExercise(f"no exercise {exercise_id!r}")
        return exercise

    def render_exercise(self, exercise_id: str) -> ExerciseView:
        """Gap-fill view of the exercise: the source text with each gapped
        token replaced by its gap ordinal. Never contains an expected
        answer for any gap."""
        exercise = self.get_exercise(exercise_id)
        text = self.store.get(st.TEXTS, exercise.text_id)
        if text is None or text.token_fingerprint() != exercise.text_fingerprint:
            raise StaleExercise(
                f"text {exercise.text_id!r} changed since exercise {exercise_id!r} was created"
            )
        body = text.body.encode("utf-8")
        segments: list[Segment] = []
        cursor = 0
        for ordinal, gap_index in enumerate(exercise.gaps, start=1):
            token = text.tokens[gap_index]
            literal = body[cursor:token.start].decode("utf-8")
            if literal:
                segments.append(LiteralSegment(literal))
            segments.append(GapSegment(ordinal))
            cursor = token.end
        tail = body[cursor:].decode("utf-8")
        if tail:
            segments.append(LiteralSegment(tail))
        return ExerciseView(
            exercise_id=exercise.id,
            title=exercise.title,
            instructions=exercise.instructions,
            segments=tuple(segments),
            gap_count=len(exercise.gaps),
        )

    # -- exams ------------------------------------------------------------------

    def assemble_exam(self, title: str, exercise_ids: Sequence[str], caller: User) -> Exam:
        _require_teacher(caller)
        if not exercise_ids:
            raise EmptyExam("an exam needs at least one exercise")
        if len(set(exercise_ids)) != len(exercise_ids):
            raise DuplicateExercise("an exam may list each exercise once")
        for exercise_id in exercise_ids:
            if self.store.get(st.EXERCISES, exercise_id) is None:
                raise UnknownExercise(f"no exercise {exercise_id!r}")
        exam = Exam(
            id=self.idgen(),
            title=title,
            exercise_ids=tuple(exercise_ids),
            created_by=caller.id,
            created_at=self.clock(),
        )
        self.store.transact([st.Put(st.EXAMS, exam)])
        return exam

    def get_exam(self, exam_id: str) -> Exam:
        exam = self.store.get(st.EXAMS, exam_id)
        if exam is None:
            raise UnknownExam(f"no exam {exam_id!r}")
        return exam

    def assign_exam(self, exam_id: str, student_ids: Sequence[str], caller: User) -> tuple[Assignment, ...]:
        _require_teacher(caller)
        self.get_exam(exam_id)
        assignments: list[Assignment] = []
        seen: set[str] = set()
        for student_id in student_ids:
            student = self.store.get(st.USERS, student_id)
            if student is None or not student.active:
                raise UnknownUser(f"no user {student_id!r}")
            if student_id in seen or self.store.assignment_for(exam_id, student_id) is not None:
                raise AlreadyAssigned(f"exam already assigned to {student.login!r}")
            seen.add(student_id)
            assignments.append(
                Assignment(
                    id=self.idgen(),
                    exam_id=exam_id,
                    student_id=student_id,
                    status=AssignmentStatus.ASSIGNED,
                    assigned_at=self.clock(),
                )
            )
        self.store.transact([st.Put(st.ASSIGNMENTS, a) for a in assignments])
        return tuple(assignments)

    def get_assignment(self, assignment_id: str) -> Assignment:
        assignment = self.store.get(st.ASSIGNMENTS, assignment_id)
        if assignment is None:
            raise NoAssignment(f"no assignment {assignment_id!r}")
        return assignment

    # -- grading -----------------------------------------------------------------

    def exam_gap_slots(self, exam: Exam) -> list[tuple[str, int, str]]:
        """(exercise_id, gap ordinal, expected answer) triples in exam order."""
        slots: list[tuple[str, int, str]] = []
        for exercise_id in exam.exercise_ids:
            exercise = self.get_exercise(exercise_id)
            for ordinal, expected in enumerate(exercise.expected_answers, start=1):
                slots.append((exercise_id, ordinal, expected))
        return slots

    def make_submission(
        self,
        exam_id: str,
        student_id: str,
        answers: Sequence[GapAnswer],
        submitted_at: Optional[datetime] = None,
    ) -> Submission:
        return Submission(
            id=self.idgen(),
            exam_id=exam_id,
            student_id=student_id,
            answers=tuple(answers),
            submitted_at=submitted_at or self.clock(),
        )

    def grade_submission(self, submission: Submission) -> CorrectionReport:
        """Grade one submission, persist the report and flip the assignment
        to accomplished. Exactly one submission is graded per assignment:
        concurrent or repeated submissions fail with AlreadyAccomplished."""
        assignment = self.store.assignment_for(submission.exam_id, submission.student_id)
        if assignment is None:
            raise NoAssignment(
                f"no assignment of exam {submission.exam_id!r} to student {submission.student_id!r}"
            )
        with self.locks.for_key(assignment.id):
            current = self.store.get(st.ASSIGNMENTS, assignment.id)
            if current.status is AssignmentStatus.ACCOMPLISHED:
                raise AlreadyAccomplished("this exam has already been submitted and graded")

            exam = self.get_exam(submission.exam_id)
            for exercise_id in exam.exercise_ids:
                exercise = self.get_exercise(exercise_id)
                text = self.store.get(st.TEXTS, exercise.text_id)
                if text is None or text.token_fingerprint() != exercise.text_fingerprint:
                    raise StaleExercise(
                        f"exercise {exercise_id!r} is stale; its source text changed"
                    )

            slots = self.exam_gap_slots(exam)
            slot_keys = {(exercise_id, ordinal) for exercise_id, ordinal, _ in slots}
            answer_map = submission.answer_map()
            for key in answer_map:
                if key not in slot_keys:
                    raise InvalidSubmission(f"answer for unknown gap slot {key!r}")

            per_gap: list[GapResult] = []
            correct_count = 0
            for exercise_id, ordinal, expected in slots:
                given = answer_map.get((exercise_id, ordinal))
                ok = given is not None and normalize(given.strip(), self.corpus.config) == normalize(
                    expected, self.corpus.config
                )
                if ok:
                    correct_count += 1
                per_gap.append(
                    GapResult(
                        exercise_id=exercise_id,
                        ordinal=ordinal,
                        expected=expected,
                        given=given,
                        verdict=Verdict.CORRECT if ok else Verdict.INCORRECT,
                    )
                )

            graded_at = self.clock()
            stored_submission = Submission(
                id=submission.id,
                exam_id=submission.exam_id,
                student_id=submission.student_id,
                answers=submission.answers,
                submitted_at=submission.submitted_at,
                assignment_id=assignment.id,
            )
            report = CorrectionReport(
                id=self.idgen(),
                exam_id=submission.exam_id,
                student_id=submission.student_id,
                assignment_id=assignment.id,
                per_gap=tuple(per_gap),
                correct_count=correct_count,
                question_count=len(slots),
                performance=compute_performance(correct_count, len(slots)),
            )
            accomplished = Assignment(
                id=assignment.id,
                exam_id=assignment.exam_id,
                student_id=assignment.student_id,
                status=AssignmentStatus.ACCOMPLISHED,
                assigned_at=assignment.assigned_at,
                accomplished_at=graded_at,
            )
            self.store.transact(
                [
                    st.Put(st.SUBMISSIONS, stored_submission),
                    st.Put(st.REPORTS, report),
                    st.Put(st.ASSIGNMENTS, accomplished),
                ]
            )
            return report

    def correction_report(self, assignment_id: str) -> CorrectionReport:
        assignment = self.get_assignment(assignment_id)
        if assignment.status is not AssignmentStatus.ACCOMPLISHED:
            raise NotAccomplished("the exam has not been submitted yet")
        report = self.store.report_for_assignment(assignment_id)
        if report is None:
            raise NotAccomplished("no graded report for this assignment")
        return report
