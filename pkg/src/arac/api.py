"""HTTP+JSON face of the platform.

Every operation of the library is reachable through exactly one endpoint
(see ENDPOINT_TABLE / OPERATION_MAP, mirrored in the README). Sessions
travel in the Authorization header as ``Bearer <token>``; every endpoint
except POST /api/login requires one. Error bodies are always
``{"code": ..., "message": ...}`` with a stable machine code, and map to
401 (no/expired session), 403 (role), 404 (unknown entity), 409
(duplicates, already-accomplished, stale), 422 (validation).

Student sessions never receive expected answers or another student's
data: texts, annotations and authoring endpoints are teacher/admin only,
exercise views carry gap markers instead of answers, and report/history
access is checked against the session user.
"""
from __future__ import annotations

import json
import socket
from typing import Optional

from fastapi import Depends, FastAPI, Form, Header, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .accounts import require_role
from .activities import render_performance
from .config import ServiceConfig
from .errors import (
    AracError,
    AuthenticationRequired,
    BindFailure,
    ConflictError,
    ConstraintViolation,
    InvalidCredentials,
    NotAuthorized,
    UnknownEntity,
    UnsupportedVersion,
    ValidationError,
)
from .lom import lom_from_dict, lom_to_dict
from .models import (
    Annotation,
    Assignment,
    CorrectionReport,
    Exam,
    Exercise,
    ExerciseView,
    GapAnswer,
    PerformanceHistory,
    QueryCriteria,
    Role,
    TextDocument,
    TextSummary,
    Theme,
    User,
)
from .service import Platform

# (method, path, what it exposes); tested by enumeration against the app
ENDPOINT_TABLE = [
    ("POST", "/api/login", "authenticate"),
    ("POST", "/api/logout", "session logout"),
    ("POST", "/api/themes", "create_theme"),
    ("GET", "/api/themes", "theme listing"),
    ("POST", "/api/texts", "ingest_text"),
    ("GET", "/api/texts", "query_texts"),
    ("GET", "/api/texts/{text_id}", "text retrieval"),
    ("PUT", "/api/texts/{text_id}/metadata", "attach_metadata"),
    ("POST", "/api/taxonomies", "taxonomy upload"),
    ("POST", "/api/texts/{text_id}/annotate/{taxonomy_id}", "annotate_automatic"),
    ("POST", "/api/texts/{text_id}/annotations", "annotate_manual"),
    ("GET", "/api/texts/{text_id}/annotations", "annotation listing"),
    ("POST", "/api/exercises", "create_exercise"),
    ("GET", "/api/exercises/{exercise_id}/view", "render_exercise"),
    ("POST", "/api/exams", "assemble_exam"),
    ("POST", "/api/exams/{exam_id}/assign", "assign_exam"),
    ("GET", "/api/me/assignments", "monitor_exams"),
    ("POST", "/api/assignments/{assignment_id}/submit", "grade_submission"),
    ("GET", "/api/assignments/{assignment_id}/report", "correction_report"),
    ("GET", "/api/students/{student_id}/history", "performance_history"),
    ("POST", "/api/users", "create_account"),
    ("DELETE", "/api/users/{user_id}", "delete_account"),
]

# operations without their own endpoint, and where they surface instead
OPERATION_MAP = {
    "tokenize": "runs inside POST /api/texts; visible in GET /api/texts/{text_id}",
    "compute_performance": "runs inside grading; visible in report payloads",
    "transact": "internal persistence plumbing",
    "export_corpus": "CLI: arac export",
    "import_corpus": "CLI: arac import",
}


def _status_for(exc: AracError) -> int:
    if isinstance(exc, (AuthenticationRequired, InvalidCredentials)):
        return 401
    if isinstance(exc, NotAuthorized):
        return 403
    if isinstance(exc, UnknownEntity):
        return 404
    if isinstance(exc, (ConflictError, ConstraintViolation)):
        return 409
    if isinstance(exc, (ValidationError, UnsupportedVersion)):
        return 422
    return 400


# -- request bodies ---------------------------------------------------------

class LoginIn(BaseModel):
    login: str
    password: str


class ThemeIn(BaseModel):
    name: str


class ManualAnnotationIn(BaseModel):
    token_index: int
    label: str


class MetadataIn(BaseModel):
    lom: dict


class ExerciseIn(BaseModel):
    text_id: str
    gap_positions: list[int]
    title: str = ""
    instructions: str = ""


class ExamIn(BaseModel):
    title: str
    exercise_ids: list[str]


class AssignIn(BaseModel):
    student_ids: list[str]


class AnswerIn(BaseModel):
    exercise_id: str
    gap: int
    answer: str


class SubmitIn(BaseModel):
    answers: list[AnswerIn] = []


class UserIn(BaseModel):
    login: str
    password: str
    role: str


# -- wire shapes -------------------------------------------------------------

def wire_theme(theme: Theme) -> dict:
    return theme.to_dict()


def wire_text(text: TextDocument) -> dict:
    return {
        "id": text.id,
        "title": text.title,
        "body": text.body,
        "theme_id": text.theme_id,
        "tokens": [
            {"index": t.index, "surface": t.surface, "byte_span": [t.start, t.end]}
            for t in text.tokens
        ],
        "lom": lom_to_dict(text.lom),
        "created_by": text.created_by,
        "created_at": text.created_at.isoformat(),
    }


def wire_summary(summary: TextSummary) -> dict:
    return summary.to_dict()


def wire_annotation(ann: Annotation) -> dict:
    return {
        "id": ann.id,
        "text_id": ann.text_id,
        "token_index": ann.token_index,
        "label": ann.label,
        "source": ann.source.value,
        "taxonomy_id": ann.taxonomy_id,
        "entry_index": ann.entry_index,
    }


def wire_exercise(exercise: Exercise) -> dict:
    return {
        "id": exercise.id,
        "text_id": exercise.text_id,
        "title": exercise.title,
        "instructions": exercise.instructions,
        "gaps": list(exercise.gaps),
        "expected_answers": list(exercise.expected_answers),
        "created_by": exercise.created_by,
        "created_at": exercise.created_at.isoformat(),
    }


def wire_view(view: ExerciseView) -> dict:
    return view.to_dict()


def wire_exam(exam: Exam) -> dict:
    return {
        "id": exam.id,
        "title": exam.title,
        "exercise_ids": list(exam.exercise_ids),
        "created_by": exam.created_by,
        "created_at": exam.created_at.isoformat(),
    }


def wire_assignment(assignment: Assignment) -> dict:
    return assignment.to_dict()


def wire_report(report: CorrectionReport) -> dict:
    return {
        "exam_id": report.exam_id,
        "student_id": report.student_id,
        "assignment_id": report.assignment_id,
        "per_gap": [g.to_dict() for g in report.per_gap],
        "correct_count": report.correct_count,
        "question_count": report.question_count,
        "performance": float(report.performance),
        "performance_display": render_performance(report.performance),
    }


def wire_history(history: PerformanceHistory) -> dict:
    return {
        "student_id": history.student_id,
        "entries": [
            {
                "exam_id": e.exam_id,
                "accomplished_at": e.accomplished_at.isoformat(),
                "performance": float(e.performance),
                "performance_display": render_performance(e.performance),
            }
            for e in history.entries
        ],
    }


def wire_user(user: User) -> dict:
    # password digest never leaves the server
    return {
        "id": user.id,
        "login": user.login,
        "role": user.role.value,
        "created_at": user.created_at.isoformat(),
        "active": user.active,
    }


# -- app factory ----------------------------------------------------------------

def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="ARAC", docs_url=None, redoc_url=None, openapi_url=None)
    accounts = platform.accounts
    corpus = platform.corpus
    activities = platform.activities
    store = platform.store

    def bearer_token(authorization: Optional[str] = Header(default=None)) -> Optional[str]:
        if authorization and authorization.lower().startswith("bearer "):
            return authorization[7:].strip()
        return None

    def current_user(token: Optional[str] = Depends(bearer_token)) -> User:
        return accounts.resolve_session(token)

    def teacher_user(user: User = Depends(current_user)) -> User:
        require_role(user, Role.TEACHER, Role.ADMIN)
        return user

    def admin_user(user: User = Depends(current_user)) -> User:
        require_role(user, Role.ADMIN)
        return user

    @app.exception_handler(AracError)
    async def arac_error_handler(request: Request, exc: AracError):
        return JSONResponse(
            status_code=_status_for(exc), content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content={"code": "invalid_request", "message": str(exc.errors()[:3])}
        )

    # -- sessions ---------------------------------------------------------

    @app.post("/api/login")
    def login(body: LoginIn):
        session = accounts.authenticate(body.login, body.password)
        user = accounts.get_user(session.user_id)
        return {
            "token": session.token,
            "user_id": user.id,
            "login": user.login,
            "role": user.role.value,
            "expires_at": session.expires_at.isoformat(),
        }

    @app.post("/api/logout")
    def logout(user: User = Depends(current_user), token: Optional[str] = Depends(bearer_token)):
        accounts.logout(token)
        return {"ok": True}

    # -- themes ------------------------------------------------------------

    @app.post("/api/themes")
    def create_theme(body: ThemeIn, user: User = Depends(admin_user)):
        return wire_theme(corpus.create_theme(body.name, user))

    @app.get("/api/themes")
    def list_themes(user: User = Depends(teacher_user)):
        return {"themes": [wire_theme(t) for t in corpus.list_themes()]}

    # -- texts ---------------------------------------------------------------

    @app.post("/api/texts")
    async def ingest_text(
        file: UploadFile,
        title: str = Form(...),
        theme_id: str = Form(...),
        lom: str = Form("{}"),
        user: User = Depends(teacher_user),
    ):
        try:
            lom_dict = json.loads(lom)
        except json.JSONDecodeError as exc:
            raise RequestValidationError([{"loc": ("form", "lom"), "msg": str(exc)}])
        body_bytes = await file.read()
        record = lom_from_dict(lom_dict)
        text = corpus.ingest_text(title, body_bytes, theme_id, record, user)
        return wire_text(text)

    @app.get("/api/texts")
    def query_texts(
        theme_id: Optional[str] = None,
        keyword: Optional[str] = None,
        difficulty: Optional[str] = None,
        context: Optional[str] = None,
        has_taxonomy: Optional[str] = None,
        author: Optional[str] = None,
        user: User = Depends(teacher_user),
    ):
        criteria = QueryCriteria(
            theme_id=theme_id,
            keyword=keyword,
            difficulty=difficulty,
            context=context,
            has_taxonomy=has_taxonomy,
            author=author,
        )
        return {"texts": [wire_summary(s) for s in corpus.query_texts(criteria)]}

    @app.get("/api/texts/{text_id}")
    def get_text(text_id: str, user: User = Depends(teacher_user)):
        return wire_text(corpus.get_text(text_id))

    @app.put("/api/texts/{text_id}/metadata")
    def attach_metadata(text_id: str, body: MetadataIn, user: User = Depends(teacher_user)):
        record = lom_from_dict(body.lom)
        return wire_text(corpus.attach_metadata(text_id, record))

    # -- taxonomies and annotation ---------------------------------------------

    @app.post("/api/taxonomies")
    async def upload_taxonomy(
        file: UploadFile,
        name: str = Form(...),
        user: User = Depends(teacher_user),
    ):
        data = await file.read()
        taxonomy = corpus.create_taxonomy_from_file(name, data, user)
        return taxonomy.to_dict()

    @app.post("/api/texts/{text_id}/annotate/{taxonomy_id}")
    def annotate_automatic(text_id: str, taxonomy_id: str, user: User = Depends(teacher_user)):
        annotations = corpus.annotate_automatic(text_id, taxonomy_id)
        return {"annotations": [wire_annotation(a) for a in annotations]}

    @app.post("/api/texts/{text_id}/annotations")
    def annotate_manual(
        text_id: str, body: ManualAnnotationIn, user: User = Depends(teacher_user)
    ):
        return wire_annotation(
            corpus.annotate_manual(text_id, body.token_index, body.label, user)
        )

    @app.get("/api/texts/{text_id}/annotations")
    def list_annotations(text_id: str, user: User = Depends(teacher_user)):
        return {"annotations": [wire_annotation(a) for a in corpus.annotations_for_text(text_id)]}

    # -- exercises and exams ------------------------------------------------------

    @app.post("/api/exercises")
    def create_exercise(body: ExerciseIn, user: User = Depends(teacher_user)):
        exercise = activities.create_exercise(
            body.text_id, body.gap_positions, body.title, body.instructions, user
        )
        return wire_exercise(exercise)

    @app.get("/api/exercises/{exercise_id}/view")
    def render_exercise(exercise_id: str, user: User = Depends(current_user)):
        if user.role is Role.STUDENT:
            _require_exercise_assigned(exercise_id, user)
        return wire_view(activities.render_exercise(exercise_id))

    def _require_exercise_assigned(exercise_id: str, student: User):
        for assignment in store.assignments_for_student(student.id):
            exam = activities.get_exam(assignment.exam_id)
            if exercise_id in exam.exercise_ids:
                return
        raise NotAuthorized("this exercise is not part of any exam assigned to you")

    @app.post("/api/exams")
    def assemble_exam(body: ExamIn, user: User = Depends(teacher_user)):
        return wire_exam(activities.assemble_exam(body.title, body.exercise_ids, user))

    @app.post("/api/exams/{exam_id}/assign")
    def assign_exam(exam_id: str, body: AssignIn, user: User = Depends(teacher_user)):
        assignments = activities.assign_exam(exam_id, body.student_ids, user)
        return {"assignments": [wire_assignment(a) for a in assignments]}

    # -- exam taking ----------------------------------------------------------------

    @app.get("/api/me/assignments")
    def my_assignments(user: User = Depends(current_user)):
        rows = accounts.monitor_exams(user.id, user)
        out = []
        for row in rows:
            exam = activities.get_exam(row.exam_id)
            out.append(
                {
                    "assignment_id": row.assignment_id,
                    "exam_id": row.exam_id,
                    "exam_title": exam.title,
                    "exercise_ids": list(exam.exercise_ids),
                    "status": row.status.value,
                    "assigned_at": row.assigned_at.isoformat(),
                    "accomplished_at": row.accomplished_at.isoformat()
                    if row.accomplished_at
                    else None,
                }
            )
        return {"assignments": out}

    @app.post("/api/assignments/{assignment_id}/submit")
    def submit(assignment_id: str, body: SubmitIn, user: User = Depends(current_user)):
        assignment = activities.get_assignment(assignment_id)
        if user.id != assignment.student_id:
            raise NotAuthorized("only the assigned student may submit this exam")
        submission = activities.make_submission(
            assignment.exam_id,
            assignment.student_id,
            [GapAnswer(a.exercise_id, a.gap, a.answer) for a in body.answers],
        )
        report = activities.grade_submission(submission)
        return wire_report(report)

    @app.get("/api/assignments/{assignment_id}/report")
    def report(assignment_id: str, user: User = Depends(current_user)):
        assignment = activities.get_assignment(assignment_id)
        if user.role is Role.STUDENT and user.id != assignment.student_id:
            raise NotAuthorized("students may only read their own reports")
        return wire_report(activities.correction_report(assignment_id))

    # -- accounts ----------------------------------------------------------------------

    @app.get("/api/students/{student_id}/history")
    def history(student_id: str, user: User = Depends(current_user)):
        return wire_history(accounts.performance_history(student_id, user))

    @app.post("/api/users")
    def create_user(body: UserIn, user: User = Depends(admin_user)):
        try:
            role = Role(body.role)
        except ValueError:
            raise RequestValidationError([{"loc": ("body", "role"), "msg": f"unknown role {body.role!r}"}])
        return wire_user(accounts.create_account(body.login, body.password, role, user))

    @app.delete("/api/users/{user_id}")
    def delete_user(user_id: str, user: User = Depends(admin_user)):
        deleted = accounts.delete_account(user_id, user)
        return {"ok": True, "user_id": deleted.id, "active": deleted.active}

    return app


def serve(config: ServiceConfig):
    """Build a platform from the config and serve it; raises BindFailure
    when the configured address cannot be bound."""
    import uvicorn

    platform = Platform(config)
    app = create_app(platform)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((config.bind_host, config.bind_port))
    except OSError as exc:
        raise BindFailure(f"cannot bind {config.bind_host}:{config.bind_port}: {exc}")
    finally:
        probe.close()
    uvicorn.run(app, host=config.bind_host, port=config.bind_port, log_level="info")
