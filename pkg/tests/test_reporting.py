import csv
from datetime import datetime, timezone
from fractions import Fraction

from arac.models import GapAnswer, HistoryEntry, PerformanceHistory, Role
from arac.lom import LomRecord
from arac.reporting import (
    generate_performance_report,
    resolve_student,
    write_history_chart,
    write_history_csv,
)

from conftest import make_platform


def _graded_platform():
    platform = make_platform()
    admin = platform.store.user_by_login("admin")
    teacher = platform.accounts.create_account("t1", "s3cretpw1", Role.TEACHER, admin)
    student = platform.accounts.create_account("s1", "studentpw1", Role.STUDENT, admin)
    theme = platform.corpus.create_theme("سياسة", admin)
    text = platform.corpus.ingest_text(
        "نص", "ذهب محمد ثم عاد سريعا".encode(), theme.id, LomRecord(), teacher
    )
    exercise = platform.activities.create_exercise(text.id, [0, 1, 2, 3], "x", "", teacher)
    exam = platform.activities.assemble_exam("امتحان", [exercise.id], teacher)
    platform.activities.assign_exam(exam.id, [student.id], teacher)
    answers = [
        GapAnswer(exercise.id, 1, "ذهب"),
        GapAnswer(exercise.id, 2, "محمد"),
        GapAnswer(exercise.id, 3, "ثم"),
    ]
    platform.activities.grade_submission(
        platform.activities.make_submission(exam.id, student.id, answers)
    )
    return platform, student, exam


def test_report_files_written(tmp_path):
    platform, student, exam = _graded_platform()
    history = platform.accounts.performance_history(student.id, student)
    paths = generate_performance_report(platform.store, history, tmp_path / "out")
    assert paths["csv"].exists()
    assert paths["chart"].exists()
    assert paths["chart"].stat().st_size > 0

    with open(paths["csv"], encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["exam_id"] == exam.id
    assert rows[0]["exam_title"] == "امتحان"
    assert rows[0]["performance"] == "75.0"


def test_empty_history_report(tmp_path):
    platform = make_platform()
    history = PerformanceHistory(student_id="x", entries=())
    csv_path = write_history_csv(platform.store, history, tmp_path / "history.csv")
    chart_path = write_history_chart(history, tmp_path / "performance.png")
    with open(csv_path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows == []
    assert chart_path.stat().st_size > 0


def test_chart_orders_points_by_time(tmp_path):
    entries = (
        HistoryEntry("e1", datetime(2024, 1, 1, tzinfo=timezone.utc), Fraction(50)),
        HistoryEntry("e2", datetime(2024, 2, 1, tzinfo=timezone.utc), Fraction(75)),
    )
    history = PerformanceHistory(student_id="x", entries=entries)
    path = write_history_chart(history, tmp_path / "chart.png")
    assert path.stat().st_size > 0


def test_resolve_student_by_login_and_id():
    platform, student, _ = _graded_platform()
    assert resolve_student(platform.store, "s1").id == student.id
    assert resolve_student(platform.store, student.id).id == student.id
    # inactive users stay resolvable
    admin = platform.store.user_by_login("admin")
    platform.accounts.delete_account(student.id, admin)
    assert resolve_student(platform.store, "s1").id == student.id
