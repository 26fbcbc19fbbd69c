"""Performance report files: delimited history plus a rendered chart.

The report path takes one student's accomplished-exam history and writes
two artifacts side by side: ``history.csv`` (one row per accomplished
exam) and ``performance.png`` (score over time, y fixed to 0..100).
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import store as st
from .activities import render_performance
from .errors import UnknownUser
from .models import PerformanceHistory, User

CSV_FIELDS = ["exam_id", "exam_title", "accomplished_at", "performance"]


def resolve_student(store: st.EntityStore, ref: str) -> User:
    """Accepts a user id or a login; inactive users stay resolvable because
    their reports survive account deletion."""
    user = store.get(st.USERS, ref)
    if user is None:
        user = store.user_by_login(ref, active_only=False)
    if user is None:
        raise UnknownUser(f"no user with id or login {ref!r}")
    return user


def write_history_csv(
    store: st.EntityStore, history: PerformanceHistory, path: Union[str, Path]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for entry in history.entries:
            exam = store.get(st.EXAMS, entry.exam_id)
            writer.writerow(
                {
                    "exam_id": entry.exam_id,
                    "exam_title": exam.title if exam else "",
                    "accomplished_at": entry.accomplished_at.isoformat(),
                    "performance": render_performance(entry.performance),
                }
            )
    return path


def write_history_chart(
    history: PerformanceHistory, path: Union[str, Path], label: str = ""
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    if history.entries:
        xs = [e.accomplished_at for e in history.entries]
        ys = [float(e.performance) for e in history.entries]
        ax.plot(xs, ys, marker="o")
        for x, y, e in zip(xs, ys, history.entries):
            ax.annotate(render_performance(e.performance), (x, y), textcoords="offset points", xytext=(0, 8))
        fig.autofmt_xdate()
    else:
        ax.text(0.5, 0.5, "no accomplished exams", ha="center", va="center", transform=ax.transAxes)
    ax.set_ylim(0, 100)
    ax.set_ylabel("performance (%)")
    ax.set_title(label or "performance history")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def generate_performance_report(
    store: st.EntityStore,
    history: PerformanceHistory,
    out_dir: Union[str, Path],
    label: str = "",
) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return {
        "csv": write_history_csv(store, history, out_dir / "history.csv"),
        "chart": write_history_chart(history, out_dir / "performance.png", label),
    }
