"""Users, credentials, sessions, exam monitoring and performance history.

Passwords are stored as salted PBKDF2-SHA256 digests; the plaintext never
reaches the store or any log line. Session tokens are random (256 bits),
expire after the configured TTL and live only in memory: the platform is
stateless beyond this session table.
"""
from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Optional

from . import store as st
from .corpus import new_id, utc_now
from .errors import (
    AuthenticationRequired,
    DuplicateLogin,
    InvalidCredentials,
    NotAuthorized,
    UnknownUser,
    WeakPassword,
)
from .locks import KeyedLocks
from .models import (
    AssignmentStatus,
    HistoryEntry,
    PerformanceHistory,
    Role,
    SessionToken,
    User,
    deactivated,
)

PBKDF2_ITERATIONS = 60_000
MIN_PASSWORD_LENGTH = 8
SESSION_TOKEN_BYTES = 32  # 256 bits of entropy


def hash_password(password: str) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, PBKDF2_ITERATIONS)
    return f"pbkdf2_sha256${PBKDF2_ITERATIONS}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, iterations, salt_hex, digest_hex = stored.split("$")
        if scheme != "pbkdf2_sha256":
            return False
        candidate = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt_hex), int(iterations)
        )
        return hmac.compare_digest(candidate.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


_DUMMY_DIGEST = hash_password("timing-equalizer")


@dataclass(frozen=True)
class ExamStatusRow:
    assignment_id: str
    exam_id: str
    status: AssignmentStatus
    assigned_at: datetime
    accomplished_at: Optional[datetime]


def require_role(user: User, *roles: Role):
    if user.role not in roles:
        raise NotAuthorized(
            f"{user.login} ({user.role.value}) lacks the required role"
        )


def can_view_student(caller: User, student_id: str) -> bool:
    return caller.role in (Role.ADMIN, Role.TEACHER) or caller.id == student_id


class AccountService:
    def __init__(
        self,
        store: st.EntityStore,
        session_ttl_seconds: int = 3600,
        clock: Callable[[], datetime] = utc_now,
        idgen: Callable[[], str] = new_id,
    ):
        self.store = store
        self.session_ttl = timedelta(seconds=session_ttl_seconds)
        self.clock = clock
        self.idgen = idgen
        self._sessions: dict[str, SessionToken] = {}
        self._sessions_lock = threading.Lock()
        self._login_locks = KeyedLocks()

    # -- accounts ----------------------------------------------------------

    def bootstrap_admin(self, login: str, password: str) -> User:
        """Seed the first administrator. Only permitted while the store has
        no active admin; later admins are created through create_account."""
        for user in self.store.list(st.USERS):
            if user.active and user.role is Role.ADMIN:
                raise NotAuthorized("an administrator already exists")
        return self._insert_user(login, password, Role.ADMIN)

    def create_account(self, login: str, password: str, role: Role, caller: User) -> User:
        require_role(caller, Role.ADMIN)
        return self._insert_user(login, password, role)

    def _insert_user(self, login: str, password: str, role: Role) -> User:
        login = login.strip()
        if len(password) < MIN_PASSWORD_LENGTH:
            raise WeakPassword(f"passwords must be at least {MIN_PASSWORD_LENGTH} characters")
        with self._login_locks.for_key(login):
            if self.store.user_by_login(login) is not None:
                raise DuplicateLogin(f"login {login!r} is taken")
            user = User(
                id=self.idgen(),
                login=login,
                password_digest=hash_password(password),
                role=role,
                created_at=self.clock(),
            )
            self.store.transact([st.Put(st.USERS, user)])
            return user

    def get_user(self, user_id: str) -> User:
        user = self.store.get(st.USERS, user_id)
        if user is None:
            raise UnknownUser(f"no user {user_id!r}")
        return user

    def delete_account(self, user_id: str, caller: User) -> User:
        """Soft delete: the account is deactivated and its sessions revoked,
        but authored texts and graded reports stay retrievable."""
        require_role(caller, Role.ADMIN)
        user = self.get_user(user_id)
        inactive = deactivated(user)
        self.store.transact([st.Put(st.USERS, inactive)])
        with self._sessions_lock:
            stale = [tok for tok, sess in self._sessions.items() if sess.user_id == user_id]
            for tok in stale:
                del self._sessions[tok]
        return inactive

    # -- sessions -------------------------------------------------------------

    def authenticate(self, login: str, password: str) -> SessionToken:
        """Issue a session token iff the credentials match an active user.
        Unknown login and wrong password fail identically."""
        user = self.store.user_by_login(login)
        if user is None:
            # burn a hash anyway so the two failure paths cost the same
            verify_password(password, _DUMMY_DIGEST)
            raise InvalidCredentials("invalid login or password")
        if not verify_password(password, user.password_digest):
            raise InvalidCredentials("invalid login or password")
        session = SessionToken(
            token=secrets.token_urlsafe(SESSION_TOKEN_BYTES),
            user_id=user.id,
            expires_at=self.clock() + self.session_ttl,
        )
        with self._sessions_lock:
            self._sessions[session.token] = session
        return session

    def resolve_session(self, token: Optional[str]) -> User:
        if not token:
            raise AuthenticationRequired("a session token is required")
        with self._sessions_lock:
            session = self._sessions.get(token)
        if session is None or session.expires_at <= self.clock():
            raise AuthenticationRequired("session is invalid or expired")
        user = self.store.get(st.USERS, session.user_id)
        if user is None or not user.active:
            raise AuthenticationRequired("session user is gone")
        return user

    def logout(self, token: str):
        with self._sessions_lock:
            self._sessions.pop(token, None)

    # -- monitoring --------------------------------------------------------------

    def monitor_exams(self, student_id: str, caller: User) -> tuple[ExamStatusRow, ...]:
        """One row per assignment of the student, with its current status."""
        if not can_view_student(caller, student_id):
            raise NotAuthorized("students may only view their own exams")
        self.get_user(student_id)
        rows = [
            ExamStatusRow(
                assignment_id=a.id,
                exam_id=a.exam_id,
                status=a.status,
                assigned_at=a.assigned_at,
                accomplished_at=a.accomplished_at,
            )
            for a in self.store.assignments_for_student(student_id)
        ]
        rows.sort(key=lambda r: (r.assigned_at, r.assignment_id))
        return tuple(rows)

    def performance_history(self, student_id: str, caller: User) -> PerformanceHistory:
        """Scores of every accomplished assignment, ordered by accomplishment
        time."""
        if not can_view_student(caller, student_id):
            raise NotAuthorized("students may only view their own history")
        self.get_user(student_id)
        entries: list[HistoryEntry] = []
        for assignment in self.store.assignments_for_student(student_id):
            if assignment.status is not AssignmentStatus.ACCOMPLISHED:
                continue
            report = self.store.report_for_assignment(assignment.id)
            if report is None:
                continue
            entries.append(
                HistoryEntry(
                    exam_id=assignment.exam_id,
                    accomplished_at=assignment.accomplished_at,
                    performance=report.performance,
                )
            )
        entries.sort(key=lambda e: e.accomplished_at)
        return PerformanceHistory(student_id=student_id, entries=tuple(entries))
