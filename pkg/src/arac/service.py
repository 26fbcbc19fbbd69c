"""Platform facade wiring the store and the three service layers together."""
from __future__ import annotations

from datetime import datetime
from typing import Callable, Optional

from .accounts import AccountService
from .activities import ActivityService
from .config import ServiceConfig
from .corpus import CorpusService, new_id, utc_now
from .models import Role
from .store import USERS, EntityStore


class Platform:
    def __init__(
        self,
        config: Optional[ServiceConfig] = None,
        clock: Callable[[], datetime] = utc_now,
        idgen: Callable[[], str] = new_id,
    ):
        self.config = config or ServiceConfig()
        self.store = EntityStore(self.config.storage_path)
        self.corpus = CorpusService(self.store, self.config.normalization, clock=clock, idgen=idgen)
        self.activities = ActivityService(self.store, self.corpus, clock=clock, idgen=idgen)
        self.accounts = AccountService(
            self.store, self.config.session_ttl_seconds, clock=clock, idgen=idgen
        )
        self._maybe_bootstrap_admin()

    def _maybe_bootstrap_admin(self):
        if not self.config.admin_login or not self.config.admin_password:
            return
        has_admin = any(
            user.active and user.role is Role.ADMIN for user in self.store.list(USERS)
        )
        if not has_admin:
            self.accounts.bootstrap_admin(self.config.admin_login, self.config.admin_password)
