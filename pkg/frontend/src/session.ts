import type { Role } from "./types";

export interface SessionData {
  token: string;
  userId: string;
  login: string;
  role: Role;
}

const STORAGE_KEY = "arac.session";

/**
 * Holds the session token in sessionStorage when the browser provides it,
 * falling back to plain memory (tests, node). Never touches localStorage:
 * the token must not outlive the browsing session.
 */
export class ClientSession {
  private memory: SessionData | null = null;
  private storage: Storage | null;

  constructor(storage?: Storage | null) {
    if (storage !== undefined) {
      this.storage = storage;
    } else {
      this.storage = typeof sessionStorage === "undefined" ? null : sessionStorage;
    }
  }

  get current(): SessionData | null {
    if (this.storage) {
      const raw = this.storage.getItem(STORAGE_KEY);
      return raw ? (JSON.parse(raw) as SessionData) : null;
    }
    return this.memory;
  }

  get token(): string | null {
    return this.current?.token ?? null;
  }

  get role(): Role | null {
    return this.current?.role ?? null;
  }

  get login(): string | null {
    return this.current?.login ?? null;
  }

  get userId(): string | null {
    return this.current?.userId ?? null;
  }

  get authenticated(): boolean {
    return this.current !== null;
  }

  open(data: SessionData): void {
    if (this.storage) {
      this.storage.setItem(STORAGE_KEY, JSON.stringify(data));
    } else {
      this.memory = data;
    }
  }

  clear(): void {
    if (this.storage) {
      this.storage.removeItem(STORAGE_KEY);
    }
    this.memory = null;
  }
}
