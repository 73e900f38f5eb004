/**
 * Append-only record log over a localStorage-shaped backend.
 *
 * Completed trial records are persisted one JSON line at a time under
 * a session-scoped key, so an interrupted session can resume with its
 * finished trials intact. Only whole lines are ever written; a partial
 * trial is simply re-run after resume.
 */

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

/** In-memory backend for tests and non-browser runs. */
export class MemoryStorage implements StorageLike {
  private readonly items = new Map<string, string>();

  getItem(key: string): string | null {
    return this.items.has(key) ? this.items.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.items.set(key, value);
  }

  removeItem(key: string): void {
    this.items.delete(key);
  }
}

export class RecordLog {
  constructor(private readonly storage: StorageLike, readonly key: string) {}

  /** All persisted lines, oldest first. */
  load(): string[] {
    const raw = this.storage.getItem(this.key);
    if (raw === null || raw === "") {
      return [];
    }
    const lines = raw.split("\n");
    // A well-formed log ends with a newline; drop the empty tail.
    if (lines.length > 0 && lines[lines.length - 1] === "") {
      lines.pop();
    }
    return lines;
  }

  /** Append one complete line. */
  append(line: string): void {
    if (line.includes("\n")) {
      throw new RangeError("record lines must not contain newlines");
    }
    const raw = this.storage.getItem(this.key) ?? "";
    this.storage.setItem(this.key, raw + line + "\n");
  }

  clear(): void {
    this.storage.removeItem(this.key);
  }
}
