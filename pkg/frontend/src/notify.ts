export type NoticeKind = "info" | "success" | "error";

export interface Notice {
  id: number;
  kind: NoticeKind;
  text: string;
  sticky: boolean;
}

const DEFAULT_TTL_MS = 4000;

/** Notification center, headless. The DOM adapter subscribes via onChange
 *  and renders whatever `notices` holds; sticky notices (delivery failures)
 *  stay until dismissed or cleared by a later success. */
export class Notifier {
  private seq = 0;
  notices: Notice[] = [];
  onChange: (notices: readonly Notice[]) => void = () => {};

  show(kind: NoticeKind, text: string, opts: { sticky?: boolean; ttlMs?: number } = {}): Notice {
    const notice: Notice = { id: ++this.seq, kind, text, sticky: opts.sticky ?? false };
    this.notices.push(notice);
    if (!notice.sticky) {
      const ttl = opts.ttlMs ?? DEFAULT_TTL_MS;
      setTimeout(() => this.dismiss(notice.id), ttl);
    }
    this.onChange(this.notices);
    return notice;
  }

  info(text: string): Notice {
    return this.show("info", text);
  }

  success(text: string): Notice {
    return this.show("success", text);
  }

  error(text: string, opts: { sticky?: boolean } = {}): Notice {
    return this.show("error", text, opts);
  }

  dismiss(id: number): void {
    const before = this.notices.length;
    this.notices = this.notices.filter((n) => n.id !== id);
    if (this.notices.length !== before) this.onChange(this.notices);
  }

  /** Drop every notice of one kind (e.g. stale failure banners on recovery). */
  clear(kind?: NoticeKind): void {
    const before = this.notices.length;
    this.notices = kind === undefined ? [] : this.notices.filter((n) => n.kind !== kind);
    if (this.notices.length !== before) this.onChange(this.notices);
  }

  has(kind: NoticeKind): boolean {
    return this.notices.some((n) => n.kind === kind);
  }
}
