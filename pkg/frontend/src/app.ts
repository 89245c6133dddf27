import {
  ApiError,
  Client,
  CreateSessionRequest,
  GuessUpdate,
  SessionView,
  SignValue,
} from "./api.js";

const BINARY_RE = /^[01]+$/;

// Server error codes, reworded for the example list UI.
const ERROR_TEXT: Record<string, string> = {
  DuplicateExample: "That example is already in the list.",
  InconsistentSpec: "No candidate fits those examples together. The last one was not added.",
  InvalidString: "Examples are binary strings like 0010.",
  UnknownUtterance: "That string is outside this task's universe.",
  SignNotAllowed: "This task takes positive examples only.",
  InvalidState: "This task is no longer accepting changes.",
  NotFound: "That item is gone. Reloading the task may help.",
};

export type StartOptions = CreateSessionRequest;

function friendly(err: unknown): string {
  if (err instanceof ApiError) {
    return ERROR_TEXT[err.code] ?? err.message;
  }
  return "The robot is unreachable. Is the server running?";
}

/**
 * One teaching task: target on the left, robot guess on the right.
 * All inference happens server-side; this class only renders responses.
 */
export class PragmexApp {
  private session: SessionView | null = null;
  private latest: GuessUpdate | null = null;
  // mutations run strictly one at a time; later ones wait here
  private tail: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: Client,
  ) {}

  /** Resolves once every queued mutation has finished. */
  whenIdle(): Promise<void> {
    return this.tail.then(() => undefined);
  }

  async start(options: StartOptions): Promise<void> {
    try {
      this.session = await this.client.createSession(options);
    } catch (err) {
      this.session = null;
      this.renderFatal(friendly(err));
      return;
    }
    this.latest = {
      guess: this.session.guess,
      solved: this.session.solved,
      posterior_size: this.session.posterior_size,
    };
    this.renderSkeleton();
    this.renderExamples();
    this.renderGuess();
  }

  // --- queue -----------------------------------------------------------

  private enqueue(op: () => Promise<void>): Promise<void> {
    this.tail = this.tail.then(op).catch((err) => this.showBanner(friendly(err)));
    return this.tail;
  }

  // --- user actions ----------------------------------------------------

  submitExample(): void {
    const input = this.el<HTMLInputElement>("example-input");
    const text = input.value.trim();
    if (!BINARY_RE.test(text)) {
      this.el("input-error").textContent = "Enter a non-empty string of 0s and 1s.";
      return;
    }
    this.el("input-error").textContent = "";
    const sign = this.currentSign();
    input.value = "";
    this.enqueue(async () => {
      const session = this.requireSession();
      this.latest = await this.client.addExample(session.id, text, sign);
      this.session = await this.client.getSession(session.id);
      this.renderExamples();
      this.renderGuess();
    });
  }

  removeExample(example: string, sign: SignValue | null): void {
    this.enqueue(async () => {
      const session = this.requireSession();
      this.latest = await this.client.removeExample(session.id, example, sign ?? undefined);
      this.session = await this.client.getSession(session.id);
      this.renderExamples();
      this.renderGuess();
    });
  }

  pressGuess(): void {
    this.enqueue(async () => {
      const session = this.requireSession();
      this.latest = await this.client.requestGuess(session.id);
      this.renderGuess();
    });
  }

  // --- rendering -------------------------------------------------------

  private requireSession(): SessionView {
    if (!this.session) throw new Error("no active task");
    return this.session;
  }

  private el<T extends HTMLElement = HTMLElement>(id: string): T {
    const found = this.root.querySelector(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  private currentSign(): SignValue | undefined {
    if (this.session?.ui_mode !== "positive_negative") return undefined;
    const select = this.el<HTMLSelectElement>("sign-select");
    return select.value === "-" ? "-" : "+";
  }

  private renderFatal(message: string): void {
    this.root.innerHTML = `<div id="error-banner" class="banner error"></div>`;
    this.el("error-banner").textContent = message;
  }

  private showBanner(message: string): void {
    const banner = this.el("error-banner");
    banner.textContent = message;
    banner.classList.remove("hidden");
  }

  private renderSkeleton(): void {
    const session = this.requireSession();
    const signPicker =
      session.ui_mode === "positive_negative"
        ? `<select id="sign-select" title="example sign">
             <option value="+">+</option>
             <option value="-">&minus;</option>
           </select>`
        : "";
    this.root.innerHTML = `
      <div id="error-banner" class="banner error hidden"></div>
      <div class="panes">
        <section class="pane task-pane">
          <h2>Your target</h2>
          <div id="target-text" class="target-text"></div>
          <p id="target-explanation" class="muted"></p>
          <div class="entry-row">
            <input id="example-input" autocomplete="off" placeholder="e.g. 0010" />
            ${signPicker}
            <button id="add-btn">Add example</button>
          </div>
          <div id="input-error" class="inline-error"></div>
          <ul id="example-list"></ul>
        </section>
        <section class="pane robot-pane">
          <h2><span id="robot-dot" class="dot"></span><span id="robot-name"></span></h2>
          <p class="muted">current guess</p>
          <div id="guess-text" class="guess-text"></div>
          <div id="solved-banner" class="banner solved hidden">Solved! The robot guessed your target.</div>
          <button id="guess-btn">Guess</button>
        </section>
      </div>
    `;
    this.el("target-text").textContent = session.target;
    this.el("target-explanation").textContent = session.target_explanation;
    this.el("robot-name").textContent =
      session.robot === "green" ? "Green robot" : "Blue robot";
    this.el("robot-dot").classList.add(session.robot);
    this.el("error-banner").addEventListener("click", () =>
      this.el("error-banner").classList.add("hidden"),
    );
    this.el("add-btn").addEventListener("click", () => this.submitExample());
    this.el<HTMLInputElement>("example-input").addEventListener("keydown", (ev) => {
      if ((ev as KeyboardEvent).key === "Enter") this.submitExample();
    });
    this.el("guess-btn").addEventListener("click", () => this.pressGuess());
  }

  private renderExamples(): void {
    const session = this.requireSession();
    const list = this.el("example-list");
    list.innerHTML = "";
    for (const ex of session.examples) {
      const item = document.createElement("li");
      const label = document.createElement("span");
      label.textContent =
        ex.sign === null ? ex.string : `${ex.sign === "-" ? "−" : "+"} ${ex.string}`;
      const remove = document.createElement("button");
      remove.className = "remove-btn";
      remove.textContent = "x";
      remove.title = "remove this example";
      remove.addEventListener("click", () => this.removeExample(ex.string, ex.sign));
      item.appendChild(label);
      item.appendChild(remove);
      list.appendChild(item);
    }
  }

  private renderGuess(): void {
    const update = this.latest;
    if (!update) return;
    this.el("guess-text").textContent = update.guess;
    this.el("solved-banner").classList.toggle("hidden", !update.solved);
  }
}
