/**
 * <instant-expert>: an embeddable question-answering assistant.
 *
 * A launcher button fixed at the middle-left of the window toggles a panel
 * with a textbox, an optional microphone, and an optional list of example
 * questions. Every input mode funnels into one submit path: the question is
 * POSTed form-urlencoded to the `engine` URL and the answer is read from the
 * JSON reply. Everything renders inside a shadow root so host styles and
 * scripts cannot reach in.
 */

const TAG = "instant-expert";

const DEFAULT_DATA_KEY = "question";
const DEFAULT_RESPONSE_KEY = "resultText";
const DEFAULT_PLACEHOLDER = "Type your question and press enter.";

// The engine must answer within this budget or the request is abandoned.
const REQUEST_TIMEOUT_MS = 2000;
const TIMEOUT_MESSAGE = "No answer arrived within 2 seconds. Please try again.";

const DEFAULT_LOGO =
  "data:image/svg+xml;base64,PHN2ZyB4bWxucz0iaHR0cDovL3d3dy53My5vcmcvMjAwMC9zdmciIHZpZXdCb3g9IjAgMCA0OCA0OCIgd2lkdGg9IjQ4IiBoZWlnaHQ9IjQ4Ij48Y2lyY2xlIGN4PSIyNCIgY3k9IjI0IiByPSIyMiIgZmlsbD0iIzFhNzNlOCIvPjxwYXRoIGQ9Ik0xNCAzMGMyLjUtNSA2LTcuNSAxMC03LjVzNy41IDIuNSAxMCA3LjUiIHN0cm9rZT0iI2ZmZiIgc3Ryb2tlLXdpZHRoPSIzIiBmaWxsPSJub25lIiBzdHJva2UtbGluZWNhcD0icm91bmQiLz48Y2lyY2xlIGN4PSIyNCIgY3k9IjE3IiByPSI1IiBmaWxsPSIjZmZmIi8+PC9zdmc+";

const DEFAULT_LAUNCHER_ICON =
  "data:image/svg+xml;base64,PHN2ZyB4bWxucz0iaHR0cDovL3d3dy53My5vcmcvMjAwMC9zdmciIHZpZXdCb3g9IjAgMCAyNCAyNCIgd2lkdGg9IjI0IiBoZWlnaHQ9IjI0Ij48cGF0aCBmaWxsPSIjZmZmIiBkPSJNNCAzaDE2YTIgMiAwIDAgMSAyIDJ2MTBhMiAyIDAgMCAxLTIgMmgtN2wtNSA0di00SDRhMiAyIDAgMCAxLTItMlY1YTIgMiAwIDAgMSAyLTJ6Ii8+PHBhdGggZmlsbD0iIzFhNzNlOCIgZD0iTTExIDE0aDJ2MmgtMnptMy40LTUuMWMtLjMuNS0uOC45LTEuNCAxLjMtLjcuNC0xIC43LTEgMS4zdi41aC0ydi0uNmMwLTEuMS42LTEuOCAxLjUtMi40LjgtLjUgMS4xLS44IDEuMS0xLjQgMC0uNy0uNi0xLjEtMS40LTEuMS0uOSAwLTEuNS41LTEuNyAxLjNsLTEuOS0uN0M4LjEgNS42IDkuNSA0LjYgMTEuMyA0LjZjMiAwIDMuNSAxLjEgMy41IDIuOSAwIC41LS4xIDEtLjQgMS40eiIvPjwvc3ZnPg==";

export type InputMode = "typed" | "voice" | "list";

export interface QuestionDuplet {
  question: string;
  category: string;
}

/** Accepted by setQuestions: [question, category] tuples or named objects. */
export type QuestionDupletInput = readonly [string, string] | QuestionDuplet;

const template = document.createElement("template");
template.innerHTML = `
  <style>
    * { box-sizing: border-box; }
    .ie-root {
      position: fixed;
      left: 0;
      top: 50%;
      transform: translateY(-50%);
      z-index: 2147483000;
      font-family: system-ui, sans-serif;
      font-size: 14px;
      line-height: 1.4;
    }
    .ie-launcher {
      display: block;
      border: none;
      background: #1a73e8;
      border-radius: 0 8px 8px 0;
      padding: 10px 8px;
      cursor: pointer;
    }
    .ie-launcher img { width: 28px; height: 28px; display: block; }
    .ie-panel {
      position: absolute;
      left: 52px;
      top: 50%;
      transform: translateY(-50%);
      width: 320px;
      max-height: 70vh;
      overflow: hidden;
      display: flex;
      flex-direction: column;
      gap: 8px;
      background: #fff;
      color: #202124;
      border: 1px solid #dadce0;
      border-radius: 8px;
      box-shadow: 0 4px 16px rgba(0, 0, 0, 0.2);
      padding: 12px;
    }
    .ie-panel[hidden] { display: none; }
    .ie-logo { height: 44px; align-self: center; }
    .ie-logo[hidden] { display: none; }
    .ie-answer { min-height: 2.5em; white-space: pre-wrap; overflow-wrap: anywhere; }
    .ie-answer.ie-error { color: #c5221f; }
    .ie-form { display: flex; gap: 6px; }
    .ie-textbox { flex: 1; padding: 6px 8px; border: 1px solid #dadce0; border-radius: 4px; }
    .ie-mic { border: none; background: none; cursor: pointer; font-size: 18px; padding: 0 4px; }
    .ie-mic[hidden] { display: none; }
    .ie-questions { overflow-y: auto; }
    .ie-questions[hidden] { display: none; }
    .ie-questions h4 {
      margin: 8px 0 4px;
      font-size: 12px;
      text-transform: uppercase;
      letter-spacing: 0.04em;
      color: #5f6368;
    }
    .ie-questions ul { margin: 0; padding: 0; list-style: none; }
    .ie-questions li button {
      display: block;
      width: 100%;
      text-align: left;
      background: none;
      border: none;
      padding: 4px 2px;
      cursor: pointer;
      color: #1a73e8;
      font: inherit;
    }
    .ie-questions li button:hover { text-decoration: underline; }
    .ie-empty { color: #5f6368; font-style: italic; margin: 4px 0; }
  </style>
  <div class="ie-root" style="contain: content">
    <button class="ie-launcher" type="button" aria-label="Toggle assistant">
      <img alt="" />
    </button>
    <section class="ie-panel" hidden>
      <img class="ie-logo" alt="" />
      <div class="ie-answer" role="status" aria-live="polite"></div>
      <form class="ie-form">
        <input class="ie-textbox" type="text" autocomplete="off" name="question-text" />
        <button class="ie-mic" type="button" aria-label="Ask by voice" hidden>\u{1F3A4}</button>
      </form>
      <nav class="ie-questions"></nav>
    </section>
  </div>
`;

function speechRecognitionCtor(): any {
  const w = window as any;
  return w.SpeechRecognition || w.webkitSpeechRecognition || null;
}

export class InstantExpertElement extends HTMLElement {
  static get observedAttributes(): string[] {
    return [
      "logo-src",
      "logo-hidden",
      "textbox-placeholder",
      "expert-button-src",
      "no-voice",
      "no-question-list",
    ];
  }

  private readonly panel: HTMLElement;
  private readonly launcherIcon: HTMLImageElement;
  private readonly logo: HTMLImageElement;
  private readonly answerBox: HTMLElement;
  private readonly textbox: HTMLInputElement;
  private readonly mic: HTMLButtonElement;
  private readonly questionsNav: HTMLElement;

  private duplets: QuestionDuplet[] = [];
  private inflight: AbortController | null = null;
  private warnedInsecure = false;

  constructor() {
    super();
    const root = this.attachShadow({ mode: "open" });
    root.appendChild(template.content.cloneNode(true));

    this.panel = root.querySelector(".ie-panel") as HTMLElement;
    this.launcherIcon = root.querySelector(".ie-launcher img") as HTMLImageElement;
    this.logo = root.querySelector(".ie-logo") as HTMLImageElement;
    this.answerBox = root.querySelector(".ie-answer") as HTMLElement;
    this.textbox = root.querySelector(".ie-textbox") as HTMLInputElement;
    this.mic = root.querySelector(".ie-mic") as HTMLButtonElement;
    this.questionsNav = root.querySelector(".ie-questions") as HTMLElement;

    const launcher = root.querySelector(".ie-launcher") as HTMLButtonElement;
    launcher.addEventListener("click", () => {
      this.panel.hidden = !this.panel.hidden;
    });

    const form = root.querySelector(".ie-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(this.textbox.value, "typed");
    });

    this.mic.addEventListener("click", () => this.startVoiceCapture());
    this.syncFromAttributes();
  }

  connectedCallback(): void {
    this.syncFromAttributes();
  }

  attributeChangedCallback(): void {
    this.syncFromAttributes();
  }

  /** Form field name the question is sent under. */
  get dataKey(): string {
    return this.getAttribute("engineDataKey") || DEFAULT_DATA_KEY;
  }

  /** JSON member the answer is read from. */
  get responseKey(): string {
    return this.getAttribute("engineResponseKey") || DEFAULT_RESPONSE_KEY;
  }

  /**
   * Populate the example-question list from (question, category) duplets.
   * Groups follow each category's first appearance; malformed duplets are
   * skipped with a console warning.
   */
  setQuestions(duplets: readonly QuestionDupletInput[]): void {
    const cleaned: QuestionDuplet[] = [];
    for (const duplet of duplets ?? []) {
      let question: unknown;
      let category: unknown;
      if (Array.isArray(duplet)) {
        [question, category] = duplet;
      } else if (duplet && typeof duplet === "object") {
        ({ question, category } = duplet as QuestionDuplet);
      }
      if (
        typeof question === "string" && question.trim() !== "" &&
        typeof category === "string" && category.trim() !== ""
      ) {
        cleaned.push({ question: question.trim(), category: category.trim() });
      } else {
        console.warn(`<${TAG}> skipping malformed question duplet:`, duplet);
      }
    }
    this.duplets = cleaned;
    this.renderQuestions();
  }

  /** One path for every input mode; exactly one request per submission. */
  private async submit(raw: string, mode: InputMode): Promise<void> {
    const question = raw.trim();
    if (question === "") return;
    const engine = this.getAttribute("engine");
    if (!engine) {
      this.showNotice('No engine is configured. Set the "engine" attribute to your webhook URL.');
      return;
    }

    this.inflight?.abort(); // a newer question supersedes the previous one
    const controller = new AbortController();
    this.inflight = controller;
    const timer = setTimeout(() => controller.abort(), REQUEST_TIMEOUT_MS);

    try {
      const response = await fetch(engine, {
        method: "POST",
        headers: { "Content-Type": "application/x-www-form-urlencoded" },
        body: new URLSearchParams({ [this.dataKey]: question }).toString(),
        signal: controller.signal,
      });
      if (!response.ok) {
        this.showNotice(`The engine answered with HTTP ${response.status}.`);
        return;
      }
      let payload: unknown;
      try {
        payload = await response.json();
      } catch {
        this.showNotice("The engine's reply was not JSON.");
        return;
      }
      const answer =
        payload && typeof payload === "object"
          ? (payload as Record<string, unknown>)[this.responseKey]
          : undefined;
      if (typeof answer !== "string" || answer === "") {
        this.showNotice(`The engine's reply carried no text under "${this.responseKey}".`);
        return;
      }
      this.showAnswer(answer);
      if (mode === "voice") this.speak(answer);
    } catch {
      if (controller !== this.inflight) return; // superseded; the newer request owns the UI
      this.showNotice(controller.signal.aborted ? TIMEOUT_MESSAGE : "Could not reach the engine.");
    } finally {
      clearTimeout(timer);
      if (this.inflight === controller) this.inflight = null;
    }
  }

  private startVoiceCapture(): void {
    const Recognition = speechRecognitionCtor();
    if (!Recognition) return; // mic is hidden in this case, belt and suspenders
    const recognition = new Recognition();
    recognition.continuous = false;
    recognition.interimResults = false;
    recognition.maxAlternatives = 1;
    recognition.onresult = (event: any) => {
      const transcript: string = event.results?.[0]?.[0]?.transcript ?? "";
      if (!transcript) return;
      this.textbox.value = transcript;
      void this.submit(transcript, "voice");
    };
    recognition.onerror = () => {
      this.showNotice("Voice input failed. Type your question instead.");
    };
    try {
      recognition.start();
    } catch {
      // start() throws if a capture is already running; ignore the re-press
    }
  }

  private speak(text: string): void {
    const w = window as any;
    if (!w.speechSynthesis || !w.SpeechSynthesisUtterance) return;
    w.speechSynthesis.speak(new w.SpeechSynthesisUtterance(text));
  }

  private voiceAvailable(): boolean {
    if (this.hasAttribute("no-voice")) return false;
    if (!speechRecognitionCtor()) return false;
    if (window.isSecureContext !== true) {
      if (!this.warnedInsecure) {
        this.warnedInsecure = true;
        console.warn(`<${TAG}> voice input disabled: page is not a secure context`);
      }
      return false;
    }
    return true;
  }

  private syncFromAttributes(): void {
    this.logo.src = this.getAttribute("logo-src") || DEFAULT_LOGO;
    this.logo.hidden = this.hasAttribute("logo-hidden");
    this.launcherIcon.src = this.getAttribute("expert-button-src") || DEFAULT_LAUNCHER_ICON;
    this.textbox.placeholder = this.getAttribute("textbox-placeholder") || DEFAULT_PLACEHOLDER;
    this.mic.hidden = !this.voiceAvailable();
    this.renderQuestions();
  }

  private renderQuestions(): void {
    if (this.hasAttribute("no-question-list")) {
      this.questionsNav.hidden = true;
      this.questionsNav.textContent = "";
      return;
    }
    this.questionsNav.hidden = false;
    this.questionsNav.textContent = "";

    if (this.duplets.length === 0) {
      const empty = document.createElement("p");
      empty.className = "ie-empty";
      empty.textContent = "No example questions yet.";
      this.questionsNav.appendChild(empty);
      return;
    }

    const groups = new Map<string, QuestionDuplet[]>();
    for (const duplet of this.duplets) {
      const group = groups.get(duplet.category);
      if (group) group.push(duplet);
      else groups.set(duplet.category, [duplet]);
    }
    for (const [category, items] of groups) {
      const heading = document.createElement("h4");
      heading.textContent = category;
      this.questionsNav.appendChild(heading);
      const list = document.createElement("ul");
      for (const { question } of items) {
        const item = document.createElement("li");
        const button = document.createElement("button");
        button.type = "button";
        button.textContent = question;
        button.addEventListener("click", () => {
          this.textbox.value = question;
          void this.submit(question, "list");
        });
        item.appendChild(button);
        list.appendChild(item);
      }
      this.questionsNav.appendChild(list);
    }
  }

  private showAnswer(text: string): void {
    this.answerBox.classList.remove("ie-error");
    this.answerBox.textContent = text;
  }

  private showNotice(text: string): void {
    this.answerBox.classList.add("ie-error");
    this.answerBox.textContent = text;
  }
}

if (!customElements.get(TAG)) {
  customElements.define(TAG, InstantExpertElement);
}
