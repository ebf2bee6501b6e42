/** Shared test plumbing: process-backed engines and polling waits. */

import { spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
export const repoRoot = resolve(here, "..", "..");

export interface SpawnedEngine {
  url: string;
  stop: () => void;
}

function spawnAndGrabUrl(args: string[], pattern: RegExp): Promise<SpawnedEngine> {
  const child = spawn("python3", args, { cwd: repoRoot });
  let output = "";
  return new Promise((resolveEngine, reject) => {
    const timer = setTimeout(
      () => reject(new Error(`engine never reported its address; output so far:\n${output}`)),
      15000,
    );
    const scan = (chunk: unknown) => {
      output += String(chunk);
      const match = output.match(pattern);
      if (match) {
        clearTimeout(timer);
        resolveEngine({ url: match[1], stop: () => child.kill("SIGINT") });
      }
    };
    child.stdout.on("data", scan);
    child.stderr.on("data", (chunk) => {
      output += String(chunk);
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`engine exited early (${code}):\n${output}`));
    });
  });
}

/** Reference gateway on an ephemeral port, serving the sample knowledge base. */
export function startGateway(): Promise<SpawnedEngine> {
  const dir = mkdtempSync(join(tmpdir(), "instant-expert-"));
  const configPath = join(dir, "gateway.json");
  writeFileSync(
    configPath,
    JSON.stringify({
      bind_address: "127.0.0.1:0",
      kb_path: join(repoRoot, "data", "sample_kb.json"),
      allowed_origins: "*",
    }),
  );
  return spawnAndGrabUrl(
    ["-m", "instant_assist.gateway", "--config", configPath],
    /listening on (http:\/\/[^\s]+)/,
  );
}

/** Scriptable engine stub (see scripts/stub_engine.py for modes). */
export function startStub(...extraArgs: string[]): Promise<SpawnedEngine> {
  return spawnAndGrabUrl(
    ["scripts/stub_engine.py", "--port", "0", ...extraArgs],
    /on (http:\/\/[^\s]+)/,
  );
}

/** Poll until `cond` holds; throws after `timeoutMs`. */
export async function until(cond: () => boolean, timeoutMs = 4000, stepMs = 20): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    if (cond()) return;
    if (Date.now() > deadline) throw new Error("condition not met in time");
    await new Promise((tick) => setTimeout(tick, stepMs));
  }
}

/** The element's internals, fetched fresh from its shadow root. */
export function parts(el: HTMLElement) {
  const root = el.shadowRoot!;
  return {
    root,
    container: root.querySelector(".ie-root") as HTMLElement,
    launcher: root.querySelector(".ie-launcher") as HTMLButtonElement,
    launcherIcon: root.querySelector(".ie-launcher img") as HTMLImageElement,
    panel: root.querySelector(".ie-panel") as HTMLElement,
    logo: root.querySelector(".ie-logo") as HTMLImageElement,
    answer: root.querySelector(".ie-answer") as HTMLElement,
    form: root.querySelector(".ie-form") as HTMLFormElement,
    textbox: root.querySelector(".ie-textbox") as HTMLInputElement,
    mic: root.querySelector(".ie-mic") as HTMLButtonElement,
    questions: root.querySelector(".ie-questions") as HTMLElement,
  };
}

export function submitTyped(el: HTMLElement, text: string): void {
  const { form, textbox } = parts(el);
  textbox.value = text;
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}
