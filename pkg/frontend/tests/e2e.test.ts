/**
 * Full-stack checks against live engines: the reference gateway with the
 * sample knowledge base, and the scriptable stub for failure shapes. Each
 * engine is a spawned process on an ephemeral port.
 */

import { afterAll, afterEach, beforeAll, describe, expect, test } from "vitest";
import "../src/instant-expert";
import { parts, startGateway, startStub, submitTyped, until, type SpawnedEngine } from "./helpers";

function createElement(attrs: Record<string, string> = {}): HTMLElement {
  const el = document.createElement("instant-expert");
  for (const [name, value] of Object.entries(attrs)) el.setAttribute(name, value);
  document.body.appendChild(el);
  return el;
}

afterEach(() => {
  document.body.innerHTML = "";
});

describe("against the reference gateway", () => {
  let gateway: SpawnedEngine;

  beforeAll(async () => {
    gateway = await startGateway();
  });

  afterAll(() => gateway.stop());

  test("a typed question round-trips to a real answer", async () => {
    const el = createElement({ engine: `${gateway.url}/ask` });
    const { answer } = parts(el);

    submitTyped(el, "What is a flood?");
    await until(() => answer.textContent !== "", 8000);

    expect(answer.classList.contains("ie-error")).toBe(false);
    expect(answer.textContent!.toLowerCase()).toContain("water");
    expect(answer.textContent).not.toContain("do not have an answer");
  });

  test("the live catalog renders grouped and answers on click", async () => {
    const catalog = await fetch(`${gateway.url}/questions`).then((r) => r.json());
    expect(Array.isArray(catalog)).toBe(true);
    expect(catalog.length).toBeGreaterThan(0);

    const el = createElement({ engine: `${gateway.url}/ask` });
    (el as any).setQuestions(catalog);
    const { questions, answer, textbox } = parts(el);

    const headings = [...questions.querySelectorAll("h4")].map((h) => h.textContent);
    expect(new Set(headings).size).toBeGreaterThan(1);
    expect(headings.length).toBe(new Set(headings).size); // grouped, not interleaved

    const first = questions.querySelector("button") as HTMLButtonElement;
    first.click();
    expect(textbox.value).toBe(first.textContent);
    await until(() => answer.textContent !== "", 8000);
    expect(answer.classList.contains("ie-error")).toBe(false);
    expect(answer.textContent).not.toContain("do not have an answer");
  });

  test("an unknown question still yields the configured fallback text", async () => {
    const el = createElement({ engine: `${gateway.url}/ask` });
    const { answer } = parts(el);
    submitTyped(el, "please recite the complete works of shakespeare");
    await until(() => answer.textContent !== "", 8000);
    expect(answer.classList.contains("ie-error")).toBe(false);
    expect(answer.textContent).toContain("do not have an answer");
  });
});

describe("against the scriptable stub", () => {
  test("engineResponseKey reads answers from a renamed member", async () => {
    const stub = await startStub("--mode", "ok", "--answer-key", "answer");
    try {
      const el = createElement({ engine: `${stub.url}/ask`, engineResponseKey: "answer" });
      const { answer } = parts(el);
      submitTyped(el, "ping");
      await until(() => answer.textContent !== "", 8000);
      expect(answer.textContent).toBe("you asked: ping");
    } finally {
      stub.stop();
    }
  });

  test("a stalled engine trips the 2 second budget, not a hang", async () => {
    const stub = await startStub("--mode", "slow"); // replies after ~3 s
    try {
      const el = createElement({ engine: `${stub.url}/ask` });
      const { answer } = parts(el);

      const started = Date.now();
      submitTyped(el, "anything");
      await until(() => answer.textContent !== "", 6000);
      const elapsed = Date.now() - started;

      expect(answer.textContent).toContain("2 seconds");
      expect(answer.classList.contains("ie-error")).toBe(true);
      // must fire at the budget: well before the stub's 3 s reply
      expect(elapsed).toBeGreaterThanOrEqual(1800);
      expect(elapsed).toBeLessThan(2900);
    } finally {
      stub.stop();
    }
  });
});
