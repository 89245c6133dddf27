// End-to-end: drives the rendered DOM against a real backend process.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, beforeEach, describe, expect, test } from "vitest";

import { ApiError, Client } from "../src/api";
import { PragmexApp } from "../src/app";

let server: ChildProcess;
let base: string;
let client: Client;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function waitForHealth(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`backend did not come up at ${url}`);
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  const dir = mkdtempSync(join(tmpdir(), "pragmex-ui-"));
  const config = join(dir, "server.toml");
  writeFileSync(config, `domain_preset = "demo"\nhost = "127.0.0.1"\nport = ${port}\n`);
  server = spawn("python3", ["-m", "pragmex.cli", "serve", "--config", config], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stderr?.on("data", () => {});
  await waitForHealth(base, 45_000);
  client = new Client(base);
});

afterAll(() => {
  server?.kill();
});

beforeEach(() => {
  document.body.innerHTML = `<div id="app"></div>`;
});

function root(): HTMLElement {
  return document.getElementById("app") as HTMLElement;
}

function byId<T extends HTMLElement>(id: string): T {
  const found = root().querySelector(`#${id}`);
  expect(found, `#${id} should exist`).not.toBeNull();
  return found as T;
}

function listTexts(): string[] {
  return Array.from(root().querySelectorAll("#example-list li span")).map(
    (el) => el.textContent ?? "",
  );
}

async function addThroughUi(app: PragmexApp, text: string): Promise<void> {
  byId<HTMLInputElement>("example-input").value = text;
  byId<HTMLButtonElement>("add-btn").click();
  await app.whenIdle();
}

describe("positive-only task", () => {
  test("solves after 0000 and 0010, reverts on removal, guess is steady", async () => {
    const app = new PragmexApp(root(), client);
    await app.start({ ui_mode: "positive_only", robot: "green", seed: 0, target: "[01]+0+" });

    expect(root().querySelector("#sign-select")).toBeNull();
    expect(byId("target-text").textContent).toBe("[01]+0+");
    expect(byId("target-explanation").textContent).toContain("then");

    await addThroughUi(app, "0000");
    expect(byId("guess-text").textContent).toBe("1*0+1*");
    expect(byId("solved-banner").classList.contains("hidden")).toBe(true);

    await addThroughUi(app, "0010");
    expect(byId("guess-text").textContent).toBe("[01]+0+");
    expect(byId("solved-banner").classList.contains("hidden")).toBe(false);
    expect(listTexts()).toEqual(["0000", "0010"]);

    // explicit Guess presses: identical output, example list untouched
    byId<HTMLButtonElement>("guess-btn").click();
    await app.whenIdle();
    const first = byId("guess-text").textContent;
    byId<HTMLButtonElement>("guess-btn").click();
    await app.whenIdle();
    expect(byId("guess-text").textContent).toBe(first);
    expect(first).toBe("[01]+0+");
    expect(listTexts()).toEqual(["0000", "0010"]);

    // removing the informative example reverts the guess
    const removeButtons = root().querySelectorAll<HTMLButtonElement>(".remove-btn");
    removeButtons[1]?.click();
    await app.whenIdle();
    expect(listTexts()).toEqual(["0000"]);
    expect(byId("guess-text").textContent).toBe("1*0+1*");
    expect(byId("solved-banner").classList.contains("hidden")).toBe(true);
  });

  test("never leaks which listener drives a robot color", async () => {
    const app = new PragmexApp(root(), client);
    await app.start({ ui_mode: "positive_only", robot: "blue", seed: 1 });
    expect(byId("robot-name").textContent).toBe("Blue robot");
    expect(root().innerHTML).not.toMatch(/literal|pragmatic|listener/i);
  });

  test("rejects non-binary input locally, before any request", async () => {
    const app = new PragmexApp(root(), client);
    await app.start({ ui_mode: "positive_only", robot: "green", seed: 0, target: "[01]+0+" });

    const input = byId<HTMLInputElement>("example-input");
    input.value = "abc";
    byId<HTMLButtonElement>("add-btn").click();
    await app.whenIdle();
    expect(byId("input-error").textContent).toContain("0s and 1s");
    expect(input.value).toBe("abc"); // kept for correction, nothing sent
    expect(listTexts()).toEqual([]);

    input.value = "";
    byId<HTMLButtonElement>("add-btn").click();
    await app.whenIdle();
    expect(byId("input-error").textContent).not.toBe("");
    expect(listTexts()).toEqual([]);
  });

  test("duplicate example surfaces a dismissible banner", async () => {
    const app = new PragmexApp(root(), client);
    await app.start({ ui_mode: "positive_only", robot: "green", seed: 0, target: "[01]+0+" });

    await addThroughUi(app, "0000");
    await addThroughUi(app, "0000");
    const banner = byId("error-banner");
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toContain("already in the list");
    expect(listTexts()).toEqual(["0000"]);

    banner.click();
    expect(banner.classList.contains("hidden")).toBe(true);
  });

  test("rapid submissions queue and land in order", async () => {
    const app = new PragmexApp(root(), client);
    await app.start({ ui_mode: "positive_only", robot: "green", seed: 0, target: "[01]*" });

    const input = byId<HTMLInputElement>("example-input");
    input.value = "1100";
    byId<HTMLButtonElement>("add-btn").click();
    input.value = "0000"; // queued while the first request is in flight
    byId<HTMLButtonElement>("add-btn").click();
    await app.whenIdle();

    expect(listTexts()).toEqual(["1100", "0000"]);
    expect(byId("error-banner").classList.contains("hidden")).toBe(true);
  });
});

describe("positive-and-negative task", () => {
  test("shows the sign dropdown and accepts a negative example", async () => {
    const app = new PragmexApp(root(), client);
    await app.start({
      ui_mode: "positive_negative",
      robot: "green",
      seed: 0,
      target: "1*0+1*",
    });

    const select = byId<HTMLSelectElement>("sign-select");
    expect(Array.from(select.options).map((o) => o.value)).toEqual(["+", "-"]);

    select.value = "-";
    await addThroughUi(app, "0010");
    expect(listTexts()).toEqual(["− 0010"]);
    expect(byId("guess-text").textContent).toBe("1*0+1*");
    expect(byId("solved-banner").classList.contains("hidden")).toBe(false);
  });
});

describe("failure handling", () => {
  test("unreachable backend yields an error banner and no task panes", async () => {
    const app = new PragmexApp(root(), new Client("http://127.0.0.1:9"));
    await app.start({ ui_mode: "positive_only", robot: "green" });
    expect(byId("error-banner").textContent).toContain("unreachable");
    expect(root().querySelector(".panes")).toBeNull();
  });

  test("client reports server error codes", async () => {
    await expect(client.getSession("nope")).rejects.toMatchObject({
      name: "ApiError",
      code: "NotFound",
      status: 404,
    });
    await expect(
      client.createSession({ ui_mode: "positive_only", robot: "green", target: "0{3}" }),
    ).rejects.toMatchObject({ code: "UnknownConcept", status: 400 });
    expect(new ApiError("X", "y", 400)).toBeInstanceOf(Error);
  });
});
