import { Client, Robot, UiMode } from "./api.js";
import { PragmexApp } from "./app.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8000";
}

function init(): void {
  const root = document.getElementById("app");
  const startForm = document.getElementById("start-form");
  if (!root || !startForm) return;

  const modeSelect = document.getElementById("mode-select") as HTMLSelectElement;
  const robotSelect = document.getElementById("robot-select") as HTMLSelectElement;
  const startBtn = document.getElementById("start-btn") as HTMLButtonElement;

  startBtn.addEventListener("click", async () => {
    const app = new PragmexApp(root, new Client(apiBase()));
    startForm.classList.add("hidden");
    await app.start({
      ui_mode: modeSelect.value as UiMode,
      robot: robotSelect.value as Robot,
    });
  });
}

init();
