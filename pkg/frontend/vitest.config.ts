import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // the suite boots a real backend process
    testTimeout: 30_000,
    hookTimeout: 60_000,
    fileParallelism: false,
  },
});
